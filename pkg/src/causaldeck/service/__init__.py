"""Session service: WebSocket protocol plus one-shot HTTP endpoints."""

from .app import DEFAULT_HOST, DEFAULT_PORT, create_app, run_server, snapshot_doc
from .models import PROTOCOL_VERSION

__all__ = ["DEFAULT_HOST", "DEFAULT_PORT", "PROTOCOL_VERSION",
           "create_app", "run_server", "snapshot_doc"]
