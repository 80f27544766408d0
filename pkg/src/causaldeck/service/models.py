"""Pydantic message and endpoint models for the session service.

Wire envelope: ``{"id": <client request id>, "type": <message type>,
"body": {...}}``. Every client message gets exactly one reply correlated by
id; event pushes use type "events" with a null id.
"""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field

from ..inputs import RawInputEvent
from ..model import Position

PROTOCOL_VERSION = "1"

AnalysisKind = Literal["chains", "cycles", "reach", "spatialmap"]


class Envelope(BaseModel):
    id: str | int | None = None
    type: str
    body: dict[str, Any] = Field(default_factory=dict)


class EventBody(BaseModel):
    """One raw player input event as transported on the wire."""

    tick: int = 0
    method: Literal["device", "language", "gesture"]
    symbol: str | None = None
    utterance: str | None = None
    gesture: str | None = None
    position: list[float] | None = None
    target: str | None = None
    gaze: list[float] | None = None

    def to_event(self, tick: int | None = None) -> RawInputEvent:
        return RawInputEvent(
            tick=self.tick if tick is None else tick,
            method=self.method,
            symbol=self.symbol,
            utterance=self.utterance,
            gesture=self.gesture,
            position=Position(*self.position) if self.position is not None else None,
            target=self.target,
            gaze=tuple(self.gaze) if self.gaze is not None else None,
        )


class LoadBody(BaseModel):
    scenario: dict[str, Any] | str
    seed: int | None = None
    session: str | None = None  # register a named shared session


class StepBody(BaseModel):
    n: int = Field(1, ge=1)


class SnapshotBody(BaseModel):
    session: str | None = None  # observe a named session read-only


class RunTraceBody(BaseModel):
    trace: list[EventBody] = Field(default_factory=list)
    horizon: int = Field(..., ge=0)
    seed: int | None = None


class AnalyzeBody(BaseModel):
    kind: AnalysisKind
    cell: float = 1.0
    session: str | None = None


class DiagnosticModel(BaseModel):
    severity: str
    code: str
    location: str
    message: str


# one-shot HTTP endpoint models


class ScenarioRequest(BaseModel):
    scenario: dict[str, Any] | str


class ValidateResponse(BaseModel):
    ok: bool
    errors: int
    warnings: int
    diagnostics: list[DiagnosticModel]


class RunRequest(ScenarioRequest):
    trace: list[EventBody] = Field(default_factory=list)
    horizon: int = Field(..., ge=0)
    seed: int | None = None


class AnalyzeRequest(ScenarioRequest):
    kind: AnalysisKind
    cell: float = 1.0
