"""Input layer: raw player events, deterministic intent classification, and
pluggable text generation.

Everything here is stateless; cooldown tracking for matched player actions
lives in the engine. The default and canned generators are pure functions of
their inputs so the whole system stays byte-deterministic; the remote
generator is an adapter for an external completion endpoint and is never
exercised by the test suite's deterministic paths.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from typing import Any, Mapping, Protocol

import httpx

from .model import Position, PlayerActionDef

# look-at requires the target within this half-angle cone of the gaze
# direction, so "looking at" is distinguishable from "standing near".
LOOK_AT_CONE_DEG = 30.0

GEN_URL_ENV = "CAUSALDECK_GEN_URL"
GEN_KEY_ENV = "CAUSALDECK_GEN_KEY"
GEN_TIMEOUT_S = 5.0

_TOKEN_RE = re.compile(r"[a-z0-9']+")


class GenerationError(Exception):
    """A text generator could not produce an utterance."""


class RemoteFailure(GenerationError):
    """The external generator endpoint failed (timeout, HTTP error, bad body)."""


@dataclass(frozen=True)
class RawInputEvent:
    """One raw player input. Exactly one of the method-specific field groups
    is meaningful, selected by ``method``."""

    tick: int
    method: str  # "device" | "language" | "gesture"
    symbol: str | None = None
    utterance: str | None = None
    gesture: str | None = None
    position: Position | None = None  # player position at the event
    target: str | None = None
    gaze: tuple[float, float, float] | None = None

    @staticmethod
    def device(tick: int, symbol: str) -> "RawInputEvent":
        return RawInputEvent(tick=tick, method="device", symbol=symbol)

    @staticmethod
    def language(tick: int, utterance: str) -> "RawInputEvent":
        return RawInputEvent(tick=tick, method="language", utterance=utterance)

    @staticmethod
    def body(tick: int, gesture: str, position: Position,
             target: str | None = None,
             gaze: tuple[float, float, float] | None = None) -> "RawInputEvent":
        return RawInputEvent(tick=tick, method="gesture", gesture=gesture,
                             position=position, target=target, gaze=gaze)


def classify_intent(utterance: str, lexicon: Mapping[str, list[str]]) -> str | None:
    """Pick the lexicon category with the most keyword hits.

    Each keyword counts at most once; single words match whole tokens and
    multi-word phrases match on the normalized token stream. Ties break by
    category name; no hits at all yields None. Case-insensitive.
    """
    tokens = _TOKEN_RE.findall(utterance.lower())
    if not tokens:
        return None
    token_set = set(tokens)
    stream = " " + " ".join(tokens) + " "
    best: tuple[int, str] | None = None
    for category in sorted(lexicon):
        hits = 0
        for keyword in lexicon[category]:
            if " " in keyword:
                if f" {keyword} " in stream:
                    hits += 1
            elif keyword in token_set:
                hits += 1
        if hits > 0 and (best is None or hits > best[0]):
            best = (hits, category)
    return best[1] if best else None


def _within_cone(origin: Position, gaze: tuple[float, float, float], target: Position) -> bool:
    to_target = (target.x - origin.x, target.y - origin.y, target.z - origin.z)
    dist = math.sqrt(sum(c * c for c in to_target))
    gaze_len = math.sqrt(sum(c * c for c in gaze))
    if dist == 0.0 or gaze_len == 0.0:
        return True
    cos_angle = sum(a * b for a, b in zip(gaze, to_target)) / (gaze_len * dist)
    return cos_angle >= math.cos(math.radians(LOOK_AT_CONE_DEG))


def evaluate_bindings(
    ev: RawInputEvent,
    defs: list[PlayerActionDef],
    positions: Mapping[str, Position],
    lexicon: Mapping[str, list[str]] | None = None,
) -> tuple[list[str], list[tuple[str, str]]]:
    """Match an event against player action definitions.

    Returns (matched action ids in id order, rejections as (id, reason) for
    bindings of the right method that failed a gate). ``positions`` maps live
    agent ids to positions for gesture distance checks.
    """
    lexicon = lexicon or {}
    matched: list[str] = []
    rejected: list[tuple[str, str]] = []
    intent = classify_intent(ev.utterance or "", lexicon) if ev.method == "language" else None

    for d in sorted(defs, key=lambda d: d.id):
        b = d.binding
        if b.method != ev.method:
            continue
        if ev.method == "device":
            if b.symbol == ev.symbol:
                matched.append(d.id)
            else:
                rejected.append((d.id, "symbol-mismatch"))
        elif ev.method == "language":
            if b.mode == "prompt":
                matched.append(d.id)
            elif intent == b.category:
                matched.append(d.id)
            else:
                rejected.append((d.id, "intent-mismatch"))
        else:
            if b.gesture != ev.gesture:
                rejected.append((d.id, "gesture-mismatch"))
                continue
            if b.target is not None and b.target != ev.target:
                rejected.append((d.id, "target-mismatch"))
                continue
            target_pos = positions.get(b.target or ev.target or "")
            if b.distance is not None:
                if ev.position is None or target_pos is None:
                    rejected.append((d.id, "out-of-range"))
                    continue
                dx = ev.position.x - target_pos.x
                dy = ev.position.y - target_pos.y
                dz = ev.position.z - target_pos.z
                if math.sqrt(dx * dx + dy * dy + dz * dz) > b.distance:
                    rejected.append((d.id, "out-of-range"))
                    continue
            if (b.gesture == "look-at" and ev.gaze is not None
                    and ev.position is not None and target_pos is not None
                    and not _within_cone(ev.position, ev.gaze, target_pos)):
                rejected.append((d.id, "gaze-outside-cone"))
                continue
            matched.append(d.id)
    return matched, rejected


def match_bindings(
    ev: RawInputEvent,
    defs: list[PlayerActionDef],
    positions: Mapping[str, Position],
    lexicon: Mapping[str, list[str]] | None = None,
) -> list[str]:
    """Action ids activated by an event, ordered by id."""
    return evaluate_bindings(ev, defs, positions, lexicon)[0]


class TextGenerator(Protocol):
    def generate(self, prompt: str, persona: Mapping[str, Any]) -> str: ...


class _PersonaMap(dict):
    def __missing__(self, key: str) -> str:
        return "{" + key + "}"


class TemplateGenerator:
    """Default generator: substitutes persona attributes into the prompt.

    Unknown placeholders are left verbatim so authoring mistakes are visible
    in the spoken text rather than raising.
    """

    def generate(self, prompt: str, persona: Mapping[str, Any]) -> str:
        return prompt.format_map(_PersonaMap({k: str(v) for k, v in persona.items()}))


class CannedGenerator:
    """Test fake: a fixed prompt-to-response table."""

    def __init__(self, responses: Mapping[str, str]):
        self.responses = dict(responses)

    def generate(self, prompt: str, persona: Mapping[str, Any]) -> str:
        try:
            return self.responses[prompt]
        except KeyError:
            raise GenerationError(f"no canned response for prompt {prompt!r}") from None


class RemoteGenerator:
    """Adapter for a remote completion endpoint.

    POSTs {"prompt", "persona"} to the configured URL and expects a JSON body
    with a "text" field. URL and credential default to the CAUSALDECK_GEN_URL
    / CAUSALDECK_GEN_KEY environment variables.
    """

    def __init__(self, url: str | None = None, key: str | None = None,
                 timeout: float = GEN_TIMEOUT_S):
        self.url = url if url is not None else os.environ.get(GEN_URL_ENV, "")
        self.key = key if key is not None else os.environ.get(GEN_KEY_ENV, "")
        self.timeout = timeout

    def generate(self, prompt: str, persona: Mapping[str, Any]) -> str:
        if not self.url:
            raise RemoteFailure(f"no generator endpoint configured ({GEN_URL_ENV} unset)")
        headers = {"Authorization": f"Bearer {self.key}"} if self.key else {}
        try:
            resp = httpx.post(self.url, json={"prompt": prompt, "persona": dict(persona)},
                              headers=headers, timeout=self.timeout)
            resp.raise_for_status()
            text = resp.json().get("text")
        except httpx.HTTPError as exc:
            raise RemoteFailure(f"generator endpoint failed: {exc}") from exc
        except ValueError as exc:
            raise RemoteFailure("generator endpoint returned a non-JSON body") from exc
        if not isinstance(text, str):
            raise RemoteFailure("generator endpoint response lacks a 'text' field")
        return text


def generate_utterance(gen: TextGenerator, prompt: str, persona: Mapping[str, Any]) -> str:
    """Run a generator; raises GenerationError / RemoteFailure on failure."""
    return gen.generate(prompt, persona)
