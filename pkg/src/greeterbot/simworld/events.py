"""Session events and the broadcast bus.

Publishers append; every subscriber sees every event in emission order.
Events are totally ordered by (timestamp, emission sequence).
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field

HAND_TOUCHED = "HandTouched"
LED_STATE = "LedState"
TTS_SAID = "TtsSaid"
PICTURE_TAKEN = "PictureTaken"
NAV_GOAL = "NavGoal"
HALTED = "Halted"
REFUSED = "Refused"
HUG_PERFORMED = "HugPerformed"

SESSION_EVENT_KINDS = (
    HAND_TOUCHED, LED_STATE, TTS_SAID, PICTURE_TAKEN,
    NAV_GOAL, HALTED, REFUSED, HUG_PERFORMED,
)


@dataclass(frozen=True)
class SessionEvent:
    at: float
    kind: str
    data: dict = field(default_factory=dict)
    seq: int = 0

    def to_json(self) -> str:
        return json.dumps({"at": self.at, "kind": self.kind, **self.data})


class Subscription:
    def __init__(self, bus: "EventBus"):
        self._bus = bus
        self._cursor = 0

    def poll(self) -> list[SessionEvent]:
        """All events emitted since the last poll."""
        events = self._bus.events_since(self._cursor)
        self._cursor += len(events)
        return events


class EventBus:
    def __init__(self):
        self._events: list[SessionEvent] = []
        self._lock = threading.Lock()

    def emit(self, at: float, kind: str, **data) -> SessionEvent:
        with self._lock:
            event = SessionEvent(at, kind, data, seq=len(self._events))
            self._events.append(event)
            return event

    def subscribe(self) -> Subscription:
        return Subscription(self)

    def events_since(self, cursor: int) -> list[SessionEvent]:
        with self._lock:
            return self._events[cursor:]

    def all_events(self) -> list[SessionEvent]:
        return self.events_since(0)

    def of_kind(self, kind: str) -> list[SessionEvent]:
        return [e for e in self.all_events() if e.kind == kind]
