"""Simulated robot, world, clock, and event bus."""

from greeterbot.simworld.clock import SimClock, WallClock
from greeterbot.simworld.events import (
    HALTED,
    HAND_TOUCHED,
    HUG_PERFORMED,
    LED_STATE,
    NAV_GOAL,
    PICTURE_TAKEN,
    REFUSED,
    SESSION_EVENT_KINDS,
    TTS_SAID,
    EventBus,
    SessionEvent,
    Subscription,
)
from greeterbot.simworld.world import (
    LED_PATTERN,
    LED_TOGGLE_PERIOD,
    MapError,
    World,
    WorldState,
    ground_truth_scan,
    load_map,
    raycast,
    raycast_batch,
    render_depth,
)

__all__ = [
    "EventBus",
    "HALTED",
    "HAND_TOUCHED",
    "HUG_PERFORMED",
    "LED_PATTERN",
    "LED_STATE",
    "LED_TOGGLE_PERIOD",
    "MapError",
    "NAV_GOAL",
    "PICTURE_TAKEN",
    "REFUSED",
    "SESSION_EVENT_KINDS",
    "SessionEvent",
    "SimClock",
    "Subscription",
    "TTS_SAID",
    "WallClock",
    "World",
    "WorldState",
    "ground_truth_scan",
    "load_map",
    "raycast",
    "raycast_batch",
    "render_depth",
]
