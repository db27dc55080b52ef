"""Keyword-based command understanding over transcripts.

Whole-token, case-insensitive matching; the rule with the largest matched
keyword set wins, ties broken by table order. Rules may capture a trailing
place name or a direction word.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from greeterbot.asr.protocol import Transcript

HUG = "hug"
ENROLL = "enroll"
GOTO = "goto"
MOVE = "move"
UNKNOWN = "unknown"

_ARTICLES = {"the", "a", "an"}
_DIRECTIONS = {"forward", "back", "backward", "backwards", "left", "right"}


@dataclass(frozen=True)
class Intent:
    kind: str = UNKNOWN
    place: str | None = None
    direction: str | None = None
    matched_keywords: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind != UNKNOWN and not self.matched_keywords:
            raise ValueError("matched intents must carry their keywords")


@dataclass(frozen=True)
class KeywordRule:
    keywords: frozenset[str]
    kind: str
    capture: str | None = None  # "place" | "direction"


DEFAULT_TABLE: list[KeywordRule] = [
    KeywordRule(frozenset({"hug"}), HUG),
    KeywordRule(frozenset({"add", "person"}), ENROLL),
    KeywordRule(frozenset({"enroll"}), ENROLL),
    KeywordRule(frozenset({"new", "user"}), ENROLL),
    KeywordRule(frozenset({"go", "to"}), GOTO, capture="place"),
    KeywordRule(frozenset({"move"}), MOVE, capture="direction"),
]


def tokenize(text: str) -> list[str]:
    return re.findall(r"[a-z0-9']+", text.lower())


def _capture_place(tokens: list[str], keywords: frozenset[str]) -> str | None:
    last = max((i for i, t in enumerate(tokens) if t in keywords), default=-1)
    rest = [t for t in tokens[last + 1:]]
    while rest and rest[0] in _ARTICLES:
        rest.pop(0)
    return " ".join(rest) if rest else None


def _capture_direction(tokens: list[str]) -> str | None:
    for t in tokens:
        if t in _DIRECTIONS:
            return "back" if t.startswith("backward") else t
    return None


def match_intent(transcript: Transcript | str,
                 table: list[KeywordRule] = DEFAULT_TABLE) -> Intent:
    """Best-matching intent for a transcript, or the Unknown intent."""
    text = transcript.text if isinstance(transcript, Transcript) else transcript
    tokens = tokenize(text)
    token_set= set(tokens)

    best: Intent | None = None
    best_size = 0
    for rule in table:
        if not rule.keywords <= token_set:
            continue
        place = direction = None
        if rule.capture == "place":
            place = _capture_place(tokens, rule.keywords)
            if place is None:
                continue
        elif rule.capture == "direction":
            direction = _capture_direction(tokens)
            if direction is None:
                continue
        if len(rule.keywords) > best_size:
            best_size = len(rule.keywords)
            best = Intent(rule.kind, place, direction,
                          tuple(sorted(rule.keywords)))
    return best if best is not None else Intent()
