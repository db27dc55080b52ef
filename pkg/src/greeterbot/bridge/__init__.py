"""Tablet web bridge: caption page, processing page, typed-input back-channel."""

from greeterbot.bridge.core import (
    BLANK,
    CAPTION_SECONDS,
    MODE_BLANK,
    MODE_CAPTION,
    MODE_INPUT,
    MODE_PROCESSING,
    PROCESSING_TEXT,
    BackchannelMessage,
    Bridge,
    TabletPage,
)
from greeterbot.bridge.server import BridgeServer

__all__ = [
    "BLANK",
    "BackchannelMessage",
    "Bridge",
    "BridgeServer",
    "CAPTION_SECONDS",
    "MODE_BLANK",
    "MODE_CAPTION",
    "MODE_INPUT",
    "MODE_PROCESSING",
    "PROCESSING_TEXT",
    "TabletPage",
]
