"""Streaming transcription client, mock server, latency model, and intent matching."""

from greeterbot.asr.client import RemoteError, TransportError, stream_transcribe, transcribe_whole
from greeterbot.asr.intent import ENROLL, GOTO, HUG, MOVE, UNKNOWN, Intent, KeywordRule, match_intent
from greeterbot.asr.latency import LatencyParams, Mode, measure_latency, simulate_latency
from greeterbot.asr.protocol import Transcript
from greeterbot.asr.server import MockAsrServer, ServerDelays, fingerprint, load_fixtures, serve_mock

__all__ = [
    "ENROLL", "GOTO", "HUG", "MOVE", "UNKNOWN",
    "Intent", "KeywordRule", "LatencyParams", "Mode", "MockAsrServer",
    "RemoteError", "ServerDelays", "Transcript", "TransportError",
    "fingerprint", "load_fixtures", "match_intent", "measure_latency",
    "serve_mock", "simulate_latency", "stream_transcribe", "transcribe_whole",
]
