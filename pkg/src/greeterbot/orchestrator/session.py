"""The session state machine.

handle_event is a pure transition function: it consumes world events and
service-result events and returns the next state plus a list of actions for
the runner to execute. Commands run only for recognized trusted users; an
unrecognized face is refused outright. The machine is total: any event not
named for a state self-loops with no actions, and service failures always
land back in Idle.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from greeterbot.asr.intent import ENROLL, GOTO, HUG, MOVE, UNKNOWN, Intent, match_intent
from greeterbot.asr.protocol import Transcript
from greeterbot.simworld.events import HAND_TOUCHED, SessionEvent

# states
IDLE = "Idle"
LISTENING = "Listening"
PROCESSING_AUDIO = "ProcessingAudio"
IDENTIFYING = "Identifying"
EXECUTING = "Executing"
AWAITING_NAME = "AwaitingName"
AWAITING_PICTURE = "AwaitingPicture"
REFUSING = "Refusing"

STATES = (IDLE, LISTENING, PROCESSING_AUDIO, IDENTIFYING, EXECUTING,
          AWAITING_NAME, AWAITING_PICTURE, REFUSING)

# service-result events (internal alphabet, alongside the world events)
EV_ENDPOINT_STOP = "EndpointStop"
EV_TRANSCRIPT = "TranscriptReady"
EV_IDENTITY = "IdentityResolved"
EV_TEXT_INPUT = "TextInput"
EV_TEXT_TIMEOUT = "TextInputTimeout"
EV_PICTURE = "PictureCaptured"
EV_ENROLL_DONE = "EnrollDone"
EV_ENROLL_FAILED = "EnrollFailed"
EV_NAV_DONE = "NavDone"
EV_SERVICE_ERROR = "ServiceError"
EV_DONE = "Done"

INTERNAL_EVENT_KINDS = (
    EV_ENDPOINT_STOP, EV_TRANSCRIPT, EV_IDENTITY, EV_TEXT_INPUT, EV_TEXT_TIMEOUT,
    EV_PICTURE, EV_ENROLL_DONE, EV_ENROLL_FAILED, EV_NAV_DONE, EV_SERVICE_ERROR, EV_DONE,
)

# actions
ACT_START_LISTENING = "start_listening"
ACT_STOP_LISTENING = "stop_listening"
ACT_SHOW_PROCESSING = "show_processing"
ACT_CLEAR_PAGE = "clear_page"
ACT_SAY = "say"
ACT_CAPTURE = "capture_picture"       # data: purpose = identify | enroll
ACT_QUERY_FACES = "query_faces"
ACT_REQUEST_INPUT = "request_input"   # data: prompt
ACT_ENROLL = "enroll_face"            # data: label
ACT_NAV_GOTO = "nav_goto"             # data: place
ACT_MOVE = "move"                     # data: direction
ACT_PERFORM_HUG = "perform_hug"
ACT_EMIT_REFUSED = "emit_refused"
ACT_FINISH = "finish"                 # transient states re-enter Idle


@dataclass(frozen=True)
class Action:
    kind: str
    data: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SessionState:
    state: str = IDLE
    transcript: Transcript | None = None
    intent: Intent | None = None
    identity: str | None = None
    pending_label: str | None = None


SAY_REPHRASE = "Sorry, I did not catch a command. Could you rephrase your request?"
SAY_REFUSE = "I am sorry, I do not recognize you, so I cannot do that."
SAY_HUG = "Here is a hug!"
SAY_ASK_NAME = "Please type the new person's name on my tablet."
SAY_LOOK = "Thank you. New friend, please look at my camera."
SAY_ARRIVED = "We have arrived."
SAY_NO_ROUTE = "I could not reach that place."
SAY_ERROR = "Something went wrong, please try again."
SAY_NAME_TIMEOUT = "I did not receive a name, so I will stop the enrollment."
SAY_NAME_EMPTY = "I need a name to enroll someone."
SAY_ENROLL_NO_FACE = "I could not see a face, so the enrollment failed."


def say(text: str) -> Action:
    return Action(ACT_SAY, {"text": text})


def handle_event(s: SessionState, event: SessionEvent) -> tuple[SessionState, list[Action]]:
    kind = event.kind
    data = event.data

    if kind == EV_SERVICE_ERROR:
        return SessionState(), [say(SAY_ERROR)]

    if s.state == IDLE:
        if kind == HAND_TOUCHED:
            return SessionState(LISTENING), [Action(ACT_START_LISTENING)]

    elif s.state == LISTENING:
        if kind == EV_ENDPOINT_STOP:
            return replace(s, state=PROCESSING_AUDIO), [
                Action(ACT_STOP_LISTENING),
                Action(ACT_SHOW_PROCESSING),
            ]

    elif s.state == PROCESSING_AUDIO:
        if kind == EV_TRANSCRIPT:
            transcript: Transcript = data["transcript"]
            intent = match_intent(transcript)
            if intent.kind == UNKNOWN:
                return SessionState(), [say(SAY_REPHRASE)]
            return SessionState(IDENTIFYING, transcript=transcript, intent=intent), [
                Action(ACT_CLEAR_PAGE),
                Action(ACT_CAPTURE, {"purpose": "identify"}),
                Action(ACT_QUERY_FACES),
            ]

    elif s.state == IDENTIFYING:
        if kind == EV_IDENTITY:
            label = data.get("label")
            if label is None:
                return replace(s, state=REFUSING, identity=None), [
                    say(SAY_REFUSE),
                    Action(ACT_EMIT_REFUSED),
                    Action(ACT_FINISH),
                ]
            s = replace(s, identity=label)
            intent = s.intent
            if intent is None:  # unreachable in normal flows; stay total
                return SessionState(), [say(SAY_ERROR)]
            if intent.kind == HUG:
                return replace(s, state=EXECUTING), [
                    say(SAY_HUG),
                    Action(ACT_PERFORM_HUG),
                    Action(ACT_FINISH),
                ]
            if intent.kind == GOTO:
                return replace(s, state=EXECUTING), [
                    say(f"Taking you to the {intent.place}."),
                    Action(ACT_NAV_GOTO, {"place": intent.place}),
                ]
            if intent.kind == MOVE:
                return replace(s, state=EXECUTING), [
                    say(f"Moving {intent.direction}."),
                    Action(ACT_MOVE, {"direction": intent.direction}),
                ]
            if intent.kind == ENROLL:
                return replace(s, state=AWAITING_NAME), [
                    say(SAY_ASK_NAME),
                    Action(ACT_REQUEST_INPUT, {"prompt": "Type the new person's name"}),
                ]

    elif s.state == EXECUTING:
        if kind == EV_NAV_DONE:
            text = SAY_ARRIVED if data.get("arrived") else SAY_NO_ROUTE
            return SessionState(), [say(text)]
        if kind == EV_DONE:
            return SessionState(), []

    elif s.state == AWAITING_NAME:
        if kind == EV_TEXT_INPUT:
            name = data["value"]
            if not name.strip():
                return SessionState(), [say(SAY_NAME_EMPTY)]
            return replace(s, state=AWAITING_PICTURE, pending_label=name), [
                say(SAY_LOOK),
                Action(ACT_CAPTURE, {"purpose": "enroll"}),
            ]
        if kind == EV_TEXT_TIMEOUT:
            return SessionState(), [say(SAY_NAME_TIMEOUT)]

    elif s.state == AWAITING_PICTURE:
        if kind == EV_PICTURE:
            return s, [Action(ACT_ENROLL, {"label": s.pending_label})]
        if kind == EV_ENROLL_DONE:
            return SessionState(), [say(f"Welcome, {s.pending_label}! You are now a trusted user.")]
        if kind == EV_ENROLL_FAILED:
            return SessionState(), [say(SAY_ENROLL_NO_FACE)]

    elif s.state == REFUSING:
        if kind == EV_DONE:
            return SessionState(), []

    return s, []
