"""Hazard reports and the guided chat flow that creates them.

The conversation is a finite state machine driven by a plain transition
table (state, input class) -> next state, so the flow can be enumerated
and checked exhaustively. Invalid input never surfaces as an exception:
it stays in place and answers with a validation prompt.
"""

from __future__ import annotations

import enum
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Callable

from .geo import GeoPoint

SESSION_TIMEOUT = timedelta(minutes=30)


class HazardType(enum.Enum):
    FIRE = "fire"
    FLOOD = "flood"
    STORM = "storm"
    LANDSLIDE = "landslide"
    EROSION = "erosion"
    VANDALISM = "vandalism"
    OTHER = "other"


HAZARD_VALUES = [h.value for h in HazardType]


class MediaKind(enum.Enum):
    PHOTO = "photo"
    VIDEO = "video"
    VOICE = "voice"


@dataclass(frozen=True)
class MediaRef:
    kind: MediaKind
    uri: str


@dataclass(frozen=True)
class Measurement:
    measurement_type: str
    value: float
    unit: str


@dataclass(frozen=True)
class ImpactIndicator:
    indicator: str
    severity: int

    def __post_init__(self):
        if self.severity not in (1, 2, 3, 4, 5):
            raise ValueError(f"severity must be in 1..5, got {self.severity}")


@dataclass(frozen=True)
class HazardReport:
    id: str
    location: GeoPoint
    hazard_type: HazardType
    description: str
    media: tuple[MediaRef, ...]
    measurements: tuple[Measurement, ...]
    impact_indicators: tuple[ImpactIndicator, ...]
    risk_elements: tuple[str, ...]
    created_at: datetime
    reporter: str

    def __post_init__(self):
        if not self.description:
            raise ValueError("description must be non-empty")
        if not isinstance(self.hazard_type, HazardType):
            raise ValueError(f"unknown hazard type {self.hazard_type!r}")


class ChatState(enum.Enum):
    IDLE = "Idle"
    AWAIT_LOCATION = "AwaitLocation"
    AWAIT_HAZARD_TYPE = "AwaitHazardType"
    AWAIT_DESCRIPTION = "AwaitDescription"
    AWAIT_MEDIA = "AwaitMedia"
    AWAIT_MEASUREMENTS = "AwaitMeasurements"
    AWAIT_IMPACT = "AwaitImpact"
    AWAIT_RISK = "AwaitRisk"
    CONFIRM = "Confirm"


class MessageKind(enum.Enum):
    TEXT = "text"
    LOCATION = "location"
    PHOTO = "photo"
    VIDEO = "video"
    VOICE = "voice"
    COMMAND = "command"


class WireError(ValueError):
    """Structurally malformed chat message (missing or mistyped fields)."""


@dataclass(frozen=True)
class ChatMessage:
    """One inbound message. Location stays a raw pair here: range checking
    is the flow's job, so out-of-range coordinates produce a validation
    reply instead of a transport error."""

    session_id: str
    kind: MessageKind
    text: str | None = None
    location: tuple[float, float] | None = None
    media_uri: str | None = None

    @classmethod
    def from_payload(cls, payload: dict) -> "ChatMessage":
        if not isinstance(payload, dict):
            raise WireError("message must be a JSON object")
        session_id = payload.get("session_id")
        if not isinstance(session_id, str) or not session_id:
            raise WireError("session_id must be a non-empty string")
        try:
            kind = MessageKind(payload.get("kind"))
        except ValueError:
            raise WireError(f"unknown message kind {payload.get('kind')!r}") from None

        text = payload.get("text")
        if text is not None and not isinstance(text, str):
            raise WireError("text must be a string")
        media_uri = payload.get("media_uri")
        if media_uri is not None and not isinstance(media_uri, str):
            raise WireError("media_uri must be a string")

        location = None
        raw_loc = payload.get("location")
        if raw_loc is not None:
            if (
                not isinstance(raw_loc, dict)
                or not isinstance(raw_loc.get("lat"), (int, float))
                or not isinstance(raw_loc.get("lon"), (int, float))
            ):
                raise WireError("location must be an object with numeric lat and lon")
            location = (float(raw_loc["lat"]), float(raw_loc["lon"]))

        if kind is MessageKind.LOCATION and location is None:
            raise WireError("location messages must carry a location field")
        if kind in (MessageKind.PHOTO, MessageKind.VIDEO, MessageKind.VOICE) and not media_uri:
            raise WireError(f"{kind.value} messages must carry media_uri")
        if kind in (MessageKind.TEXT, MessageKind.COMMAND) and text is None:
            raise WireError(f"{kind.value} messages must carry text")

        return cls(
            session_id=session_id, kind=kind, text=text, location=location, media_uri=media_uri
        )


@dataclass(frozen=True)
class BotReply:
    session_id: str
    state: ChatState
    text: str
    options: tuple[str, ...] = ()

    def to_payload(self) -> dict:
        return {
            "session_id": self.session_id,
            "state": self.state.value,
            "text": self.text,
            "options": list(self.options),
        }


@dataclass
class ReportDraft:
    location: GeoPoint | None = None
    hazard_type: HazardType | None = None
    description: str | None = None
    media: list[MediaRef] = field(default_factory=list)
    measurements: list[Measurement] = field(default_factory=list)
    impact_indicators: list[ImpactIndicator] = field(default_factory=list)
    risk_elements: list[str] = field(default_factory=list)


@dataclass
class ChatSession:
    session_id: str
    state: ChatState = ChatState.IDLE
    draft: ReportDraft = field(default_factory=ReportDraft)
    updated_at: datetime = field(default_factory=lambda: datetime.now(timezone.utc))


@dataclass(frozen=True)
class FlowVocabulary:
    """Stakeholder-editable lists; defaults are placeholders, not canon."""

    measurement_types: tuple[str, ...] = ("water_depth", "wind_speed", "crack_width")
    impact_indicators: tuple[str, ...] = ("structural", "access", "visitor_safety")


class InputClass(enum.Enum):
    REPORT_CMD = "report"
    SKIP_CMD = "skip"
    CANCEL_CMD = "cancel"
    LOCATION = "location"
    HAZARD_CHOICE = "hazard"
    FREE_TEXT = "free_text"
    MEDIA = "media"
    MEASUREMENT = "measurement"
    IMPACT = "impact"
    YES = "yes"
    NO = "no"


# The complete flow. Anything not listed for a state is invalid input and
# keeps the state. /cancel from any active state abandons the draft.
TRANSITIONS: dict[ChatState, dict[InputClass, ChatState]] = {
    ChatState.IDLE: {
        InputClass.REPORT_CMD: ChatState.AWAIT_LOCATION,
    },
    ChatState.AWAIT_LOCATION: {
        InputClass.LOCATION: ChatState.AWAIT_HAZARD_TYPE,
        InputClass.CANCEL_CMD: ChatState.IDLE,
    },
    ChatState.AWAIT_HAZARD_TYPE: {
        InputClass.HAZARD_CHOICE: ChatState.AWAIT_DESCRIPTION,
        InputClass.CANCEL_CMD: ChatState.IDLE,
    },
    ChatState.AWAIT_DESCRIPTION: {
        InputClass.FREE_TEXT: ChatState.AWAIT_MEDIA,
        InputClass.CANCEL_CMD: ChatState.IDLE,
    },
    ChatState.AWAIT_MEDIA: {
        InputClass.MEDIA: ChatState.AWAIT_MEDIA,  # collect several, /skip moves on
        InputClass.SKIP_CMD: ChatState.AWAIT_MEASUREMENTS,
        InputClass.CANCEL_CMD: ChatState.IDLE,
    },
    ChatState.AWAIT_MEASUREMENTS: {
        InputClass.MEASUREMENT: ChatState.AWAIT_IMPACT,
        InputClass.SKIP_CMD: ChatState.AWAIT_IMPACT,
        InputClass.CANCEL_CMD: ChatState.IDLE,
    },
    ChatState.AWAIT_IMPACT: {
        InputClass.IMPACT: ChatState.AWAIT_RISK,
        InputClass.SKIP_CMD: ChatState.AWAIT_RISK,
        InputClass.CANCEL_CMD: ChatState.IDLE,
    },
    ChatState.AWAIT_RISK: {
        InputClass.FREE_TEXT: ChatState.CONFIRM,
        InputClass.SKIP_CMD: ChatState.CONFIRM,
        InputClass.CANCEL_CMD: ChatState.IDLE,
    },
    ChatState.CONFIRM: {
        InputClass.YES: ChatState.IDLE,
        InputClass.NO: ChatState.IDLE,
        InputClass.CANCEL_CMD: ChatState.IDLE,
    },
}

PROMPTS: dict[ChatState, str] = {
    ChatState.IDLE: "Send /report to start a new hazard report.",
    ChatState.AWAIT_LOCATION: "Where is the hazard? Share a location (lat/lon).",
    ChatState.AWAIT_HAZARD_TYPE: "What type of hazard is it?",
    ChatState.AWAIT_DESCRIPTION: "Describe briefly what you see.",
    ChatState.AWAIT_MEDIA: "Attach photos, videos or voice notes, or /skip to continue.",
    ChatState.AWAIT_MEASUREMENTS: (
        "Add a measurement as '<type> <value> <unit>' (e.g. 'water_depth 0.4 m'), or /skip."
    ),
    ChatState.AWAIT_IMPACT: (
        "Add an impact indicator as '<indicator> <severity 1-5>' (e.g. 'structural 3'), or /skip."
    ),
    ChatState.AWAIT_RISK: "Name any at-risk elements (free text), or /skip.",
}


def classify(state: ChatState, msg: ChatMessage, vocab: FlowVocabulary) -> InputClass | None:
    """Map a message to the input class it represents in this state.

    Returns None for input the state cannot accept (wrong kind, malformed
    value, out-of-range coordinates) — the caller answers with validation.
    """
    text = (msg.text or "").strip()
    is_command = msg.kind is MessageKind.COMMAND or text.startswith("/")
    if is_command:
        command = text.lower()
        if command == "/report":
            return InputClass.REPORT_CMD if state is ChatState.IDLE else None
        if command == "/skip":
            return InputClass.SKIP_CMD if InputClass.SKIP_CMD in TRANSITIONS[state] else None
        if command == "/cancel":
            return InputClass.CANCEL_CMD if InputClass.CANCEL_CMD in TRANSITIONS[state] else None
        return None

    if msg.kind is MessageKind.LOCATION:
        if state is not ChatState.AWAIT_LOCATION or msg.location is None:
            return None
        lat, lon = msg.location
        if -90.0 <= lat <= 90.0 and -180.0 <= lon <= 180.0:
            return InputClass.LOCATION
        return None

    if msg.kind in (MessageKind.PHOTO, MessageKind.VIDEO, MessageKind.VOICE):
        if state is ChatState.AWAIT_MEDIA and msg.media_uri:
            return InputClass.MEDIA
        return None

    if msg.kind is MessageKind.TEXT:
        if state is ChatState.AWAIT_HAZARD_TYPE:
            return InputClass.HAZARD_CHOICE if text.lower() in HAZARD_VALUES else None
        if state is ChatState.AWAIT_DESCRIPTION or state is ChatState.AWAIT_RISK:
            return InputClass.FREE_TEXT if text else None
        if state is ChatState.AWAIT_MEASUREMENTS:
            return InputClass.MEASUREMENT if parse_measurement(text, vocab) else None
        if state is ChatState.AWAIT_IMPACT:
            return InputClass.IMPACT if parse_impact(text, vocab) else None
        if state is ChatState.CONFIRM:
            if text.lower() == "yes":
                return InputClass.YES
            if text.lower() == "no":
                return InputClass.NO
            return None
    return None


def parse_measurement(text: str, vocab: FlowVocabulary) -> Measurement | None:
    parts = text.split()
    if len(parts) != 3:
        return None
    mtype, raw_value, unit = parts
    if mtype not in vocab.measurement_types:
        return None
    try:
        value = float(raw_value)
    except ValueError:
        return None
    return Measurement(measurement_type=mtype, value=value, unit=unit)


def parse_impact(text: str, vocab: FlowVocabulary) -> ImpactIndicator | None:
    parts = text.split()
    if len(parts) != 2:
        return None
    indicator, raw_severity = parts
    if indicator not in vocab.impact_indicators:
        return None
    try:
        severity = int(raw_severity)
    except ValueError:
        return None
    if severity not in (1, 2, 3, 4, 5):
        return None
    return ImpactIndicator(indicator=indicator, severity=severity)


def draft_summary(draft: ReportDraft) -> str:
    """Human-readable recap shown before confirmation."""
    loc = draft.location
    lines = [
        "Please confirm your report (yes/no):",
        f"location: {loc.lat}, {loc.lon}" if loc else "location: ?",
        f"hazard: {draft.hazard_type.value if draft.hazard_type else '?'}",
        f"description: {draft.description or '?'}",
        f"media: {', '.join(m.uri for m in draft.media) if draft.media else 'none'}",
        "measurements: "
        + (
            "; ".join(f"{m.measurement_type} {m.value} {m.unit}" for m in draft.measurements)
            if draft.measurements
            else "none"
        ),
        "impact: "
        + (
            "; ".join(f"{i.indicator} {i.severity}" for i in draft.impact_indicators)
            if draft.impact_indicators
            else "none"
        ),
        f"at risk: {'; '.join(draft.risk_elements) if draft.risk_elements else 'none'}",
    ]
    return "\n".join(lines)


def _options_for(state: ChatState, vocab: FlowVocabulary) -> tuple[str, ...]:
    if state is ChatState.AWAIT_HAZARD_TYPE:
        return tuple(HAZARD_VALUES)
    if state is ChatState.AWAIT_MEDIA:
        return ("/skip",)
    if state is ChatState.AWAIT_MEASUREMENTS:
        return tuple(vocab.measurement_types) + ("/skip",)
    if state is ChatState.AWAIT_IMPACT:
        return tuple(vocab.impact_indicators) + ("/skip",)
    if state is ChatState.AWAIT_RISK:
        return ("/skip",)
    if state is ChatState.CONFIRM:
        return ("yes", "no")
    return ()


class ChatEngine:
    """Per-session conversation driver.

    Messages within one session are serialized; distinct sessions run in
    parallel. Sessions idle longer than the timeout reset to Idle before
    the next message is handled.
    """

    def __init__(
        self,
        submit_hook: Callable[[HazardReport], None] | None = None,
        vocabulary: FlowVocabulary | None = None,
        session_timeout: timedelta = SESSION_TIMEOUT,
        clock: Callable[[], datetime] | None = None,
    ):
        self.submit_hook = submit_hook
        self.vocab = vocabulary or FlowVocabulary()
        self.session_timeout = session_timeout
        self.clock = clock or (lambda: datetime.now(timezone.utc))
        self._sessions: dict[str, ChatSession] = {}
        self._session_locks: dict[str, threading.Lock] = {}
        self._registry_lock = threading.Lock()

    def session(self, session_id: str) -> ChatSession:
        """Existing session, or a fresh Idle one."""
        with self._registry_lock:
            if session_id not in self._sessions:
                self._sessions[session_id] = ChatSession(session_id=session_id)
                self._session_locks[session_id] = threading.Lock()
            return self._sessions[session_id]

    def handle(self, msg: ChatMessage) -> BotReply:
        session = self.session(msg.session_id)
        with self._session_locks[msg.session_id]:
            now = self.clock()
            if (
                session.state is not ChatState.IDLE
                and now - session.updated_at > self.session_timeout
            ):
                session.state = ChatState.IDLE
                session.draft = ReportDraft()
            _, reply = self.advance(session, msg)
            return reply

    def advance(self, session: ChatSession, msg: ChatMessage) -> tuple[ChatSession, BotReply]:
        """Apply one message; invalid input keeps the state and replies with
        a validation prompt."""
        if msg.session_id != session.session_id:
            raise ValueError("message session_id does not match session")

        cls = classify(session.state, msg, self.vocab)
        session.updated_at = self.clock()
        if cls is None:
            return session, self._validation_reply(session)

        next_state = TRANSITIONS[session.state][cls]
        reply_text: str | None = None

        if cls is InputClass.REPORT_CMD:
            session.draft = ReportDraft()
        elif cls is InputClass.CANCEL_CMD:
            session.draft = ReportDraft()
            reply_text = "Report discarded. " + PROMPTS[ChatState.IDLE]
        elif cls is InputClass.LOCATION:
            lat, lon = msg.location  # validated by classify
            session.draft.location = GeoPoint(lat=lat, lon=lon)
        elif cls is InputClass.HAZARD_CHOICE:
            session.draft.hazard_type = HazardType(msg.text.strip().lower())
        elif cls is InputClass.FREE_TEXT:
            if session.state is ChatState.AWAIT_DESCRIPTION:
                session.draft.description = msg.text.strip()
            else:  # AWAIT_RISK
                session.draft.risk_elements.append(msg.text.strip())
        elif cls is InputClass.MEDIA:
            session.draft.media.append(
                MediaRef(kind=MediaKind(msg.kind.value), uri=msg.media_uri)
            )
            reply_text = "Added. " + PROMPTS[ChatState.AWAIT_MEDIA]
        elif cls is InputClass.MEASUREMENT:
            session.draft.measurements.append(parse_measurement(msg.text.strip(), self.vocab))
        elif cls is InputClass.IMPACT:
            session.draft.impact_indicators.append(parse_impact(msg.text.strip(), self.vocab))
        elif cls is InputClass.YES:
            report = self.submit(session, "yes")
            return session, BotReply(
                session_id=session.session_id,
                state=session.state,
                text=f"Report {report.id} submitted. Thank you! " + PROMPTS[ChatState.IDLE],
            )
        elif cls is InputClass.NO:
            self.submit(session, "no")
            return session, BotReply(
                session_id=session.session_id,
                state=session.state,
                text="Report discarded. " + PROMPTS[ChatState.IDLE],
            )

        session.state = next_state
        if reply_text is None:
            if next_state is ChatState.CONFIRM:
                reply_text = draft_summary(session.draft)
            else:
                reply_text = PROMPTS[next_state]
        return session, BotReply(
            session_id=session.session_id,
            state=session.state,
            text=reply_text,
            options=_options_for(session.state, self.vocab),
        )

    def submit(self, session: ChatSession, confirmation: str) -> HazardReport | None:
        """Finalize (yes) or discard (no) a draft sitting in Confirm."""
        if session.state is not ChatState.CONFIRM:
            raise ValueError(f"submit called in state {session.state.value}, expected Confirm")
        if confirmation not in ("yes", "no"):
            raise ValueError("confirmation must be 'yes' or 'no'")

        draft = session.draft
        session.state = ChatState.IDLE
        session.draft = ReportDraft()
        if confirmation == "no":
            return None

        report = HazardReport(
            id=uuid.uuid4().hex,
            location=draft.location,
            hazard_type=draft.hazard_type,
            description=draft.description,
            media=tuple(draft.media),
            measurements=tuple(draft.measurements),
            impact_indicators=tuple(draft.impact_indicators),
            risk_elements=tuple(draft.risk_elements),
            created_at=self.clock(),
            reporter=session.session_id,
        )
        if self.submit_hook is not None:
            self.submit_hook(report)
        return report

    def _validation_reply(self, session: ChatSession) -> BotReply:
        if session.state is ChatState.CONFIRM:
            prompt = draft_summary(session.draft)
        else:
            prompt = PROMPTS[session.state]
        return BotReply(
            session_id=session.session_id,
            state=session.state,
            text="Sorry, I can't use that here. " + prompt,
            options=_options_for(session.state, self.vocab),
        )


def report_to_payload(report: HazardReport) -> dict:
    return {
        "id": report.id,
        "location": {"lat": report.location.lat, "lon": report.location.lon},
        "hazard_type": report.hazard_type.value,
        "description": report.description,
        "media": [{"kind": m.kind.value, "uri": m.uri} for m in report.media],
        "measurements": [
            {"measurement_type": m.measurement_type, "value": m.value, "unit": m.unit}
            for m in report.measurements
        ],
        "impact_indicators": [
            {"indicator": i.indicator, "severity": i.severity} for i in report.impact_indicators
        ],
        "risk_elements": list(report.risk_elements),
        "created_at": report.created_at.isoformat(),
        "reporter": report.reporter,
    }


def report_from_payload(payload: dict) -> HazardReport:
    return HazardReport(
        id=payload["id"],
        location=GeoPoint(lat=payload["location"]["lat"], lon=payload["location"]["lon"]),
        hazard_type=HazardType(payload["hazard_type"]),
        description=payload["description"],
        media=tuple(
            MediaRef(kind=MediaKind(m["kind"]), uri=m["uri"]) for m in payload["media"]
        ),
        measurements=tuple(
            Measurement(
                measurement_type=m["measurement_type"], value=m["value"], unit=m["unit"]
            )
            for m in payload["measurements"]
        ),
        impact_indicators=tuple(
            ImpactIndicator(indicator=i["indicator"], severity=i["severity"])
            for i in payload["impact_indicators"]
        ),
        risk_elements=tuple(payload["risk_elements"]),
        created_at=datetime.fromisoformat(payload["created_at"]),
        reporter=payload["reporter"],
    )
