"""Chat-completion prompt pipelines for narration and summarization.

Two request builders are provided: a whole-video multi-step reasoning
request (four explicit steps ending in a summary timeline) and a
per-frame narration request that carries a window of previous
narrations as context.  ``narrate_video`` drives the second builder in
chronological batches over an abstract transport, so every code path is
testable with a scripted fake and no network access.
"""

from __future__ import annotations

import base64
import json
import os
import re
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

from .errors import (
    MalformedResponseError,
    NarrationPipelineError,
    ParameterError,
    PermanentTransportError,
    TransientTransportError,
)

DEFAULT_HISTORY_K = 10
DEFAULT_BATCH_SIZE = 10
DEFAULT_MAX_TOKENS = 512
COT_FRAME_CAP = 50

RETRY_BASE_DELAY_S = 1.0
RETRY_FACTOR = 2.0
RETRY_MAX_ATTEMPTS = 5

COT_SYSTEM_PROMPT = """\
You are given the frames of an egocentric video. Egocentric videos tend to \
have redundant or less relevant information. Summarizing these videos means \
identifying the most visually or contextually important moments. Return an \
output for each step. If there is a question in a step, output the response.

Step 1. Segment the video into distinct activity intervals by analyzing \
motion changes (e.g., sudden bursts of motion) and detecting scene changes \
based on visual context shifts, background changes, or other environmental \
cues.

Step 2. Key activities can typically be defined by interactions with \
objects, people, or changes in the environment. Within each identified \
activity interval from Step 1, determine what the key activity is by \
analyzing motion patterns, object presence, and environmental changes. What \
are the most significant activities in each segment?

Step 3. Analyze these key activities and remove segments that are \
repetitive or less relevant to the video. The goal is to ensure the \
remaining representative intervals align with important contextual changes, \
transitions, or motion patterns. Which activities remain? Which were removed?

Step 4. Combine these selected intervals into a coherent and chronologically \
ordered summary timeline that maintains the flow and context of the original \
video while emphasizing the most critical moments.
"""

NARRATION_INSTRUCTION = (
    "Please generate a concise narration for the following frame based on "
    "its timestamp and previous narrations as context."
)
NO_HISTORY_TEXT = "No previous narrations."


# --- request model -----------------------------------------------------------


@dataclass(frozen=True)
class TextPart:
    text: str

    def to_payload(self) -> dict:
        return {"type": "text", "text": self.text}


@dataclass(frozen=True)
class ImagePart:
    data_b64: str
    media_type: str = "image/jpeg"

    @classmethod
    def from_bytes(cls, data: bytes, media_type: str = "image/jpeg") -> "ImagePart":
        return cls(data_b64=base64.b64encode(data).decode("ascii"), media_type=media_type)

    def to_payload(self) -> dict:
        return {
            "type": "image_url",
            "image_url": {"url": f"data:{self.media_type};base64,{self.data_b64}"},
        }


@dataclass(frozen=True)
class ChatMessage:
    role: str  # "system", "user" or "assistant"
    parts: tuple

    def to_payload(self) -> dict:
        return {"role": self.role, "content": [p.to_payload() for p in self.parts]}


@dataclass(frozen=True)
class ChatRequest:
    messages: tuple[ChatMessage, ...]
    model_name: str
    max_tokens: int

    def to_payload(self) -> dict:
        return {
            "model": self.model_name,
            "max_tokens": self.max_tokens,
            "messages": [m.to_payload() for m in self.messages],
        }

    def to_json(self) -> str:
        """Canonical serialization used for golden-fixture comparison."""
        return json.dumps(self.to_payload(), indent=2, ensure_ascii=True) + "\n"


def _default_model() -> str:
    return os.environ.get("EGOSUM_MODEL", "gpt-4o")


# --- narration state ---------------------------------------------------------


@dataclass(frozen=True)
class NarrationEntry:
    timestamp_s: float
    frame_index: int
    narration_text: str
    history_window_used: tuple[int, ...]  # ids (positions) of earlier entries


@dataclass(frozen=True)
class NarrationLog:
    entries: tuple[NarrationEntry, ...] = ()
    batch_size: int = 1

    def validate(self) -> None:
        prev = float("-inf")
        for i, entry in enumerate(self.entries):
            if entry.timestamp_s <= prev:
                raise ParameterError("narration timestamps must be strictly increasing")
            prev = entry.timestamp_s
            if any(h >= i for h in entry.history_window_used):
                raise ParameterError("history windows may only reference earlier entries")

    def to_json(self) -> str:
        doc = {
            "batch_size": self.batch_size,
            "entries": [
                {
                    "frame_index": e.frame_index,
                    "timestamp_s": e.timestamp_s,
                    "text": e.narration_text,
                    "history_ids": list(e.history_window_used),
                }
                for e in self.entries
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


@dataclass(frozen=True)
class CoTSummary:
    step_outputs: tuple[str, str, str, str]
    final_intervals: tuple[tuple[float, float], ...]


# --- transport ---------------------------------------------------------------


class Transport(Protocol):
    """Anything that can answer a ChatRequest with response text.

    Implementations raise TransientTransportError for retryable failures
    and PermanentTransportError otherwise.  ``concurrent_safe`` declares
    whether requests may be dispatched from multiple threads.
    """

    concurrent_safe: bool

    def send(self, request: ChatRequest) -> str: ...


class HttpChatTransport:
    """Chat-completion HTTPS transport configured from the environment.

    Reads EGOSUM_API_BASE, EGOSUM_API_KEY and EGOSUM_MODEL unless given
    explicitly.
    """

    concurrent_safe = True

    def __init__(self, base_url: Optional[str] = None, api_key: Optional[str] = None,
                 timeout_s: float = 120.0):
        self.base_url = (base_url or os.environ.get("EGOSUM_API_BASE", "")).rstrip("/")
        self.api_key = api_key or os.environ.get("EGOSUM_API_KEY", "")
        self.timeout_s = timeout_s
        if not self.base_url:
            raise ParameterError("EGOSUM_API_BASE is not configured")

    def send(self, request: ChatRequest) -> str:
        import requests

        try:
            resp = requests.post(
                f"{self.base_url}/chat/completions",
                json=request.to_payload(),
                headers={"Authorization": f"Bearer {self.api_key}"},
                timeout=self.timeout_s,
            )
        except requests.RequestException as exc:
            raise TransientTransportError(str(exc)) from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            raise TransientTransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        if resp.status_code >= 400:
            raise PermanentTransportError(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            return resp.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, ValueError) as exc:
            raise PermanentTransportError(f"unexpected response shape: {exc}") from exc


class ScriptedTransport:
    """Offline transport that replays a scripted list of events.

    Each event is consumed in request-arrival order: {"kind": "ok",
    "text": ...} answers, {"kind": "transient"} and {"kind": "permanent"}
    raise.  When events run out, ``default_text`` answers (the request
    count is interpolated for {n}).
    """

    concurrent_safe = True

    def __init__(self, events: Sequence[dict] = (), default_text: Optional[str] = "ok"):
        self._events = list(events)
        self._default = default_text
        self._lock = threading.Lock()
        self.requests_seen: list[ChatRequest] = []

    @classmethod
    def from_script_file(cls, path: str) -> "ScriptedTransport":
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        return cls(events=doc.get("events", []), default_text=doc.get("default_text", "ok"))

    def send(self, request: ChatRequest) -> str:
        with self._lock:
            self.requests_seen.append(request)
            n = len(self.requests_seen)
            event = self._events.pop(0) if self._events else None
        if event is None:
            if self._default is None:
                raise PermanentTransportError("script exhausted")
            return self._default.replace("{n}", str(n))
        kind = event.get("kind", "ok")
        if kind == "ok":
            return event.get("text", "").replace("{n}", str(n))
        if kind == "transient":
            raise TransientTransportError(event.get("message", "scripted transient failure"))
        if kind == "permanent":
            raise PermanentTransportError(event.get("message", "scripted permanent failure"))
        raise ParameterError(f"unknown scripted event kind {kind!r}")


# --- request builders --------------------------------------------------------


def thin_evenly(items: Sequence, cap: int) -> list:
    """At most ``cap`` elements, spread evenly and order-preserving."""
    n = len(items)
    if n <= cap:
        return list(items)
    picks = [round(i * (n - 1) / (cap - 1)) for i in range(cap)]
    return [items[p] for p in picks]


def build_cot_request(
    frames: Sequence[ImagePart],
    timestamps: Sequence[float],
    model_name: Optional[str] = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> ChatRequest:
    """Whole-video multi-step summarization request.

    One system message holds the step instructions; one user message
    carries every frame in order, each preceded by its timestamp text.
    """
    if len(frames) == 0:
        raise ParameterError("at least one frame is required")
    if len(frames) != len(timestamps):
        raise ParameterError("frames and timestamps must have equal length")
    parts: list = []
    for frame, ts in zip(frames, timestamps):
        parts.append(TextPart(f"Timestamp (seconds): {float(ts)}"))
        parts.append(frame)
    return ChatRequest(
        messages=(
            ChatMessage(role="system", parts=(TextPart(COT_SYSTEM_PROMPT),)),
            ChatMessage(role="user", parts=tuple(parts)),
        ),
        model_name=model_name or _default_model(),
        max_tokens=max_tokens,
    )


def _history_text(entries: Sequence[NarrationEntry]) -> str:
    return "\n".join(f"[{e.timestamp_s:.2f}s] {e.narration_text}" for e in entries)


def build_narration_request(
    frame: ImagePart,
    timestamp_s: float,
    previous: NarrationLog,
    history_k: int = DEFAULT_HISTORY_K,
    model_name: Optional[str] = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
) -> ChatRequest:
    """Single-frame narration request with a window of prior narrations.

    User-message part order: instruction, image, previous narrations
    (or the literal no-history text), timestamp.
    """
    if history_k < 0:
        raise ParameterError("history_k must be >= 0")
    window = previous.entries[-history_k:] if history_k > 0 else ()
    if window:
        history = TextPart(f"Previous narrations:\n{_history_text(window)}")
    else:
        history = TextPart(NO_HISTORY_TEXT)
    parts = (
        TextPart(NARRATION_INSTRUCTION),
        frame,
        history,
        TextPart(f"The timestamp for this frame (in seconds) is: {float(timestamp_s)}"),
    )
    return ChatRequest(
        messages=(ChatMessage(role="user", parts=parts),),
        model_name=model_name or _default_model(),
        max_tokens=max_tokens,
    )


# --- narration orchestration -------------------------------------------------


def _send_with_retry(
    transport: Transport,
    request: ChatRequest,
    sleep: Callable[[float], None],
) -> str:
    delay = RETRY_BASE_DELAY_S
    last: Exception | None = None
    for attempt in range(RETRY_MAX_ATTEMPTS):
        try:
            return transport.send(request)
        except TransientTransportError as exc:
            last = exc
            if attempt < RETRY_MAX_ATTEMPTS - 1:
                sleep(delay)
                delay *= RETRY_FACTOR
    raise last


def narrate_video(
    frames: Sequence[ImagePart],
    timestamps: Sequence[float],
    transport: Transport,
    batch_size: int = DEFAULT_BATCH_SIZE,
    history_k: int = DEFAULT_HISTORY_K,
    model_name: Optional[str] = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    sleep: Callable[[float], None] = time.sleep,
) -> NarrationLog:
    """Narrate frames in chronological batches of ``batch_size``.

    Requests within a batch share the same pre-batch history snapshot and
    may run concurrently; the log is appended in frame order after each
    batch completes.  Transient transport failures are retried with
    exponential backoff (1s base, factor 2, 5 attempts); exhausting the
    retries aborts with the partial log attached.
    """
    if batch_size < 1:
        raise ParameterError("batch_size must be >= 1")
    if len(frames) != len(timestamps):
        raise ParameterError("frames and timestamps must have equal length")
    if any(b <= a for a, b in zip(timestamps, timestamps[1:])):
        raise ParameterError("timestamps must be strictly increasing")

    entries: list[NarrationEntry] = []
    concurrent = getattr(transport, "concurrent_safe", False)

    for batch_start in range(0, len(frames), batch_size):
        batch = range(batch_start, min(batch_start + batch_size, len(frames)))
        snapshot = NarrationLog(entries=tuple(entries), batch_size=batch_size)
        window_ids = tuple(range(max(0, len(entries) - history_k), len(entries)))

        def run(i: int) -> str:
            request = build_narration_request(
                frames[i], timestamps[i], snapshot, history_k,
                model_name=model_name, max_tokens=max_tokens,
            )
            return _send_with_retry(transport, request, sleep)

        try:
            if concurrent and len(batch) > 1:
                with ThreadPoolExecutor(max_workers=min(len(batch), 16)) as pool:
                    texts = list(pool.map(run, batch))
            else:
                texts = [run(i) for i in batch]
        except TransientTransportError as exc:
            raise NarrationPipelineError(
                f"narration aborted at frame batch starting {batch_start}: {exc}",
                last_error=exc,
                partial_log=NarrationLog(entries=tuple(entries), batch_size=batch_size),
            ) from exc

        for i, text in zip(batch, texts):
            entries.append(
                NarrationEntry(
                    timestamp_s=float(timestamps[i]),
                    frame_index=i,
                    narration_text=text,
                    history_window_used=window_ids,
                )
            )

    log = NarrationLog(entries=tuple(entries), batch_size=batch_size)
    log.validate()
    return log


# --- response parsing ---------------------------------------------------------


_STEP_RE = re.compile(r"(?im)^\s*(?:\*{0,2})step\s*([1-4])\b[.:)]*\s*")
_CLOCK = r"\d+:\d{2}"
_SECONDS = r"\d+(?:\.\d+)?"
_RANGE_RE = re.compile(
    rf"({_CLOCK}|{_SECONDS})\s*(?:s\b)?\s*[-–—]\s*({_CLOCK}|{_SECONDS})(?:\s*s\b)?"
)


def _to_seconds(token: str) -> float:
    if ":" in token:
        minutes, seconds = token.split(":")
        return 60.0 * int(minutes) + float(seconds)
    return float(token)


def parse_cot_response(text: str) -> CoTSummary:
    """Split a model response into its four step outputs and pull the
    summary intervals out of step 4.

    Accepts `m:ss-m:ss` clock ranges and plain `s-s` second ranges
    (hyphen or dash); intervals are returned chronologically.  A missing
    step rejects the whole response.
    """
    found: dict[int, str] = {}
    matches = list(_STEP_RE.finditer(text))
    for i, m in enumerate(matches):
        step = int(m.group(1))
        end = matches[i + 1].start() if i + 1 < len(matches) else len(text)
        body = text[m.end():end].strip()
        if step not in found:
            found[step] = body
    missing = [s for s in (1, 2, 3, 4) if s not in found]
    if missing:
        raise MalformedResponseError(f"response is missing step(s): {missing}")

    intervals = []
    for m in _RANGE_RE.finditer(found[4]):
        start, end = _to_seconds(m.group(1)), _to_seconds(m.group(2))
        if end > start:
            intervals.append((start, end))
    intervals.sort()
    return CoTSummary(
        step_outputs=(found[1], found[2], found[3], found[4]),
        final_intervals=tuple(intervals),
    )


def cot_summarize(
    frames: Sequence[ImagePart],
    timestamps: Sequence[float],
    transport: Transport,
    frame_cap: int = COT_FRAME_CAP,
    model_name: Optional[str] = None,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    sleep: Callable[[float], None] = time.sleep,
) -> CoTSummary:
    """Build, send and parse the whole-video request, thinning the frames
    to ``frame_cap`` and re-prompting once on a malformed response."""
    pairs = thin_evenly(list(zip(frames, timestamps)), frame_cap)
    capped_frames = [p[0] for p in pairs]
    capped_ts = [p[1] for p in pairs]
    request = build_cot_request(capped_frames, capped_ts, model_name=model_name,
                                max_tokens=max_tokens)
    text = _send_with_retry(transport, request, sleep)
    try:
        return parse_cot_response(text)
    except MalformedResponseError:
        text = _send_with_retry(transport, request, sleep)
        return parse_cot_response(text)
