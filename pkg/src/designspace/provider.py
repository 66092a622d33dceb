"""Pluggable completion backends with retry-on-malformed-output.

A provider issues one completion per `complete` call and keeps a ledger of
attempted/failed/succeeded calls per request tag. `complete_validated` wraps
`complete` with a parse step and retries transport errors and parse failures
alike, up to a retry limit. An admission semaphore caps in-flight calls.
"""

from __future__ import annotations

import hashlib
import logging
import os
import threading
import time
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Sequence, TypeVar

import httpx

from .errors import ExhaustionError, ParseFailure, TransportError

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_MAX_IN_FLIGHT = 8
DEFAULT_TIMEOUT_SECONDS = 30.0

ENV_API_KEY = "DSE_API_KEY"
ENV_API_BASE = "DSE_API_BASE"
ENV_MODEL = "DSE_MODEL"
DEFAULT_MODEL = "gpt-3.5-turbo-instruct"

FIXTURE_HASH_LENGTH = 16
FIXTURE_DEFAULT_KEY = "default"
FIXTURE_SHA_PLACEHOLDER = "{{PROMPT_SHA8}}"


@dataclass(frozen=True, slots=True)
class CompletionRequest:
    prompt: str
    max_tokens: int
    temperature: float
    request_tag: str

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


@dataclass(frozen=True, slots=True)
class CompletionResult:
    text: str
    latency: float
    attempt: int = 1

    def __post_init__(self) -> None:
        if self.attempt < 1:
            raise ValueError("attempt must be >= 1")


@dataclass
class TagCounts:
    attempted: int = 0
    failed: int = 0
    succeeded: int = 0

    @property
    def in_flight(self) -> int:
        return self.attempted - self.failed - self.succeeded


class CallLedger:
    """Thread-safe per-tag call accounting.

    Invariant: attempted == failed + succeeded + in-flight at every instant.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counts: dict[str, TagCounts] = defaultdict(TagCounts)

    def record_attempt(self, tag: str) -> None:
        with self._lock:
            self._counts[tag].attempted += 1

    def record_failure(self, tag: str) -> None:
        with self._lock:
            self._counts[tag].failed += 1

    def record_success(self, tag: str) -> None:
        with self._lock:
            self._counts[tag].succeeded += 1

    def counts(self, tag: str) -> TagCounts:
        with self._lock:
            found = self._counts.get(tag)
            return TagCounts(found.attempted, found.failed, found.succeeded) if found else TagCounts()

    def totals(self) -> TagCounts:
        with self._lock:
            total = TagCounts()
            for counts in self._counts.values():
                total.attempted += counts.attempted
                total.failed += counts.failed
                total.succeeded += counts.succeeded
            return total

    def tags(self) -> tuple[str, ...]:
        with self._lock:
            return tuple(self._counts)


class CallMeter:
    """Run-local attempt counter, fed by complete_validated."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._count = 0

    def tick(self) -> None:
        with self._lock:
            self._count += 1

    @property
    def count(self) -> int:
        with self._lock:
            return self._count


class CompletionProvider:
    """Base class: ledger, admission gate, and the validated retry loop."""

    def __init__(self, max_in_flight: int = DEFAULT_MAX_IN_FLIGHT):
        if max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        self.ledger = CallLedger()
        self._gate = threading.BoundedSemaphore(max_in_flight)

    def _complete_once(self, request: CompletionRequest) -> str:
        raise NotImplementedError

    def _attempt(self, request: CompletionRequest) -> tuple[str, float]:
        """One gated call; records the attempt but not its outcome."""
        self.ledger.record_attempt(request.request_tag)
        with self._gate:
            started = time.perf_counter()
            text = self._complete_once(request)
            return text, time.perf_counter() - started

    def complete(self, request: CompletionRequest) -> CompletionResult:
        """Issue exactly one completion call and record its outcome."""
        try:
            text, latency = self._attempt(request)
        except TransportError:
            self.ledger.record_failure(request.request_tag)
            raise
        self.ledger.record_success(request.request_tag)
        return CompletionResult(text=text, latency=latency)

    def complete_validated(
        self,
        request: CompletionRequest,
        parse: Callable[[str], T],
        retry_limit: int,
        meter: CallMeter | None = None,
    ) -> T:
        """Call until `parse` accepts a completion, at most `retry_limit` times.

        Every transport error and every parse failure counts as one failed
        attempt in the ledger. Raises ExhaustionError carrying the last
        failure once the limit is spent.
        """
        if retry_limit < 1:
            raise ValueError("retry_limit must be >= 1")
        last_failure: Exception | None = None
        for attempt in range(1, retry_limit + 1):
            if meter is not None:
                meter.tick()
            try:
                text, _ = self._attempt(request)
            except TransportError as exc:
                self.ledger.record_failure(request.request_tag)
                last_failure = exc
                logger.debug("attempt %d/%d transport error: %s", attempt, retry_limit, exc)
                continue
            try:
                value = parse(text)
            except ParseFailure as exc:
                self.ledger.record_failure(request.request_tag)
                last_failure = exc
                logger.debug("attempt %d/%d parse failure: %s", attempt, retry_limit, exc)
                continue
            self.ledger.record_success(request.request_tag)
            return value
        raise ExhaustionError(request.request_tag, retry_limit, last_failure)


class MockProvider(CompletionProvider):
    """Deterministic in-memory backend for tests and demos.

    Resolution order per call: a scripted per-tag queue, then the handler,
    then the exact-prompt fixture map. Anything unresolved is a transport
    error, mirroring an unreachable endpoint.
    """

    def __init__(
        self,
        fixtures: Mapping[str, str] | None = None,
        handler: Callable[[CompletionRequest], str] | None = None,
        script: Mapping[str, Sequence[str]] | None = None,
        delay: float = 0.0,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
    ):
        super().__init__(max_in_flight=max_in_flight)
        self._fixtures = dict(fixtures or {})
        self._handler = handler
        self._script = {tag: list(seq) for tag, seq in (script or {}).items()}
        self._delay = delay
        self._lock = threading.Lock()
        self.requests: list[CompletionRequest] = []
        self._in_flight = 0
        self.max_observed_in_flight = 0

    def _complete_once(self, request: CompletionRequest) -> str:
        with self._lock:
            self.requests.append(request)
            self._in_flight += 1
            self.max_observed_in_flight = max(self.max_observed_in_flight, self._in_flight)
            queued = self._script.get(request.request_tag)
            scripted = queued.pop(0) if queued else None
        try:
            if self._delay:
                time.sleep(self._delay)
            if scripted is not None:
                return scripted
            if self._handler is not None:
                return self._handler(request)
            if request.prompt in self._fixtures:
                return self._fixtures[request.prompt]
            raise TransportError(f"no fixture for tag {request.request_tag!r}")
        finally:
            with self._lock:
                self._in_flight -= 1


def fixture_key(prompt: str) -> str:
    """Stable lookup key for a prompt: prefix of its SHA-256 hex digest."""
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:FIXTURE_HASH_LENGTH]


def fixture_filename(tag: str, prompt: str) -> str:
    return f"{tag}__{fixture_key(prompt)}.txt"


def write_fixture(directory: Path | str, tag: str, prompt: str, completion: str) -> Path:
    path = Path(directory) / fixture_filename(tag, prompt)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(completion, encoding="utf-8")
    return path


def write_default_fixture(directory: Path | str, tag: str, completion: str) -> Path:
    path = Path(directory) / f"{tag}__{FIXTURE_DEFAULT_KEY}.txt"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(completion, encoding="utf-8")
    return path


class FixtureDirProvider(CompletionProvider):
    """Replays completions recorded as files.

    Lookup is `<tag>__<sha256(prompt)[:16]>.txt`, falling back to
    `<tag>__default.txt`. Default files may embed {{PROMPT_SHA8}}, replaced
    with the first 8 hash characters so per-prompt texts stay distinct. See
    fixtures/README.md for the format.
    """

    def __init__(self, directory: Path | str, max_in_flight: int = DEFAULT_MAX_IN_FLIGHT):
        super().__init__(max_in_flight=max_in_flight)
        self._directory = Path(directory)
        if not self._directory.is_dir():
            raise TransportError(f"fixture directory not found: {self._directory}")

    def _complete_once(self, request: CompletionRequest) -> str:
        exact = self._directory / fixture_filename(request.request_tag, request.prompt)
        if exact.is_file():
            return exact.read_text(encoding="utf-8")
        fallback = self._directory / f"{request.request_tag}__{FIXTURE_DEFAULT_KEY}.txt"
        if fallback.is_file():
            text = fallback.read_text(encoding="utf-8")
            return text.replace(FIXTURE_SHA_PLACEHOLDER, fixture_key(request.prompt)[:8])
        raise TransportError(
            f"no fixture for tag {request.request_tag!r} ({exact.name})"
        )


class HttpCompletionProvider(CompletionProvider):
    """Client for any OpenAI-compatible text-completion endpoint."""

    def __init__(
        self,
        base_url: str,
        api_key: str = "",
        model: str = DEFAULT_MODEL,
        timeout: float = DEFAULT_TIMEOUT_SECONDS,
        max_in_flight: int = DEFAULT_MAX_IN_FLIGHT,
    ):
        super().__init__(max_in_flight=max_in_flight)
        self._base_url = base_url.rstrip("/")
        self._model = model
        headers = {"Authorization": f"Bearer {api_key}"} if api_key else {}
        self._client = httpx.Client(timeout=timeout, headers=headers)

    @classmethod
    def from_env(cls, **kwargs) -> "HttpCompletionProvider":
        base_url = os.environ.get(ENV_API_BASE, "")
        if not base_url:
            raise TransportError(f"{ENV_API_BASE} is not set")
        return cls(
            base_url=base_url,
            api_key=os.environ.get(ENV_API_KEY, ""),
            model=os.environ.get(ENV_MODEL, DEFAULT_MODEL),
            **kwargs,
        )

    def _complete_once(self, request: CompletionRequest) -> str:
        body = {
            "model": self._model,
            "prompt": request.prompt,
            "max_tokens": request.max_tokens,
            "temperature": request.temperature,
        }
        try:
            response = self._client.post(f"{self._base_url}/v1/completions", json=body)
        except httpx.HTTPError as exc:
            raise TransportError(f"completion call failed: {exc}") from exc
        if response.status_code // 100 != 2:
            raise TransportError(
                f"completion endpoint returned {response.status_code}"
            )
        try:
            return response.json()["choices"][0]["text"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise TransportError("malformed completion payload") from exc

    def close(self) -> None:
        self._client.close()
