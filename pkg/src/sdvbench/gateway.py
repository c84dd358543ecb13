"""Model dispatch with a content-addressed record/replay cache.

Every request is keyed by a fingerprint over the model spec, the system
prompt fingerprint, the user prompt and the attempt number. A cache hit is
returned without touching the provider; in offline mode a miss is an error.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import tempfile
import threading
import time
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from .prompts import SystemPrompt

__all__ = [
    "CacheStore",
    "CompletionRecord",
    "Gateway",
    "GatewayError",
    "ModelSpec",
    "OfflineCacheMiss",
    "ProviderError",
    "RateLimitError",
    "extract_code_block",
    "regenerate_on_invalid",
    "request_fingerprint",
]

RECORD_FORMAT = "sdvbench-completion/1"


class GatewayError(RuntimeError):
    pass


class OfflineCacheMiss(GatewayError):
    pass


class ProviderError(GatewayError):
    def __init__(self, message: str, retryable: bool = True) -> None:
        super().__init__(message)
        self.retryable = retryable


class RateLimitError(ProviderError):
    def __init__(self, message: str, retry_after: float | None = None) -> None:
        super().__init__(message, retryable=True)
        self.retry_after = retry_after


@dataclass(frozen=True)
class ModelSpec:
    provider_id: str
    model_name: str
    temperature: float = 0.0
    max_tokens: int = 4096

    def __post_init__(self) -> None:
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")

    @property
    def label(self) -> str:
        return self.model_name

    def params(self) -> dict:
        return {"temperature": self.temperature, "max_tokens": self.max_tokens}


@dataclass(frozen=True)
class CompletionRecord:
    fingerprint: str
    provider_id: str
    model_name: str
    params: dict
    system_fingerprint: str
    user_prompt: str
    raw_response: str
    extracted_code: str
    timestamp: str
    attempt: int = 1
    valid: bool | None = None

    def to_json(self) -> str:
        return json.dumps({"format": RECORD_FORMAT, **asdict(self)}, indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CompletionRecord":
        data = json.loads(text)
        if data.pop("format", None) != RECORD_FORMAT:
            raise GatewayError("not a completion record")
        return cls(**data)


def request_fingerprint(model: ModelSpec, system_fingerprint: str, user: str, attempt: int) -> str:
    payload = json.dumps(
        {
            "provider": model.provider_id,
            "model": model.model_name,
            "params": model.params(),
            "system": system_fingerprint,
            "user": user,
            "attempt": attempt,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


_FENCE = re.compile(r"^[ \t]*```[^\n`]*\n(.*?)^[ \t]*```[ \t]*$", re.DOTALL | re.MULTILINE)


def extract_code_block(raw: str) -> str:
    """Body of the largest fenced code block, or the trimmed response if there is none."""
    if not raw.strip():
        raise GatewayError("empty response")
    blocks = _FENCE.findall(raw)
    if not blocks:
        return raw.strip()
    # ties go to the earliest block
    best = max(blocks, key=lambda b: (len(b.splitlines()), len(b)))
    return best.rstrip() + "\n" if best.strip() else best


class CacheStore:
    """One JSON record per fingerprint; writes are atomic (temp file + rename)."""

    def __init__(self, directory: str | os.PathLike) -> None:
        self.root = Path(directory)

    def path(self, fingerprint: str) -> Path:
        return self.root / f"{fingerprint}.json"

    def get(self, fingerprint: str) -> CompletionRecord | None:
        p = self.path(fingerprint)
        if not p.is_file():
            return None
        return CompletionRecord.from_json(p.read_text(encoding="utf-8"))

    def put(self, record: CompletionRecord) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.root, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(record.to_json())
            os.replace(tmp, self.path(record.fingerprint))
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def __len__(self) -> int:
        return sum(1 for _ in self.root.glob("*.json")) if self.root.is_dir() else 0


class _TokenBucket:
    def __init__(self, rate: float, burst: int, clock: Callable[[], float], sleep: Callable[[float], None]):
        self.rate = rate
        self.capacity = float(burst)
        self.tokens = float(burst)
        self.clock = clock
        self.sleep = sleep
        self.last = clock()
        self.lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self.lock:
                now = self.clock()
                self.tokens = min(self.capacity, self.tokens + (now - self.last) * self.rate)
                self.last = now
                if self.tokens >= 1.0:
                    self.tokens -= 1.0
                    return
                wait = (1.0 - self.tokens) / self.rate
            self.sleep(wait)


@dataclass
class Gateway:
    """Routes requests to registered providers through the record/replay cache."""

    cache_dir: str | os.PathLike
    offline: bool = False
    providers: dict = field(default_factory=dict)
    max_retries: int = 4
    backoff: float = 1.0
    concurrency: int = 4
    requests_per_second: float | None = None
    sleep: Callable[[float], None] = time.sleep
    clock: Callable[[], float] = time.monotonic

    def __post_init__(self) -> None:
        self.cache = CacheStore(self.cache_dir)
        self.provider_calls = 0
        self._lock = threading.Lock()
        self._semaphores: dict[str, threading.Semaphore] = {}
        self._buckets: dict[str, _TokenBucket] = {}

    def _provider(self, provider_id: str):
        if provider_id not in self.providers:
            from .providers import make_provider

            self.providers[provider_id] = make_provider(provider_id)
        return self.providers[provider_id]

    def _limits(self, provider_id: str) -> tuple[threading.Semaphore, _TokenBucket | None]:
        with self._lock:
            sem = self._semaphores.setdefault(provider_id, threading.Semaphore(self.concurrency))
            bucket = None
            if self.requests_per_second:
                bucket = self._buckets.setdefault(
                    provider_id,
                    _TokenBucket(self.requests_per_second, max(1, self.concurrency), self.clock, self.sleep),
                )
        return sem, bucket

    def generate(self, model: ModelSpec, system: SystemPrompt, user: str, attempt: int = 1) -> CompletionRecord:
        fp = request_fingerprint(model, system.fingerprint, user, attempt)
        cached = self.cache.get(fp)
        if cached is not None:
            return cached
        if self.offline:
            raise OfflineCacheMiss(f"no cached response for {model.model_name} ({fp[:12]})")
        raw = self._call(model, system.rendered_text, user, attempt)
        try:
            code = extract_code_block(raw)
        except GatewayError:
            code = ""
        record = CompletionRecord(
            fingerprint=fp,
            provider_id=model.provider_id,
            model_name=model.model_name,
            params=model.params(),
            system_fingerprint=system.fingerprint,
            user_prompt=user,
            raw_response=raw,
            extracted_code=code,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds"),
            attempt=attempt,
        )
        self.cache.put(record)
        return record

    def _call(self, model: ModelSpec, system: str, user: str, attempt: int) -> str:
        provider = self._provider(model.provider_id)
        sem, bucket = self._limits(model.provider_id)
        delay = self.backoff
        for n in range(self.max_retries + 1):
            if bucket is not None:
                bucket.acquire()
            try:
                with sem:
                    with self._lock:
                        self.provider_calls += 1
                    return provider.complete(model, system, user, attempt=attempt)
            except ProviderError as exc:
                if not exc.retryable or n == self.max_retries:
                    raise
                wait = getattr(exc, "retry_after", None) or delay
                self.sleep(wait)
                delay *= 2
        raise AssertionError("unreachable")


def regenerate_on_invalid(
    gateway: Gateway,
    model: ModelSpec,
    system: SystemPrompt,
    user: str,
    validator: Callable[[str], bool],
    max_attempts: int = 3,
) -> CompletionRecord:
    """Re-request until ``validator`` accepts the extracted code.

    Each attempt has its own fingerprint. The returned record carries the
    number of the attempt that produced it and whether it passed; output is
    never edited.
    """
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")
    record = None
    for attempt in range(1, max_attempts + 1):
        record = gateway.generate(model, system, user, attempt=attempt)
        ok = bool(record.extracted_code.strip()) and validator(record.extracted_code)
        if ok:
            return _with_validity(record, True)
    assert record is not None
    return _with_validity(record, False)


def _with_validity(record: CompletionRecord, valid: bool) -> CompletionRecord:
    data = asdict(record)
    data["valid"] = valid
    return CompletionRecord(**data)
