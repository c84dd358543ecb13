import threading

import pytest

from sdvbench.analysis import Node, parse
from sdvbench.gateway import (
    CacheStore,
    CompletionRecord,
    Gateway,
    GatewayError,
    ModelSpec,
    OfflineCacheMiss,
    ProviderError,
    RateLimitError,
    _TokenBucket,
    extract_code_block,
    regenerate_on_invalid,
    request_fingerprint,
)
from sdvbench.prompts import SystemPrompt

SYSTEM = SystemPrompt((), "")
MODEL = ModelSpec("fake", "fake-1")


class Scripted:
    """Returns canned responses in order; entries that are exceptions get raised."""

    def __init__(self, *responses):
        self.responses = list(responses)
        self.calls = []

    def complete(self, model, system, user, attempt=1):
        self.calls.append((model.model_name, system, user, attempt))
        r = self.responses.pop(0) if len(self.responses) > 1 else self.responses[0]
        if isinstance(r, Exception):
            raise r
        return r


def gateway(tmp_path, provider, **kw):
    sleeps = []
    gw = Gateway(tmp_path / "cache", providers={"fake": provider}, sleep=sleeps.append, **kw)
    return gw, sleeps


def fenced(code):
    return f"text\n```python\n{code}\n```\n"


# -- fingerprints and cache ------------------------------------------------------


def test_fingerprint_depends_on_every_input():
    base = request_fingerprint(MODEL, "s", "u", 1)
    assert base == request_fingerprint(ModelSpec("fake", "fake-1"), "s", "u", 1)
    variants = [
        request_fingerprint(ModelSpec("fake", "fake-1", temperature=0.7), "s", "u", 1),
        request_fingerprint(ModelSpec("fake", "fake-1", max_tokens=10), "s", "u", 1),
        request_fingerprint(ModelSpec("other", "fake-1"), "s", "u", 1),
        request_fingerprint(MODEL, "t", "u", 1),
        request_fingerprint(MODEL, "s", "v", 1),
        request_fingerprint(MODEL, "s", "u", 2),
    ]
    assert len({base, *variants}) == 7


def test_second_request_is_served_from_cache(tmp_path):
    p = Scripted(fenced("x = 1"))
    gw, _ = gateway(tmp_path, p)
    a = gw.generate(MODEL, SYSTEM, "do it")
    b = gw.generate(MODEL, SYSTEM, "do it")
    assert a == b and len(p.calls) == 1 and gw.provider_calls == 1
    assert a.extracted_code == "x = 1\n"


def test_replay_from_a_fresh_gateway_makes_no_calls(tmp_path):
    gw, _ = gateway(tmp_path, Scripted(fenced("x = 1")))
    rec = gw.generate(MODEL, SYSTEM, "do it")
    p2 = Scripted(RuntimeError("must not be called"))
    gw2, _ = gateway(tmp_path, p2, offline=True)
    assert gw2.generate(MODEL, SYSTEM, "do it") == rec
    assert p2.calls == [] and gw2.provider_calls == 0


def test_offline_miss_is_an_error(tmp_path):
    p = Scripted(fenced("x = 1"))
    gw, _ = gateway(tmp_path, p, offline=True)
    with pytest.raises(OfflineCacheMiss):
        gw.generate(MODEL, SYSTEM, "do it")
    assert p.calls == []


def test_temperature_change_misses_cache(tmp_path):
    p = Scripted(fenced("x = 1"))
    gw, _ = gateway(tmp_path, p)
    gw.generate(MODEL, SYSTEM, "do it")
    gw.generate(ModelSpec("fake", "fake-1", temperature=0.5), SYSTEM, "do it")
    assert len(p.calls) == 2 and len(gw.cache) == 2


def test_record_round_trip_and_format_check(tmp_path):
    gw, _ = gateway(tmp_path, Scripted(fenced("x = 1")))
    rec = gw.generate(MODEL, SYSTEM, "u")
    assert CompletionRecord.from_json(rec.to_json()) == rec
    with pytest.raises(GatewayError):
        CompletionRecord.from_json('{"fingerprint": "x"}')


def test_put_is_atomic_and_leaves_no_temp_files(tmp_path, monkeypatch):
    store = CacheStore(tmp_path)
    rec = CompletionRecord("ab", "p", "m", {}, "s", "u", "r", "c", "t")
    store.put(rec)
    assert store.get("ab") == rec

    import os

    def boom(src, dst):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    newer = CompletionRecord("ab", "p", "m", {}, "s", "u", "other", "c", "t")
    with pytest.raises(OSError):
        store.put(newer)
    assert store.get("ab") == rec
    assert [p.name for p in tmp_path.iterdir()] == ["ab.json"]


def test_cache_get_missing(tmp_path):
    assert CacheStore(tmp_path / "nope").get("x") is None
    assert len(CacheStore(tmp_path / "nope")) == 0


def test_model_spec_validation():
    with pytest.raises(ValueError):
        ModelSpec("p", "m", temperature=3)
    with pytest.raises(ValueError):
        ModelSpec("p", "m", max_tokens=0)


# -- code extraction ---------------------------------------------------------------


def test_largest_block_wins():
    small = "\n".join(f"a{i} = {i}" for i in range(10))
    big = "\n".join(f"b{i} = {i}" for i in range(40))
    raw = f"intro\n```python\n{small}\n```\nmore\n```\n{big}\n```\n"
    assert extract_code_block(raw) == big + "\n"


def test_tie_goes_to_first_block():
    raw = "```python\nx = 1\n```\n```python\ny = 2\n```"
    assert extract_code_block(raw) == "x = 1\n"


def test_no_fence_returns_trimmed_text():
    assert extract_code_block("   x = 1\n\n") == "x = 1"


def test_empty_response_is_an_error():
    with pytest.raises(GatewayError):
        extract_code_block("  \n ")


def test_empty_response_stored_with_empty_code(tmp_path):
    gw, _ = gateway(tmp_path, Scripted(""))
    assert gw.generate(MODEL, SYSTEM, "u").extracted_code == ""


# -- regeneration ----------------------------------------------------------------


def parses(code):
    return isinstance(parse(code), Node)


def test_valid_first_attempt(tmp_path):
    p = Scripted(fenced("x = 1"))
    gw, _ = gateway(tmp_path, p)
    rec = regenerate_on_invalid(gw, MODEL, SYSTEM, "u", parses)
    assert (rec.attempt, rec.valid) == (1, True) and len(p.calls) == 1


def test_two_invalid_then_valid(tmp_path):
    p = Scripted(fenced("if x"), fenced("x = = 1"), fenced("x = 1"))
    gw, _ = gateway(tmp_path, p)
    rec = regenerate_on_invalid(gw, MODEL, SYSTEM, "u", parses, max_attempts=3)
    assert (rec.attempt, rec.valid) == (3, True)
    assert [c[3] for c in p.calls] == [1, 2, 3]
    assert rec.extracted_code == "x = 1\n"


def test_all_attempts_invalid_returns_last_unedited(tmp_path):
    p = Scripted(fenced("if x"))
    gw, _ = gateway(tmp_path, p)
    rec = regenerate_on_invalid(gw, MODEL, SYSTEM, "u", parses, max_attempts=3)
    assert (rec.attempt, rec.valid) == (3, False)
    assert rec.extracted_code == "if x\n"


def test_regeneration_replays_offline(tmp_path):
    gw, _ = gateway(tmp_path, Scripted(fenced("if x"), fenced("x = 1")))
    first = regenerate_on_invalid(gw, MODEL, SYSTEM, "u", parses)
    gw2, _ = gateway(tmp_path, Scripted(RuntimeError("no")), offline=True)
    assert regenerate_on_invalid(gw2, MODEL, SYSTEM, "u", parses) == first


def test_max_attempts_must_be_positive(tmp_path):
    gw, _ = gateway(tmp_path, Scripted("x"))
    with pytest.raises(ValueError):
        regenerate_on_invalid(gw, MODEL, SYSTEM, "u", parses, max_attempts=0)


# -- retries and rate limits ----------------------------------------------------------


def test_transient_errors_back_off_exponentially(tmp_path):
    p = Scripted(ProviderError("503"), ProviderError("503"), fenced("x = 1"))
    gw, sleeps = gateway(tmp_path, p, backoff=0.5)
    assert gw.generate(MODEL, SYSTEM, "u").extracted_code == "x = 1\n"
    assert sleeps == [0.5, 1.0] and gw.provider_calls == 3


def test_retry_after_is_honoured(tmp_path):
    p = Scripted(RateLimitError("429", retry_after=7.0), fenced("x = 1"))
    gw, sleeps = gateway(tmp_path, p)
    gw.generate(MODEL, SYSTEM, "u")
    assert sleeps == [7.0]


def test_non_retryable_error_propagates_immediately(tmp_path):
    p = Scripted(ProviderError("400", retryable=False))
    gw, sleeps = gateway(tmp_path, p)
    with pytest.raises(ProviderError):
        gw.generate(MODEL, SYSTEM, "u")
    assert sleeps == [] and len(p.calls) == 1 and len(gw.cache) == 0


def test_retries_are_bounded(tmp_path):
    p = Scripted(ProviderError("503"))
    gw, sleeps = gateway(tmp_path, p, max_retries=2)
    with pytest.raises(ProviderError):
        gw.generate(MODEL, SYSTEM, "u")
    assert len(p.calls) == 3 and len(sleeps) == 2


def test_unknown_provider(tmp_path):
    gw = Gateway(tmp_path)
    with pytest.raises(ProviderError, match="unknown provider"):
        gw.generate(ModelSpec("nobody", "m"), SYSTEM, "u")


def test_token_bucket_waits_for_refill():
    now = [0.0]
    waits = []

    def sleep(dt):
        waits.append(dt)
        now[0] += dt

    bucket = _TokenBucket(rate=2.0, burst=2, clock=lambda: now[0], sleep=sleep)
    for _ in range(5):
        bucket.acquire()
    # two free tokens, then one every half second
    assert waits == pytest.approx([0.5, 0.5, 0.5])
    assert now[0] == pytest.approx(1.5)


def test_concurrency_cap_per_provider(tmp_path):
    active, peak = [0], [0]
    lock = threading.Lock()
    gate = threading.Event()

    class Slow:
        def complete(self, model, system, user, attempt=1):
            with lock:
                active[0] += 1
                peak[0] = max(peak[0], active[0])
            gate.wait(0.05)
            with lock:
                active[0] -= 1
            return fenced(user)

    gw = Gateway(tmp_path, providers={"fake": Slow()}, concurrency=2)
    threads = [threading.Thread(target=gw.generate, args=(MODEL, SYSTEM, f"x{i} = 1")) for i in range(6)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert peak[0] <= 2 and gw.provider_calls == 6
