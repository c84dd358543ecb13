"""Provider adapters speaking each vendor's chat wire format, plus a scripted mock.

Credentials come from the environment: ``OPENAI_API_KEY``,
``ANTHROPIC_API_KEY`` and ``GEMINI_API_KEY``.
"""

from __future__ import annotations

import hashlib
import os
import re
from typing import Callable, Protocol

import httpx

from .gateway import ModelSpec, ProviderError, RateLimitError

__all__ = [
    "AnthropicProvider",
    "GeminiProvider",
    "MockProvider",
    "OpenAIProvider",
    "Provider",
    "make_provider",
    "register_provider",
]


class Provider(Protocol):
    def complete(self, model: ModelSpec, system: str, user: str, attempt: int = 1) -> str: ...


def _raise_for(resp: httpx.Response) -> None:
    if resp.status_code == 429:
        retry = resp.headers.get("retry-after")
        try:
            after = float(retry) if retry is not None else None
        except ValueError:
            after = None
        raise RateLimitError(f"rate limited ({resp.status_code})", after)
    if resp.status_code >= 500:
        raise ProviderError(f"provider error {resp.status_code}: {resp.text[:200]}")
    if resp.status_code >= 400:
        raise ProviderError(f"request rejected {resp.status_code}: {resp.text[:200]}", retryable=False)


class _HttpProvider:
    env_var = ""
    base_url = ""

    def __init__(self, api_key: str | None = None, client: httpx.Client | None = None,
                 base_url: str | None = None, timeout: float = 120.0) -> None:
        self.api_key = api_key if api_key is not None else os.environ.get(self.env_var)
        self.client = client or httpx.Client(timeout=timeout)
        if base_url:
            self.base_url = base_url

    def _key(self) -> str:
        if not self.api_key:
            raise ProviderError(f"missing credentials: set {self.env_var}", retryable=False)
        return self.api_key

    def _post(self, url: str, headers: dict, body: dict) -> dict:
        try:
            resp = self.client.post(url, headers=headers, json=body)
        except httpx.HTTPError as exc:
            raise ProviderError(f"network error: {exc}") from exc
        _raise_for(resp)
        try:
            return resp.json()
        except ValueError as exc:
            raise ProviderError(f"malformed response body: {exc}") from exc


class OpenAIProvider(_HttpProvider):
    env_var = "OPENAI_API_KEY"
    base_url = "https://api.openai.com/v1"

    def request_body(self, model: ModelSpec, system: str, user: str) -> dict:
        messages = []
        if system:
            messages.append({"role": "system", "content": system})
        messages.append({"role": "user", "content": user})
        return {
            "model": model.model_name,
            "messages": messages,
            "temperature": model.temperature,
            "max_completion_tokens": model.max_tokens,
        }

    def complete(self, model: ModelSpec, system: str, user: str, attempt: int = 1) -> str:
        data = self._post(
            f"{self.base_url}/chat/completions",
            {"Authorization": f"Bearer {self._key()}"},
            self.request_body(model, system, user),
        )
        try:
            return data["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected response shape: {exc}", retryable=False) from exc


class AnthropicProvider(_HttpProvider):
    env_var = "ANTHROPIC_API_KEY"
    base_url = "https://api.anthropic.com/v1"
    api_version = "2023-06-01"

    def request_body(self, model: ModelSpec, system: str, user: str) -> dict:
        body = {
            "model": model.model_name,
            "max_tokens": model.max_tokens,
            "temperature": model.temperature,
            "messages": [{"role": "user", "content": user}],
        }
        if system:
            body["system"] = system
        return body

    def complete(self, model: ModelSpec, system: str, user: str, attempt: int = 1) -> str:
        data = self._post(
            f"{self.base_url}/messages",
            {"x-api-key": self._key(), "anthropic-version": self.api_version},
            self.request_body(model, system, user),
        )
        try:
            return "".join(b.get("text", "") for b in data["content"] if b.get("type") == "text")
        except (KeyError, TypeError, AttributeError) as exc:
            raise ProviderError(f"unexpected response shape: {exc}", retryable=False) from exc


class GeminiProvider(_HttpProvider):
    env_var = "GEMINI_API_KEY"
    base_url = "https://generativelanguage.googleapis.com/v1beta"

    def request_body(self, model: ModelSpec, system: str, user: str) -> dict:
        body = {
            "contents": [{"role": "user", "parts": [{"text": user}]}],
            "generationConfig": {"temperature": model.temperature, "maxOutputTokens": model.max_tokens},
        }
        if system:
            body["systemInstruction"] = {"parts": [{"text": system}]}
        return body

    def complete(self, model: ModelSpec, system: str, user: str, attempt: int = 1) -> str:
        data = self._post(
            f"{self.base_url}/models/{model.model_name}:generateContent",
            {"x-goog-api-key": self._key()},
            self.request_body(model, system, user),
        )
        try:
            parts = data["candidates"][0]["content"]["parts"]
            return "".join(p.get("text", "") for p in parts)
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"unexpected response shape: {exc}", retryable=False) from exc


# -- scripted mock ---------------------------------------------------------

_EXAMPLE_RE = re.compile(
    r"### Example: (?P<id>\S+)\n\nRequest:\n(?P<request>.*?)\n\n(?:Reasoning:\n.*?\n\n)?Solution:\n```python\n(?P<code>.*?)\n```",
    re.DOTALL,
)
_API_PATH_RE = re.compile(r"^path: (\S+)$", re.MULTILINE)
_WORD_RE = re.compile(r"[a-z]+")
_CAMEL_RE = re.compile(r"[A-Z][a-z]+|[a-z]+")


def _words(text: str) -> set[str]:
    return set(_WORD_RE.findall(text.lower()))


def _stable_hash(*parts: str) -> int:
    h = hashlib.sha256("\x1f".join(parts).encode("utf-8")).digest()
    return int.from_bytes(h[:8], "little")


class MockProvider:
    """Deterministic stand-in for a chat model, for offline fixtures and demos.

    With worked examples in the system prompt it answers with the example
    whose request best matches the user prompt. With only an API listing it
    writes a generic script around the signals whose names occur in the
    request. Told about ``VehicleApp`` but given no signals, it writes the
    app skeleton around a guessed signal path. Otherwise it invents an unrelated procedural
    API, and sometimes produces code that does not parse.
    """

    def complete(self, model: ModelSpec, system: str, user: str, attempt: int = 1) -> str:
        seed = _stable_hash(model.model_name, user, str(attempt))
        examples = list(_EXAMPLE_RE.finditer(system))
        if examples:
            return self._from_examples(model, user, examples, seed)
        paths = _API_PATH_RE.findall(system)
        if paths:
            return self._from_listing(model, user, paths, seed)
        if "VehicleApp" in system:
            return self._skeleton(model, user, seed)
        return self._unprompted(model, user, seed, attempt)

    def _from_examples(self, model: ModelSpec, user: str, examples, seed: int) -> str:
        uw = _words(user)

        def similarity(m) -> tuple[float, str]:
            ew = _words(m.group("request"))
            union = uw | ew
            return (len(uw & ew) / len(union) if union else 0.0, m.group("id"))

        best = max(examples, key=similarity)
        code = best.group("code")
        if seed % 2:
            code = code.replace("await asyncio.sleep(1)", "await asyncio.sleep(2)")
        return f"Following the closest worked example ({best.group('id')}):\n\n```python\n{code}\n```\n"

    def _skeleton(self, model: ModelSpec, user: str, seed: int) -> str:
        topic = [w.capitalize() for w in sorted(_words(user), key=len, reverse=True)[:2]] or ["Signal"]
        return self._from_listing(model, user, ["Vehicle." + ".".join(topic)], seed)

    def _from_listing(self, model: ModelSpec, user: str, paths: list[str], seed: int) -> str:
        uw = _words(user)
        scored = []
        for p in paths:
            leaf_words = {w.lower() for w in _CAMEL_RE.findall(p.rsplit(".", 1)[-1])}
            branch_words = {w.lower() for seg in p.split(".")[1:-1] for w in _CAMEL_RE.findall(seg)}
            score = 2 * len(leaf_words & uw) + len(branch_words & uw)
            if score:
                scored.append((-score, p))
        chosen = [p for _, p in sorted(scored)[:3]] or sorted(paths)[:1]
        lines = [
            "from sdv.vehicle_app import VehicleApp",
            "from vehicle import Vehicle, vehicle",
            "import asyncio",
            "",
            "",
            "class GeneratedApp(VehicleApp):",
            "    def __init__(self, vehicle_client: Vehicle):",
            "        super().__init__()",
            "        self.Vehicle = vehicle_client",
            "",
            "    async def on_start(self):",
        ]
        first = chosen[0].replace("Vehicle.", "self.Vehicle.", 1)
        lines.append(f"        value = (await {first}.get()).value")
        lines.append('        print("current value:", value)')
        for p in chosen[1:]:
            target = p.replace("Vehicle.", "self.Vehicle.", 1)
            lines.append(f"        await {target}.set(value)")
        if seed % 3 == 0:
            lines.append("        await asyncio.sleep(1)")
        lines += [
            "",
            "",
            "async def main():",
            "    app = GeneratedApp(vehicle)",
            "    await app.run()",
            "",
            "",
            "LOOP = asyncio.get_event_loop()",
            "LOOP.run_until_complete(main())",
            "LOOP.close()",
        ]
        code = "\n".join(lines)
        return f"Here is a script using the documented signals.\n\n```python\n{code}\n```\n"

    def _unprompted(self, model: ModelSpec, user: str, seed: int, attempt: int) -> str:
        # roughly one in four first attempts is syntactically broken
        if seed % 4 == 0:
            return (
                "Sure! You can do it like this:\n\n```python\n"
                "speed = car.read('speed')\nif speed > 50\n    car.write('lights', True)\n```\n"
            )
        topic = sorted(_words(user), key=len, reverse=True)[:2] or ["signal"]
        name = "_".join(["sig", *topic])
        code = "\n".join(
            [
                "import time",
                "from car_sdk import Car",
                "",
                "car = Car()",
                f"{name} = car.read('{name}')",
                f"if {name}:",
                f"    car.write('{name}', {name})",
                "time.sleep(1)",
            ]
        )
        return f"Here is a simple approach.\n\n```python\n{code}\n```\n"


_REGISTRY: dict[str, Callable[[], Provider]] = {
    "openai": OpenAIProvider,
    "anthropic": AnthropicProvider,
    "gemini": GeminiProvider,
    "mock": MockProvider,
}


def register_provider(provider_id: str, factory: Callable[[], Provider]) -> None:
    _REGISTRY[provider_id] = factory


def make_provider(provider_id: str) -> Provider:
    try:
        factory = _REGISTRY[provider_id]
    except KeyError:
        raise ProviderError(f"unknown provider {provider_id!r}", retryable=False) from None
    return factory()
