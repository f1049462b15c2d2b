"""Provider-agnostic LLM access: templating, caching, retries, mock replay.

Only greedy (temperature == 0) requests are cached: they are the only
deterministic ones. Retries are safe for the same reason. The mock provider
answers from an exact-prompt table or an ordered script so the whole
pipeline runs offline.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Protocol

import requests

from .errors import (
    InvariantViolation,
    MissingBinding,
    ProviderError,
    ProviderTimeout,
    UnknownPlaceholder,
)

PLACEHOLDERS = ("problem", "problem_1", "problem_2", "function_name", "assertions")

# kind -> placeholders its template may use
TEMPLATE_KINDS: dict[str, frozenset[str]] = {
    "difficult": frozenset({"problem"}),
    "creative": frozenset({"problem"}),
    "subtle": frozenset({"problem"}),
    "combine": frozenset({"problem_1", "problem_2"}),
    "tool_use": frozenset({"problem"}),
    "verbose": frozenset({"problem"}),
    "concise": frozenset({"problem"}),
    "decompose": frozenset({"problem"}),
    "refine": frozenset({"problem"}),
    "extract_tests": frozenset({"problem", "function_name"}),
    "fix_examples": frozenset({"problem", "assertions"}),
}

_PLACEHOLDER_RE = re.compile(r"\{(" + "|".join(PLACEHOLDERS) + r")\}")


@dataclass(frozen=True)
class Decoding:
    temperature: float = 0.0
    max_tokens: int = 4096

    def __post_init__(self):
        if self.temperature < 0:
            raise InvariantViolation("decoding", "temperature must be >= 0")


@dataclass(frozen=True)
class ModelSpec:
    model_id: str
    kind: str = "instruct"  # base | instruct
    provider: str = "mock"  # openai_compatible | anthropic_compatible | local_http | mock
    decoding: Decoding = field(default_factory=Decoding)

    def __post_init__(self):
        if self.kind not in ("base", "instruct"):
            raise InvariantViolation("model-kind", self.kind)
        if self.provider not in (
            "openai_compatible", "anthropic_compatible", "local_http", "mock"
        ):
            raise InvariantViolation("provider", self.provider)

    @property
    def greedy(self) -> bool:
        return self.decoding.temperature == 0


@dataclass(frozen=True)
class PromptTemplate:
    kind: str
    body: str

    def __post_init__(self):
        if self.kind not in TEMPLATE_KINDS:
            raise InvariantViolation("template-kind", self.kind)
        allowed = TEMPLATE_KINDS[self.kind]
        for name in self.placeholders():
            if name not in allowed:
                raise InvariantViolation(
                    "template-placeholder",
                    f"{{{name}}} is not allowed in a {self.kind} template",
                )

    def placeholders(self) -> set[str]:
        return set(_PLACEHOLDER_RE.findall(self.body))


def load_template(kind: str) -> PromptTemplate:
    """Load the shipped template for `kind` from the prompts/ directory."""
    body = (
        resources.files("benchforge").joinpath(f"prompts/{kind}.txt").read_text("utf-8")
    )
    return PromptTemplate(kind=kind, body=body)


def render(template: PromptTemplate, bindings: dict[str, str]) -> str:
    """Substitute placeholders verbatim; bindings must match exactly."""
    wanted = template.placeholders()
    for name in bindings:
        if name not in wanted:
            raise UnknownPlaceholder(
                f"{{{name}}} does not appear in the {template.kind} template"
            )
    missing = wanted - set(bindings)
    if missing:
        raise MissingBinding(", ".join(sorted(missing)))
    return _PLACEHOLDER_RE.sub(lambda m: bindings[m.group(1)], template.body)


class Provider(Protocol):
    def complete(self, model: ModelSpec, prompt: str) -> str: ...


class TransientProviderFailure(Exception):
    """Retryable transport failure (5xx, timeout, connection reset)."""

    def __init__(self, message: str, status: int | None = None):
        self.status = status
        super().__init__(message)


class MockProvider:
    """Offline provider: exact-prompt replies and/or an ordered script.

    Script entries may be reply strings, exceptions to raise, or callables
    taking the prompt. Exact-prompt replies win over the script.
    """

    def __init__(self, replies: dict[str, str] | None = None, script: list | None = None):
        self.replies = dict(replies or {})
        self.script = list(script or [])
        self.calls: list[tuple[str, str]] = []
        self._lock = threading.Lock()

    def push(self, *entries) -> None:
        self.script.extend(entries)

    def complete(self, model: ModelSpec, prompt: str) -> str:
        with self._lock:
            self.calls.append((model.model_id, prompt))
            if prompt in self.replies:
                return self.replies[prompt]
            if self.script:
                entry = self.script.pop(0)
            else:
                raise ProviderError(f"mock has no reply for prompt: {prompt[:80]!r}...")
        if isinstance(entry, BaseException):
            raise entry
        if callable(entry):
            return entry(prompt)
        return entry


class OpenAICompatProvider:
    def __init__(self, base_url: str, api_key: str = "", timeout_s: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.timeout_s = timeout_s

    def complete(self, model: ModelSpec, prompt: str) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        body = {
            "model": model.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": model.decoding.temperature,
            "max_tokens": model.decoding.max_tokens,
        }
        data = _post_json(
            f"{self.base_url}/chat/completions", body, headers, self.timeout_s
        )
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed completion response: {exc}") from exc


class AnthropicCompatProvider:
    def __init__(self, base_url: str, api_key: str = "", timeout_s: float = 120.0):
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.timeout_s = timeout_s

    def complete(self, model: ModelSpec, prompt: str) -> str:
        headers = {
            "Content-Type": "application/json",
            "x-api-key": self.api_key,
            "anthropic-version": "2023-06-01",
        }
        body = {
            "model": model.model_id,
            "max_tokens": model.decoding.max_tokens,
            "temperature": model.decoding.temperature,
            "messages": [{"role": "user", "content": prompt}],
        }
        data = _post_json(f"{self.base_url}/v1/messages", body, headers, self.timeout_s)
        try:
            return "".join(
                part["text"] for part in data["content"] if part.get("type") == "text"
            )
        except (KeyError, TypeError) as exc:
            raise ProviderError(f"malformed messages response: {exc}") from exc


class LocalHTTPProvider:
    """Bare POST {prompt, temperature, max_tokens} -> {text} endpoint."""

    def __init__(self, base_url: str, timeout_s: float = 120.0):
        self.base_url = base_url
        self.timeout_s = timeout_s

    def complete(self, model: ModelSpec, prompt: str) -> str:
        body = {
            "model": model.model_id,
            "prompt": prompt,
            "temperature": model.decoding.temperature,
            "max_tokens": model.decoding.max_tokens,
        }
        data = _post_json(self.base_url, body, {}, self.timeout_s)
        if "text" not in data:
            raise ProviderError("malformed local response: no 'text'")
        return data["text"]


def _post_json(url: str, body: dict, headers: dict, timeout_s: float) -> dict:
    try:
        response = requests.post(url, json=body, headers=headers, timeout=timeout_s)
    except requests.Timeout as exc:
        raise TransientProviderFailure(f"timeout calling {url}") from exc
    except requests.ConnectionError as exc:
        raise TransientProviderFailure(f"connection error calling {url}") from exc
    if response.status_code >= 500:
        raise TransientProviderFailure(
            f"HTTP {response.status_code} from {url}", status=response.status_code
        )
    if response.status_code >= 400:
        raise ProviderError(
            f"HTTP {response.status_code} from {url}: {response.text[:200]}",
            status=response.status_code,
        )
    try:
        return response.json()
    except ValueError as exc:
        raise ProviderError(f"non-JSON response from {url}") from exc


class LlmGateway:
    """Routes completions to providers with caching, retries, rate limiting."""

    def __init__(
        self,
        providers: dict[str, Provider],
        cache_dir: str | Path | None = None,
        retries: int = 3,
        backoff_s: float = 0.5,
        min_interval_s: float = 0.0,
        sleep=time.sleep,
    ):
        self.providers = providers
        self.cache_dir = Path(cache_dir) if cache_dir else None
        if self.cache_dir:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
        self.retries = retries
        self.backoff_s = backoff_s
        self.min_interval_s = min_interval_s
        self._sleep = sleep
        self._cache: dict[str, str] = {}
        self._lock = threading.Lock()
        self._last_call: dict[str, float] = {}

    def complete(self, model: ModelSpec, prompt: str) -> str:
        if not prompt:
            raise ValueError("prompt must be non-empty")
        key = _cache_key(model.model_id, prompt)
        if model.greedy:
            cached = self._cache_get(key)
            if cached is not None:
                return cached
        provider = self.providers.get(model.provider)
        if provider is None:
            raise ProviderError(f"no provider configured for {model.provider!r}")
        text = self._call_with_retries(provider, model, prompt)
        if model.greedy:
            self._cache_put(key, text)
        return text

    def _call_with_retries(self, provider: Provider, model: ModelSpec, prompt: str) -> str:
        self._rate_limit(model.provider)
        last: TransientProviderFailure | None = None
        for attempt in range(self.retries):
            try:
                return provider.complete(model, prompt)
            except TransientProviderFailure as exc:
                last = exc
                if attempt + 1 < self.retries:
                    self._sleep(self.backoff_s * (2 ** attempt))
        assert last is not None
        if "timeout" in str(last):
            raise ProviderTimeout(str(last), status=last.status, attempts=self.retries)
        raise ProviderError(str(last), status=last.status, attempts=self.retries)

    def _rate_limit(self, provider_name: str) -> None:
        if self.min_interval_s <= 0:
            return
        with self._lock:
            last = self._last_call.get(provider_name, 0.0)
            wait = last + self.min_interval_s - time.monotonic()
            self._last_call[provider_name] = max(
                time.monotonic(), last + self.min_interval_s
            )
        if wait > 0:
            self._sleep(wait)

    def _cache_get(self, key: str) -> str | None:
        with self._lock:
            if key in self._cache:
                return self._cache[key]
        if self.cache_dir:
            path = self.cache_dir / f"{key}.json"
            if path.exists():
                text = json.loads(path.read_text("utf-8"))["text"]
                with self._lock:
                    self._cache[key] = text
                return text
        return None

    def _cache_put(self, key: str, text: str) -> None:
        with self._lock:
            self._cache[key] = text
        if self.cache_dir:
            path = self.cache_dir / f"{key}.json"
            path.write_text(json.dumps({"text": text}, ensure_ascii=False), "utf-8")


def _cache_key(model_id: str, prompt: str) -> str:
    digest = hashlib.sha256()
    digest.update(model_id.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt.encode("utf-8"))
    return digest.hexdigest()


def mock_gateway(provider: MockProvider | None = None, **kwargs) -> LlmGateway:
    """Gateway wired to a single mock provider; returns (gateway) with
    gateway.providers['mock'] exposed for scripting."""
    provider = provider or MockProvider()
    kwargs.setdefault("backoff_s", 0.0)
    return LlmGateway(providers={"mock": provider}, **kwargs)
