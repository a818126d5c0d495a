"""Generation backends.

Two implementations of one generator interface: an HTTP client speaking the
OpenAI-compatible chat-completion protocol (what vLLM and most serving stacks
expose) for live runs, and a deterministic scripted backend for tests and
offline runs. Both return one :class:`GenerationRecord` per logical call.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, Optional, Protocol, Sequence, Union

import httpx

from .actions import ActionKind

API_KEY_ENV_VARS = ("TREESOLVE_API_KEY", "OPENAI_API_KEY")

_sleep = time.sleep  # patchable seam so tests can skip real backoff waits


class BackendError(RuntimeError):
    """A generation call failed for good (retries exhausted or protocol error)."""


class ScriptExhaustedError(BackendError):
    """A scripted backend had no response left for a call."""


@dataclass(frozen=True)
class SamplingParams:
    """Sampling settings sent with every generation request."""

    temperature: float = 0.8
    top_p: float = 0.9
    max_tokens: int = 2048
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


@dataclass(frozen=True)
class GenerationRecord:
    """One completed generation call, with token accounting."""

    prompt: str
    action_prompt: str
    output: str
    prompt_tokens: int
    completion_tokens: int
    latency_ms: int


@dataclass
class BackendConfig:
    """Connection settings for one chat-completion endpoint."""

    endpoint_url: str = "http://localhost:8000/v1"
    model_name: str = ""
    api_key: Optional[str] = None
    timeout_ms: int = 60_000
    max_retries: int = 3
    max_concurrent_requests: int = 8
    capture_log: Optional[str] = None

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_concurrent_requests < 1:
            raise ValueError("max_concurrent_requests must be >= 1")


def whitespace_tokens(text: str) -> int:
    """Fallback token count when the endpoint reports no usage."""
    return len(text.split())


class Generator(Protocol):
    """Anything that can produce one completion per call."""

    def generate(
        self,
        context_prompt: str,
        action_prompt: str = "",
        params: Optional[SamplingParams] = None,
        *,
        action: Optional[ActionKind] = None,
        depth: Optional[int] = None,
    ) -> GenerationRecord: ...


# ---------------------------------------------------------------------------
# Scripted backend
# ---------------------------------------------------------------------------

ScriptValue = Union[str, Callable[[str, Optional[ActionKind], Optional[int]], str]]


def _context_key(context_prompt: str, action_prompt: Optional[str] = None) -> str:
    payload = context_prompt if action_prompt is None else context_prompt + "\x1f" + action_prompt
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _norm_action(action: object) -> Optional[ActionKind]:
    if action is None or action == "*":
        return None
    return ActionKind(action)


def _norm_depth(depth: object) -> Optional[int]:
    if depth is None or depth == "*":
        return None
    return int(depth)  # type: ignore[arg-type]


class ScriptedBackend:
    """Deterministic generator driven by a script.

    Lookup precedence per call: exact (context, action-prompt) entry, exact
    context-only entry, (action, depth) rule with wildcard fallback, next
    sequence item, default text. Rule and exact values may be callables taking
    (context_prompt, action, depth). Sequence consumption is atomic per call;
    rule- and exact-driven scripts are independent of call order, sequence
    scripts are not.
    """

    def __init__(
        self,
        *,
        sequence: Optional[Sequence[ScriptValue]] = None,
        rules: Optional[Mapping[Any, ScriptValue]] = None,
        exact: Optional[Mapping[Any, ScriptValue]] = None,
        default: Optional[ScriptValue] = None,
    ):
        self._lock = threading.Lock()
        self._sequence = list(sequence or [])
        self._cursor = 0
        self._rules: dict[tuple[Optional[ActionKind], Optional[int]], ScriptValue] = {}
        for key, value in (rules or {}).items():
            action, depth = key if isinstance(key, tuple) else (key, None)
            self._rules[(_norm_action(action), _norm_depth(depth))] = value
        self._exact: dict[str, ScriptValue] = {}
        for key, value in (exact or {}).items():
            if isinstance(key, tuple):
                self._exact[_context_key(*key)] = value
            else:
                self._exact[_context_key(str(key))] = value
        self._default = default

    def generate(
        self,
        context_prompt: str,
        action_prompt: str = "",
        params: Optional[SamplingParams] = None,
        *,
        action: Optional[ActionKind] = None,
        depth: Optional[int] = None,
    ) -> GenerationRecord:
        started = time.perf_counter()
        found = self._lookup(context_prompt, action_prompt, action, depth)
        output = found(context_prompt, action, depth) if callable(found) else found
        return GenerationRecord(
            prompt=context_prompt,
            action_prompt=action_prompt,
            output=output,
            prompt_tokens=whitespace_tokens(context_prompt) + whitespace_tokens(action_prompt),
            completion_tokens=whitespace_tokens(output),
            latency_ms=int((time.perf_counter() - started) * 1000),
        )

    def _lookup(
        self,
        context_prompt: str,
        action_prompt: str,
        action: Optional[ActionKind],
        depth: Optional[int],
    ) -> ScriptValue:
        joint = _context_key(context_prompt, action_prompt)
        if joint in self._exact:
            return self._exact[joint]
        context_only = _context_key(context_prompt)
        if context_only in self._exact:
            return self._exact[context_only]
        for rule_key in ((action, depth), (action, None), (None, depth), (None, None)):
            if rule_key in self._rules:
                return self._rules[rule_key]
        with self._lock:
            if self._cursor < len(self._sequence):
                item = self._sequence[self._cursor]
                self._cursor += 1
                return item
        if self._default is not None:
            return self._default
        raise ScriptExhaustedError("scripted backend has no response left for this call")

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "scripted",
            "rules": len(self._rules),
            "exact": len(self._exact),
            "sequence": len(self._sequence),
            "has_default": self._default is not None,
        }


def scripted_backend(script: Any) -> ScriptedBackend:
    """Build a :class:`ScriptedBackend` from a bare sequence, a rules mapping,
    or a mapping with any of the keys sequence/rules/exact/default."""
    if isinstance(script, ScriptedBackend):
        return script
    if isinstance(script, (list, tuple)):
        if not script:
            raise ValueError("script sequence is empty")
        return ScriptedBackend(sequence=script)
    if isinstance(script, Mapping):
        if not script:
            raise ValueError("script mapping is empty")
        reserved = {"sequence", "rules", "exact", "default"}
        if all(isinstance(k, str) for k in script) and set(script) <= reserved:
            return ScriptedBackend(**{k: script[k] for k in script})
        return ScriptedBackend(rules=script)
    raise TypeError(f"cannot build a scripted backend from {type(script).__name__}")


def load_script_file(path: Union[str, Path]) -> tuple[ScriptedBackend, ScriptedBackend]:
    """Read a JSON script file; returns (search, judge) backends.

    The file either holds one script applied to both roles or an object with
    "search" and/or "judge" sections. JSON rules are a list of
    {"action": ..., "depth": ..., "output": ...} objects where action/depth
    may be "*" or omitted for wildcards.
    """
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, (dict, list)):
        raise ValueError(f"{path}: script file must hold a JSON object or array")
    if not data:
        raise ValueError(f"{path}: script file is empty")

    def build(obj: Any) -> ScriptedBackend:
        if isinstance(obj, list):
            return scripted_backend(obj)
        if not isinstance(obj, dict):
            raise ValueError(f"{path}: script section must be an object or array")
        rules_raw = obj.get("rules")
        rules: Optional[dict] = None
        if rules_raw is not None:
            rules = {}
            for entry in rules_raw:
                rules[(entry.get("action"), entry.get("depth"))] = entry["output"]
        return ScriptedBackend(
            sequence=obj.get("sequence"),
            rules=rules,
            exact=obj.get("exact"),
            default=obj.get("default"),
        )

    if isinstance(data, dict) and data and set(data) <= {"search", "judge"}:
        return build(data.get("search", {"default": ""})), build(data.get("judge", {"default": ""}))
    return build(data), build(data)


# ---------------------------------------------------------------------------
# HTTP backend
# ---------------------------------------------------------------------------


def _backoff_seconds(attempt: int) -> float:
    # 2^attempt * 250 ms with +/-20% jitter
    return 0.25 * (2**attempt) * random.uniform(0.8, 1.2)


class HttpChatBackend:
    """Chat-completion client for any OpenAI-compatible endpoint.

    The action prompt travels as the system message and the accumulated
    context as the user message; an empty action prompt sends the context as
    the sole user message. Transport failures (timeouts, connection errors)
    are retried with exponential backoff up to ``max_retries`` times; non-2xx
    protocol responses fail immediately. Safe to call from many threads; at
    most ``max_concurrent_requests`` requests are in flight at once.
    """

    def __init__(self, config: BackendConfig, default_params: Optional[SamplingParams] = None):
        self._config = config
        self._default_params = default_params or SamplingParams()
        self._semaphore = threading.BoundedSemaphore(config.max_concurrent_requests)
        self._client = httpx.Client(timeout=config.timeout_ms / 1000.0)
        self._capture_lock = threading.Lock()

    @property
    def config(self) -> BackendConfig:
        return self._config

    def _api_key(self) -> Optional[str]:
        for var in API_KEY_ENV_VARS:
            value = os.environ.get(var)
            if value:
                return value
        return self._config.api_key

    def generate(
        self,
        context_prompt: str,
        action_prompt: str = "",
        params: Optional[SamplingParams] = None,
        *,
        action: Optional[ActionKind] = None,
        depth: Optional[int] = None,
    ) -> GenerationRecord:
        if not context_prompt or not context_prompt.strip():
            raise ValueError("context prompt must be nonempty")
        params = params or self._default_params
        messages = []
        if action_prompt:
            messages.append({"role": "system", "content": action_prompt})
        messages.append({"role": "user", "content": context_prompt})
        body: dict[str, Any] = {
            "model": self._config.model_name,
            "messages": messages,
            "temperature": params.temperature,
            "top_p": params.top_p,
            "max_tokens": params.max_tokens,
        }
        if params.seed is not None:
            body["seed"] = params.seed
        url = self._config.endpoint_url.rstrip("/") + "/chat/completions"
        headers = {"Content-Type": "application/json"}
        key = self._api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"

        started = time.perf_counter()
        attempt = 0
        with self._semaphore:
            while True:
                try:
                    response = self._client.post(url, json=body, headers=headers)
                    break
                except httpx.TransportError as exc:
                    if attempt >= self._config.max_retries:
                        raise BackendError(
                            f"generation failed after {attempt + 1} attempts: {exc!r}"
                        ) from exc
                    _sleep(_backoff_seconds(attempt))
                    attempt += 1
        latency_ms = int((time.perf_counter() - started) * 1000)

        if response.status_code // 100 != 2:
            raise BackendError(
                f"backend returned HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            payload = response.json()
            output = payload["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed completion response: {response.text[:200]}") from exc

        usage = payload.get("usage") or {}
        prompt_tokens = usage.get("prompt_tokens")
        if prompt_tokens is None:
            prompt_tokens = whitespace_tokens(context_prompt) + whitespace_tokens(action_prompt)
        completion_tokens = usage.get("completion_tokens")
        if completion_tokens is None:
            completion_tokens = whitespace_tokens(output)

        if self._config.capture_log:
            self._capture(url, body, response.status_code, payload, latency_ms)

        return GenerationRecord(
            prompt=context_prompt,
            action_prompt=action_prompt,
            output=output,
            prompt_tokens=int(prompt_tokens),
            completion_tokens=int(completion_tokens),
            latency_ms=latency_ms,
        )

    def _capture(
        self, url: str, body: dict, status: int, payload: Any, latency_ms: int
    ) -> None:
        line = json.dumps(
            {"url": url, "request": body, "status": status, "response": payload,
             "latency_ms": latency_ms},
            ensure_ascii=False,
        )
        with self._capture_lock:
            with open(self._config.capture_log, "a", encoding="utf-8") as fh:  # type: ignore[arg-type]
                fh.write(line + "\n")

    def describe(self) -> dict[str, Any]:
        return {
            "kind": "http-chat",
            "endpoint_url": self._config.endpoint_url,
            "model_name": self._config.model_name,
            "api_key": "***" if (self._config.api_key or self._api_key()) else None,
            "timeout_ms": self._config.timeout_ms,
            "max_retries": self._config.max_retries,
            "max_concurrent_requests": self._config.max_concurrent_requests,
        }

    def close(self) -> None:
        self._client.close()


# ---------------------------------------------------------------------------
# Wrappers
# ---------------------------------------------------------------------------


class ConcurrencyLimiter:
    """Caps the number of in-flight ``generate`` calls on a wrapped generator."""

    def __init__(self, inner: Generator, max_concurrent: int):
        if max_concurrent < 1:
            raise ValueError("max_concurrent must be >= 1")
        self._inner = inner
        self._semaphore = threading.BoundedSemaphore(max_concurrent)

    def generate(self, *args: Any, **kwargs: Any) -> GenerationRecord:
        with self._semaphore:
            return self._inner.generate(*args, **kwargs)

    def describe(self) -> dict[str, Any]:
        inner = getattr(self._inner, "describe", None)
        return inner() if callable(inner) else {"kind": type(self._inner).__name__}


class RecordingGenerator:
    """Collects every record produced by the wrapped generator (thread-safe)."""

    def __init__(self, inner: Generator):
        self._inner = inner
        self._lock = threading.Lock()
        self.records: list[GenerationRecord] = []

    def generate(self, *args: Any, **kwargs: Any) -> GenerationRecord:
        record = self._inner.generate(*args, **kwargs)
        with self._lock:
            self.records.append(record)
        return record

    @property
    def total_completion_tokens(self) -> int:
        with self._lock:
            return sum(r.completion_tokens for r in self.records)

    def describe(self) -> dict[str, Any]:
        inner = getattr(self._inner, "describe", None)
        return inner() if callable(inner) else {"kind": type(self._inner).__name__}
