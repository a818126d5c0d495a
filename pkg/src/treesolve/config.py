"""Layered run configuration.

Values resolve in three layers: built-in defaults, then a flat JSON config
file, then explicit overrides (CLI flags). Judge-backend keys carry a
``judge_`` prefix and default to the search backend's resolved values, so a
single endpoint serves both roles unless told otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Union

from .backends import BackendConfig, SamplingParams
from .tree import SearchConfig

SEARCH_KEYS = ("max_depth", "one_step_limit", "terminal_marker")
SAMPLING_KEYS = ("temperature", "top_p", "max_tokens", "seed")
BACKEND_KEYS = (
    "endpoint_url",
    "model_name",
    "api_key",
    "timeout_ms",
    "max_retries",
    "max_concurrent_requests",
    "capture_log",
)
RUN_KEYS = ("parallelism", "prompts_dir")

KNOWN_KEYS = frozenset(
    SEARCH_KEYS
    + SAMPLING_KEYS
    + BACKEND_KEYS
    + tuple(f"judge_{k}" for k in BACKEND_KEYS)
    + RUN_KEYS
)


class ConfigError(ValueError):
    """The config file or an override is malformed."""


@dataclass
class RunConfig:
    search: SearchConfig
    search_backend: BackendConfig
    judge_backend: BackendConfig
    parallelism: int = 1
    prompts_dir: Optional[str] = None


def load_config_file(path: Union[str, Path]) -> dict[str, Any]:
    """Read a flat JSON config document, rejecting unknown keys."""
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: malformed JSON ({exc.msg})") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a flat JSON object")
    unknown = set(data) - KNOWN_KEYS
    if unknown:
        raise ConfigError(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
    return data


def resolve_config(
    file_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """Merge defaults, config file, and overrides into a :class:`RunConfig`.

    With nothing given, the result carries the built-in defaults: tree depth
    7, one-step budget 5, temperature 0.8, top_p 0.9, max_tokens 2048.
    """
    merged: dict[str, Any] = {}
    if file_path is not None:
        merged.update(load_config_file(file_path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        merged[key] = value

    def pick(keys: tuple[str, ...], prefix: str = "") -> dict[str, Any]:
        out: dict[str, Any] = {}
        for key in keys:
            merged_key = prefix + key
            if merged_key in merged:
                out[key] = merged[merged_key]
        return out

    sampling = SamplingParams(**pick(SAMPLING_KEYS))
    search = SearchConfig(sampling=sampling, **pick(SEARCH_KEYS))
    search_backend = BackendConfig(**pick(BACKEND_KEYS))
    judge_values = {
        key: getattr(search_backend, key) for key in BACKEND_KEYS
    } | pick(BACKEND_KEYS, prefix="judge_")
    judge_backend = BackendConfig(**judge_values)
    parallelism = int(merged.get("parallelism", 1))
    prompts_dir = merged.get("prompts_dir")
    return RunConfig(
        search=search,
        search_backend=search_backend,
        judge_backend=judge_backend,
        parallelism=parallelism,
        prompts_dir=prompts_dir,
    )
