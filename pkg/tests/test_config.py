from __future__ import annotations

import json

import pytest

from treesolve.config import ConfigError, load_config_file, resolve_config


def test_built_in_defaults_without_file_or_overrides():
    run = resolve_config()
    assert run.search.max_depth == 7
    assert run.search.one_step_limit == 5
    assert run.search.terminal_marker == "the answer is"
    assert run.search.sampling.temperature == 0.8
    assert run.search.sampling.top_p == 0.9
    assert run.search.sampling.max_tokens == 2048
    assert run.search.sampling.seed is None
    assert run.parallelism == 1
    assert run.prompts_dir is None


def test_file_layer_overrides_defaults(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(
        json.dumps({"max_depth": 3, "temperature": 0.2, "model_name": "local-7b"}),
        encoding="utf-8",
    )
    run = resolve_config(cfg)
    assert run.search.max_depth == 3
    assert run.search.sampling.temperature == 0.2
    assert run.search.sampling.top_p == 0.9  # untouched default
    assert run.search_backend.model_name == "local-7b"


def test_overrides_beat_file_values(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"max_depth": 3}), encoding="utf-8")
    run = resolve_config(cfg, {"max_depth": 2, "top_p": 0.5})
    assert run.search.max_depth == 2
    assert run.search.sampling.top_p == 0.5


def test_none_overrides_are_ignored(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"max_depth": 4}), encoding="utf-8")
    run = resolve_config(cfg, {"max_depth": None})
    assert run.search.max_depth == 4


def test_judge_backend_mirrors_search_unless_overridden(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(
        json.dumps(
            {
                "endpoint_url": "http://search:8000/v1",
                "model_name": "searcher",
                "judge_model_name": "discriminator",
            }
        ),
        encoding="utf-8",
    )
    run = resolve_config(cfg)
    assert run.judge_backend.endpoint_url == "http://search:8000/v1"
    assert run.judge_backend.model_name == "discriminator"
    assert run.search_backend.model_name == "searcher"


def test_seed_flows_through_sampling(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"seed": 7}), encoding="utf-8")
    run = resolve_config(cfg)
    assert run.search.sampling.seed == 7


def test_unknown_keys_rejected(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"maks_depth": 3}), encoding="utf-8")
    with pytest.raises(ConfigError, match="maks_depth"):
        load_config_file(cfg)
    with pytest.raises(ConfigError, match="nope"):
        resolve_config(None, {"nope": 1})


def test_malformed_file_rejected(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError, match="malformed"):
        resolve_config(cfg)
    cfg.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="flat"):
        resolve_config(cfg)
