import json

import pytest

from config import (
    DEFAULT_OUTPUT_ROOT,
    Config,
    _parse_bool,
    _strip_inline_comment,
    experiment_config_to_dict,
    load_config,
    load_experiment_config,
)
from core.constants import H_MAX
from core.errors import ConfigError

ENV_VARS = (
    "SSPLAB_OUTPUT_ROOT",
    "SSPLAB_PLOTS",
    "SSPLAB_WORKERS",
    "SSPLAB_VI_TOL",
    "SSPLAB_VI_MAX_ITER",
    "SSPLAB_EVI_MAX_SWEEPS",
    "SSPLAB_H_MAX",
    "JSON_LOG_ENABLED",
    "JSON_LOG_PATH",
)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)


def _write(tmp_path, payload, name="exp.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


# ── runtime config ──


def test_strip_inline_comment():
    assert _strip_inline_comment("4   # workers") == "4"
    assert _strip_inline_comment("# nothing") == ""
    assert _strip_inline_comment("  ") == ""


def test_parse_bool():
    assert _parse_bool("yes")
    assert _parse_bool("On # comment")
    assert not _parse_bool("0")
    assert _parse_bool("", default=True)


def test_load_config_defaults():
    cfg = load_config()
    assert cfg.output_root == DEFAULT_OUTPUT_ROOT
    assert cfg.plots
    assert cfg.workers == 1
    assert cfg.h_max == H_MAX
    assert not cfg.json_log


def test_load_config_reads_and_clamps(monkeypatch):
    monkeypatch.setenv("SSPLAB_OUTPUT_ROOT", "/tmp/ssp   # runs go here")
    monkeypatch.setenv("SSPLAB_PLOTS", "no")
    monkeypatch.setenv("SSPLAB_WORKERS", "500")
    monkeypatch.setenv("SSPLAB_VI_TOL", "-1")
    monkeypatch.setenv("SSPLAB_H_MAX", "1")
    monkeypatch.setenv("JSON_LOG_ENABLED", "true")
    cfg = load_config()
    assert cfg.output_root == "/tmp/ssp"
    assert not cfg.plots
    assert cfg.workers == 64
    assert cfg.vi_tol > 0
    assert cfg.h_max == 2
    assert cfg.json_log


def test_load_config_ignores_garbage(monkeypatch):
    monkeypatch.setenv("SSPLAB_WORKERS", "many")
    assert load_config().workers == 1


# ── experiment files ──


def test_experiment_defaults_come_from_runtime(tmp_path):
    runtime = Config(output_root=str(tmp_path / "root"), plots=False, workers=3, h_max=500)
    path = _write(tmp_path, {"scenario": "chain", "algorithms": ["ucssp"], "K": 5})
    cfg = load_experiment_config(path, runtime)
    assert cfg.output_dir == str(tmp_path / "root" / "exp")
    assert (cfg.use_plots, cfg.workers, cfg.h_max) == (False, 3, 500)
    assert cfg.repetitions == 1
    assert experiment_config_to_dict(cfg)["scenario"] == "chain"


def test_experiment_accepts_single_algorithm_string(tmp_path):
    path = _write(tmp_path, {"scenario": "chain", "algorithms": "ucrl2", "K": 2})
    assert load_experiment_config(path, Config()).algorithms == ["ucrl2"]


def test_experiment_accepts_stochastic_costs_and_combined_variant(tmp_path):
    payload = {"scenario": "toy-fig1", "algorithms": ["ucssp", "ucssp_eta"], "K": 2, "stochastic_costs": True}
    path = _write(tmp_path, payload)
    assert load_experiment_config(path, Config()).stochastic_costs
    path = _write(tmp_path, {"scenario": "gridworld-zero", "algorithms": ["ucssp_J_eta"], "K": 2, "penalty_J": 20.0})
    cfg = load_experiment_config(path, Config())
    assert cfg.algorithms == ["ucssp_J_eta"]
    assert not cfg.stochastic_costs


@pytest.mark.parametrize(
    "payload, message",
    [
        ({"scenario": "chain", "algorithms": ["ucssp"]}, "missing"),
        ({"scenario": "chain", "algorithms": ["ucssp"], "K": 5, "episodes": 3}, "unknown experiment fields"),
        ({"scenario": "chain", "algorithms": ["dqn"], "K": 5}, "unknown algorithm"),
        ({"scenario": "chain", "algorithms": [], "K": 5}, "at least one"),
        ({"scenario": "chain", "algorithms": ["ucssp"], "K": 0}, "K must be"),
        ({"scenario": "chain", "algorithms": ["ucssp"], "K": 5, "repetitions": 0}, "repetitions"),
        ({"scenario": "chain", "algorithms": ["ucssp"], "K": 5, "delta": 1.5}, "delta"),
        ({"scenario": "chain", "algorithms": ["ucssp"], "K": 5, "confidence_mode": "kl"}, "confidence mode"),
        ({"scenario": "chain", "algorithms": ["ucssp_J"], "K": 5}, "penalty_J"),
        ({"scenario": "gridworld-zero", "algorithms": ["ucssp_J_eta"], "K": 5}, "penalty_J"),
        ({"scenario": "toy-fig1", "algorithms": ["ucrl2"], "K": 5, "stochastic_costs": True}, "stochastic_costs"),
        (
            {"scenario": "toy-fig1", "algorithms": ["ucssp_J"], "K": 5, "penalty_J": 5.0, "stochastic_costs": True},
            "stochastic_costs",
        ),
        ({"scenario": "maze", "algorithms": ["ucssp"], "K": 5}, "unknown scenario"),
        ({"scenario": "gridworld-sandpit", "algorithms": ["ucrl2"], "K": 5}, "uniform costs"),
        ({"scenario": "gridworld-zero", "algorithms": ["ucssp"], "K": 5}, "ucssp_eta"),
    ],
)
def test_experiment_config_errors(tmp_path, payload, message):
    path = _write(tmp_path, payload)
    with pytest.raises(ConfigError, match=message):
        load_experiment_config(path, Config())


def test_experiment_config_unreadable(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_experiment_config(path, Config())
    with pytest.raises(ConfigError):
        load_experiment_config(_write(tmp_path, [1, 2], "list.json"), Config())
