"""
ssplab: configuration
Flat .env-based runtime settings plus the JSON experiment file.
"""

import json
import os
import re
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from dotenv import load_dotenv

from core.constants import (
    ALGORITHMS,
    CONFIDENCE_MODES,
    DEFAULT_DELTA,
    EVI_MAX_SWEEPS,
    H_MAX,
    VI_MAX_ITER,
    VI_TOL,
)
from core.errors import ConfigError

load_dotenv()

DEFAULT_OUTPUT_ROOT = ".ssplab/runs"


def _strip_inline_comment(value: str) -> str:
    """Strip shell-style inline comments for unquoted env values."""
    if not value:
        return ""
    cleaned = value.strip()
    if not cleaned:
        return ""
    if cleaned.startswith("#"):
        return ""
    return re.sub(r"\s+#.*$", "", cleaned).strip()


def _parse_bool(raw: str, default: bool = False) -> bool:
    cleaned = _strip_inline_comment(raw or "")
    if not cleaned:
        return default
    return cleaned.strip().lower() in {"1", "true", "yes", "y", "on"}


def _parse_int(raw: str, default: int) -> int:
    cleaned = _strip_inline_comment(raw or "")
    try:
        return int(float(cleaned)) if cleaned else default
    except ValueError:
        return default


def _parse_float(raw: str, default: float) -> float:
    cleaned = _strip_inline_comment(raw or "")
    try:
        return float(cleaned) if cleaned else default
    except ValueError:
        return default


@dataclass
class Config:
    # Output
    output_root: str = DEFAULT_OUTPUT_ROOT
    plots: bool = True

    # Parallelism
    workers: int = 1

    # Oracles and planners
    vi_tol: float = VI_TOL
    vi_max_iter: int = VI_MAX_ITER
    evi_max_sweeps: int = EVI_MAX_SWEEPS
    h_max: int = H_MAX

    # Logging
    json_log: bool = False
    json_log_path: str = ""


def load_config() -> Config:
    """Load runtime config from environment variables, clamping out-of-range values."""
    cfg = Config(
        output_root=_strip_inline_comment(os.getenv("SSPLAB_OUTPUT_ROOT", "")) or DEFAULT_OUTPUT_ROOT,
        plots=_parse_bool(os.getenv("SSPLAB_PLOTS", "yes"), default=True),
        workers=_parse_int(os.getenv("SSPLAB_WORKERS", "1"), 1),
        vi_tol=_parse_float(os.getenv("SSPLAB_VI_TOL", ""), VI_TOL),
        vi_max_iter=_parse_int(os.getenv("SSPLAB_VI_MAX_ITER", ""), VI_MAX_ITER),
        evi_max_sweeps=_parse_int(os.getenv("SSPLAB_EVI_MAX_SWEEPS", ""), EVI_MAX_SWEEPS),
        h_max=_parse_int(os.getenv("SSPLAB_H_MAX", ""), H_MAX),
        json_log=_parse_bool(os.getenv("JSON_LOG_ENABLED", ""), default=False),
        json_log_path=_strip_inline_comment(os.getenv("JSON_LOG_PATH", "")),
    )

    cfg.workers = max(1, min(64, int(cfg.workers)))
    cfg.vi_tol = cfg.vi_tol if cfg.vi_tol > 0 else VI_TOL
    cfg.vi_max_iter = max(1, int(cfg.vi_max_iter))
    cfg.evi_max_sweeps = max(1, int(cfg.evi_max_sweeps))
    cfg.h_max = max(2, int(cfg.h_max))
    return cfg


@dataclass
class ExperimentConfig:
    scenario: str
    algorithms: list[str]
    K: int
    repetitions: int = 1
    scenario_params: dict[str, Any] = field(default_factory=dict)
    base_seed: int = 0
    delta: float = DEFAULT_DELTA
    confidence_mode: str = "hoeffding_experimental"
    output_dir: str = ""
    penalty_J: float | None = None
    h_max: int = H_MAX
    evi_max_sweeps: int = EVI_MAX_SWEEPS
    use_plots: bool = True
    workers: int = 1
    stochastic_costs: bool = False


def _check_experiment(cfg: ExperimentConfig) -> None:
    from core.environments import build_scenario

    unknown = [name for name in cfg.algorithms if name not in ALGORITHMS]
    if unknown:
        raise ConfigError(f"unknown algorithm(s) {unknown}; expected any of {list(ALGORITHMS)}")
    if not cfg.algorithms:
        raise ConfigError("at least one algorithm is required")
    if cfg.repetitions < 1:
        raise ConfigError(f"repetitions must be >= 1, got {cfg.repetitions}")
    if cfg.K < 1:
        raise ConfigError(f"K must be >= 1, got {cfg.K}")
    if not 0 < cfg.delta < 1:
        raise ConfigError(f"delta must lie in (0, 1), got {cfg.delta}")
    if cfg.confidence_mode not in CONFIDENCE_MODES:
        raise ConfigError(f"unknown confidence mode {cfg.confidence_mode!r}")
    penalized = [name for name in cfg.algorithms if name in ("ucssp_J", "ucssp_J_eta")]
    if penalized and (cfg.penalty_J is None or cfg.penalty_J <= 0):
        raise ConfigError(f"{penalized[0]} needs a positive penalty_J")
    if cfg.stochastic_costs:
        unsupported = sorted(set(cfg.algorithms) - {"ucssp", "ucssp_eta"})
        if unsupported:
            raise ConfigError(f"stochastic_costs is only supported by ucssp and ucssp_eta, not {unsupported}")

    inst = build_scenario(cfg.scenario, cfg.scenario_params)
    if "ucrl2" in cfg.algorithms and float(inst.costs.max() - inst.costs.min()) > 0:
        raise ConfigError(f"ucrl2 needs uniform costs; scenario {cfg.scenario!r} has varying costs")
    if inst.c_min <= 0 and {"ucssp", "ucssp_J"} & set(cfg.algorithms):
        raise ConfigError(f"scenario {cfg.scenario!r} has zero costs; use ucssp_eta or ucssp_J_eta")


def load_experiment_config(path: str | Path, runtime: Config | None = None) -> ExperimentConfig:
    """Read and validate a JSON experiment file; unset fields fall back to the runtime config."""
    runtime = runtime or load_config()
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read experiment config {path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigError("experiment config must be a JSON object")

    known = set(ExperimentConfig.__dataclass_fields__)
    extra = sorted(set(raw) - known)
    if extra:
        raise ConfigError(f"unknown experiment fields: {extra}")
    for required in ("scenario", "algorithms", "K"):
        if required not in raw:
            raise ConfigError(f"experiment config is missing {required!r}")

    raw.setdefault("h_max", runtime.h_max)
    raw.setdefault("evi_max_sweeps", runtime.evi_max_sweeps)
    raw.setdefault("use_plots", runtime.plots)
    raw.setdefault("workers", runtime.workers)
    try:
        cfg = ExperimentConfig(**raw)
    except TypeError as e:
        raise ConfigError(f"bad experiment config: {e}") from e
    if isinstance(cfg.algorithms, str):
        cfg.algorithms = [cfg.algorithms]
    if not cfg.output_dir:
        cfg.output_dir = str(Path(runtime.output_root) / Path(path).stem)
    cfg.workers = max(1, int(cfg.workers))
    _check_experiment(cfg)
    return cfg


def experiment_config_to_dict(cfg: ExperimentConfig) -> dict[str, Any]:
    return asdict(cfg)
