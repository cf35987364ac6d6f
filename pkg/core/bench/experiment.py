"""
Experiment runner: repetitions × algorithms on one scenario.

Runs fan out over a bounded pool keyed by (algorithm, seed). Each worker
rebuilds nothing shared: it receives the instance and the oracle V*(s0) and
returns a RunRecord. Persistence and aggregation happen afterwards in the
parent, in (algorithm, seed) order, so identical configs give identical CSVs.
"""

from __future__ import annotations

import asyncio
import logging
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from config import ExperimentConfig, experiment_config_to_dict

from ..agent.ucssp import AgentConfig, run_ucssp, run_ucssp_finite_penalty, run_ucssp_perturbed
from ..baselines.epochs import BaselineConfig
from ..baselines.ucrl2 import run_ucrl2
from ..baselines.ucrl_ssp import run_ucrl_ssp_style
from ..constants import VERSION
from ..environments.registry import build_scenario
from ..errors import ConfigError, SspError
from ..ssp.model import SspInstance
from ..ssp.planning import (
    exact_value_iteration,
    optimal_value,
    proper_value_iteration,
    truncated_proper_value_iteration,
    truncated_value_iteration,
)
from ..types import RunRecord
from .aggregate import aggregate, sublinearity_check
from .persistence import file_entries, write_aggregate_csv, write_json, write_manifest, write_run
from .plots import plot_regret

log = logging.getLogger("ssplab.bench")


@dataclass
class RunTask:
    algorithm: str
    seed: int
    K: int
    instance: SspInstance
    v_star: float
    delta: float
    confidence_mode: str
    penalty_J: float | None
    h_max: int
    evi_max_sweeps: int
    stochastic_costs: bool = False

    @property
    def run_id(self) -> str:
        return f"{self.algorithm}:{self.seed}"


@dataclass
class RunOutcome:
    task: RunTask
    record: RunRecord | None = None
    error: str = ""
    trace: str = ""


def oracle_value(inst: SspInstance, algorithm: str, penalty_J: float | None = None) -> float:
    """V*(s0) each algorithm's regret is measured against."""
    if algorithm in ("ucssp", "ucrl2"):
        return exact_value_iteration(inst).value_at(inst.start)
    if algorithm == "ucssp_J":
        return truncated_value_iteration(inst, penalty_J).value_at(inst.start)
    if algorithm == "ucssp_J_eta":
        return truncated_proper_value_iteration(inst, penalty_J).value_at(inst.start)
    if algorithm == "ucssp_eta":
        return proper_value_iteration(inst).value_at(inst.start)
    return optimal_value(inst).value_at(inst.start)


def execute_run(task: RunTask) -> RunRecord:
    """Run one (algorithm, seed) pair. Top-level so process pools can pickle it."""
    inst = task.instance
    if task.algorithm.startswith("ucssp"):
        variant = {
            "ucssp": "standard",
            "ucssp_J": "finite_penalty",
            "ucssp_eta": "perturbed",
            "ucssp_J_eta": "finite_penalty_perturbed",
        }[task.algorithm]
        cfg = AgentConfig(
            delta=task.delta,
            confidence_mode=task.confidence_mode,
            variant=variant,
            penalty_J=task.penalty_J,
            h_max=task.h_max,
            evi_max_sweeps=task.evi_max_sweeps,
            stochastic_costs=task.stochastic_costs,
            seed=task.seed,
        )
        cfg.validate()
        runner = {
            "standard": run_ucssp,
            "finite_penalty": run_ucssp_finite_penalty,
            "perturbed": run_ucssp_perturbed,
            "finite_penalty_perturbed": run_ucssp_finite_penalty,
        }[variant]
        return runner(inst, cfg, task.K, v_star=task.v_star)

    if task.algorithm == "ucrl2":
        cfg = BaselineConfig(
            delta=task.delta,
            seed=task.seed,
            confidence_mode=task.confidence_mode,
            h_max=task.h_max,
            evi_max_sweeps=task.evi_max_sweeps,
        )
        return run_ucrl2(inst, cfg, task.K, v_star=task.v_star)

    # UCRL-SSP runs with Bernstein radii whatever the experiment-wide mode is.
    cfg = BaselineConfig(
        delta=task.delta,
        seed=task.seed,
        confidence_mode="bernstein",
        use_pivot_horizon=task.algorithm == "ucrl_ssp_pivot",
        h_max=task.h_max,
        evi_max_sweeps=task.evi_max_sweeps,
    )
    return run_ucrl_ssp_style(inst, cfg, task.K, v_star=task.v_star)


def _guarded(task: RunTask) -> RunOutcome:
    try:
        return RunOutcome(task=task, record=execute_run(task))
    except SspError as e:
        return RunOutcome(task=task, error=f"{type(e).__name__}: {e}", trace=traceback.format_exc())


async def _run_all(tasks: list[RunTask], workers: int) -> list[RunOutcome]:
    loop = asyncio.get_running_loop()
    sem = asyncio.Semaphore(workers)
    pool = ProcessPoolExecutor(max_workers=workers) if workers > 1 else None

    async def one(task: RunTask) -> RunOutcome:
        async with sem:
            if pool is None:
                outcome = await asyncio.to_thread(_guarded, task)
            else:
                outcome = await loop.run_in_executor(pool, _guarded, task)
        if outcome.error:
            log.error(f"[{task.run_id}] run failed: {outcome.error}")
        return outcome

    try:
        return list(await asyncio.gather(*(one(task) for task in tasks)))
    finally:
        if pool is not None:
            pool.shutdown(wait=True)


def build_tasks(cfg: ExperimentConfig, inst: SspInstance, oracles: dict[str, float]) -> list[RunTask]:
    tasks = []
    for algorithm in cfg.algorithms:
        for rep in range(cfg.repetitions):
            tasks.append(
                RunTask(
                    algorithm=algorithm,
                    seed=cfg.base_seed + rep,
                    K=cfg.K,
                    instance=inst,
                    v_star=oracles[algorithm],
                    delta=cfg.delta,
                    confidence_mode=cfg.confidence_mode,
                    penalty_J=cfg.penalty_J,
                    h_max=cfg.h_max,
                    evi_max_sweeps=cfg.evi_max_sweeps,
                    stochastic_costs=cfg.stochastic_costs,
                )
            )
    return tasks


def run_experiment(cfg: ExperimentConfig) -> Path:
    """Execute every (algorithm, seed) run, persist and aggregate them, and write the manifest."""
    if not cfg.output_dir:
        raise ConfigError("experiment has no output directory")
    run_dir = Path(cfg.output_dir).expanduser()
    run_dir.mkdir(parents=True, exist_ok=True)

    inst = build_scenario(cfg.scenario, cfg.scenario_params)
    oracles = {algorithm: oracle_value(inst, algorithm, cfg.penalty_J) for algorithm in cfg.algorithms}
    for algorithm, v in oracles.items():
        log.info(f"[{algorithm}] oracle V*(s0) = {v:.6g} on {inst.name}")

    tasks = build_tasks(cfg, inst, oracles)
    log.info(
        f"Experiment {inst.name}: {len(cfg.algorithms)} algorithm(s) x {cfg.repetitions} seed(s), "
        f"K={cfg.K}, workers={cfg.workers}"
    )
    outcomes = asyncio.run(_run_all(tasks, cfg.workers))

    written: list[Path] = [write_json(run_dir / "instance.json", inst.to_dict())]
    failed: list[dict[str, object]] = []
    by_algorithm: dict[str, list[RunRecord]] = {name: [] for name in cfg.algorithms}
    for outcome in outcomes:
        if outcome.record is None:
            failed.append({"algorithm": outcome.task.algorithm, "seed": outcome.task.seed, "error": outcome.error})
            continue
        by_algorithm[outcome.task.algorithm].append(outcome.record)
        written.extend(write_run(outcome.record, run_dir))

    series = []
    verdicts: dict[str, dict[str, object]] = {}
    for algorithm, records in by_algorithm.items():
        if not records:
            log.warning(f"[{algorithm}] no successful runs; nothing to aggregate")
            continue
        agg = aggregate(records)
        series.append(agg)
        written.append(write_aggregate_csv(agg, run_dir / f"aggregate_{algorithm}.csv"))
        verdict = sublinearity_check(agg, 0.1, 0.1)
        verdicts[algorithm] = {
            "n_runs": agg.n_runs,
            "final_mean_regret": float(agg.mean[-1]),
            "final_stderr": float(agg.stderr[-1]),
            "early_mean": verdict.early_mean,
            "late_mean": verdict.late_mean,
            "verdict": verdict.label,
        }
        log.info(
            f"[{algorithm}] aggregate over {agg.n_runs} runs: final regret {agg.mean[-1]:.4g} "
            f"± {agg.stderr[-1]:.3g} ({verdict.label})"
        )

    if cfg.use_plots and series:
        for path in (
            plot_regret(series, run_dir / "regret.svg"),
            plot_regret(series, run_dir / "regret_normalized.svg", normalized=True),
        ):
            if path is not None:
                written.append(path)

    manifest = {
        "version": VERSION,
        "config": experiment_config_to_dict(cfg),
        "instance": inst.name,
        "oracle_v_star": oracles,
        "summary": verdicts,
        "failed": failed,
        "files": file_entries(run_dir, written),
    }
    write_manifest(run_dir, manifest)
    if failed:
        log.warning(f"{len(failed)} run(s) failed; see manifest")
    return run_dir
