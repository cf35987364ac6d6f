"""Re-aggregation, regret tables and oracle tables."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError, ImproperPolicyError
from ..ssp.chains import chain_from_rows, chain_of, expected_hitting_times
from ..ssp.model import SspInstance
from ..ssp.planning import optimal_value, winning_value_iteration
from ..ssp.validation import validate_instance
from .aggregate import AggregateSeries, aggregate_matrix, sublinearity_check
from .persistence import file_entries, load_manifest, read_run_csv, write_aggregate_csv, write_manifest
from .plots import plot_regret

log = logging.getLogger("ssplab.bench")


@dataclass
class ReportRow:
    algorithm: str
    n_runs: int
    K: int
    final_mean: float
    final_stderr: float
    normalized_mean: float
    verdict: str


def _seed_of(path: Path) -> int:
    return int(path.stem.split("_", 1)[1])


def aggregate_dir(run_dir: str | Path) -> list[AggregateSeries]:
    """Rebuild every aggregate CSV from the per-run CSVs and refresh the manifest hashes."""
    run_dir = Path(run_dir)
    manifest = load_manifest(run_dir)
    oracles: dict[str, float] = manifest.get("oracle_v_star", {})
    runs_root = run_dir / "runs"
    if not runs_root.is_dir():
        raise ConfigError(f"no runs/ directory under {run_dir}")

    series = []
    written = [run_dir / entry["path"] for entry in manifest.get("files", [])]
    for alg_dir in sorted(p for p in runs_root.iterdir() if p.is_dir()):
        csvs = sorted(
            (p for p in alg_dir.glob("seed_*.csv") if not p.stem.endswith("_attempts")),
            key=_seed_of,
        )
        if not csvs:
            continue
        columns = [read_run_csv(p) for p in csvs]
        Ks = {c["cum_regret"].size for c in columns}
        if len(Ks) != 1:
            raise ConfigError(f"{alg_dir.name}: run CSVs disagree on K: {sorted(Ks)}")
        matrix = np.vstack([c["cum_regret"] for c in columns])
        agg = aggregate_matrix(alg_dir.name, matrix, float(oracles.get(alg_dir.name, np.nan)))
        path = write_aggregate_csv(agg, run_dir / f"aggregate_{alg_dir.name}.csv")
        if path not in written:
            written.append(path)
        series.append(agg)
        log.info(f"[{alg_dir.name}] re-aggregated {agg.n_runs} runs (K={agg.K})")

    manifest["files"] = file_entries(run_dir, [p for p in written if p.exists()])
    write_manifest(run_dir, manifest)
    return series


def report(run_dir: str | Path, *, plot: bool = False, early_frac: float = 0.1, late_frac: float = 0.1) -> list[ReportRow]:
    run_dir = Path(run_dir)
    series = aggregate_dir(run_dir)
    rows = []
    for agg in series:
        verdict = sublinearity_check(agg, early_frac, late_frac)
        rows.append(
            ReportRow(
                algorithm=agg.algorithm,
                n_runs=agg.n_runs,
                K=agg.K,
                final_mean=float(agg.mean[-1]),
                final_stderr=float(agg.stderr[-1]),
                normalized_mean=float(agg.normalized_mean[-1]),
                verdict=verdict.label,
            )
        )
    if plot and series:
        plot_regret(series, run_dir / "regret.svg")
        plot_regret(series, run_dir / "regret_normalized.svg", normalized=True)
    return rows


def format_report(rows: list[ReportRow]) -> str:
    header = f"{'algorithm':<16}{'runs':>6}{'K':>8}{'regret':>14}{'stderr':>12}{'normalized':>12}  verdict"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(
            f"{r.algorithm:<16}{r.n_runs:>6}{r.K:>8}{r.final_mean:>14.4f}{r.final_stderr:>12.4f}"
            f"{r.normalized_mean:>12.4f}  {r.verdict}"
        )
    return "\n".join(lines)


# ── Oracle table ──


@dataclass
class OracleRow:
    name: str
    v_star: float
    diameter: float
    expected_hitting_time: float
    policy: list[int]


def _winning_set_row(inst: SspInstance, unreachable: list[int]) -> tuple[float, float, list[int]]:
    """V*(s0) and E[τ(s0)] over the almost-sure winning set; inf when s0 is outside it."""
    if inst.start in unreachable or inst.costs.min() <= 0:
        return float("inf"), float("inf"), []
    sol = winning_value_iteration(inst)
    idx = np.flatnonzero(np.isfinite(sol.values))
    cols = np.concatenate([idx, [inst.goal]])
    rows = inst.kernel[idx, sol.policy.actions[idx]][:, cols]
    tau = expected_hitting_times(chain_from_rows(rows))[int(np.searchsorted(idx, inst.start))]
    return sol.value_at(inst.start), float(tau), sol.policy.as_list()


def oracle_row(inst: SspInstance) -> OracleRow:
    """
    V*(s0), the SSP-diameter and E[τ(s0)] of the optimal policy found by the oracle.

    Instances with dead ends report D = inf and are solved on the winning set only.
    """
    report = validate_instance(inst)
    diameter = float(report.ssp_diameter)
    if report.unreachable_states:
        v_star, tau, policy = _winning_set_row(inst, report.unreachable_states)
    else:
        sol = optimal_value(inst)
        try:
            tau = float(expected_hitting_times(chain_of(inst, sol.policy))[inst.start])
        except ImproperPolicyError:
            tau = float("inf")
        v_star, policy = sol.value_at(inst.start), sol.policy.as_list()
    log.debug(f"oracle {inst.name}: V*={v_star:.6g} D={diameter:.6g} E[tau]={tau:.6g}")
    return OracleRow(
        name=inst.name,
        v_star=v_star,
        diameter=diameter,
        expected_hitting_time=tau,
        policy=policy,
    )


def format_oracle_rows(rows: list[OracleRow]) -> str:
    header = f"{'instance':<28}{'V*(s0)':>12}{'D':>12}{'E[tau*]':>12}"
    lines = [header, "-" * len(header)]
    for r in rows:
        lines.append(f"{r.name:<28}{r.v_star:>12.4f}{r.diameter:>12.4f}{r.expected_hitting_time:>12.4f}")
    return "\n".join(lines)
