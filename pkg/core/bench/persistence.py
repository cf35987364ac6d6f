"""Run directory layout: per-run CSVs, JSON summaries, aggregate CSVs and the manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import logging
from pathlib import Path
from typing import Any

import numpy as np

from ..constants import ATTEMPT_CSV_COLUMNS, RUN_CSV_COLUMNS
from ..errors import ConfigError
from ..types import RunRecord
from .aggregate import AggregateSeries

log = logging.getLogger("ssplab.bench")

MANIFEST_NAME = "manifest.json"
AGGREGATE_COLUMNS = ("k", "mean", "min", "max", "stderr", "normalized_mean", "normalized_stderr")


def _fmt(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def run_csv_path(run_dir: Path, algorithm: str, seed: int) -> Path:
    return run_dir / "runs" / algorithm / f"seed_{seed}.csv"


def write_run_csv(record: RunRecord, path: Path) -> Path:
    """One row per episode; columns as in RUN_CSV_COLUMNS."""
    path.parent.mkdir(parents=True, exist_ok=True)
    regret = record.cumulative_regret()
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUN_CSV_COLUMNS)
        for ep, cum in zip(record.episodes, regret):
            writer.writerow(
                [
                    _fmt(ep.k),
                    _fmt(ep.cost),
                    _fmt(ep.length),
                    _fmt(ep.phase1_steps),
                    _fmt(ep.phase2_steps),
                    _fmt(ep.n_phase2_attempts),
                    _fmt(ep.H_k0),
                    _fmt(ep.vtilde_s0),
                    _fmt(cum),
                ]
            )
    return path


def write_attempts_csv(record: RunRecord, path: Path) -> Path | None:
    if not record.attempts:
        return None
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(ATTEMPT_CSV_COLUMNS)
        for at in record.attempts:
            writer.writerow(
                [
                    _fmt(at.k),
                    _fmt(at.j),
                    _fmt(at.H),
                    _fmt(at.steps),
                    _fmt(at.reached_goal),
                    _fmt(at.start_state),
                    _fmt(at.expected_tau_tilde),
                    _fmt(at.expected_tau_hat),
                ]
            )
    return path


def read_run_csv(path: Path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ConfigError(f"run CSV {path} has no episode rows")
    missing = [col for col in RUN_CSV_COLUMNS if col not in rows[0]]
    if missing:
        raise ConfigError(f"run CSV {path} is missing columns {missing}")
    return {col: np.array([float(row[col]) for row in rows]) for col in RUN_CSV_COLUMNS}


def write_json(path: Path, payload: Any) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    return path


def _json_default(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return value.as_posix()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def read_json(path: Path) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_run(record: RunRecord, run_dir: Path) -> list[Path]:
    """Per-run CSV, attempts CSV (UC-SSP only) and JSON summary."""
    csv_path = write_run_csv(record, run_csv_path(run_dir, record.algorithm, record.seed))
    written = [csv_path]
    attempts = write_attempts_csv(record, csv_path.with_name(f"seed_{record.seed}_attempts.csv"))
    if attempts is not None:
        written.append(attempts)
    written.append(write_json(csv_path.with_suffix(".json"), record.summary()))
    return written


def write_aggregate_csv(series: AggregateSeries, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    norm_mean = series.normalized_mean
    norm_err = series.normalized_stderr
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATE_COLUMNS)
        for i in range(series.K):
            writer.writerow(
                [
                    i + 1,
                    _fmt(series.mean[i]),
                    _fmt(series.min[i]),
                    _fmt(series.max[i]),
                    _fmt(series.stderr[i]),
                    _fmt(norm_mean[i]),
                    _fmt(norm_err[i]),
                ]
            )
    return path


def read_aggregate_csv(path: Path) -> dict[str, np.ndarray]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return {col: np.array([float(row[col]) for row in rows]) for col in AGGREGATE_COLUMNS}


def sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def file_entries(run_dir: Path, paths: list[Path]) -> list[dict[str, str]]:
    entries = []
    for path in sorted(set(paths)):
        entries.append({"path": path.relative_to(run_dir).as_posix(), "sha256": sha256_file(path)})
    return entries


def write_manifest(run_dir: Path, manifest: dict[str, Any]) -> Path:
    path = write_json(run_dir / MANIFEST_NAME, manifest)
    log.info(f"Wrote manifest {path.as_posix()} ({len(manifest.get('files', []))} files)")
    return path


def load_manifest(run_dir: Path) -> dict[str, Any]:
    path = Path(run_dir) / MANIFEST_NAME
    if not path.exists():
        raise ConfigError(f"no {MANIFEST_NAME} in {run_dir}")
    return read_json(path)
