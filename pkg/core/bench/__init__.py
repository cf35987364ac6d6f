"""Experiment harness: seeded runs, aggregation, persistence and plots."""

from .aggregate import AggregateSeries, SublinearityVerdict, aggregate, aggregate_matrix, sublinearity_check
from .experiment import RunOutcome, RunTask, build_tasks, execute_run, oracle_value, run_experiment
from .persistence import load_manifest, read_aggregate_csv, read_run_csv, sha256_file, write_run
from .plots import plot_regret
from .report import OracleRow, ReportRow, aggregate_dir, format_oracle_rows, format_report, oracle_row, report

__all__ = [
    "aggregate",
    "aggregate_dir",
    "aggregate_matrix",
    "AggregateSeries",
    "build_tasks",
    "execute_run",
    "format_oracle_rows",
    "format_report",
    "load_manifest",
    "oracle_row",
    "OracleRow",
    "oracle_value",
    "plot_regret",
    "read_aggregate_csv",
    "read_run_csv",
    "report",
    "ReportRow",
    "run_experiment",
    "RunOutcome",
    "RunTask",
    "sha256_file",
    "SublinearityVerdict",
    "write_run",
]
