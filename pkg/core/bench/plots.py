"""Static SVG regret charts rendered from aggregate series. Best-effort."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

from .aggregate import AggregateSeries

log = logging.getLogger("ssplab.bench")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams.update(
        {
            "font.family": "DejaVu Sans",
            "axes.unicode_minus": False,
            "svg.hashsalt": "ssplab",
        }
    )
    import matplotlib.pyplot as plt

    return plt


def plot_regret(series: Sequence[AggregateSeries], path: Path, *, normalized: bool = False) -> Path | None:
    """Mean cumulative regret per algorithm with a ±stderr band."""
    try:
        plt = _pyplot()
        fig, ax = plt.subplots(figsize=(7, 4), constrained_layout=True)
        for s in series:
            mean = s.normalized_mean if normalized else s.mean
            err = s.normalized_stderr if normalized else s.stderr
            ks = range(1, s.K + 1)
            ax.plot(ks, mean, label=f"{s.algorithm} (n={s.n_runs})")
            ax.fill_between(ks, mean - err, mean + err, alpha=0.25)
        ax.set_xlabel("Episode k")
        ax.set_ylabel("Normalized regret" if normalized else "Cumulative regret")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best", fontsize=8)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, format="svg")
        plt.close(fig)
    except Exception as e:
        log.warning(f"Plot {path.name} skipped: {e}")
        return None
    return path
