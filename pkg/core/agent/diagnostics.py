"""Regret decomposition quantities computed from a logged run."""

from __future__ import annotations

import logging

from ..types import Diagnostics, RunRecord

log = logging.getLogger("ssplab.agent")


def compute_diagnostics(record: RunRecord, oracle_v_star: float) -> RunRecord:
    """
    Fill the regret series and decomposition counters of ``record``.

    W_K sums the phase-① cost of every episode minus V*(s0). The realized
    regret then equals W_K plus the phase-② costs and is bounded by
    W_K + c_max·T_{K,2}. A violated bound is logged, never raised.
    """
    record.v_star = float(oracle_v_star)
    episodes = record.episodes
    regret = record.cumulative_regret()
    final = float(regret[-1]) if regret.size else 0.0

    W_K = float(sum(ep.phase1_cost - oracle_v_star for ep in episodes))
    T_K1 = int(sum(ep.phase1_steps for ep in episodes))
    T_K2 = int(sum(ep.phase2_steps for ep in episodes))
    bound = W_K + record.c_max * T_K2

    holds = final <= bound + 1e-9 * max(1.0, abs(bound))
    if not holds:
        log.error(
            f"[{record.run_id}] regret decomposition violated: "
            f"regret={final:.6g} > W_K + c_max*T_K2 = {bound:.6g}"
        )

    record.diagnostics = Diagnostics(
        final_regret=final,
        W_K=W_K,
        Omega_K=int(max((ep.H_k0 for ep in episodes), default=0)),
        F_K=int(sum(1 for ep in episodes if not ep.phase1_reached_goal)),
        G_K=int(sum(ep.n_phase2_attempts for ep in episodes)),
        T_K1=T_K1,
        T_K2=T_K2,
        T_K=T_K1 + T_K2,
        decomposition_bound=float(bound),
        decomposition_holds=bool(holds),
    )
    return record
