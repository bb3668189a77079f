"""Policy simulation: sampled ignition and cost curves per shutdown level.

Complements the closed-form projection in evolution.py with a trajectory
estimate, mainly as an independent cross-check and as the CSV behind the
`simulate` CLI subcommand.  All levels are run on shared uniforms, so the
curves are coupled sample paths rather than independent estimates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import simulate_state_counts
from .dist import DiscreteDistribution
from .evolution import IGNITED, LEAK_STATES, transition_matrix_for_level
from .model import ScenarioBundle


@dataclass(frozen=True)
class PolicyCurve:
    """Per-step sampled statistics for one shutdown level held constant."""

    level: int
    level_name: str
    ignition_prob: np.ndarray  # shape (steps+1,), fraction of chains ignited
    mean_cost: np.ndarray  # shape (steps+1,), mean accumulated cost per chain


def simulate_policies(
    bundle: ScenarioBundle,
    belief: DiscreteDistribution,
    steps: int,
    n_traj: int,
    seed: int,
) -> list[PolicyCurve]:
    """Sample every level's chain from the same draws and accumulate costs.

    Cost accounting per chain: production loss accrues at the level's rate for
    each step the chain has not yet ignited, and the ignition loss is charged
    once upon ignition.
    """
    if belief.outcomes != LEAK_STATES:
        raise ValueError("belief must range over the four leak states")
    curves: list[PolicyCurve] = []
    for level, name in enumerate(bundle.transitions.levels):
        tm = transition_matrix_for_level(bundle.transitions, level)
        counts = simulate_state_counts(tm.matrix, belief.probs, steps, n_traj, seed)
        ign = counts[:, IGNITED].astype(np.float64) / float(n_traj)
        rate = bundle.value.production_loss_rate[level]
        dt = tm.step_duration
        alive = 1.0 - ign
        mean_cost = np.empty(steps + 1, dtype=np.float64)
        mean_cost[0] = bundle.value.ignition_loss * ign[0]
        running = 0.0
        for j in range(1, steps + 1):
            running += rate * dt * alive[j - 1]
            mean_cost[j] = running + bundle.value.ignition_loss * ign[j]
        curves.append(PolicyCurve(level, name, ign, mean_cost))
    return curves


def curves_csv(curves: list[PolicyCurve]) -> str:
    """Render curves as CSV with header ``step,level,ignition_prob,mean_cost``."""
    lines = ["step,level,ignition_prob,mean_cost"]
    for curve in curves:
        for j in range(curve.ignition_prob.shape[0]):
            lines.append(
                f"{j},{curve.level_name},"
                f"{float(curve.ignition_prob[j])!r},{float(curve.mean_cost[j])!r}"
            )
    return "\n".join(lines) + "\n"
