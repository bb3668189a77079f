"""Shutdown-level-dependent Markov projection of the aggregate leak state.

State space is ``(none, progressive, catastrophic, ignited)`` with ignited
absorbing.  Per step: none starts a progressive leak with probability s, a
progressive leak turns catastrophic (p) or ignites (q), a catastrophic leak
ignites (r).  More extensive shutdown levels carry smaller (p, q, r, s), so
projected ignition risk never increases with the level.

Durations round up to whole steps of ``step_duration``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist import DiscreteDistribution
from .model import AGGREGATE_STATES, TransitionSpec

LEAK_STATES: tuple[str, str, str, str] = (*AGGREGATE_STATES, "ignited")
IGNITED = LEAK_STATES.index("ignited")


@dataclass(frozen=True)
class TransitionMatrix:
    matrix: np.ndarray  # 4x4 row-stochastic over LEAK_STATES
    step_duration: float

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def to_json(self) -> dict:
        return {
            "states": list(LEAK_STATES),
            "matrix": [[float(x) for x in row] for row in self.matrix],
            "step_duration": self.step_duration,
        }


def transition_matrix_for_level(spec: TransitionSpec, level: int) -> TransitionMatrix:
    """Per-step transition matrix for one shutdown level."""
    if not 0 <= level < len(spec.levels):
        raise ValueError(f"level index {level} out of range 0..{len(spec.levels) - 1}")
    lp = spec.params[level]
    if lp.p + lp.q > 1:
        raise ValueError(f"p+q = {lp.p + lp.q} exceeds 1 at level {spec.levels[level]!r}")
    matrix = np.array(
        [
            [1 - lp.s, lp.s, 0.0, 0.0],
            [0.0, 1 - lp.p - lp.q, lp.p, lp.q],
            [0.0, 0.0, 1 - lp.r, lp.r],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )
    return TransitionMatrix(matrix, spec.step_duration)


def steps_for(duration: float, step_duration: float) -> int:
    """Whole Markov steps covering an elapsed duration (rounds up)."""
    if duration < 0:
        raise ValueError(f"duration must be >= 0, got {duration}")
    if duration == 0:
        return 0
    return math.ceil(duration / step_duration - 1e-12)


def project(
    belief: DiscreteDistribution, matrix: TransitionMatrix, steps: int
) -> DiscreteDistribution:
    """Belief after ``steps`` Markov steps: belief @ matrix^steps."""
    if steps < 0:
        raise ValueError(f"steps must be >= 0, got {steps}")
    if belief.outcomes != LEAK_STATES:
        raise ValueError(f"belief must range over {LEAK_STATES}")
    probs = belief.probs @ np.linalg.matrix_power(matrix.matrix, steps)
    # Guard float drift so outputs stay valid distributions.
    probs = np.clip(probs, 0.0, 1.0)
    return DiscreteDistribution(LEAK_STATES, probs / probs.sum())


def project_for(
    belief: DiscreteDistribution, matrix: TransitionMatrix, duration: float
) -> DiscreteDistribution:
    return project(belief, matrix, steps_for(duration, matrix.step_duration))


def ignition_probability(
    belief: DiscreteDistribution, matrix: TransitionMatrix, steps: int
) -> float:
    """Probability of being ignited after ``steps`` steps.

    Ignited is absorbing, so this equals the probability that ignition
    occurred at any point within the window.
    """
    return float(project(belief, matrix, steps).probs[IGNITED])


def condition_on_no_ignition(belief: DiscreteDistribution) -> DiscreteDistribution:
    """Renormalize over the three non-ignited states (3-state output)."""
    if belief.outcomes == LEAK_STATES:
        mass = belief.probs[:IGNITED]
    elif belief.outcomes == AGGREGATE_STATES:
        mass = belief.probs
    else:
        raise ValueError(f"belief must range over {LEAK_STATES} or {AGGREGATE_STATES}")
    total = mass.sum()
    if total <= 0.0:
        raise ValueError("all probability mass on ignited; nothing to condition on")
    return DiscreteDistribution(AGGREGATE_STATES, mass / total)


def embed_no_ignition(belief: DiscreteDistribution) -> DiscreteDistribution:
    """Lift a 3-state aggregate belief into the 4-state space with zero ignited mass."""
    if belief.outcomes != AGGREGATE_STATES:
        raise ValueError(f"belief must range over {AGGREGATE_STATES}")
    return DiscreteDistribution(LEAK_STATES, np.append(belief.probs, 0.0))
