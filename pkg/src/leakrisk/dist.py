"""Discrete probability distributions over named outcomes.

This is the currency passed between diagnosis, evolution, decision making and
planning: an ordered tuple of outcome labels plus a probability vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PROB_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteDistribution:
    outcomes: tuple[str, ...]
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        if len(self.outcomes) != p.shape[0]:
            raise ValueError(
                f"{len(self.outcomes)} outcomes but {p.shape[0]} probabilities"
            )
        if len(set(self.outcomes)) != len(self.outcomes):
            raise ValueError(f"duplicate outcome labels in {self.outcomes}")
        if p.ndim != 1:
            raise ValueError("probability vector must be one-dimensional")
        if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
            raise ValueError(f"probabilities outside [0, 1]: {p}")
        if abs(p.sum() - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")

    def p(self, outcome: str) -> float:
        """Probability of a named outcome."""
        try:
            return float(self.probs[self.outcomes.index(outcome)])
        except ValueError:
            raise KeyError(f"no outcome {outcome!r} in {self.outcomes}") from None

    def as_dict(self) -> dict[str, float]:
        return {o: float(v) for o, v in zip(self.outcomes, self.probs)}

    def to_json(self) -> dict:
        # Arrays ordered by outcome label order, stable for serialization.
        return {"outcomes": list(self.outcomes), "probs": [float(v) for v in self.probs]}

    @staticmethod
    def from_json(doc: dict) -> "DiscreteDistribution":
        return DiscreteDistribution(tuple(doc["outcomes"]), np.asarray(doc["probs"], dtype=float))

    @staticmethod
    def indicator(outcomes: tuple[str, ...], outcome: str) -> "DiscreteDistribution":
        probs = np.zeros(len(outcomes))
        probs[outcomes.index(outcome)] = 1.0
        return DiscreteDistribution(outcomes, probs)


def normalized(outcomes: tuple[str, ...], weights: np.ndarray) -> DiscreteDistribution:
    """Build a distribution from nonnegative weights; total must be positive."""
    w = np.asarray(weights, dtype=float)
    total = w.sum()
    if total <= 0:
        raise ValueError("weights sum to zero; cannot normalize")
    return DiscreteDistribution(outcomes, w / total)
