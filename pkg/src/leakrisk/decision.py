"""Shutdown-level recommendation by expected utility.

The utility of holding a level over a horizon is additive linear cost:
certain production loss (rate x horizon) plus ignition loss weighted by the
projected ignition probability under that level.  Safety and production trade
off through the level-dependent transition parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

from .dist import DiscreteDistribution
from .evolution import (
    IGNITED,
    LEAK_STATES,
    condition_on_no_ignition,
    embed_no_ignition,
    ignition_probability,
    project_for,
    steps_for,
    transition_matrix_for_level,
)
from .model import (
    AGGREGATE_STATES,
    ScenarioBundle,
    SeverityThresholds,
    TransitionSpec,
    ValueSpec,
)


class SeverityLayer(IntEnum):
    NORMAL = 0
    LOW = 1
    INTERMEDIATE = 2
    HIGH = 3

    @property
    def label(self) -> str:
        return self.name.lower()


#: Operational response routed per severity layer.
RESPONSE_LABELS = {
    SeverityLayer.NORMAL: "standard-procedures",
    SeverityLayer.LOW: "rule-based-monitoring",
    SeverityLayer.INTERMEDIATE: "normative-decision-support",
    SeverityLayer.HIGH: "emergency-shutdown",
}


@dataclass(frozen=True)
class RankedLevel:
    level: int
    level_name: str
    expected_utility: float
    ignition_prob_at_horizon: float


@dataclass(frozen=True)
class Recommendation:
    ranked: tuple[RankedLevel, ...]  # expected_utility descending
    chosen: int
    horizon_used: float
    ignition_prob_at_decision: float
    forced_esd: bool = False

    @property
    def expected_utility(self) -> float:
        return self.ranked[0].expected_utility

    @property
    def chosen_name(self) -> str:
        return self.ranked[0].level_name

    def to_json(self) -> dict:
        return {
            "chosen": self.chosen,
            "chosen_name": self.chosen_name,
            "horizon_used": self.horizon_used,
            "ignition_prob_at_decision": self.ignition_prob_at_decision,
            "forced_esd": self.forced_esd,
            "ranked": [
                {
                    "level": r.level,
                    "level_name": r.level_name,
                    "expected_utility": r.expected_utility,
                    "ignition_prob_at_horizon": r.ignition_prob_at_horizon,
                }
                for r in self.ranked
            ],
        }


def expected_utility(
    belief_at_decision_no_ign: DiscreteDistribution,
    level: int,
    horizon: float,
    transitions: TransitionSpec,
    value: ValueSpec,
) -> float:
    """EU of holding ``level`` over ``horizon``, starting from a no-ignition belief."""
    if horizon <= 0:
        raise ValueError(f"horizon must be > 0, got {horizon}")
    belief = belief_at_decision_no_ign
    if belief.outcomes == AGGREGATE_STATES:
        belief = embed_no_ignition(belief)
    elif belief.outcomes != LEAK_STATES:
        raise ValueError(f"belief must range over {AGGREGATE_STATES} or {LEAK_STATES}")
    if belief.probs[IGNITED] > 1e-9:
        raise ValueError("decision belief must carry zero ignited mass")
    matrix = transition_matrix_for_level(transitions, level)
    steps = steps_for(horizon, transitions.step_duration)
    p_ign = ignition_probability(belief, matrix, steps)
    return -value.production_loss_rate[level] * horizon - value.ignition_loss * p_ign


def forced_esd_recommendation(bundle: ScenarioBundle, horizon: float) -> Recommendation:
    """Evident ignition bypasses utility ranking: maximal shutdown, terminal loss."""
    level = bundle.max_level
    entry = RankedLevel(
        level=level,
        level_name=bundle.transitions.levels[level],
        expected_utility=-bundle.value.ignition_loss,
        ignition_prob_at_horizon=1.0,
    )
    return Recommendation(
        ranked=(entry,),
        chosen=level,
        horizon_used=horizon,
        ignition_prob_at_decision=1.0,
        forced_esd=True,
    )


def recommend(
    diagnosis_aggregate: DiscreteDistribution,
    delay_to_decision: float,
    status_quo_level: int,
    horizon: float,
    bundle: ScenarioBundle,
    ignition_evident: bool = False,
) -> Recommendation:
    """Rank all shutdown levels by EU at one horizon.

    The diagnosis belief evolves under the status-quo level during the
    signal-to-decision delay; the decision-time belief conditions on no
    ignition before levels are compared.  Ties break toward the more
    extensive shutdown.
    """
    if ignition_evident:
        return forced_esd_recommendation(bundle, horizon)
    if diagnosis_aggregate.outcomes != AGGREGATE_STATES:
        raise ValueError(f"diagnosis must range over {AGGREGATE_STATES}")

    status_quo_matrix = transition_matrix_for_level(bundle.transitions, status_quo_level)
    at_decision = project_for(
        embed_no_ignition(diagnosis_aggregate), status_quo_matrix, delay_to_decision
    )
    ign_at_decision = float(at_decision.probs[IGNITED])
    belief = embed_no_ignition(condition_on_no_ignition(at_decision))

    steps = steps_for(horizon, bundle.transitions.step_duration)
    entries = []
    for level, name in enumerate(bundle.transitions.levels):
        eu = expected_utility(belief, level, horizon, bundle.transitions, bundle.value)
        p_h = ignition_probability(
            belief, transition_matrix_for_level(bundle.transitions, level), steps
        )
        entries.append(
            RankedLevel(
                level=level,
                level_name=name,
                expected_utility=eu,
                ignition_prob_at_horizon=p_h,
            )
        )
    entries.sort(key=lambda e: (-e.expected_utility, -e.level))
    return Recommendation(
        ranked=tuple(entries),
        chosen=entries[0].level,
        horizon_used=horizon,
        ignition_prob_at_decision=ign_at_decision,
    )


def escalating_recommend(
    diagnosis_aggregate: DiscreteDistribution,
    delay_to_decision: float,
    status_quo_level: int,
    bundle: ScenarioBundle,
    ignition_evident: bool = False,
) -> Recommendation:
    """Shortest horizon first; stop as soon as the maximal level is recommended.

    Falls through to the longest-horizon recommendation when no horizon calls
    for the most extensive shutdown.
    """
    if not bundle.value.horizons:
        raise ValueError("bundle declares no candidate horizons")
    rec = None
    for horizon in bundle.value.horizons:
        rec = recommend(
            diagnosis_aggregate,
            delay_to_decision,
            status_quo_level,
            horizon,
            bundle,
            ignition_evident=ignition_evident,
        )
        if rec.chosen == bundle.max_level:
            return rec
    assert rec is not None
    return rec


def classify_severity(
    diagnosis_aggregate: DiscreteDistribution | None,
    ignition_evident: bool,
    thresholds: SeverityThresholds = SeverityThresholds(),
) -> SeverityLayer:
    """Route the situation to a response layer from the aggregate posterior.

    An evident ignition routes to the highest layer unconditionally, so the
    posterior may be omitted in that case.
    """
    if ignition_evident:
        return SeverityLayer.HIGH
    if diagnosis_aggregate is None or diagnosis_aggregate.outcomes != AGGREGATE_STATES:
        raise ValueError(f"diagnosis must range over {AGGREGATE_STATES}")
    p_cat = diagnosis_aggregate.p("catastrophic")
    p_leak = diagnosis_aggregate.p("progressive") + p_cat
    if p_cat >= thresholds.high:
        return SeverityLayer.HIGH
    if p_leak >= thresholds.intermediate:
        return SeverityLayer.INTERMEDIATE
    if p_leak >= thresholds.low:
        return SeverityLayer.LOW
    return SeverityLayer.NORMAL
