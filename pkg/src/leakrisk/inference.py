"""Exact discrete belief-network inference.

``posterior`` runs variable elimination (min-degree ordering, lexicographic
tie-break); ``joint_enumeration_oracle`` materializes the full joint and is the
reference implementation the elimination path is tested against.  Also hosts
the small Bayes machinery reused along plan-tree paths: ``aggregate``,
``observation_predictive`` and ``bayes_update``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dist import DiscreteDistribution, normalized
from .errors import (
    ModelValidationError,
    StateSpaceTooLargeError,
    ZeroProbabilityEvidenceError,
)
from .model import BeliefNetworkSpec

#: Evidence is a plain map node-name -> observed outcome label.
Evidence = dict[str, str]

JOINT_ENUMERATION_CAP = 10**7


def validate_evidence(network: BeliefNetworkSpec, evidence: Evidence):
    by_name = network.by_name
    for name, outcome in evidence.items():
        if name not in by_name:
            raise ModelValidationError(
                f"evidence[{name!r}]", f"evidence names unknown node {name!r}"
            )
        if outcome not in by_name[name].outcomes:
            raise ModelValidationError(
                f"evidence[{name!r}]", f"{outcome!r} is not an outcome of node {name!r}"
            )
        if name == network.real_state_node:
            raise ModelValidationError(
                f"evidence[{name!r}]",
                f"the real-state node {name!r} is inferred, never observed directly",
            )


# ---------------------------------------------------------------------------
# Variable elimination


@dataclass(frozen=True)
class _Factor:
    scope: tuple[str, ...]
    table: np.ndarray  # one axis per scope variable, in scope order


def _multiply(a: _Factor, b: _Factor) -> _Factor:
    scope = a.scope + tuple(v for v in b.scope if v not in a.scope)
    index = {v: i for i, v in enumerate(scope)}
    table = np.einsum(
        a.table,
        [index[v] for v in a.scope],
        b.table,
        [index[v] for v in b.scope],
        list(range(len(scope))),
    )
    return _Factor(scope, table)


def _sum_out(f: _Factor, var: str) -> _Factor:
    axis = f.scope.index(var)
    return _Factor(
        f.scope[:axis] + f.scope[axis + 1 :], f.table.sum(axis=axis)
    )


def _reduce(f: _Factor, var: str, idx: int) -> _Factor:
    axis = f.scope.index(var)
    return _Factor(
        f.scope[:axis] + f.scope[axis + 1 :], np.take(f.table, idx, axis=axis)
    )


def _elimination_order(factors: list[_Factor], keep: str) -> list[str]:
    # Min-degree on the factor interaction graph, ties by node name.
    neighbors: dict[str, set[str]] = {}
    for f in factors:
        for v in f.scope:
            neighbors.setdefault(v, set()).update(u for u in f.scope if u != v)
    remaining = set(neighbors) - {keep}
    order = []
    while remaining:
        var = min(remaining, key=lambda v: (len(neighbors[v] & remaining), v))
        order.append(var)
        # Eliminating var connects its surviving neighbors.
        around = neighbors[var] & remaining
        for u in around:
            neighbors[u].update(around - {u})
        remaining.discard(var)
    return order


def posterior(
    network: BeliefNetworkSpec, evidence: Evidence, query: str
) -> DiscreteDistribution:
    """Exact P(query | evidence) by variable elimination.

    Raises ZeroProbabilityEvidenceError when the evidence has probability 0.
    """
    by_name = network.by_name
    if query not in by_name:
        raise ValueError(f"unknown query node {query!r}")
    validate_evidence(network, evidence)

    factors = [
        _Factor(n.parents + (n.name,), n.cpt_array(by_name)) for n in network.nodes
    ]
    for name, outcome in evidence.items():
        idx = by_name[name].outcomes.index(outcome)
        factors = [
            _reduce(f, name, idx) if name in f.scope else f for f in factors
        ]

    # An observed query collapses to an indicator; eliminate everything to get P(evidence).
    keep = query if query not in evidence else ""
    for var in _elimination_order(factors, keep=keep):
        touching = [f for f in factors if var in f.scope]
        if not touching:
            continue
        product = touching[0]
        for f in touching[1:]:
            product = _multiply(product, f)
        factors = [f for f in factors if var not in f.scope] + [_sum_out(product, var)]

    result = _Factor((), np.ones(()))
    for f in factors:
        result = _multiply(result, f)
    weights = np.atleast_1d(np.asarray(result.table))
    total = float(weights.sum())
    if total <= 0.0:
        raise ZeroProbabilityEvidenceError(
            f"evidence {evidence!r} has probability zero under the network"
        )
    if query in evidence:
        return DiscreteDistribution.indicator(by_name[query].outcomes, evidence[query])
    return DiscreteDistribution(by_name[query].outcomes, weights / total)


# ---------------------------------------------------------------------------
# Joint enumeration oracle


def joint_enumeration_oracle(
    network: BeliefNetworkSpec, evidence: Evidence, query: str
) -> DiscreteDistribution:
    """Posterior by materializing the entire joint table.

    Reference implementation for inference tests; refuses joints larger than
    ``JOINT_ENUMERATION_CAP`` configurations.
    """
    by_name = network.by_name
    if query not in by_name:
        raise ValueError(f"unknown query node {query!r}")
    validate_evidence(network, evidence)

    names = [n.name for n in network.nodes]
    cards = [len(n.outcomes) for n in network.nodes]
    size = 1
    for c in cards:
        size *= c
        if size > JOINT_ENUMERATION_CAP:
            raise StateSpaceTooLargeError(
                f"joint state space exceeds {JOINT_ENUMERATION_CAP} configurations"
            )

    axis_of = {name: i for i, name in enumerate(names)}
    joint = np.ones(cards)
    for node in network.nodes:
        arr = node.cpt_array(by_name)
        involved = [axis_of[p] for p in node.parents] + [axis_of[node.name]]
        # Transpose the CPT axes into global axis order, then broadcast.
        perm = np.argsort(involved)
        arr = np.transpose(arr, perm)
        shape = [1] * len(names)
        for ax in sorted(involved):
            shape[ax] = cards[ax]
        joint = joint * arr.reshape(shape)

    live = list(names)
    for name, outcome in evidence.items():
        idx = by_name[name].outcomes.index(outcome)
        joint = np.take(joint, idx, axis=live.index(name))
        live.remove(name)

    marginal = joint.sum(axis=tuple(i for i, v in enumerate(live) if v != query))
    if query not in live:  # query itself was observed
        marginal = np.zeros(len(by_name[query].outcomes))
        marginal[by_name[query].outcomes.index(evidence[query])] = float(joint.sum())
    total = float(marginal.sum())
    if total <= 0.0:
        raise ZeroProbabilityEvidenceError(
            f"evidence {evidence!r} has probability zero under the network"
        )
    return DiscreteDistribution(by_name[query].outcomes, marginal / total)


# ---------------------------------------------------------------------------
# Aggregation and path updates


def aggregate(
    detailed: DiscreteDistribution,
    aggregation: dict[str, str],
    order: tuple[str, ...] | None = None,
) -> DiscreteDistribution:
    """Collapse a detailed distribution by summing probabilities per aggregate label.

    ``order`` fixes the output outcome order; default is first appearance of each
    aggregate label in the detailed outcome order.
    """
    for outcome in detailed.outcomes:
        if outcome not in aggregation:
            raise ValueError(f"detailed outcome {outcome!r} has no aggregate mapping")
    if order is None:
        order = tuple(dict.fromkeys(aggregation[o] for o in detailed.outcomes))
    sums = dict.fromkeys(order, 0.0)
    for outcome, prob in zip(detailed.outcomes, detailed.probs):
        label = aggregation[outcome]
        if label not in sums:
            raise ValueError(f"aggregate label {label!r} missing from output order")
        sums[label] += float(prob)
    return DiscreteDistribution(order, np.array([sums[o] for o in order]))


def observation_predictive(
    likelihood: dict[str, DiscreteDistribution], belief: DiscreteDistribution
) -> DiscreteDistribution:
    """Preposterior over a test's outcomes: P(o) = sum_s belief(s) * P(o | s)."""
    rows = []
    outcomes: tuple[str, ...] | None = None
    for state in belief.outcomes:
        if state not in likelihood:
            raise ValueError(f"likelihood has no row for state {state!r}")
        row = likelihood[state]
        if outcomes is None:
            outcomes = row.outcomes
        elif row.outcomes != outcomes:
            raise ValueError("likelihood rows disagree on outcome labels")
        rows.append(row.probs)
    assert outcomes is not None
    return DiscreteDistribution(outcomes, belief.probs @ np.vstack(rows))


def bayes_update(
    belief: DiscreteDistribution, likelihood_row_for_outcome: np.ndarray
) -> DiscreteDistribution:
    """Posterior over states after observing one outcome with the given per-state likelihood."""
    row = np.asarray(likelihood_row_for_outcome, dtype=float)
    if row.shape != belief.probs.shape:
        raise ValueError(
            f"likelihood length {row.shape[0]} does not match belief over {len(belief.outcomes)} states"
        )
    weights = belief.probs * row
    total = weights.sum()
    if total <= 0.0:
        raise ZeroProbabilityEvidenceError(
            "observed outcome has probability zero under the current belief"
        )
    return normalized(belief.outcomes, weights)
