"""Anytime contingent information-gathering plans.

The plan is a decision tree alternating test choices and test outcomes.  It
starts as a single act-now leaf (the myopic baseline) and grows one path at a
time: the act-now leaf at the chosen path becomes a choice node offering every
eligible test next to the act-now alternative.  Each test branch carries an
ignition-interrupt child (ignition during the test terminates gathering) and
one child per outcome with positive preposterior probability.  Rollback
(expectation at branches, maximization at choices) keeps a best-so-far value
that never decreases as expansions accumulate.

Path cost accounting: every leaf is charged the test costs spent along its
path plus the status-quo production loss over the time the tests took; an
act-now leaf adds its recommendation's forward-looking EU, an ignition leaf
adds the ignition loss.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .decision import Recommendation, escalating_recommend
from .dist import DiscreteDistribution
from .errors import TreeTooLargeError
from .evolution import (
    IGNITED,
    condition_on_no_ignition,
    embed_no_ignition,
    project,
    steps_for,
    transition_matrix_for_level,
)
from .inference import bayes_update, observation_predictive
from .model import AGGREGATE_STATES, FramingConstraints, ScenarioBundle, TestSpec

#: Tolerance for argmax tie detection at choice nodes (ties break toward
#: act-now, then catalog order).
CHOICE_TIE_TOL = 1e-12

FULL_TREE_NODE_CAP = 10**6

HEURISTICS = ("highest-ev-path", "probability-weighted")


@dataclass
class ActNowLeaf:
    kind = "act-now-leaf"
    path_id: str
    belief: DiscreteDistribution  # 4-state, zero ignited mass
    time: float
    cost: float
    tests_done: tuple[str, ...]
    reach_prob: float
    recommendation: Recommendation
    eu: float


@dataclass
class IgnitionLeaf:
    kind = "ignition-leaf"
    path_id: str
    belief: DiscreteDistribution  # indicator on ignited
    time: float
    cost: float
    eu: float


@dataclass
class OutcomeBranch:
    kind = "outcome-branch"
    test_id: str
    ignition_prob: float
    ignition_child: IgnitionLeaf
    outcome_labels: tuple[str, ...]
    outcome_probs: tuple[float, ...]  # include the survive factor; +ignition_prob sums to 1
    children: list["PlanNode"]
    eu: float = 0.0


@dataclass
class ChoiceNode:
    kind = "choice"
    act_now: ActNowLeaf
    branches: list[OutcomeBranch]  # catalog order
    argmax: str = "act-now"
    eu: float = 0.0


PlanNode = Union[ActNowLeaf, IgnitionLeaf, OutcomeBranch, ChoiceNode]


@dataclass
class ContingentPlan:
    root: PlanNode
    best_eu: float
    expansions_used: int
    frontier: list[str]  # expandable path ids, insertion order
    best_eu_history: list[float] = field(default_factory=list)
    _leaves: dict[str, ActNowLeaf] = field(default_factory=dict, repr=False)
    _slots: dict[str, tuple[OutcomeBranch, int]] = field(default_factory=dict, repr=False)

    @property
    def act_now_eu(self) -> float:
        """EU of deciding immediately, before any information gathering."""
        return self.best_eu_history[0] if self.best_eu_history else self.best_eu

    def to_json(self) -> dict:
        return {
            "best_eu": self.best_eu,
            "act_now_eu": self.act_now_eu,
            "expansions_used": self.expansions_used,
            "best_eu_history": list(self.best_eu_history),
            "frontier": list(self.frontier),
            "root": _node_to_json(self.root),
        }


def _node_to_json(node: PlanNode) -> dict:
    if isinstance(node, ActNowLeaf):
        return {
            "kind": node.kind,
            "path": node.path_id,
            "time": node.time,
            "cost": node.cost,
            "belief": node.belief.to_json(),
            "eu": node.eu,
            "recommendation": node.recommendation.to_json(),
        }
    if isinstance(node, IgnitionLeaf):
        return {
            "kind": node.kind,
            "path": node.path_id,
            "time": node.time,
            "cost": node.cost,
            "eu": node.eu,
        }
    if isinstance(node, OutcomeBranch):
        return {
            "kind": node.kind,
            "test_id": node.test_id,
            "eu": node.eu,
            "ignition_prob": node.ignition_prob,
            "ignition_child": _node_to_json(node.ignition_child),
            "outcomes": [
                {"outcome": o, "prob": p, "child": _node_to_json(c)}
                for o, p, c in zip(node.outcome_labels, node.outcome_probs, node.children)
            ],
        }
    return {
        "kind": node.kind,
        "eu": node.eu,
        "argmax": node.argmax,
        "act_now": _node_to_json(node.act_now),
        "tests": [_node_to_json(b) for b in node.branches],
    }


# ---------------------------------------------------------------------------
# Eligibility


def eligible_tests(
    bundle: ScenarioBundle,
    belief: DiscreteDistribution,
    tests_done: tuple[str, ...],
    accumulated_time: float,
    accumulated_cost: float,
    constraints: FramingConstraints,
) -> list[str]:
    """Test ids runnable next on this path, in catalog order.

    A test qualifies when its eligibility predicate holds on the no-ignition
    aggregate posterior, its duration and cost fit the remaining budget, and
    repetition rules allow it.
    """
    if len(tests_done) >= constraints.max_tests:
        return []
    posterior3 = condition_on_no_ignition(belief)
    out = []
    for test in bundle.tests:
        if not test.repeatable and test.id in tests_done:
            continue
        if accumulated_time + test.duration > constraints.max_total_time + 1e-12:
            continue
        if accumulated_cost + test.cost > constraints.max_total_cost + 1e-12:
            continue
        if all(cond.holds(posterior3) for cond in test.eligibility):
            out.append(test.id)
    return out


# ---------------------------------------------------------------------------
# Expansion


def _branch_for_test(
    leaf: ActNowLeaf,
    test: TestSpec,
    bundle: ScenarioBundle,
    status_quo_level: int,
) -> OutcomeBranch:
    """Grow one test branch below an act-now leaf's position."""
    transitions = bundle.transitions
    matrix = transition_matrix_for_level(transitions, status_quo_level)
    steps = steps_for(test.duration, transitions.step_duration)
    during = project(leaf.belief, matrix, steps)
    interrupt = float(during.probs[IGNITED]) - float(leaf.belief.probs[IGNITED])
    survive = 1.0 - interrupt

    time = leaf.time + test.duration
    cost = leaf.cost + test.cost
    accrued = _accrued_cost(bundle, status_quo_level, time, cost)
    ignition_child = IgnitionLeaf(
        path_id=f"{leaf.path_id}/{test.id}=!ignition",
        belief=DiscreteDistribution.indicator(during.outcomes, "ignited"),
        time=time,
        cost=cost,
        eu=-bundle.value.ignition_loss - accrued,
    )

    posterior3 = condition_on_no_ignition(during)
    predictive = observation_predictive(
        {s: test.likelihood_dist(s) for s in AGGREGATE_STATES}, posterior3
    )
    labels, probs, children = [], [], []
    for outcome, p_outcome in zip(predictive.outcomes, predictive.probs):
        if p_outcome <= 0.0:
            continue  # measure-zero outcome: no child
        updated3 = bayes_update(posterior3, test.outcome_column(outcome))
        child_path = f"{leaf.path_id}/{test.id}={outcome}"
        branch_prob = survive * float(p_outcome)
        rec = escalating_recommend(updated3, 0.0, status_quo_level, bundle)
        child = ActNowLeaf(
            path_id=child_path,
            belief=embed_no_ignition(updated3),
            time=time,
            cost=cost,
            tests_done=leaf.tests_done + (test.id,),
            reach_prob=leaf.reach_prob * branch_prob,
            recommendation=rec,
            eu=rec.expected_utility - accrued,
        )
        labels.append(outcome)
        probs.append(branch_prob)
        children.append(child)

    return OutcomeBranch(
        test_id=test.id,
        ignition_prob=interrupt,
        ignition_child=ignition_child,
        outcome_labels=tuple(labels),
        outcome_probs=tuple(probs),
        children=children,
    )


def _accrued_cost(
    bundle: ScenarioBundle, status_quo_level: int, time: float, cost: float
) -> float:
    """Costs sunk along a path: test fees plus status-quo production loss while testing."""
    return cost + bundle.value.production_loss_rate[status_quo_level] * time


def expand_path(
    plan: ContingentPlan,
    path_id: str,
    bundle: ScenarioBundle,
    status_quo_level: int,
    constraints: FramingConstraints,
) -> ContingentPlan:
    """Turn the act-now leaf at ``path_id`` into a choice over eligible tests.

    With no eligible tests the path simply leaves the frontier.  Outcomes with
    zero preposterior probability get no child.
    """
    if path_id not in plan._leaves:
        raise KeyError(f"path {path_id!r} is not on the frontier")
    leaf = plan._leaves[path_id]
    tests = eligible_tests(
        bundle, leaf.belief, leaf.tests_done, leaf.time, leaf.cost, constraints
    )
    plan.frontier.remove(path_id)
    del plan._leaves[path_id]
    if not tests:
        return plan

    choice = ChoiceNode(act_now=leaf, branches=[])
    for test_id in tests:
        branch = _branch_for_test(leaf, bundle.test(test_id), bundle, status_quo_level)
        choice.branches.append(branch)
        for i, child in enumerate(branch.children):
            plan.frontier.append(child.path_id)
            plan._leaves[child.path_id] = child
            plan._slots[child.path_id] = (branch, i)

    if path_id == "":
        plan.root = choice
    else:
        parent_branch, slot = plan._slots.pop(path_id)
        parent_branch.children[slot] = choice
    return plan


# ---------------------------------------------------------------------------
# Rollback


def rollback(plan: ContingentPlan, bundle: ScenarioBundle | None = None) -> float:
    """Backward induction: expectation at branches, max at choices.

    Annotates every choice node with its argmax (ties toward act-now, then
    catalog order, tolerance CHOICE_TIE_TOL) and returns the root EU.
    """
    value = _rollback_node(plan.root)
    plan.best_eu = value
    return value


def _rollback_node(node: PlanNode) -> float:
    if isinstance(node, (ActNowLeaf, IgnitionLeaf)):
        return node.eu
    if isinstance(node, OutcomeBranch):
        total_prob = node.ignition_prob + sum(node.outcome_probs)
        if abs(total_prob - 1.0) > 1e-9:
            raise ValueError(
                f"branch for {node.test_id!r} has outcome probabilities summing to {total_prob!r}"
            )
        eu = node.ignition_prob * node.ignition_child.eu
        for p, child in zip(node.outcome_probs, node.children):
            eu += p * _rollback_node(child)
        node.eu = eu
        return eu
    candidates = [("act-now", node.act_now.eu)]
    for branch in node.branches:
        candidates.append((branch.test_id, _rollback_node(branch)))
    best = max(v for _, v in candidates)
    node.eu = best
    node.argmax = next(k for k, v in candidates if v >= best - CHOICE_TIE_TOL)
    return best


# ---------------------------------------------------------------------------
# Anytime construction


def _pick_path(
    plan: ContingentPlan, heuristic: str, rng: np.random.Generator
) -> str:
    if heuristic == "highest-ev-path":
        return max(plan.frontier, key=lambda p: plan._leaves[p].reach_prob * plan._leaves[p].eu)
    weights = np.array([plan._leaves[p].reach_prob for p in plan.frontier])
    total = weights.sum()
    if total <= 0:
        return plan.frontier[0]
    return plan.frontier[int(rng.choice(len(plan.frontier), p=weights / total))]


def build_plan(
    bundle: ScenarioBundle,
    diagnosis_aggregate: DiscreteDistribution,
    status_quo_level: int,
    constraints: FramingConstraints | None = None,
    heuristic: str = "highest-ev-path",
) -> ContingentPlan:
    """Anytime plan construction.

    Starts from the myopic act-now root, then repeatedly picks a frontier path
    (by the requested heuristic), expands it one step, and rolls the tree
    back, for at most ``constraints.expansion_budget`` iterations.  The
    recorded best_eu sequence is non-decreasing; an emptied frontier
    terminates early.
    """
    if heuristic not in HEURISTICS:
        raise ValueError(f"heuristic must be one of {HEURISTICS}, got {heuristic!r}")
    if constraints is None:
        constraints = bundle.constraints_default
    rng = np.random.default_rng(constraints.seed)

    rec = escalating_recommend(diagnosis_aggregate, 0.0, status_quo_level, bundle)
    root = ActNowLeaf(
        path_id="",
        belief=embed_no_ignition(diagnosis_aggregate),
        time=0.0,
        cost=0.0,
        tests_done=(),
        reach_prob=1.0,
        recommendation=rec,
        eu=rec.expected_utility,
    )
    plan = ContingentPlan(
        root=root,
        best_eu=root.eu,
        expansions_used=0,
        frontier=[""],
        best_eu_history=[root.eu],
        _leaves={"": root},
    )

    for _ in range(constraints.expansion_budget):
        if not plan.frontier:
            break
        path_id = _pick_path(plan, heuristic, rng)
        expand_path(plan, path_id, bundle, status_quo_level, constraints)
        rollback(plan, bundle)
        plan.expansions_used += 1
        plan.best_eu_history.append(plan.best_eu)
    return plan


# ---------------------------------------------------------------------------
# Exhaustive reference


def full_enumeration_oracle(
    bundle: ScenarioBundle,
    diagnosis_aggregate: DiscreteDistribution,
    status_quo_level: int,
    constraints: FramingConstraints | None = None,
) -> float:
    """Optimal EU of the complete constraint-bounded tree, by direct recursion.

    Reference optimum the anytime construction converges to; refuses trees
    beyond FULL_TREE_NODE_CAP nodes.
    """
    if constraints is None:
        constraints = bundle.constraints_default
    transitions = bundle.transitions
    counter = {"nodes": 0}

    def value(belief4: DiscreteDistribution, tests_done: tuple[str, ...], time: float, cost: float) -> float:
        counter["nodes"] += 1
        if counter["nodes"] > FULL_TREE_NODE_CAP:
            raise TreeTooLargeError(
                f"constrained plan tree exceeds {FULL_TREE_NODE_CAP} nodes"
            )
        belief3 = condition_on_no_ignition(belief4)
        accrued = _accrued_cost(bundle, status_quo_level, time, cost)
        best = (
            escalating_recommend(belief3, 0.0, status_quo_level, bundle).expected_utility
            - accrued
        )
        for test_id in eligible_tests(bundle, belief4, tests_done, time, cost, constraints):
            test = bundle.test(test_id)
            matrix = transition_matrix_for_level(transitions, status_quo_level)
            during = project(belief4, matrix, steps_for(test.duration, transitions.step_duration))
            interrupt = float(during.probs[IGNITED]) - float(belief4.probs[IGNITED])
            survive = 1.0 - interrupt
            t_next, c_next = time + test.duration, cost + test.cost
            sunk = _accrued_cost(bundle, status_quo_level, t_next, c_next)
            branch = interrupt * (-bundle.value.ignition_loss - sunk)
            posterior3 = condition_on_no_ignition(during)
            predictive = observation_predictive(
                {s: test.likelihood_dist(s) for s in AGGREGATE_STATES}, posterior3
            )
            for outcome, p_outcome in zip(predictive.outcomes, predictive.probs):
                if p_outcome <= 0.0:
                    continue
                updated3 = bayes_update(posterior3, test.outcome_column(outcome))
                branch += (
                    survive
                    * float(p_outcome)
                    * value(
                        embed_no_ignition(updated3),
                        tests_done + (test.id,),
                        t_next,
                        c_next,
                    )
                )
            best = max(best, branch)
        return best

    return value(embed_no_ignition(diagnosis_aggregate), (), 0.0, 0.0)
