"""Release acceptance gate: one test per criterion, one verbose line each.

Every numeric tolerance is stated inline next to its check.  Statistical
checks (Monte Carlo oracles) run under fixed seeds so the gate is fully
deterministic; the 3-sigma bounds were chosen against independently derived
closed forms, not tuned to the implementation.

Criterion 8 replays tests/data/golden-session.jsonl and requires byte
identity with the stored state, recommendation, and plan documents.  Those
fixtures are produced by tests/regen_golden.py; regenerate them only on a
deliberate engine change.
"""

import dataclasses
import json
from pathlib import Path

import numpy as np

import regen_golden
from conftest import (
    DESK_POSTERIOR,
    make_desk_bundle,
    perfect_test,
    uninformative_test,
    with_tests,
)
from random_networks import random_evidence, random_network
from leakrisk.decision import escalating_recommend, expected_utility
from leakrisk.dist import DiscreteDistribution
from leakrisk.evolution import (
    LEAK_STATES,
    condition_on_no_ignition,
    embed_no_ignition,
    steps_for,
    transition_matrix_for_level,
)
from leakrisk.inference import aggregate, joint_enumeration_oracle, posterior
from leakrisk.model import (
    AGGREGATE_STATES,
    LevelParams,
    TransitionSpec,
    ValueSpec,
)
from leakrisk.plan import ChoiceNode, build_plan, full_enumeration_oracle
from leakrisk.scenarios import load_builtin
from leakrisk.session import SessionStore, replay
from leakrisk.simulate import simulate_policies

DATA = Path(__file__).parent / "data"


def _desk_posterior() -> DiscreteDistribution:
    probs = np.array(DESK_POSTERIOR)
    return DiscreteDistribution(AGGREGATE_STATES, probs / probs.sum())


def test_criterion_1_posterior_matches_enumeration_on_200_random_networks():
    # Variable elimination vs. the full-joint oracle: Linf <= 1e-9 on 200
    # random DAGs (up to 12 nodes, up to 4 outcomes, random evidence).
    rng = np.random.default_rng(2026)
    worst = 0.0
    for _ in range(200):
        network = random_network(rng)
        evidence = random_evidence(rng, network)
        fast = posterior(network, evidence, network.real_state_node)
        slow = joint_enumeration_oracle(network, evidence, network.real_state_node)
        assert fast.outcomes == slow.outcomes
        worst = max(worst, float(np.max(np.abs(fast.probs - slow.probs))))
    assert worst <= 1e-9, f"worst Linf {worst:.3e} exceeds 1e-9"


def test_criterion_2_desk_alarm_posterior_matches_hand_bayes():
    # Prior (0.90, 0.08, 0.02), alarm-on likelihood (0.05, 0.70, 0.95):
    # posterior must match the hand calculation within 1e-4 per state.
    desk = make_desk_bundle()
    post = posterior(desk.network, {"alarm": "on"}, "state")
    expected = np.array([0.375, 0.4667, 0.1583])
    assert np.allclose(post.probs, expected, atol=1e-4), post.probs


def _random_monotone_spec(rng: np.random.Generator, n_levels: int = 4) -> TransitionSpec:
    """Random transition parameters, non-increasing in shutdown level.

    Each level also keeps r >= q: a catastrophic leak must ignite at least as
    readily as a progressive one.  Without that physical constraint a riskier
    level could genuinely delay ignition by rushing chains into the
    slower-igniting catastrophic state, and level dominance would not hold.
    """
    draws = np.sort(rng.uniform(0.0, 0.45, size=(4, n_levels)), axis=1)[:, ::-1]
    p, q, r, s = draws  # p+q <= 0.9 by the draw range
    r = np.maximum(r, q)
    for i in range(n_levels - 2, -1, -1):  # restore cross-level monotonicity
        r[i] = max(r[i], r[i + 1])
    return TransitionSpec(
        levels=tuple(f"l{i}" for i in range(n_levels)),
        params=tuple(LevelParams(p[i], q[i], r[i], s[i]) for i in range(n_levels)),
        step_duration=1.0,
    )


def test_criterion_3_evolution_laws_on_random_monotone_parameterizations():
    # 100 random monotone parameterizations x 20 step counts:
    #   semigroup: M^(a+b) == M^a @ M^b, Linf <= 1e-12
    #   absorbing: ignited mass non-decreasing in step count, every level
    #   dominance: ignited mass non-increasing in shutdown level, every step
    rng = np.random.default_rng(42)
    worst_semi = 0.0
    for _ in range(100):
        spec = _random_monotone_spec(rng)
        mats = [transition_matrix_for_level(spec, l).matrix for l in range(4)]
        belief = rng.dirichlet(np.ones(4))
        ign = np.array(
            [
                [float((belief @ np.linalg.matrix_power(m, k))[3]) for k in range(1, 21)]
                for m in mats
            ]
        )
        assert (np.diff(ign, axis=1) >= -1e-15).all(), "ignited mass decreased over time"
        assert (np.diff(ign, axis=0) <= 1e-12).all(), "higher level raised ignition risk"
        for k in range(1, 21):
            a = int(rng.integers(0, k + 1))
            gap = np.abs(
                np.linalg.matrix_power(mats[0], k)
                - np.linalg.matrix_power(mats[0], a) @ np.linalg.matrix_power(mats[0], k - a)
            )
            worst_semi = max(worst_semi, float(gap.max()))
    assert worst_semi <= 1e-12, f"semigroup Linf {worst_semi:.3e} exceeds 1e-12"


def test_criterion_4_decision_dominance_and_monte_carlo_utility():
    desk = make_desk_bundle()
    post = _desk_posterior()

    # Zero ignition loss: production cost alone decides, so level 0 wins.
    free = dataclasses.replace(desk, value=dataclasses.replace(desk.value, ignition_loss=0.0))
    assert escalating_recommend(post, 0.0, 0, free).chosen == 0

    # Ignition loss 1e9 x the largest possible production loss, with
    # P(leak) > 0 and positive q and r: the maximal level must win.
    assert float(post.probs[1] + post.probs[2]) > 0.0
    assert all(lp.q > 0 and lp.r > 0 for lp in desk.transitions.params)
    huge = 1e9 * max(desk.value.production_loss_rate) * max(desk.value.horizons)
    costly = dataclasses.replace(desk, value=dataclasses.replace(desk.value, ignition_loss=huge))
    assert escalating_recommend(post, 0.0, 0, costly).chosen == desk.max_level

    # Closed-form EU vs. a trajectory oracle: 3 sigma at 1e6 samples, on
    # 5 random single-level parameterizations.
    rng = np.random.default_rng(7)
    n = 1_000_000
    for _ in range(5):
        s, p, q, r = rng.uniform(0.01, 0.3, size=4)
        spec = TransitionSpec(("only",), (LevelParams(p, q, r, s),), 1.0)
        raw = rng.dirichlet(np.ones(3))
        belief = DiscreteDistribution(LEAK_STATES, np.append(raw, 0.0))
        rate = float(rng.uniform(10.0, 500.0))
        loss = float(rng.uniform(1e4, 1e6))
        value = ValueSpec((rate,), loss, (4.0,))
        horizon = 4.0
        eu = expected_utility(belief, 0, horizon, spec, value)

        cum = np.cumsum(transition_matrix_for_level(spec, 0).matrix, axis=1)
        states = rng.choice(4, size=n, p=belief.probs)
        for _ in range(steps_for(horizon, spec.step_duration)):
            u = rng.random(n)
            states = (u[:, None] >= cum[states]).sum(axis=1)
        utils = -rate * horizon - loss * (states == 3)
        sem = utils.std(ddof=1) / np.sqrt(n)
        assert abs(eu - utils.mean()) <= 3 * sem, (eu, utils.mean(), sem)


def test_criterion_5_escalation_stops_at_first_decisive_horizon():
    desk = make_desk_bundle()  # horizons (1.0, 4.0)
    danger = DiscreteDistribution(AGGREGATE_STATES, np.array([0.02, 0.08, 0.90]))
    rec = escalating_recommend(danger, 0.0, 0, desk)
    assert rec.chosen == desk.max_level
    assert rec.horizon_used == desk.value.horizons[0]

    # Contrast: a benign belief never triggers the maximal level, so the
    # escalation falls through to the longest horizon.
    benign = DiscreteDistribution(AGGREGATE_STATES, np.array([0.90, 0.08, 0.02]))
    rec = escalating_recommend(benign, 0.0, 0, desk)
    assert rec.chosen != desk.max_level
    assert rec.horizon_used == desk.value.horizons[-1]


def _evpi(bundle, belief3: DiscreteDistribution, horizon: float) -> float:
    """Expected value of perfect information, straight from the definition."""
    levels = range(len(bundle.transitions.levels))

    def best_eu(b: DiscreteDistribution) -> float:
        return max(
            expected_utility(b, l, horizon, bundle.transitions, bundle.value) for l in levels
        )

    informed = sum(
        float(belief3.probs[i]) * best_eu(DiscreteDistribution(AGGREGATE_STATES, np.eye(3)[i]))
        for i in range(3)
    )
    return informed - best_eu(belief3)


def test_criterion_6_value_of_information_identities():
    # Single decision horizon: escalation re-optimizes per posterior and
    # breaks the perfect-information bound, so the identities are stated
    # for one horizon only.
    single = make_desk_bundle(horizons=(1.0,))
    post = _desk_posterior()
    evpi = _evpi(single, post, 1.0)
    assert evpi > 0.0

    # Free perfect test: plan gain equals EVPI within 1e-9.
    plan = build_plan(with_tests(single, perfect_test()), post, 0)
    assert abs((plan.best_eu - plan.act_now_eu) - evpi) <= 1e-9

    # Uninformative test: zero gain at any budget.
    plan = build_plan(with_tests(single, uninformative_test()), post, 0)
    assert abs(plan.best_eu - plan.act_now_eu) <= 1e-12

    # Perfect test priced above EVPI: branch is built, rollback rejects it.
    priced = with_tests(single, perfect_test(cost=evpi * 1.5))
    priced = dataclasses.replace(
        priced,
        constraints_default=dataclasses.replace(
            priced.constraints_default, max_total_cost=evpi * 2
        ),
    )
    plan = build_plan(priced, post, 0)
    assert isinstance(plan.root, ChoiceNode)
    assert plan.root.argmax == "act-now"
    assert plan.best_eu == plan.act_now_eu


def test_criterion_7_anytime_planner_monotone_and_converges():
    # best_eu never decreases as the budget is spent, and once the frontier
    # empties the anytime value matches exhaustive enumeration within 1e-9,
    # under both expansion heuristics.
    desk = make_desk_bundle()
    post = _desk_posterior()
    optimum = full_enumeration_oracle(desk, post, 0)
    for heuristic in ("highest-ev-path", "probability-weighted"):
        plan = build_plan(desk, post, 0, heuristic=heuristic)
        history = np.array(plan.best_eu_history)
        assert (np.diff(history) >= -1e-12).all(), f"{heuristic}: best_eu regressed"
        assert not plan.frontier, f"{heuristic}: budget did not exhaust the tree"
        assert abs(plan.best_eu - optimum) <= 1e-9, (heuristic, plan.best_eu, optimum)


def test_criterion_8_golden_session_replay_is_byte_identical():
    bundle = load_builtin()
    store = SessionStore(DATA)
    state = replay(store.events(regen_golden.SESSION_ID), bundle)
    golden_state = (DATA / "golden_state.json").read_text(encoding="utf-8")
    assert state.canonical_json() + "\n" == golden_state

    part = condition_on_no_ignition(state.belief)
    rec = escalating_recommend(part, 0.0, state.status_quo_level, bundle)
    golden_rec = (DATA / "golden_recommendation.json").read_text(encoding="utf-8")
    assert json.dumps(rec.to_json(), indent=2, sort_keys=True) + "\n" == golden_rec

    constraints = dataclasses.replace(
        bundle.constraints_default, expansion_budget=regen_golden.PLAN_BUDGET
    )
    plan = build_plan(
        bundle, part, state.status_quo_level, constraints,
        heuristic=regen_golden.PLAN_HEURISTIC,
    )
    golden_plan = (DATA / "golden_plan.json").read_text(encoding="utf-8")
    assert json.dumps(plan.to_json(), indent=2, sort_keys=True) + "\n" == golden_plan


def test_criterion_9_simulated_curves_match_projection_and_order():
    # Sampled ignition curves vs. the analytic projection: 3 sigma at 1e5
    # trajectories at every step and level, and the coupled curves must be
    # ordered by shutdown level at every step.
    bundle = load_builtin()
    agg = aggregate(
        posterior(bundle.network, {}, bundle.network.real_state_node),
        bundle.aggregation,
        AGGREGATE_STATES,
    )
    belief = embed_no_ignition(agg)
    steps, n = 24, 100_000
    curves = simulate_policies(bundle, belief, steps, n, seed=0)
    for curve in curves:
        matrix = transition_matrix_for_level(bundle.transitions, curve.level).matrix
        for k in range(steps + 1):
            p = float((belief.probs @ np.linalg.matrix_power(matrix, k))[3])
            sigma = max(np.sqrt(p * (1.0 - p) / n), 1e-12)
            assert abs(curve.ignition_prob[k] - p) <= 3 * sigma, (curve.level, k)
    ign = np.array([c.ignition_prob for c in curves])
    assert (np.diff(ign, axis=0) <= 1e-12).all(), "curves not ordered by level"
