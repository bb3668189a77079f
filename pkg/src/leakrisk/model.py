"""Scenario bundles: diagnosis network, leak dynamics, value model, test catalog.

A scenario is one JSON document with top-level keys
``{"id", "network", "transitions", "value", "tests", "constraints",
"aggregation"}`` (plus optional ``"severity"`` thresholds).  CPT rows are keyed
by the parent outcome labels joined with ``"|"``; a root node has the single
key ``""``.  ``load_scenario`` validates every invariant and reports the first
violation with its location path.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Union

import numpy as np

from .dist import PROB_TOL, DiscreteDistribution
from .errors import ModelValidationError, ScenarioParseError

#: Decision-facing leak states, fixed order.  The dynamics add a fourth
#: absorbing state "ignited" (see evolution.LEAK_STATES).
AGGREGATE_STATES: tuple[str, str, str] = ("none", "progressive", "catastrophic")

_ELIGIBILITY_OPS = (">=", ">", "<=", "<")


@dataclass(frozen=True)
class NodeSpec:
    """One discrete network node: outcome labels, parents, and a CPT.

    The CPT holds one row per parent configuration, keyed by the tuple of
    parent outcome labels in parent order (empty tuple for a root node).
    """

    name: str
    outcomes: tuple[str, ...]
    parents: tuple[str, ...]
    cpt: dict[tuple[str, ...], np.ndarray]

    def cpt_array(self, by_name: dict[str, "NodeSpec"]) -> np.ndarray:
        """Dense CPT with one axis per parent (in parent order) plus the node axis."""
        shape = [len(by_name[p].outcomes) for p in self.parents] + [len(self.outcomes)]
        arr = np.empty(shape)
        parent_outcomes = [by_name[p].outcomes for p in self.parents]
        for idx, combo in zip(
            itertools.product(*(range(len(o)) for o in parent_outcomes)),
            itertools.product(*parent_outcomes),
        ):
            arr[idx] = self.cpt[combo]
        return arr


@dataclass(frozen=True)
class BeliefNetworkSpec:
    nodes: tuple[NodeSpec, ...]
    real_state_node: str

    def node(self, name: str) -> NodeSpec:
        for n in self.nodes:
            if n.name == name:
                return n
        raise KeyError(name)

    @property
    def by_name(self) -> dict[str, NodeSpec]:
        return {n.name: n for n in self.nodes}


@dataclass(frozen=True)
class LevelParams:
    """Per-step transition probabilities for one shutdown level.

    p: progressive -> catastrophic, q: progressive -> ignited,
    r: catastrophic -> ignited, s: none -> progressive.
    """

    p: float
    q: float
    r: float
    s: float


@dataclass(frozen=True)
class TransitionSpec:
    levels: tuple[str, ...]
    params: tuple[LevelParams, ...]
    step_duration: float


@dataclass(frozen=True)
class ValueSpec:
    production_loss_rate: tuple[float, ...]  # aligned with transition levels
    ignition_loss: float
    horizons: tuple[float, ...]


@dataclass(frozen=True)
class EligibilityCondition:
    """Threshold comparison on the current aggregate posterior, e.g. P(catastrophic) >= 0.1."""

    state: str
    op: str
    value: float

    def holds(self, belief: DiscreteDistribution) -> bool:
        p = belief.p(self.state)
        if self.op == ">=":
            return p >= self.value
        if self.op == ">":
            return p > self.value
        if self.op == "<=":
            return p <= self.value
        return p < self.value


@dataclass(frozen=True)
class TestSpec:
    id: str
    label: str
    outcomes: tuple[str, ...]
    likelihood: dict[str, np.ndarray]  # aggregate state -> distribution over outcomes
    duration: float
    cost: float
    eligibility: tuple[EligibilityCondition, ...] = ()
    repeatable: bool = False

    def likelihood_dist(self, state: str) -> DiscreteDistribution:
        return DiscreteDistribution(self.outcomes, self.likelihood[state])

    def outcome_column(self, outcome: str) -> np.ndarray:
        """P(outcome | state) for each aggregate state, in AGGREGATE_STATES order."""
        j = self.outcomes.index(outcome)
        return np.array([self.likelihood[s][j] for s in AGGREGATE_STATES])


@dataclass(frozen=True)
class FramingConstraints:
    max_tests: int
    max_total_time: float
    max_total_cost: float
    expansion_budget: int
    seed: int = 0


@dataclass(frozen=True)
class SeverityThresholds:
    high: float = 0.25
    intermediate: float = 0.05
    low: float = 0.01


@dataclass(frozen=True)
class ScenarioBundle:
    id: str
    network: BeliefNetworkSpec
    transitions: TransitionSpec
    value: ValueSpec
    tests: tuple[TestSpec, ...]
    constraints_default: FramingConstraints
    aggregation: dict[str, str]  # detailed real-state label -> aggregate label
    severity: SeverityThresholds = field(default_factory=SeverityThresholds)

    @property
    def max_level(self) -> int:
        return len(self.transitions.levels) - 1

    def test(self, test_id: str) -> TestSpec:
        for t in self.tests:
            if t.id == test_id:
                return t
        raise KeyError(test_id)


# ---------------------------------------------------------------------------
# Validation


def _fail(path: str, message: str):
    raise ModelValidationError(path, message)


def _check_row(row: np.ndarray, path: str):
    if np.any(row < 0) or np.any(row > 1):
        _fail(path, f"entries outside [0, 1]: {row.tolist()}")
    if abs(row.sum() - 1.0) > PROB_TOL:
        _fail(path, f"row sums to {row.sum():.12g}, not 1")


def _check_unit(x: float, path: str):
    if not (isinstance(x, (int, float)) and math.isfinite(x) and 0.0 <= x <= 1.0):
        _fail(path, f"expected a probability in [0, 1], got {x!r}")


def validate_network(net: BeliefNetworkSpec, path: str = "network"):
    names = [n.name for n in net.nodes]
    if len(set(names)) != len(names):
        _fail(path, "duplicate node names")
    by_name = net.by_name
    if net.real_state_node not in by_name:
        _fail(f"{path}.real_state_node", f"unknown node {net.real_state_node!r}")

    for i, node in enumerate(net.nodes):
        npath = f"{path}.nodes[{i}]({node.name})"
        if len(node.outcomes) < 1:
            _fail(npath, "node has no outcomes")
        if len(set(node.outcomes)) != len(node.outcomes):
            _fail(npath, "duplicate outcome labels")
        for parent in node.parents:
            if parent not in by_name:
                _fail(npath, f"unresolved parent {parent!r}")

    # Cycle check: repeatedly strip nodes whose parents are all stripped.
    remaining = set(names)
    while remaining:
        removable = [
            n for n in remaining if all(p not in remaining for p in by_name[n].parents)
        ]
        if not removable:
            _fail(path, f"cycle among nodes {sorted(remaining)}")
        remaining -= set(removable)

    for i, node in enumerate(net.nodes):
        npath = f"{path}.nodes[{i}]({node.name}).cpt"
        expected = set(itertools.product(*(by_name[p].outcomes for p in node.parents)))
        got = set(node.cpt)
        if got != expected:
            missing = sorted(expected - got)
            extra = sorted(got - expected)
            detail = []
            if missing:
                detail.append(f"missing rows {['|'.join(m) for m in missing[:3]]}")
            if extra:
                detail.append(f"unexpected rows {['|'.join(e) for e in extra[:3]]}")
            _fail(npath, "; ".join(detail) or "wrong row set")
        for combo in sorted(node.cpt):
            row = np.asarray(node.cpt[combo], dtype=float)
            if row.shape != (len(node.outcomes),):
                _fail(f"{npath}['{'|'.join(combo)}']", f"row length {row.shape}, expected {len(node.outcomes)}")
            _check_row(row, f"{npath}['{'|'.join(combo)}']")


def validate_transitions(spec: TransitionSpec, path: str = "transitions"):
    if len(spec.levels) < 1:
        _fail(f"{path}.levels", "at least one shutdown level required")
    if len(set(spec.levels)) != len(spec.levels):
        _fail(f"{path}.levels", "duplicate level names")
    if len(spec.params) != len(spec.levels):
        _fail(f"{path}.params", f"{len(spec.params)} parameter sets for {len(spec.levels)} levels")
    if not (isinstance(spec.step_duration, (int, float)) and spec.step_duration > 0):
        _fail(f"{path}.step_duration", f"must be > 0, got {spec.step_duration!r}")
    for i, lp in enumerate(spec.params):
        ppath = f"{path}.params[{i}]({spec.levels[i]})"
        for attr in ("p", "q", "r", "s"):
            _check_unit(getattr(lp, attr), f"{ppath}.{attr}")
        if lp.p + lp.q > 1 + PROB_TOL:
            _fail(ppath, f"p+q = {lp.p + lp.q:.12g} exceeds 1")
    for i in range(1, len(spec.params)):
        lo, hi = spec.params[i - 1], spec.params[i]
        for attr in ("p", "q", "r", "s"):
            if getattr(hi, attr) > getattr(lo, attr) + PROB_TOL:
                _fail(
                    f"{path}.params[{i}].{attr}",
                    f"must be non-increasing with level: {getattr(hi, attr)} > {getattr(lo, attr)}",
                )


def validate_value(value: ValueSpec, n_levels: int, path: str = "value"):
    if len(value.production_loss_rate) != n_levels:
        _fail(f"{path}.production_loss_rate", f"{len(value.production_loss_rate)} rates for {n_levels} levels")
    for i, rate in enumerate(value.production_loss_rate):
        if not (math.isfinite(rate) and rate >= 0):
            _fail(f"{path}.production_loss_rate[{i}]", f"must be nonnegative, got {rate!r}")
        if i and rate < value.production_loss_rate[i - 1]:
            _fail(f"{path}.production_loss_rate[{i}]", "must be non-decreasing in level")
    if not (math.isfinite(value.ignition_loss) and value.ignition_loss >= 0):
        _fail(f"{path}.ignition_loss", f"must be nonnegative, got {value.ignition_loss!r}")
    if not value.horizons:
        _fail(f"{path}.horizons", "at least one horizon required")
    for i, h in enumerate(value.horizons):
        if not (math.isfinite(h) and h > 0):
            _fail(f"{path}.horizons[{i}]", f"must be > 0, got {h!r}")
        if i and h <= value.horizons[i - 1]:
            _fail(f"{path}.horizons[{i}]", "horizons must be strictly ascending")


def validate_test(test: TestSpec, path: str):
    if len(test.outcomes) < 2:
        _fail(f"{path}.outcomes", "a test needs at least two outcomes")
    if len(set(test.outcomes)) != len(test.outcomes):
        _fail(f"{path}.outcomes", "duplicate outcome labels")
    if set(test.likelihood) != set(AGGREGATE_STATES):
        _fail(f"{path}.likelihood", f"rows must cover exactly {list(AGGREGATE_STATES)}, got {sorted(test.likelihood)}")
    for state in AGGREGATE_STATES:
        row = np.asarray(test.likelihood[state], dtype=float)
        if row.shape != (len(test.outcomes),):
            _fail(f"{path}.likelihood[{state}]", f"row length {row.shape[0]}, expected {len(test.outcomes)}")
        _check_row(row, f"{path}.likelihood[{state}]")
    if not (math.isfinite(test.duration) and test.duration >= 0):
        _fail(f"{path}.duration", f"must be >= 0, got {test.duration!r}")
    if not (math.isfinite(test.cost) and test.cost >= 0):
        _fail(f"{path}.cost", f"must be nonnegative, got {test.cost!r}")
    for j, cond in enumerate(test.eligibility):
        cpath = f"{path}.eligibility[{j}]"
        if cond.state not in AGGREGATE_STATES:
            _fail(cpath, f"unknown aggregate state {cond.state!r}")
        if cond.op not in _ELIGIBILITY_OPS:
            _fail(cpath, f"unknown operator {cond.op!r}")
        _check_unit(cond.value, f"{cpath}.value")


def validate_constraints(c: FramingConstraints, path: str = "constraints"):
    if not (isinstance(c.max_tests, int) and c.max_tests >= 0):
        _fail(f"{path}.max_tests", f"must be an integer >= 0, got {c.max_tests!r}")
    if not (math.isfinite(c.max_total_time) and c.max_total_time >= 0):
        _fail(f"{path}.max_total_time", f"must be nonnegative, got {c.max_total_time!r}")
    if not (math.isfinite(c.max_total_cost) and c.max_total_cost >= 0):
        _fail(f"{path}.max_total_cost", f"must be nonnegative, got {c.max_total_cost!r}")
    if not (isinstance(c.expansion_budget, int) and c.expansion_budget >= 1):
        _fail(f"{path}.expansion_budget", f"must be an integer >= 1, got {c.expansion_budget!r}")
    if not isinstance(c.seed, int):
        _fail(f"{path}.seed", f"must be an integer, got {c.seed!r}")


def validate_bundle(bundle: ScenarioBundle):
    if not bundle.id:
        _fail("id", "scenario id must be nonempty")
    validate_network(bundle.network)
    validate_transitions(bundle.transitions)
    validate_value(bundle.value, len(bundle.transitions.levels))
    ids = [t.id for t in bundle.tests]
    if len(set(ids)) != len(ids):
        _fail("tests", "duplicate test ids")
    for i, test in enumerate(bundle.tests):
        validate_test(test, f"tests[{i}]({test.id})")
    validate_constraints(bundle.constraints_default)

    real = bundle.network.node(bundle.network.real_state_node)
    for outcome in real.outcomes:
        if outcome not in bundle.aggregation:
            _fail("aggregation", f"real-state outcome {outcome!r} has no aggregate mapping")
    for detailed, agg in bundle.aggregation.items():
        if detailed not in real.outcomes:
            _fail(f"aggregation[{detailed}]", "not an outcome of the real-state node")
        if agg not in AGGREGATE_STATES:
            _fail(f"aggregation[{detailed}]", f"maps to unknown aggregate state {agg!r}")

    sev = bundle.severity
    for attr in ("high", "intermediate", "low"):
        _check_unit(getattr(sev, attr), f"severity.{attr}")
    if sev.low > sev.intermediate:
        _fail("severity", f"low threshold {sev.low} exceeds intermediate {sev.intermediate}")


# ---------------------------------------------------------------------------
# JSON loading / serialization


def _require(doc: dict, key: str, path: str):
    if key not in doc:
        _fail(path, f"missing key {key!r}")
    return doc[key]


def _network_from_json(doc: dict) -> BeliefNetworkSpec:
    nodes = []
    for i, nd in enumerate(_require(doc, "nodes", "network")):
        path = f"network.nodes[{i}]"
        cpt_doc = _require(nd, "cpt", path)
        cpt = {}
        for key, row in cpt_doc.items():
            combo = tuple(key.split("|")) if key else ()
            cpt[combo] = np.asarray(row, dtype=float)
        nodes.append(
            NodeSpec(
                name=_require(nd, "name", path),
                outcomes=tuple(_require(nd, "outcomes", path)),
                parents=tuple(nd.get("parents", ())),
                cpt=cpt,
            )
        )
    return BeliefNetworkSpec(
        nodes=tuple(nodes), real_state_node=_require(doc, "real_state_node", "network")
    )


def bundle_from_json(doc: dict) -> ScenarioBundle:
    """Build a ScenarioBundle from a parsed JSON document and validate it."""
    tr = _require(doc, "transitions", "$")
    levels = tuple(_require(tr, "levels", "transitions"))
    params = tuple(
        LevelParams(p=float(d["p"]), q=float(d["q"]), r=float(d["r"]), s=float(d["s"]))
        for d in _require(tr, "params", "transitions")
    )
    val = _require(doc, "value", "$")
    rate_map = _require(val, "production_loss_rate", "value")
    for name in levels:
        if name not in rate_map:
            _fail("value.production_loss_rate", f"missing level {name!r}")
    tests = []
    for i, td in enumerate(_require(doc, "tests", "$")):
        path = f"tests[{i}]"
        conds = tuple(
            EligibilityCondition(state=c["state"], op=c["op"], value=float(c["value"]))
            for c in td.get("eligibility", ())
        )
        tests.append(
            TestSpec(
                id=_require(td, "id", path),
                label=td.get("label", td["id"]),
                outcomes=tuple(_require(td, "outcomes", path)),
                likelihood={
                    k: np.asarray(v, dtype=float)
                    for k, v in _require(td, "likelihood", path).items()
                },
                duration=float(_require(td, "duration", path)),
                cost=float(_require(td, "cost", path)),
                eligibility=conds,
                repeatable=bool(td.get("repeatable", False)),
            )
        )
    cons = _require(doc, "constraints", "$")
    sev = doc.get("severity", {})
    bundle = ScenarioBundle(
        id=_require(doc, "id", "$"),
        network=_network_from_json(_require(doc, "network", "$")),
        transitions=TransitionSpec(
            levels=levels, params=params, step_duration=float(tr["step_duration"])
        ),
        value=ValueSpec(
            production_loss_rate=tuple(float(rate_map[name]) for name in levels),
            ignition_loss=float(_require(val, "ignition_loss", "value")),
            horizons=tuple(float(h) for h in _require(val, "horizons", "value")),
        ),
        tests=tuple(tests),
        constraints_default=FramingConstraints(
            max_tests=int(_require(cons, "max_tests", "constraints")),
            max_total_time=float(_require(cons, "max_total_time", "constraints")),
            max_total_cost=float(_require(cons, "max_total_cost", "constraints")),
            expansion_budget=int(_require(cons, "expansion_budget", "constraints")),
            seed=int(cons.get("seed", 0)),
        ),
        aggregation=dict(_require(doc, "aggregation", "$")),
        severity=SeverityThresholds(
            high=float(sev.get("high", 0.25)),
            intermediate=float(sev.get("intermediate", 0.05)),
            low=float(sev.get("low", 0.01)),
        ),
    )
    validate_bundle(bundle)
    return bundle


def load_scenario(source: Union[bytes, str, Path, IO[bytes]]) -> ScenarioBundle:
    """Load and validate a scenario from a JSON document (bytes, path, or stream)."""
    if isinstance(source, Path):
        raw = source.read_bytes()
    elif isinstance(source, (bytes, str)):
        raw = source
    else:
        raw = source.read()
    try:
        doc = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ScenarioParseError(f"malformed scenario document: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioParseError("scenario document must be a JSON object")
    return bundle_from_json(doc)


def bundle_to_json(bundle: ScenarioBundle) -> dict:
    """Serialize a bundle to the scenario JSON schema (round-trips via load_scenario)."""
    return {
        "id": bundle.id,
        "network": {
            "real_state_node": bundle.network.real_state_node,
            "nodes": [
                {
                    "name": n.name,
                    "outcomes": list(n.outcomes),
                    "parents": list(n.parents),
                    "cpt": {
                        "|".join(combo): [float(x) for x in n.cpt[combo]]
                        for combo in sorted(n.cpt)
                    },
                }
                for n in bundle.network.nodes
            ],
        },
        "transitions": {
            "levels": list(bundle.transitions.levels),
            "params": [
                {"p": lp.p, "q": lp.q, "r": lp.r, "s": lp.s}
                for lp in bundle.transitions.params
            ],
            "step_duration": bundle.transitions.step_duration,
        },
        "value": {
            "production_loss_rate": {
                name: rate
                for name, rate in zip(
                    bundle.transitions.levels, bundle.value.production_loss_rate
                )
            },
            "ignition_loss": bundle.value.ignition_loss,
            "horizons": list(bundle.value.horizons),
        },
        "tests": [
            {
                "id": t.id,
                "label": t.label,
                "outcomes": list(t.outcomes),
                "likelihood": {
                    s: [float(x) for x in t.likelihood[s]] for s in AGGREGATE_STATES
                },
                "duration": t.duration,
                "cost": t.cost,
                "eligibility": [
                    {"state": c.state, "op": c.op, "value": c.value}
                    for c in t.eligibility
                ],
                "repeatable": t.repeatable,
            }
            for t in bundle.tests
        ],
        "constraints": {
            "max_tests": bundle.constraints_default.max_tests,
            "max_total_time": bundle.constraints_default.max_total_time,
            "max_total_cost": bundle.constraints_default.max_total_cost,
            "expansion_budget": bundle.constraints_default.expansion_budget,
            "seed": bundle.constraints_default.seed,
        },
        "aggregation": dict(bundle.aggregation),
        "severity": {
            "high": bundle.severity.high,
            "intermediate": bundle.severity.intermediate,
            "low": bundle.severity.low,
        },
    }


def dump_scenario(bundle: ScenarioBundle) -> str:
    return json.dumps(bundle_to_json(bundle), indent=2, sort_keys=True) + "\n"
