"""Bundled gas-compressor scenario.

A simplified compressor module: gas flows through two parallel compressors
(A, B) joined by piping.  A leak, if present, is progressive (starts small,
grows) or catastrophic (complete break), at one of the three locations; the
detailed location-specific states collapse onto the three decision-facing
aggregate states.  Instruments: one pressure detector per compressor, two gas
level detectors covering the compressor bay and the piping run, and a manual
inspection report.

All numeric parameters here are fixture choices, picked to be plausible
rather than measured: a rare-leak prior, detectors with distinct false-alarm
and miss rates, transition probabilities that shrink as the shutdown level
escalates, and production losses that grow with it.  Detector counts and
placement are likewise a fixture choice.  The packaged ``data/gas_compressor.json``
is generated from this builder (see ``write_builtin``) and kept identical to it.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .model import (
    BeliefNetworkSpec,
    EligibilityCondition,
    FramingConstraints,
    LevelParams,
    NodeSpec,
    ScenarioBundle,
    SeverityThresholds,
    TestSpec,
    TransitionSpec,
    ValueSpec,
    dump_scenario,
    load_scenario,
    validate_bundle,
)

DETAILED_STATES = (
    "no-leak",
    "progressive-compressor-a",
    "progressive-compressor-b",
    "progressive-piping",
    "catastrophic-compressor-a",
    "catastrophic-compressor-b",
    "catastrophic-piping",
)

AGGREGATION = {
    "no-leak": "none",
    "progressive-compressor-a": "progressive",
    "progressive-compressor-b": "progressive",
    "progressive-piping": "progressive",
    "catastrophic-compressor-a": "catastrophic",
    "catastrophic-compressor-b": "catastrophic",
    "catastrophic-piping": "catastrophic",
}


def _binary_node(name: str, outcomes: tuple[str, str], p_second: list[float]) -> NodeSpec:
    cpt = {
        (state,): np.array([1.0 - p, p])
        for state, p in zip(DETAILED_STATES, p_second)
    }
    return NodeSpec(name=name, outcomes=outcomes, parents=("leak-state",), cpt=cpt)


def gas_compressor() -> ScenarioBundle:
    """The bundled scenario, built and validated in code."""
    nodes = [
        NodeSpec(
            name="leak-state",
            outcomes=DETAILED_STATES,
            parents=(),
            # Routine-operation prior: leaks are rare events.
            cpt={
                (): np.array([0.9915, 0.0025, 0.0025, 0.0015, 0.0006, 0.0006, 0.0008])
            },
        ),
        # P(alarm reading | detailed state), per detector.  Pressure detectors
        # react strongly to breaks in their own compressor, weakly elsewhere.
        _binary_node(
            "pressure-a", ("normal", "low"), [0.02, 0.60, 0.03, 0.05, 0.97, 0.04, 0.30]
        ),
        _binary_node(
            "pressure-b", ("normal", "low"), [0.02, 0.03, 0.60, 0.05, 0.04, 0.97, 0.30]
        ),
        # Gas level detectors: 1 covers the compressor bay, 2 the piping run.
        _binary_node(
            "gas-level-1",
            ("clear", "gas-detected"),
            [0.01, 0.55, 0.50, 0.35, 0.90, 0.85, 0.70],
        ),
        _binary_node(
            "gas-level-2",
            ("clear", "gas-detected"),
            [0.01, 0.30, 0.35, 0.65, 0.60, 0.65, 0.95],
        ),
        NodeSpec(
            name="manual-inspection",
            outcomes=("nothing-found", "small-leak-found", "major-leak-found"),
            parents=("leak-state",),
            cpt={
                ("no-leak",): np.array([0.97, 0.025, 0.005]),
                ("progressive-compressor-a",): np.array([0.25, 0.70, 0.05]),
                ("progressive-compressor-b",): np.array([0.25, 0.70, 0.05]),
                ("progressive-piping",): np.array([0.25, 0.70, 0.05]),
                ("catastrophic-compressor-a",): np.array([0.05, 0.15, 0.80]),
                ("catastrophic-compressor-b",): np.array([0.05, 0.15, 0.80]),
                ("catastrophic-piping",): np.array([0.05, 0.15, 0.80]),
            },
        ),
    ]

    transitions = TransitionSpec(
        levels=("continue", "partial", "full-process", "esd"),
        params=(
            LevelParams(p=0.12, q=0.03, r=0.10, s=0.001),
            LevelParams(p=0.08, q=0.02, r=0.06, s=0.0008),
            LevelParams(p=0.04, q=0.008, r=0.025, s=0.0004),
            LevelParams(p=0.01, q=0.002, r=0.006, s=0.0),
        ),
        step_duration=1.0,  # one Markov step per hour
    )

    value = ValueSpec(
        # $ per hour of withheld production; ESD idles the whole platform.
        production_loss_rate=(0.0, 2000.0, 8000.0, 20000.0),
        ignition_loss=5_000_000.0,  # lumped personnel/equipment/environmental loss
        horizons=(2.0, 8.0, 24.0),
    )

    tests = (
        TestSpec(
            id="walkdown-inspection",
            label="Manual walkdown of the compressor module",
            outcomes=("nothing", "small-leak", "major-leak"),
            likelihood={
                "none": np.array([0.96, 0.035, 0.005]),
                "progressive": np.array([0.22, 0.70, 0.08]),
                "catastrophic": np.array([0.04, 0.18, 0.78]),
            },
            duration=0.5,
            cost=500.0,
        ),
        TestSpec(
            id="gas-sample",
            label="Portable gas sampling at the suspected site",
            outcomes=("clean", "trace", "high"),
            likelihood={
                "none": np.array([0.90, 0.09, 0.01]),
                "progressive": np.array([0.25, 0.60, 0.15]),
                "catastrophic": np.array([0.05, 0.25, 0.70]),
            },
            duration=0.25,
            cost=150.0,
            repeatable=True,
        ),
        TestSpec(
            id="pressure-decay",
            label="Isolated pressure decay test",
            outcomes=("stable", "slow-decay", "fast-decay"),
            likelihood={
                "none": np.array([0.92, 0.07, 0.01]),
                "progressive": np.array([0.15, 0.70, 0.15]),
                "catastrophic": np.array([0.03, 0.17, 0.80]),
            },
            duration=1.0,
            cost=2500.0,
            # Expensive isolation work: reserved for credible break scenarios.
            eligibility=(EligibilityCondition(state="catastrophic", op=">=", value=0.05),),
        ),
        TestSpec(
            id="acoustic-scan",
            label="Handheld acoustic leak scan",
            outcomes=("quiet", "anomaly"),
            likelihood={
                "none": np.array([0.93, 0.07]),
                "progressive": np.array([0.35, 0.65]),
                "catastrophic": np.array([0.15, 0.85]),
            },
            duration=0.5,
            cost=800.0,
        ),
    )

    bundle = ScenarioBundle(
        id="gas-compressor",
        network=BeliefNetworkSpec(nodes=tuple(nodes), real_state_node="leak-state"),
        transitions=transitions,
        value=value,
        tests=tests,
        constraints_default=FramingConstraints(
            max_tests=3,
            max_total_time=4.0,
            max_total_cost=5000.0,
            expansion_budget=200,
            seed=0,
        ),
        aggregation=dict(AGGREGATION),
        severity=SeverityThresholds(),
    )
    validate_bundle(bundle)
    return bundle


def builtin_scenario_path() -> Path:
    """Filesystem path of the packaged scenario JSON."""
    with resources.as_file(
        resources.files("leakrisk").joinpath("data/gas_compressor.json")
    ) as p:
        return Path(p)


def load_builtin() -> ScenarioBundle:
    return load_scenario(builtin_scenario_path())


def write_builtin(path: Path):
    """Regenerate the packaged JSON from the builder (kept identical by tests)."""
    path.write_text(dump_scenario(gas_compressor()))


if __name__ == "__main__":  # pragma: no cover
    import sys

    target = Path(sys.argv[1]) if len(sys.argv) > 1 else builtin_scenario_path()
    write_builtin(target)
    print(f"wrote {target}")
