"""Shared desk-scale fixtures.

The desk bundle is a minimal 3-state scenario whose numbers are chosen for
hand arithmetic: identity aggregation, one alarm observation, two catalog
tests, three shutdown levels.  ``desk_single_horizon`` trims the horizon list
to one entry so EVPI identities hold exactly (horizon escalation re-optimizes
per posterior and breaks the perfect-information bound's convexity argument).
"""

import dataclasses

import numpy as np
import pytest

from leakrisk.model import (
    BeliefNetworkSpec,
    FramingConstraints,
    LevelParams,
    NodeSpec,
    ScenarioBundle,
    SeverityThresholds,
    TestSpec,
    TransitionSpec,
    ValueSpec,
    validate_bundle,
)

DESK_PRIOR = (0.90, 0.08, 0.02)
DESK_ALARM_ON = (0.05, 0.70, 0.95)
#: Hand Bayes on the desk network given alarm=on.
DESK_POSTERIOR = (0.375, 0.466667, 0.158333)


def make_desk_bundle(horizons=(1.0, 4.0)) -> ScenarioBundle:
    nodes = (
        NodeSpec(
            name="state",
            outcomes=("none", "progressive", "catastrophic"),
            parents=(),
            cpt={(): np.array(DESK_PRIOR)},
        ),
        NodeSpec(
            name="alarm",
            outcomes=("off", "on"),
            parents=("state",),
            cpt={
                ("none",): np.array([1 - DESK_ALARM_ON[0], DESK_ALARM_ON[0]]),
                ("progressive",): np.array([1 - DESK_ALARM_ON[1], DESK_ALARM_ON[1]]),
                ("catastrophic",): np.array([1 - DESK_ALARM_ON[2], DESK_ALARM_ON[2]]),
            },
        ),
    )
    bundle = ScenarioBundle(
        id="desk",
        network=BeliefNetworkSpec(nodes=nodes, real_state_node="state"),
        transitions=TransitionSpec(
            levels=("run", "reduce", "stop"),
            params=(
                LevelParams(p=0.10, q=0.05, r=0.20, s=0.01),
                LevelParams(p=0.05, q=0.02, r=0.10, s=0.005),
                LevelParams(p=0.01, q=0.005, r=0.02, s=0.0),
            ),
            step_duration=1.0,
        ),
        value=ValueSpec(
            production_loss_rate=(0.0, 50.0, 200.0),
            ignition_loss=10_000.0,
            horizons=tuple(horizons),
        ),
        tests=(
            TestSpec(
                id="probe",
                label="Pressure probe",
                outcomes=("neg", "pos"),
                likelihood={
                    "none": np.array([0.9, 0.1]),
                    "progressive": np.array([0.3, 0.7]),
                    "catastrophic": np.array([0.1, 0.9]),
                },
                duration=0.5,
                cost=5.0,
            ),
            TestSpec(
                id="assay",
                label="Gas assay",
                outcomes=("clean", "dirty"),
                likelihood={
                    "none": np.array([0.95, 0.05]),
                    "progressive": np.array([0.5, 0.5]),
                    "catastrophic": np.array([0.2, 0.8]),
                },
                duration=0.25,
                cost=2.0,
                repeatable=True,
            ),
        ),
        constraints_default=FramingConstraints(
            max_tests=2,
            max_total_time=2.0,
            max_total_cost=50.0,
            expansion_budget=100,
            seed=0,
        ),
        aggregation={
            "none": "none",
            "progressive": "progressive",
            "catastrophic": "catastrophic",
        },
        severity=SeverityThresholds(),
    )
    validate_bundle(bundle)
    return bundle


@pytest.fixture(scope="session")
def desk_bundle() -> ScenarioBundle:
    return make_desk_bundle()


@pytest.fixture(scope="session")
def desk_single_horizon() -> ScenarioBundle:
    return make_desk_bundle(horizons=(1.0,))


def with_tests(bundle: ScenarioBundle, *tests: TestSpec) -> ScenarioBundle:
    """Desk bundle with a replacement test catalog (kept valid)."""
    out = dataclasses.replace(bundle, tests=tuple(tests))
    validate_bundle(out)
    return out


def perfect_test(cost=0.0, duration=0.0, test_id="oracle-probe") -> TestSpec:
    """Noiseless real-state readout: likelihood rows are indicators."""
    eye = np.eye(3)
    return TestSpec(
        id=test_id,
        label="Perfect state readout",
        outcomes=("says-none", "says-progressive", "says-catastrophic"),
        likelihood={
            "none": eye[0].copy(),
            "progressive": eye[1].copy(),
            "catastrophic": eye[2].copy(),
        },
        duration=duration,
        cost=cost,
    )


def uninformative_test(cost=0.0, duration=0.0, test_id="coin-flip") -> TestSpec:
    row = np.array([0.5, 0.5])
    return TestSpec(
        id=test_id,
        label="Uninformative coin flip",
        outcomes=("heads", "tails"),
        likelihood={
            "none": row.copy(),
            "progressive": row.copy(),
            "catastrophic": row.copy(),
        },
        duration=duration,
        cost=cost,
    )
