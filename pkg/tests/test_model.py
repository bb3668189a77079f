"""Scenario bundle validation and serialization round-trip."""

import copy
import json

import numpy as np
import pytest

from leakrisk.errors import ModelValidationError, ScenarioParseError
from leakrisk.model import bundle_to_json, dump_scenario, load_scenario
from leakrisk.scenarios import builtin_scenario_path, gas_compressor


@pytest.fixture(scope="module")
def doc():
    return json.loads(builtin_scenario_path().read_text())


def load_mutated(doc, mutate):
    """Deep-copy the builtin document, apply a mutation, try to load it."""
    d = copy.deepcopy(doc)
    mutate(d)
    return load_scenario(json.dumps(d))


def test_builtin_loads_with_expected_shape():
    bundle = load_scenario(builtin_scenario_path())
    assert set(bundle.aggregation.values()) == {"none", "progressive", "catastrophic"}
    assert len(bundle.transitions.levels) == 4
    assert len(bundle.tests) >= 4
    assert bundle.transitions.levels[-1] == "esd"


def test_builtin_roundtrip_identity():
    bundle = gas_compressor()
    reloaded = load_scenario(dump_scenario(bundle))
    assert bundle_to_json(reloaded) == bundle_to_json(bundle)


def test_packaged_json_matches_builder():
    packaged = load_scenario(builtin_scenario_path())
    assert bundle_to_json(packaged) == bundle_to_json(gas_compressor())


def test_desk_roundtrip_identity(desk_bundle):
    reloaded = load_scenario(dump_scenario(desk_bundle))
    assert bundle_to_json(reloaded) == bundle_to_json(desk_bundle)


def test_cpt_row_sum_violation_names_node_and_row(doc):
    def mutate(d):
        d["network"]["nodes"][1]["cpt"]["no-leak"] = [0.8, 0.1]  # sums to 0.9

    with pytest.raises(ModelValidationError) as err:
        load_mutated(doc, mutate)
    assert "pressure-a" in str(err.value)
    assert "no-leak" in str(err.value)


def test_cycle_rejected(doc):
    def mutate(d):
        # a -> b -> a among two fresh binary nodes
        d["network"]["nodes"].append(
            {"name": "a", "outcomes": ["x", "y"], "parents": ["b"],
             "cpt": {"x": [0.5, 0.5], "y": [0.5, 0.5]}}
        )
        d["network"]["nodes"].append(
            {"name": "b", "outcomes": ["x", "y"], "parents": ["a"],
             "cpt": {"x": [0.5, 0.5], "y": [0.5, 0.5]}}
        )

    with pytest.raises(ModelValidationError) as err:
        load_mutated(doc, mutate)
    assert "cycle" in str(err.value)


def test_missing_cpt_row_rejected(doc):
    def mutate(d):
        del d["network"]["nodes"][1]["cpt"]["no-leak"]

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_unknown_parent_rejected(doc):
    def mutate(d):
        d["network"]["nodes"][1]["parents"] = ["ghost"]

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_nonmonotone_transition_params_rejected(doc):
    def mutate(d):
        d["transitions"]["params"][1]["q"] = 0.9  # exceeds level 0's q

    with pytest.raises(ModelValidationError) as err:
        load_mutated(doc, mutate)
    assert "non-increasing" in str(err.value) or "monotone" in str(err.value)


def test_decreasing_production_rate_rejected(doc):
    def mutate(d):
        d["value"]["production_loss_rate"]["esd"] = 1.0  # below full-process

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_unsorted_horizons_rejected(doc):
    def mutate(d):
        d["value"]["horizons"] = [8.0, 2.0, 24.0]

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_aggregation_domain_mismatch_rejected(doc):
    def mutate(d):
        del d["aggregation"]["no-leak"]

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_aggregation_codomain_rejected(doc):
    def mutate(d):
        d["aggregation"]["no-leak"] = "fine"

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_row_probability_out_of_range_rejected(doc):
    def mutate(d):
        d["network"]["nodes"][1]["cpt"]["no-leak"] = [1.2, -0.2]

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_test_likelihood_row_sum_rejected(doc):
    def mutate(d):
        d["tests"][0]["likelihood"]["none"] = [0.5, 0.1, 0.1]

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_eligibility_unknown_state_rejected(doc):
    def mutate(d):
        d["tests"][0]["eligibility"] = [{"state": "melted", "op": ">=", "value": 0.1}]

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_malformed_json_raises_parse_error():
    with pytest.raises(ScenarioParseError):
        load_scenario("{not json")


def test_missing_section_rejected(doc):
    def mutate(d):
        del d["transitions"]

    with pytest.raises((ModelValidationError, ScenarioParseError)):
        load_mutated(doc, mutate)


def test_step_duration_positive(doc):
    def mutate(d):
        d["transitions"]["step_duration"] = 0.0

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_row_sum_tolerance_accepts_float_noise(doc):
    def mutate(d):
        row = d["network"]["nodes"][1]["cpt"]["no-leak"]
        row[0] = row[0] + 1e-12  # inside PROB_TOL

    bundle = load_mutated(doc, mutate)
    assert bundle.id == "gas-compressor"


def test_real_state_node_must_exist(doc):
    def mutate(d):
        d["network"]["real_state_node"] = "phantom"

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)


def test_params_row_mass_rejected(doc):
    def mutate(d):
        d["transitions"]["params"][0].update(p=0.7, q=0.5)  # p+q > 1

    with pytest.raises(ModelValidationError):
        load_mutated(doc, mutate)
