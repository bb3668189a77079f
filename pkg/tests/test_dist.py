import numpy as np
import pytest

from leakrisk.dist import DiscreteDistribution, normalized


def test_valid_distribution_roundtrips():
    d = DiscreteDistribution(("a", "b", "c"), np.array([0.2, 0.3, 0.5]))
    assert d.p("b") == pytest.approx(0.3)
    assert d.as_dict() == {"a": 0.2, "b": 0.3, "c": 0.5}
    again = DiscreteDistribution.from_json(d.to_json())
    assert again.outcomes == d.outcomes
    assert np.array_equal(again.probs, d.probs)


def test_rejects_bad_probabilities():
    with pytest.raises(ValueError):
        DiscreteDistribution(("a", "b"), np.array([0.7, 0.7]))
    with pytest.raises(ValueError):
        DiscreteDistribution(("a", "b"), np.array([-0.1, 1.1]))
    with pytest.raises(ValueError):
        DiscreteDistribution(("a", "b"), np.array([1.0]))
    with pytest.raises(ValueError):
        DiscreteDistribution(("a", "a"), np.array([0.5, 0.5]))


def test_probs_are_readonly():
    d = DiscreteDistribution(("a", "b"), np.array([0.5, 0.5]))
    with pytest.raises(ValueError):
        d.probs[0] = 1.0


def test_indicator():
    d = DiscreteDistribution.indicator(("x", "y", "z"), "y")
    assert d.as_dict() == {"x": 0.0, "y": 1.0, "z": 0.0}
    with pytest.raises(ValueError):
        DiscreteDistribution.indicator(("x",), "nope")


def test_normalized_helper():
    d = normalized(("a", "b"), np.array([2.0, 6.0]))
    assert d.p("a") == pytest.approx(0.25)
    with pytest.raises(ValueError):
        normalized(("a", "b"), np.array([0.0, 0.0]))


def test_unknown_outcome_lookup():
    d = DiscreteDistribution(("a", "b"), np.array([0.5, 0.5]))
    with pytest.raises(KeyError):
        d.p("missing")
