"""leakrisk: diagnose a suspected gas leak, project its evolution, recommend a
shutdown level by expected utility, and build an anytime contingent
information-gathering plan."""

from .decision import (
    RESPONSE_LABELS,
    Recommendation,
    SeverityLayer,
    classify_severity,
    escalating_recommend,
    expected_utility,
    recommend,
)
from .dist import DiscreteDistribution
from .errors import (
    LeakRiskError,
    ModelValidationError,
    ScenarioParseError,
    SessionError,
    StateSpaceTooLargeError,
    TreeTooLargeError,
    ZeroProbabilityEvidenceError,
)
from .evolution import (
    LEAK_STATES,
    TransitionMatrix,
    condition_on_no_ignition,
    embed_no_ignition,
    ignition_probability,
    project,
    project_for,
    transition_matrix_for_level,
)
from .inference import (
    aggregate,
    bayes_update,
    joint_enumeration_oracle,
    observation_predictive,
    posterior,
)
from .model import (
    AGGREGATE_STATES,
    BeliefNetworkSpec,
    FramingConstraints,
    ScenarioBundle,
    TestSpec,
    TransitionSpec,
    ValueSpec,
    bundle_to_json,
    dump_scenario,
    load_scenario,
)
from .plan import (
    ContingentPlan,
    build_plan,
    eligible_tests,
    expand_path,
    full_enumeration_oracle,
    rollback,
)
from .scenarios import builtin_scenario_path, gas_compressor, load_builtin
from .simulate import PolicyCurve, curves_csv, simulate_policies

__version__ = "0.1.0"

__all__ = [
    "AGGREGATE_STATES",
    "BeliefNetworkSpec",
    "ContingentPlan",
    "DiscreteDistribution",
    "FramingConstraints",
    "LEAK_STATES",
    "LeakRiskError",
    "ModelValidationError",
    "RESPONSE_LABELS",
    "Recommendation",
    "ScenarioBundle",
    "ScenarioParseError",
    "SessionError",
    "SeverityLayer",
    "StateSpaceTooLargeError",
    "TestSpec",
    "TransitionMatrix",
    "TransitionSpec",
    "TreeTooLargeError",
    "ValueSpec",
    "ZeroProbabilityEvidenceError",
    "aggregate",
    "bayes_update",
    "build_plan",
    "bundle_to_json",
    "classify_severity",
    "condition_on_no_ignition",
    "dump_scenario",
    "eligible_tests",
    "embed_no_ignition",
    "escalating_recommend",
    "expand_path",
    "expected_utility",
    "full_enumeration_oracle",
    "PolicyCurve",
    "builtin_scenario_path",
    "curves_csv",
    "gas_compressor",
    "load_builtin",
    "simulate_policies",
    "ignition_probability",
    "joint_enumeration_oracle",
    "load_scenario",
    "observation_predictive",
    "posterior",
    "project",
    "project_for",
    "recommend",
    "rollback",
    "transition_matrix_for_level",
]
