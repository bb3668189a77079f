"""Exception types shared across the package."""


class LeakRiskError(Exception):
    """Base class for all package errors."""


class ModelValidationError(LeakRiskError):
    """A scenario document violates an invariant.

    ``path`` locates the first violation (e.g. "network.nodes[2].cpt['low|high']").
    """

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}")


class ScenarioParseError(LeakRiskError):
    """The scenario document is not well-formed JSON."""


class ZeroProbabilityEvidenceError(LeakRiskError):
    """Evidence (or a test outcome) has probability zero under the model."""


class StateSpaceTooLargeError(LeakRiskError):
    """Joint enumeration refused: state space exceeds the oracle's cap."""


class TreeTooLargeError(LeakRiskError):
    """Full plan-tree enumeration refused: node count exceeds the cap."""


class SessionError(LeakRiskError):
    """Invalid session event (out-of-order seq, unknown node/test, time regression)."""
