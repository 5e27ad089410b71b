"""
Exception hierarchy for coalsim.

Every failure raised on purpose by the library derives from CoalsimError so
that the console layer can map it onto an exit code.
"""


class CoalsimError(Exception):
    """Base class for all coalsim errors."""
    pass


class ContractViolation(CoalsimError, ValueError):
    """Raised when an operation is called outside its preconditions."""
    pass


class OracleScaleError(ContractViolation):
    """Raised when an exact oracle is asked for a state space it cannot handle."""
    pass


class DominationSearchError(CoalsimError):
    """Raised when no Poisson rate on the search grid dominates the Kingman tail."""
    pass


class ScenarioValidationError(CoalsimError):
    """
    Raised when a scenario configuration violates a constraint.

    The message is a single line naming the violated constraint.
    """

    def __init__(self, constraint: str):
        super().__init__(constraint)
        self.constraint = constraint


class InfeasibleScenarioError(ScenarioValidationError):
    """Raised when a parameter combination cannot be simulated safely."""
    pass


class UnknownScenarioError(CoalsimError):
    """Raised when a scenario name has no registered driver."""
    pass
