"""Exception types shared across the package."""


class FdschedError(Exception):
    """Base class for all package-specific errors."""


class Infeasible(FdschedError):
    """A selection violates the cardinality constraints."""


class SingularChannel(FdschedError):
    """The selected channel submatrix is too ill-conditioned for ZF."""


class InfeasibleConstraints(FdschedError):
    """Cardinality bounds admit no binary vector at all."""


class LevelCapExceeded(FdschedError):
    """Subset simulation hit its level cap without reaching the target set."""


class FallbackExhausted(FdschedError):
    """Constrained sampling failed repeatedly; the optimizer run aborts."""


class SpaceTooLarge(FdschedError):
    """Exhaustive search refused: the mask space exceeds the configured cap."""


class NoFeasibleMask(FdschedError):
    """No mask in the search space satisfies the constraints."""


class ParseError(FdschedError):
    """Config file could not be parsed (message carries line/key context)."""


class ValidationError(FdschedError):
    """A configuration value violates an invariant."""


class SchemaError(FdschedError):
    """A results CSV does not match the expected schema."""
