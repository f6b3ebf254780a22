"""Exception types shared across the solver pipeline."""


class AratHomotopyError(Exception):
    """Base class for all solver errors."""


class SizeGuardExceeded(AratHomotopyError):
    """Problem is too large for exhaustive support enumeration."""


class SingularJacobian(AratHomotopyError):
    """A linear system inside the path tracer is numerically singular."""


class NoInteriorPointFound(AratHomotopyError):
    """The strictly feasible starting-point search exhausted its schedule."""


class NoBindingRow(AratHomotopyError):
    """A positive block variable has no near-zero slack row (non-solution)."""


class NotConverged(AratHomotopyError):
    """Solution extraction was requested from a trace that did not converge."""


class ComplementarityResidualTooLarge(AratHomotopyError):
    """Componentwise complementarity products exceed the acceptance gate."""


class NoPureSaddle(AratHomotopyError):
    """A stage matrix has no pure saddle point (input is not additively split)."""


class MaxIterExceeded(AratHomotopyError):
    """Fixed-point iteration hit its iteration cap before reaching tolerance."""
