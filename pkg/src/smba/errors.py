"""Exception types shared across the solver stack."""


class UnsupportedFamilyError(ValueError):
    """Requested a cone family or parameterization that is not implemented."""


class InfeasibleStartError(ValueError):
    """A starting point (or trial state) violates strict feasibility."""


class NumericError(RuntimeError):
    """A numeric procedure failed (bracketing cap, eigensolver, divergence)."""


class OracleError(RuntimeError):
    """A reference oracle could not produce a certificate (e.g. empty grid)."""


class MuUnderflowWarning(RuntimeWarning):
    """The smoothing parameter was clamped to the internal floor."""
