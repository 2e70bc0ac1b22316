"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the domain where the requested quantity is defined."""


class CutLocusError(ValueError):
    """Point is at (or numerically too close to) the cut locus of the base point."""


class CapacityError(ValueError):
    """Problem size exceeds the configured cap for the exact solver."""


class AbsoluteContinuityError(ValueError):
    """Discrete absolute continuity fails: an atom of the numerator has no
    positive-mass counterpart in the reference measure."""


class ConvergenceError(RuntimeError):
    """Iterative solver stopped before reaching its tolerance.

    Carries a ``diagnostics`` dict with the state at the point of failure.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConsistencyError(RuntimeError):
    """Two supposedly equivalent computations disagree beyond tolerance."""


class FitError(RuntimeError):
    """Constant fitting failed to produce a feasible result."""


class NumericError(RuntimeError):
    """Non-finite value encountered where a finite one is required."""
