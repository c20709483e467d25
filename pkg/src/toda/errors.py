"""Exception hierarchy shared by all toda modules."""


class TodaError(Exception):
    """Base class for all errors raised by this package."""


class Singular(TodaError):
    """Matrix is not invertible to working precision."""


class MinorVanishes(TodaError):
    """A leading principal minor is (relatively) below the minor floor.

    Signals the chart-boundary condition of the unit-triangular LU split.
    """

    def __init__(self, index, magnitude=None):
        self.index = index          # 1-based minor index
        self.magnitude = magnitude  # relative magnitude that failed the floor
        msg = f"leading principal minor {index} vanishes"
        if magnitude is not None:
            msg += f" (relative magnitude {magnitude:.3e})"
        super().__init__(msg)


class NotInU(TodaError):
    """Matrix is not upper triangular with positive real diagonal."""


class SpectrumMismatch(TodaError):
    """Eigenvalues do not match the requested chart center."""


class NotSimpleSpectrum(TodaError):
    """Two eigenvalues are closer than the matching tolerance."""


class ConvergenceFailure(TodaError):
    """A numerical kernel produced non-finite output."""


class NotInAlgebra(TodaError):
    """Matrix fails the membership predicate of the ambient algebra."""


class ChartBoundary(TodaError):
    """Point lies outside the dense chart domain (a minor collapsed).

    ``index`` is the 1-based index of the offending leading minor of the
    unitary eigenvector factor.
    """

    def __init__(self, index, magnitude=None):
        self.index = index
        self.magnitude = magnitude
        msg = f"chart boundary: minor {index} below floor"
        if magnitude is not None:
            msg += f" ({magnitude:.3e})"
        super().__init__(msg)


class NotInForm(TodaError):
    """Matrix fails the membership predicate of the requested real form."""


class DimensionMismatch(TodaError):
    """Operands have incompatible sizes."""


class BadSignature(TodaError):
    """Invalid (p, q) signature; requires p >= q >= 1."""


class StructureViolation(TodaError):
    """Real-form chart coordinates carry components that should vanish."""


class StepFailure(TodaError):
    """Adaptive integrator failed (minimum step underflow)."""


class ConditioningExceeded(TodaError):
    """Factorization-propagator cross-check exceeded its tolerance."""


class InputError(TodaError):
    """Malformed document or command-line input."""
