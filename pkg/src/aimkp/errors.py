"""Exception types raised across the package."""


class AimError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(AimError, ValueError):
    pass


class DegenerateSpectrum(AimError, ArithmeticError):
    """Eigen-decomposition is not trustworthy (near-defective or colliding eigenvalues)."""


class IllConditioned(AimError, ArithmeticError):
    """A matrix required to be invertible has condition estimate above the threshold."""


class ExpmOverflow(AimError, OverflowError):
    pass


class SingularTau(AimError, ArithmeticError):
    """The tau-function vanishes (numerically) where it must be inverted."""


class PreconditionError(AimError, ValueError):
    pass
