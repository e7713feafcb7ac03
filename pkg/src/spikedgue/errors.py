"""Exception hierarchy shared by all modules."""


class SpikedGUEError(Exception):
    """Base class for errors raised by this package."""


class InvalidDimensionError(SpikedGUEError, ValueError):
    pass


class DimensionMismatchError(SpikedGUEError, ValueError):
    pass


class EigenSolverError(SpikedGUEError, ArithmeticError):
    """The dense eigensolver did not converge.

    ``diagnostics`` carries whatever the backend reported (LAPACK info code,
    matrix size, driver name).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class DegenerateSpectrumError(SpikedGUEError, ArithmeticError):
    """Two eigenvalues coincide to within the relative gap threshold."""


class InterlacingError(SpikedGUEError, ArithmeticError):
    """Adjacent spectra fail to interlace beyond rounding tolerance."""


class DomainError(SpikedGUEError, ValueError):
    pass


class QuadratureError(SpikedGUEError, ArithmeticError):
    """Contour quadrature did not reach its tolerance within the refinement cap."""


class ContourConfigurationError(SpikedGUEError, ValueError):
    """Contours cross a pole or each other."""


class DistinctSpikesError(SpikedGUEError, ValueError):
    """Two spike offsets coincide; the residue formulas need simple poles."""
