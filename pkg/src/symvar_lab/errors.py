"""Exception hierarchy shared by every module of the lab."""


class SymvarError(Exception):
    """Base class for all lab errors."""


class InputError(SymvarError, ValueError):
    """Malformed or out-of-range argument."""


class DomainError(SymvarError, ValueError):
    """Evaluation point (or stencil) outside the profile domain."""


class DegeneracyError(SymvarError, ValueError):
    """Warping function non-positive (below the degeneracy cutoff)."""


class ConversionError(SymvarError, ValueError):
    """Area-radius metric cannot be brought to arclength form."""


class ReflectionError(SymvarError, ValueError):
    """Profile cannot be reflected: the core is not totally geodesic."""


class AssemblyError(SymvarError, RuntimeError):
    """Model assembly produced a degenerate or over-curved blend."""


class ScanError(SymvarError, RuntimeError):
    """Scaling scan minimizer sits on the grid boundary."""


class NumericError(SymvarError, ArithmeticError):
    """Quadrature, ODE or extrapolation failed to reach its tolerance.

    Parameters
    ----------
    message : str
        Human readable description.
    achieved : float, optional
        Error estimate actually reached, if known.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
