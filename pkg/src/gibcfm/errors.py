"""Exception hierarchy shared by the library and the command line."""


class GibcError(Exception):
    """Base class for all errors raised by :mod:`gibcfm`."""


class DomainError(GibcError, ValueError):
    """Argument outside the supported domain of a special function."""


class SingularMatrixError(GibcError, ArithmeticError):
    """Exactly (or numerically) singular pivot met during LU factorization."""

    def __init__(self, message, pivot_index):
        super().__init__(message)
        self.pivot_index = pivot_index


class ContractError(GibcError, ValueError):
    """Input violates an operation's precondition."""


class GeometryError(GibcError, ValueError):
    """Degenerate or inconsistent curve parameterization."""


class SamplingError(GibcError, ValueError):
    """Quadrature grid too coarse for the requested wavenumber."""


class AssemblyError(GibcError, ArithmeticError):
    """Non-finite values produced while assembling a boundary operator."""


class ResonanceError(GibcError, ArithmeticError):
    """Forward system is singular at this wavenumber/impedance pair."""


class ConfigError(GibcError, ValueError):
    """Invalid run configuration."""


class ParseError(GibcError, ValueError):
    """Malformed far-field file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateTestFunctionError(GibcError, ValueError):
    """Test function orthogonal (numerically) to every eigenvector."""
