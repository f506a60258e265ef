"""Exception hierarchy shared by the kernels, assembly, criterion and CLI."""


class QBMError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(QBMError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class NumericalError(QBMError, ArithmeticError):
    """Root finding or quadrature failed to reach the requested accuracy."""


class DivergenceError(NumericalError):
    """The requested integral diverges for these parameters."""


class NonQuadraticError(QBMError):
    """An exponent evaluator failed the quadratic-form probe."""


class StructureError(QBMError, ValueError):
    """A covariance matrix lacks the expected symmetric block structure."""


class UnphysicalInputError(QBMError, ValueError):
    """A covariance matrix or reduced form violates physicality bounds."""


class NoCrossingError(QBMError):
    """The separability margin keeps one sign over the whole time window."""


class ConfigError(QBMError, ValueError):
    """Invalid run configuration; ``key`` names the offending setting."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
