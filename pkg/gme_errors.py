"""Exception hierarchy shared by every module."""


class GmeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(GmeError, ValueError):
    """A family parameter, dimension or configuration value is out of range."""


class DimensionMismatchError(GmeError, ValueError):
    """Operands have incompatible total or subsystem dimensions."""


class SubsystemError(GmeError, ValueError):
    """An index set or permutation of subsystems is invalid."""


class NotHermitianError(GmeError, ValueError):
    pass


class NotPositiveError(GmeError, ValueError):
    """An operator expected to be positive semidefinite has a negative eigenvalue."""


class NotCompletelyPositiveError(NotPositiveError):
    """A linear map produced a Choi operator that is not positive semidefinite."""


class NonFiniteError(GmeError, ArithmeticError):
    """NaN or infinity showed up in an operator or an objective value."""


class NoRootError(GmeError, ArithmeticError):
    pass


class DualPathDisagreementError(GmeError, RuntimeError):
    """The GME path and the channel path of the output purity disagree."""
