"""Exception hierarchy shared by every module."""


class ToeplitzError(Exception):
    """Base class for all library errors."""


class UsageError(ToeplitzError, ValueError):
    """Bad arguments: wrong lengths, unknown names, violated preconditions."""


class EvaluationError(ToeplitzError):
    """A symbol produced a non-finite value."""


class ParityError(ToeplitzError):
    """A symbol or root specification breaks the even/odd structure."""


class DenseCapError(UsageError):
    """A dense realization was requested above the configured size cap."""


class SingularError(ToeplitzError):
    """A factorization or eigenvalue set contains a zero pivot."""


class NonRealCirculantError(ToeplitzError):
    """Circulant eigenvalues are not conjugate-symmetric."""


class ConvergenceError(ToeplitzError):
    """An iterative procedure did not converge or broke down."""


class InsufficientNodesError(ToeplitzError):
    """Too few nodes survive filtering for the requested degree."""


class EliminationError(ToeplitzError):
    """No sign pair makes the real part of f/g positive."""


class UnreliableEstimateError(ToeplitzError):
    """Multiplicity ratio is undefined because eigenvalue gaps are not positive."""


class NumericError(ToeplitzError):
    """NaN or infinity appeared inside a recurrence."""
