"""Exception types, one per named precondition or certification failure.

The CLI reports failures by class name, so the names are part of the
external interface.
"""


class DomainError(Exception):
    """Base class for all precondition and verdict failures."""


# -- matrix utilities ------------------------------------------------------

class NonSquareError(DomainError):
    pass


class NonHermitianError(DomainError):
    pass


class NotPsdError(DomainError):
    pass


class PNotInvertibleError(DomainError):
    pass


class DeltaNotInvertibleError(DomainError):
    """The Schur complement S - R P^{-1} Q is (numerically) singular."""


# -- function representations ----------------------------------------------

class ZeroPolynomialError(DomainError):
    pass


class NearPoleError(DomainError):
    pass


# -- colligations ----------------------------------------------------------

class ResolventIllConditionedError(DomainError):
    pass


class NotStructuredError(DomainError):
    """The lower-left coupling block of D is not (numerically) zero."""


class ZeroOnBoundaryError(DomainError):
    pass


class NotDivisibleError(DomainError):
    pass


# -- Toeplitz truncations ---------------------------------------------------

class InsufficientTruncationError(DomainError):
    pass


class WindowTooLargeError(DomainError):
    pass


# -- kernels ----------------------------------------------------------------

class NotCoisometricError(DomainError):
    pass


class IdentityViolatedError(DomainError):
    """Internal consistency failure: a decomposition identity that should
    hold by construction does not; signals a bug or severe ill-conditioning."""


class GridMismatchError(DomainError):
    pass


class NotDbrError(DomainError):
    pass


class RankOverflowError(DomainError):
    pass


# -- factorization ----------------------------------------------------------

class OriginZeroError(DomainError):
    """The value at the origin vanishes; route through monomial stripping."""


class ConditionFailedError(DomainError):
    pass


class ClassMismatchError(DomainError):
    pass


class GridNotCompanionedError(DomainError):
    pass


# -- CLI ---------------------------------------------------------------------

class ParseError(DomainError):
    pass


class SchemaError(DomainError):
    pass
