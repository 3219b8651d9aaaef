"""Exception hierarchy.

Every error raised by the library derives from :class:`SchottkyError`.  The
``exit_code`` attribute drives the command line exit status.
"""


class SchottkyError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class InputError(SchottkyError, ValueError):
    """Malformed or inconsistent input data."""

    exit_code = 1


class ValidationError(SchottkyError):
    """Input is well formed but fails a validity check."""

    exit_code = 2


class ComputationError(SchottkyError, ArithmeticError):
    """A numerical procedure failed to converge or hit a singularity."""

    exit_code = 3


# core
class SingularMatrix(InputError):
    pass


class ParabolicOrEllipticMap(ValidationError):
    pass


class IndexOutOfRange(InputError, IndexError):
    pass


class NotReduced(InputError):
    pass


# graph
class InvalidGraph(InputError):
    pass


class InvalidParams(InputError):
    pass


class CoincidentFixedPoints(InputError):
    pass


class InvalidScale(InputError):
    pass


class NotLoxodromic(ValidationError):
    pass


class CirclesOverlap(ValidationError):
    pass


# differentials and periods
class PoleProximity(ComputationError):
    pass


class PoleOnContour(ComputationError):
    pass


class PathBlocked(ComputationError):
    pass


class TruncationNotConverged(ComputationError):
    pass


class FourierNotConverged(ComputationError):
    pass


class DegenerateCrossRatio(ComputationError):
    pass


class RiemannRelationViolated(ComputationError):
    pass


# theta and tau
class LatticeNotConverged(ComputationError):
    pass


class ThetaZero(ComputationError):
    pass


class TauZeroOnGrid(ThetaZero):
    pass


class RatioPoleOnCircle(ComputationError):
    pass


class TruncationTooShallow(ComputationError):
    pass


# degeneration
class HalfIntegerCharacteristic(InputError):
    pass


class GenericCharacteristic(InputError):
    pass
