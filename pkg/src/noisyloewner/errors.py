"""Exception types raised across the package."""


class LoewnerError(Exception):
    """Base class for all errors raised by :mod:`noisyloewner`."""


class SingularPencil(LoewnerError, ArithmeticError):
    """The matrix ``s*E - A`` is singular at the requested point."""


class ParseError(LoewnerError, ValueError):
    pass


class DimensionMismatch(LoewnerError, ValueError):
    pass


class RankDeficientE(LoewnerError, ValueError):
    pass


class NonSimplePoles(LoewnerError, ValueError):
    pass


class InfinitePole(LoewnerError, ValueError):
    pass


class InvalidRange(LoewnerError, ValueError):
    pass


class DuplicatePoints(LoewnerError, ValueError):
    pass


class OddOrder(LoewnerError, ValueError):
    pass


class PointCollision(LoewnerError, ValueError):
    """Two points of the driving and measuring sets (nearly) coincide."""


class LabelMismatch(LoewnerError, ValueError):
    pass


class SingularTransform(LoewnerError, ValueError):
    pass


class LengthMismatch(LoewnerError, ValueError):
    pass


class NonFiniteEntry(LoewnerError, ValueError):
    pass


class ConditionViolated(LoewnerError, ValueError):
    """A perturbation bound was requested outside its range of validity."""


class ZeroOfTransferFunction(LoewnerError, ValueError):
    pass


class OrthogonalAngle(LoewnerError, ValueError):
    pass


class UnstableModel(LoewnerError, ValueError):
    pass


class OrderMismatch(LoewnerError, ValueError):
    pass


class InadmissiblePoint(LoewnerError, ValueError):
    """Some evaluation points violate the noise-level admissibility condition."""

    def __init__(self, message, points=()):
        super().__init__(message)
        self.points = tuple(points)


class ConfigError(LoewnerError, ValueError):
    pass
