"""Exception types shared across the duval package."""


class DuvalError(Exception):
    """Base class for all errors raised by this package."""


class NotPrime(DuvalError):
    pass


class ReducibleModulus(DuvalError):
    pass


class NotAUnit(DuvalError):
    pass


class NoRootInResidueField(DuvalError):
    """A k-th root does not exist in the current residue field.

    ``extension_degree`` is the smallest e such that rebuilding the ring
    with residue degree d*e would make the root available.
    """

    def __init__(self, message, extension_degree=None):
        super().__init__(message)
        self.extension_degree = extension_degree


class RootOrderDividesP(DuvalError):
    pass


class FieldTooLarge(DuvalError):
    """Exhaustive root search refused; the field exceeds the desk-scale bound."""


class ParseError(DuvalError):
    """Polynomial text did not conform to the grammar."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class UnknownVariable(ParseError):
    pass


class AmbientMismatch(DuvalError):
    pass


class PrecisionUnderflow(DuvalError):
    pass


class SingularLinearPart(DuvalError):
    pass


class OrderNotTwo(DuvalError):
    pass


class NoSquareRoot(NoRootInResidueField):
    pass


class SmallResidueCharacteristic(DuvalError):
    pass


class CubicNeedsExtension(DuvalError):
    """The binary cubic does not split over the residue field."""

    def __init__(self, message, extension_degree=None):
        super().__init__(message)
        self.extension_degree = extension_degree


class NonFieldCoefficients(DuvalError):
    pass


class NotZeroDimensional(DuvalError):
    pass


class UnsupportedType(DuvalError):
    pass


class DegenerateSamplePoint(DuvalError):
    pass


class ZeroInput(DuvalError):
    pass


class ConfigError(DuvalError):
    """Bad CLI configuration or ring shorthand."""
