"""Exception hierarchy.

``InputError`` subclasses mean the user handed us bad data (CLI exit code 2);
``VerificationError`` subclasses mean a mathematical identity failed
(exit code 1).
"""
from __future__ import annotations


class ToricMirrorError(Exception):
    """Base class; ``witness`` carries machine-readable detail."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class InputError(ToricMirrorError):
    pass


class VerificationError(ToricMirrorError):
    pass


class SchemaError(InputError):
    pass


class IoError(InputError):
    pass


class NonPrimitiveRay(InputError):
    pass


class NonSmoothCone(InputError):
    pass


class NotComplete(InputError):
    pass


class NotAFan(InputError):
    pass


class NotProjective(InputError):
    pass


class NotWeakFano(VerificationError):
    pass


class RaysDoNotGenerateLattice(InputError):
    pass


class NefBasisInvalid(InputError):
    pass


class NefBasisRequired(InputError):
    pass


class NoNonnegativeSection(VerificationError):
    pass


class VolumeMismatch(VerificationError):
    pass


class CounterexamplePoint(VerificationError):
    pass


class DimensionMismatch(VerificationError):
    pass


class DegeneratePairing(VerificationError):
    pass


class NotARelation(InputError):
    pass


class GradingNotPositive(InputError):
    pass


class RankDrop(VerificationError):
    pass


class TruncationOverflow(VerificationError):
    pass


class GammaNotDegreeOne(VerificationError):
    pass


class NotInvertible(VerificationError):
    pass


class WordTooLong(InputError):
    pass


class WordBasisSingular(VerificationError):
    pass


class ZResidual(VerificationError):
    pass


class Mismatch(VerificationError):
    pass
