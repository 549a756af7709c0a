"""Exceptions raised by the engine."""


class DescentError(Exception):
    """Base class."""


class StructuralError(DescentError, ValueError):
    """Objects that do not fit together (ring mismatch, ill-defined map, ...)."""


class UnsupportedError(DescentError):
    """Input outside the supported range (e.g. a non-univariate ring for Smith form)."""


class PrecisionExhausted(DescentError):
    """Nothing is known about a result at the tracked precision, or the precision cap was hit."""


class NoStabilization(PrecisionExhausted):
    """A tower's presentations did not settle before its depth ran out."""


class ChainError(DescentError, ValueError):
    """A sequence of strata that is not a strict chain."""


class CocycleInvalid(DescentError):
    """A descent datum failed its cocycle check."""

    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness
