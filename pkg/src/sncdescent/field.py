"""Exact coefficient fields: the rationals and small prime fields."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class GFElem:
    """Residue modulo a prime, with the usual arithmetic operators."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, GFElem):
            if other.p != self.p:
                raise ValueError("mixing residues of different primes")
            return other.v
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElem(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElem(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElem(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElem(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o == 0:
            raise ZeroDivisionError("division by zero in GF(%d)" % self.p)
        return GFElem(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GFElem(o, self.p) / self

    def __neg__(self):
        return GFElem(-self.v, self.p)

    def __pow__(self, k: int):
        return GFElem(pow(self.v, k, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.v == o

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        # symmetric representative reads better in printed polynomials
        v = self.v if self.v <= self.p // 2 else self.v - self.p
        return str(v)


class Field:
    """Descriptor of the coefficient field.

    ``Field()`` is the rationals; ``Field(p)`` is GF(p) for a prime ``p < 2**31``.
    """

    def __init__(self, p: int | None = None):
        if p is not None:
            if p < 2 or p >= 2**31 or any(p % q == 0 for q in range(2, int(p**0.5) + 1)):
                raise ValueError(f"field characteristic must be a prime below 2^31, got {p}")
        self.p = p

    @property
    def is_rational(self) -> bool:
        return self.p is None

    def __call__(self, value):
        """Convert an int, Fraction, string or element into this field."""
        if isinstance(value, str):
            value = Fraction(value)
        if self.p is None:
            if isinstance(value, GFElem):
                raise ValueError("cannot coerce a residue into QQ")
            if isinstance(value, (int, Rational)):
                return Fraction(value)
            raise TypeError(f"cannot coerce {value!r} into QQ")
        if isinstance(value, GFElem):
            if value.p != self.p:
                raise ValueError("residue of a different prime")
            return value
        if isinstance(value, int):
            return GFElem(value, self.p)
        if isinstance(value, Fraction):
            if value.denominator % self.p == 0:
                raise ZeroDivisionError(f"{value} has no image in GF({self.p})")
            return GFElem(value.numerator * pow(value.denominator, -1, self.p), self.p)
        raise TypeError(f"cannot coerce {value!r} into GF({self.p})")

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Accept ``QQ``/``rational`` or ``GF(p)``/``p``."""
        t = text.strip()
        if t.lower() in ("qq", "q", "rational", "rationals"):
            return cls()
        if t.upper().startswith("GF(") and t.endswith(")"):
            t = t[3:-1]
        return cls(int(t))


QQ = Field()
