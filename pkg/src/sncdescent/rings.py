"""Finitely presented commutative algebras k[vars]/(relations) and morphisms between them."""

from __future__ import annotations

from functools import cached_property

from .errors import StructuralError
from .field import QQ, Field
from .groebner import groebner_basis, normal_form
from .poly import DEGREVLEX, MonomialOrder, PolyRing, Polynomial


class PresentedRing:
    """k[vars]/(relations), with equality of elements decided by normal forms."""

    def __init__(self, vars, relations=(), field: Field = QQ, order: MonomialOrder = DEGREVLEX, name: str | None = None):
        if isinstance(vars, PolyRing):
            self.poly = vars
        else:
            self.poly = PolyRing(vars, field, order)
        self.relations = tuple(self._coerce(r) for r in relations)
        self.name = name

    def _coerce(self, p):
        if isinstance(p, str):
            return self.poly.parse(p)
        if isinstance(p, Polynomial):
            return self.poly.convert(p)
        return self.poly.const(p)

    @property
    def vars(self):
        return self.poly.vars

    @property
    def field(self):
        return self.poly.field

    @property
    def order(self):
        return self.poly.order

    @cached_property
    def gb(self) -> list:
        return groebner_basis(list(self.relations))

    @property
    def is_zero_ring(self) -> bool:
        return any(g.is_constant() for g in self.gb)

    def __call__(self, value) -> Polynomial:
        """An element of the ring in normal form."""
        return self.nf(self._coerce(value))

    def nf(self, p: Polynomial) -> Polynomial:
        if p.ring != self.poly:
            p = self.poly.convert(p)
        return normal_form(p, self.gb)

    def gen(self, name: str) -> Polynomial:
        return self.nf(self.poly.gen(name))

    def equal(self, p, q) -> bool:
        return self.nf(self._coerce(p) - self._coerce(q)).is_zero()

    def is_zero(self, p) -> bool:
        return self.nf(self._coerce(p)).is_zero()

    def quotient(self, extra, name: str | None = None) -> "PresentedRing":
        return PresentedRing(self.poly, list(self.relations) + [self._coerce(e) for e in extra], name=name)

    def same_presentation(self, other: "PresentedRing") -> bool:
        """Same variables and the same relation ideal (compared via reduced Gröbner bases)."""
        return (
            isinstance(other, PresentedRing)
            and self.poly == other.poly
            and [g.terms for g in self.gb] == [g.terms for g in other.gb]
        )

    def __eq__(self, other):
        return self.same_presentation(other)

    def __hash__(self):
        return hash(self.poly)

    def __repr__(self):
        base = f"{self.field}[{', '.join(self.vars)}]"
        if not self.relations:
            return base
        return f"{base}/({', '.join(map(repr, self.gb))})"


class RingMorphism:
    """A k-algebra map given by the images of the source variables.

    Well-definedness (each source relation maps to zero) is checked on construction.
    """

    def __init__(self, source: PresentedRing, target: PresentedRing, images):
        if isinstance(images, dict):
            images = [images.get(v, v) for v in source.vars]
        images = list(images)
        if len(images) != len(source.vars):
            raise StructuralError(f"need {len(source.vars)} images, got {len(images)}")
        self.source = source
        self.target = target
        self.images = [target(im) for im in images]
        for r in source.relations:
            if not target.is_zero(self._raw(r)):
                raise StructuralError(f"relation {r!r} of the source does not map to zero in {target!r}")

    def _raw(self, p: Polynomial) -> Polynomial:
        if p.ring != self.source.poly:
            p = self.source.poly.convert(p)
        if not p.terms:
            return self.target.poly.zero
        return p.substitute(self.images)

    def __call__(self, p) -> Polynomial:
        if isinstance(p, str):
            p = self.source.poly.parse(p)
        elif not isinstance(p, Polynomial):
            p = self.source.poly.const(p)
        return self.target.nf(self._raw(p))

    def compose(self, inner: "RingMorphism") -> "RingMorphism":
        """``self ∘ inner``."""
        return RingMorphism(inner.source, self.target, [self(im) for im in inner.images])

    def equals(self, other: "RingMorphism") -> bool:
        return (
            self.source.poly == other.source.poly
            and self.target.poly == other.target.poly
            and all(self.target.equal(a, b) for a, b in zip(self.images, other.images))
        )

    @classmethod
    def identity(cls, ring: PresentedRing) -> "RingMorphism":
        return cls(ring, ring, ring.poly.gens())

    @classmethod
    def canonical(cls, source: PresentedRing, target: PresentedRing) -> "RingMorphism":
        """Variables sent to the variables of the same name."""
        return cls(source, target, [target.poly.gen(v) for v in source.vars])

    def __repr__(self):
        body = ", ".join(f"{v} -> {im!r}" for v, im in zip(self.source.vars, self.images))
        return f"RingMorphism({body})"
