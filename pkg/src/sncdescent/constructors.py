"""The ring diagram of a coordinate divisor: localizations, adic towers, Laurent rings.

Completions are never materialized. A completed ring is a :class:`CompletionTower`
of truncations, and a completed-then-localized ring is handled through
:class:`LaurentElement` values that carry explicit poles and an absolute precision.
"""

from __future__ import annotations

import itertools
import math
import random
import warnings
from dataclasses import dataclass, field

from .errors import ChainError, PrecisionExhausted, StructuralError
from .linalg import nullspace
from .poly import PolyRing, Polynomial, format_terms, parse_laurent
from .rings import PresentedRing, RingMorphism


@dataclass(frozen=True)
class Precision:
    """Truncation level with a ceiling for doubling escalation."""

    level: int = 8
    cap: int = 64

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("precision level must be at least 1")
        if self.level > self.cap:
            raise ValueError(f"precision level {self.level} exceeds its cap {self.cap}")

    def escalate(self) -> "Precision | None":
        if self.level >= self.cap:
            return None
        return Precision(min(2 * self.level, self.cap), self.cap)


class DivisorSpec:
    """Coordinate divisor x_{i_1} ... x_{i_n} = 0 in a polynomial ring.

    Components are distinct variables, which makes the crossings strictly normal.
    Strata are addressed by subsets of ``{1, ..., n}``.
    """

    def __init__(self, ring: PresentedRing, components):
        if ring.relations:
            raise StructuralError("the divisor must live in a polynomial ring without relations")
        components = list(components)
        if len(set(components)) != len(components):
            raise StructuralError("divisor components must be distinct")
        for c in components:
            if c not in ring.vars:
                raise StructuralError(f"divisor component {c!r} is not a variable of the ring")
        self.ring = ring
        self.components = components

    @property
    def n(self) -> int:
        return len(self.components)

    def var(self, i: int) -> str:
        return self.components[i - 1]

    def subset(self, T) -> frozenset:
        """Normalize a subset given by indices or by variable names."""
        out = set()
        for t in T:
            if isinstance(t, str):
                if t not in self.components:
                    raise ChainError(f"{t!r} is not a divisor component")
                out.add(self.components.index(t) + 1)
            else:
                if not 1 <= t <= self.n:
                    raise ChainError(f"component index {t} out of range")
                out.add(t)
        return frozenset(out)

    def names(self, T) -> list:
        return [self.var(i) for i in sorted(T)]

    def label(self, T) -> str:
        return "{" + ",".join(self.names(T)) + "}"

    def all_subsets(self):
        idx = range(1, self.n + 1)
        return [frozenset(c) for k in range(self.n + 1) for c in itertools.combinations(idx, k)]

    def __repr__(self):
        return f"DivisorSpec({self.ring!r}, {' * '.join(self.components) or '1'})"


# -- localization ----------------------------------------------------------------

class LocalizedRing:
    """R[f_1^{-1}, ...] presented as R[t_1, ...]/(t_k f_k - 1)."""

    def __init__(self, base: PresentedRing, inverted, tvars):
        self.base = base
        self.inverted = list(inverted)
        self.tvars = list(tvars)
        poly = base.poly.extend(self.tvars)
        rels = [poly.convert(r) for r in base.relations]
        for f, t in zip(self.inverted, self.tvars):
            rels.append(poly.gen(t) * poly.convert(f) - 1)
        self.ring = PresentedRing(poly, rels)
        if self.ring.is_zero_ring:
            warnings.warn(f"localization of {base!r} is the zero ring", stacklevel=3)

    @property
    def canonical(self) -> RingMorphism:
        """R -> R_f."""
        return RingMorphism.canonical(self.base, self.ring)

    def units_check(self) -> bool:
        poly = self.ring.poly
        return all(
            self.ring.equal(poly.gen(t) * poly.convert(f), 1) for f, t in zip(self.inverted, self.tvars)
        )

    def __repr__(self):
        return f"LocalizedRing({self.ring!r})"


def _fresh_t(ring: PresentedRing, f: Polynomial) -> str:
    gens = [v for v in ring.vars if f == ring.poly.gen(v)]
    base = f"t_{gens[0]}" if gens else "t"
    name = base
    k = 1
    while name in ring.vars:
        name = f"{base}{k}"
        k += 1
    return name


def localize(R: PresentedRing, f) -> LocalizedRing:
    """R_f via one new variable t and the relation t*f - 1.

    f = 0 gives the zero ring (with a warning), not an exception.
    """
    f = R(f)
    return LocalizedRing(R, [f], [_fresh_t(R, f)])


def localize_vars(R: PresentedRing, names) -> LocalizedRing:
    """Invert several variables at once (one t per variable)."""
    fs = [R.poly.gen(v) for v in names]
    return LocalizedRing(R, fs, [f"t_{v}" for v in names])


# -- completion towers -----------------------------------------------------------

class CompletionTower:
    """Levels base/a^n for n = 1..depth with the canonical surjections between them."""

    def __init__(self, base: PresentedRing, ideal_gens, depth: int):
        if depth < 1:
            raise ValueError("tower depth must be at least 1")
        self.base = base
        self.ideal_gens = [base(g) for g in ideal_gens]
        self.depth = depth
        self.levels = [base.quotient(self.ideal_power(n)) for n in range(1, depth + 1)]
        self.transitions = [
            RingMorphism.canonical(self.levels[n], self.levels[n - 1]) for n in range(1, depth)
        ]

    def ideal_power(self, n: int) -> list:
        """Generators of a^n: all degree-n products of the ideal generators."""
        out = []
        for combo in itertools.combinations_with_replacement(self.ideal_gens, n):
            p = self.base.poly.one
            for g in combo:
                p = p * g
            out.append(p)
        return out

    def level(self, n: int) -> PresentedRing:
        if n == 0:
            return self.base.quotient([1])
        if not 1 <= n <= self.depth:
            raise IndexError(f"tower level {n} outside 1..{self.depth}")
        return self.levels[n - 1]

    def transition(self, m: int, n: int) -> RingMorphism:
        """Canonical quotient map level m -> level n (m >= n)."""
        if m < n:
            raise ValueError("transitions go from deeper to shallower levels")
        return RingMorphism.canonical(self.level(m), self.level(n))

    def extended(self, depth: int) -> "CompletionTower":
        return CompletionTower(self.base, self.ideal_gens, depth)

    def __repr__(self):
        return f"CompletionTower({self.base!r}, a=({', '.join(map(repr, self.ideal_gens))}), depth={self.depth})"


def completion_tower(R: PresentedRing, ideal_gens, depth: int) -> CompletionTower:
    return CompletionTower(R, ideal_gens, depth)


# -- stratum and chain rings -----------------------------------------------------

def stratum_ring(spec: DivisorSpec, T, prec: Precision):
    """R_Y for the stratum where exactly the components in T vanish.

    T empty: the localization R[f_j^{-1} : all j]. Otherwise the tower
    R[f_j^{-1} : j not in T]/(f_i : i in T)^l, l = 1..prec.level.
    """
    T = spec.subset(T)
    outside = [spec.var(j) for j in range(1, spec.n + 1) if j not in T]
    if not T:
        return localize_vars(spec.ring, outside)
    base = localize_vars(spec.ring, outside).ring if outside else spec.ring
    return completion_tower(base, [base.poly.gen(spec.var(i)) for i in sorted(T)], prec.level)


def _check_chain(spec: DivisorSpec, chain) -> list:
    chain = [spec.subset(T) for T in chain]
    if not chain:
        raise ChainError("empty chain")
    for a, b in zip(chain, chain[1:]):
        if not a < b:
            raise ChainError(
                f"{spec.label(a)} -> {spec.label(b)} is not a strict specialization of strata"
            )
    return chain


class ChainRing:
    """R_{Y_1, ..., Y_m} for a chain T_1 ⊂ ... ⊂ T_m of vanishing sets, at finite precision.

    Components outside T_1 are inverted; components in T_m are completed. Those in
    T_m but not T_1 are completed first and inverted afterwards (Laurent variables),
    so their elements are handled as :class:`LaurentElement` values. ``coefficient_levels``
    is the tower of the remaining coefficient ring.
    """

    def __init__(self, spec: DivisorSpec, chain, prec: Precision):
        self.spec = spec
        self.chain = _check_chain(spec, chain)
        self.prec = prec
        self.level = prec.level
        self.first = self.chain[0]
        self.last = self.chain[-1]
        poly = spec.ring.poly
        self.poly: PolyRing = poly
        nv = poly.nvars
        comp_idx = {poly.index(spec.var(i)): i for i in range(1, spec.n + 1)}
        self.inverted = frozenset(v for v, i in comp_idx.items() if i not in self.first)
        self.completed = frozenset(v for v, i in comp_idx.items() if i in self.last)
        self.laurent = self.inverted & self.completed
        self.laurent_vars = tuple(poly.vars[v] for v in sorted(self.laurent))
        # coefficient ring: drop Laurent variables, keep t's for plainly inverted ones
        keep = [poly.vars[v] for v in range(nv) if v not in self.laurent]
        plain_inv = [spec.var(i) for i in range(1, spec.n + 1) if i not in self.last]
        coeff_base = PresentedRing(PolyRing(keep, poly.field, poly.order))
        self.localized = localize_vars(coeff_base, plain_inv) if plain_inv else None
        cbase = self.localized.ring if self.localized else coeff_base
        if self.first:
            self.tower = completion_tower(cbase, [cbase.poly.gen(spec.var(i)) for i in sorted(self.first)], prec.level)
            self.coefficient_levels = self.tower.levels
        else:
            self.tower = None
            self.coefficient_levels = [cbase] * prec.level
        self.coefficient_ring = cbase

    @property
    def default_prec(self) -> tuple:
        return tuple(self.level if v in self.completed else None for v in range(self.poly.nvars))

    def element(self, p, exact: bool = True) -> "LaurentElement":
        """Embed a polynomial, Laurent text or term dict; ``exact=False`` truncates at the ring level."""
        nv = self.poly.nvars
        if isinstance(p, LaurentElement):
            return self.coerce(p)
        if isinstance(p, dict):
            terms = {tuple(e): self.poly.field(c) for e, c in p.items() if c}
        elif isinstance(p, str):
            terms = parse_laurent(p, self.poly.vars, self.poly.field)
        elif isinstance(p, Polynomial):
            terms = self.poly.convert(p).terms
        else:
            c = self.poly.field(p)
            terms = {(0,) * nv: c} if c else {}
        pole = [0] * nv
        for e in terms:
            for v, a in enumerate(e):
                if a < 0:
                    if v not in self.inverted:
                        raise StructuralError(f"{self.poly.vars[v]} is not inverted in {self!r}")
                    pole[v] = max(pole[v], -a)
        body = {tuple(a + b for a, b in zip(e, pole)): c for e, c in terms.items()}
        prec = (None,) * nv if exact else self.default_prec
        return LaurentElement(self, Polynomial(self.poly, body), tuple(pole), prec)

    def zero(self, exact: bool = True):
        return self.element(0, exact)

    def one(self):
        return self.element(1)

    def coerce(self, e: "LaurentElement") -> "LaurentElement":
        """Image under the canonical map from the ring of a subchain (or the same chain)."""
        if e.ring is self:
            return e
        for v in range(self.poly.nvars):
            if e.pole[v] and v not in self.inverted:
                raise StructuralError("element has a pole in a variable that is not inverted here")
        prec = tuple(p if v in self.completed else None for v, p in enumerate(e.prec))
        return LaurentElement(self, e.body, e.pole, prec)

    def generator_images(self) -> dict:
        """Named ring generators: each variable, and x^-1 for inverted ones."""
        out = {}
        for v, name in enumerate(self.poly.vars):
            out[name] = self.element(name)
            if v in self.inverted:
                out[f"{name}^-1"] = self.element(f"{name}^-1")
        return out

    def describe(self) -> str:
        k = str(self.poly.field)
        if not self.laurent_vars:
            if self.tower is None:
                return repr(self.coefficient_ring)
            return f"{self.tower.levels[-1]!r} (level {self.level})"
        return f"({self.coefficient_levels[-1]!r})(({', '.join(self.laurent_vars)})) at precision {self.level}".replace(
            "QQ", k
        )

    def __repr__(self):
        return f"ChainRing({' < '.join(self.spec.label(T) for T in self.chain)}, level={self.level})"


def chain_ring(spec: DivisorSpec, chain, prec: Precision) -> ChainRing:
    return ChainRing(spec, chain, prec)


# -- capped-precision Laurent elements -------------------------------------------

_INF = math.inf


def _p(x):
    return _INF if x is None else x


class LaurentElement:
    """(prod x_v^{-pole_v}) * body, known modulo x_v^{prec_v} for completed variables v.

    ``prec`` is the absolute precision of the value (None: exact in that variable).
    Values are kept in canonical form: terms beyond precision dropped, poles minimal.
    """

    __slots__ = ("ring", "body", "pole", "prec")

    def __init__(self, ring: ChainRing, body: Polynomial, pole, prec, normalize: bool = True):
        self.ring = ring
        self.body = body
        self.pole = tuple(pole)
        self.prec = tuple(prec)
        if normalize:
            laurent_normalize(self, inplace=True)

    # value-level helpers
    def terms(self) -> dict:
        """Exponent (possibly negative) -> coefficient."""
        return {tuple(a - b for a, b in zip(e, self.pole)): c for e, c in self.body.terms.items()}

    def valuation(self, v: int):
        if self.body.is_zero():
            return _p(self.prec[v])
        return min(e[v] for e in self.body.terms) - self.pole[v]

    @property
    def pole_order(self) -> int:
        lv = sorted(self.ring.laurent) or sorted(self.ring.inverted)
        return max((self.pole[v] for v in lv), default=0)

    @property
    def precision(self):
        """Absolute precision in the first Laurent (else first completed) variable."""
        lv = sorted(self.ring.laurent) or sorted(self.ring.completed)
        return self.prec[lv[0]] if lv else None

    def is_zero(self) -> bool:
        return self.body.is_zero()

    def _align(self, other):
        if not isinstance(other, LaurentElement):
            other = self.ring.element(other)
        elif other.ring is not self.ring:
            other = self.ring.coerce(other)
        return other

    def __add__(self, other):
        other = self._align(other)
        pole = tuple(max(a, b) for a, b in zip(self.pole, other.pole))
        b1 = self.body.shift(tuple(p - a for p, a in zip(pole, self.pole)))
        b2 = other.body.shift(tuple(p - a for p, a in zip(pole, other.pole)))
        prec = tuple(_unp(min(_p(a), _p(b))) for a, b in zip(self.prec, other.prec))
        return LaurentElement(self.ring, b1 + b2, pole, prec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentElement(self.ring, -self.body, self.pole, self.prec, normalize=False)

    def __sub__(self, other):
        return self + (-self._align(other))

    def __rsub__(self, other):
        return self._align(other) - self

    def __mul__(self, other):
        other = self._align(other)
        nv = len(self.pole)
        prec = []
        for v in range(nv):
            pa, pb = _p(self.prec[v]), _p(other.prec[v])
            va, vb = self.valuation(v), other.valuation(v)
            cand = []
            if pa < _INF:
                cand.append(pa + vb)
            if pb < _INF:
                cand.append(pb + va)
            prec.append(_unp(min(cand)) if cand else None)
        pole = tuple(a + b for a, b in zip(self.pole, other.pole))
        return LaurentElement(self.ring, self.body * other.body, pole, tuple(prec))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def equals(self, other) -> bool:
        """Equality at the joint precision."""
        return (self - other).is_zero()

    def __eq__(self, other):
        if isinstance(other, (LaurentElement, int, Polynomial, str)):
            return self.equals(other)
        return NotImplemented

    __hash__ = None

    def with_prec(self, prec) -> "LaurentElement":
        return LaurentElement(self.ring, self.body, self.pole, prec)

    def truncate(self, level: int) -> "LaurentElement":
        """Cap the absolute precision of every completed variable at ``level``."""
        prec = tuple(
            _unp(min(_p(p), level)) if v in self.ring.completed else p for v, p in enumerate(self.prec)
        )
        return self.with_prec(prec)

    def inverse(self, prec: int | None = None) -> "LaurentElement":
        """Multiplicative inverse by a geometric series in the first Laurent variable.

        Requires the lowest-order part in that variable to be a single term that is a
        unit (a scalar times a monomial in inverted variables).
        """
        ring = self.ring
        lv = sorted(ring.laurent) or sorted(ring.completed)
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if not lv:
            t = self.terms()
            if len(t) != 1:
                raise ValueError("not a unit")
            (e, c), = t.items()
            return _monomial(ring, tuple(-a for a in e), 1 / c, self.prec)
        v0 = lv[0]
        terms = self.terms()
        w = min(e[v0] for e in terms)
        low = {e: c for e, c in terms.items() if e[v0] == w}
        if len(low) != 1:
            if len(lv) > 1:
                return self._inverse_total(lv, prec)
            raise ValueError("lowest-order part is not a single term; cannot invert")
        (e0, c0), = low.items()
        for v, a in enumerate(e0):
            if a and v != v0 and v not in ring.inverted:
                raise ValueError("lowest-order term is not a unit")
        lead_inv = _monomial(ring, tuple(-a for a in e0), 1 / c0, (None,) * len(e0))
        digits = _p(self.prec[v0]) - w
        if digits == _INF:
            digits = prec if prec is not None else ring.level
        digits = int(digits)
        if digits <= 0:
            raise PrecisionExhausted("no digits known; cannot invert")
        h = ring.one() - self * lead_inv
        h = h.truncate(digits)
        if any(e[v] < 0 for e in h.terms() for v in lv if v != v0):
            # poles in another Laurent variable: not a unit of the chain ring unless
            # the total-degree expansion succeeds
            return self._inverse_total(lv, prec)
        s = ring.one()
        hp = ring.one()
        for _ in range(1, digits):
            hp = (hp * h).truncate(digits)
            if hp.is_zero():
                break
            s = s + hp
        p = list(s.prec)
        p[v0] = _unp(min(_p(p[v0]), digits))
        s = s.with_prec(tuple(p))
        return s * lead_inv

    def _inverse_total(self, lv, prec):
        """Geometric series graded by total degree in the Laurent variables lv."""
        ring = self.ring
        terms = self.terms()
        w = min(sum(e[v] for v in lv) for e in terms)
        low = {e: c for e, c in terms.items() if sum(e[v] for v in lv) == w}
        if len(low) != 1:
            raise ValueError("lowest-order part is not a single term; cannot invert")
        (e0, c0), = low.items()
        for v, a in enumerate(e0):
            if a and v not in lv and v not in ring.inverted:
                raise ValueError("lowest-order term is not a unit")
        lead_inv = _monomial(ring, tuple(-a for a in e0), 1 / c0, (None,) * len(e0))
        caps = {}
        for v in lv:
            d = _p(self.prec[v]) - e0[v]
            caps[v] = int(d) if d != _INF else (prec if prec is not None else ring.level)
            if caps[v] <= 0:
                raise PrecisionExhausted("no digits known; cannot invert")

        def cap(x):
            return x.with_prec(tuple(
                _unp(min(_p(p), caps[v])) if v in caps else p for v, p in enumerate(x.prec)
            ))

        h = cap(ring.one() - self * lead_inv)
        if any(e[v] < 0 for e in h.terms() for v in lv):
            raise ValueError("not a unit: the remainder has poles after removing the leading term")
        s = ring.one()
        hp = ring.one()
        for _ in range(sum(caps.values())):
            hp = cap(hp * h)
            if hp.is_zero():
                break
            s = s + hp
        return cap(s) * lead_inv

    def __repr__(self):
        text = format_terms(self.terms(), self.ring.poly.vars, self.ring.poly.order)
        caps = [f"{self.ring.poly.vars[v]}^{p}" for v, p in enumerate(self.prec) if p is not None]
        if caps:
            text += " + O(" + ", ".join(caps) + ")"
        return text


def _unp(x):
    return None if x == _INF else int(x)


def _monomial(ring, exp, coeff, prec):
    pole = tuple(max(-a, 0) for a in exp)
    body = tuple(max(a, 0) for a in exp)
    return LaurentElement(ring, Polynomial(ring.poly, {body: ring.poly.field(coeff)}), pole, prec)


def laurent_normalize(e: LaurentElement, inplace: bool = False) -> LaurentElement:
    """Canonical form: drop digits beyond precision, make poles minimal.

    Raises PrecisionExhausted when nothing at all is known about the value.
    """
    ring = e.ring
    body = e.body
    pole = list(e.pole)
    prec = e.prec
    if any(p is not None for p in prec):
        keep = {}
        for x, c in body.terms.items():
            if all(p is None or x[v] - pole[v] < p for v, p in enumerate(prec)):
                keep[x] = c
        if len(keep) != len(body.terms):
            body = Polynomial(body.ring, keep)
    if body.is_zero():
        pole = [0] * len(pole)
        for v, p in enumerate(prec):
            if p is not None and p <= 0:
                raise PrecisionExhausted(
                    f"result known to 0 digits in {ring.poly.vars[v]} (precision {p})"
                )
    else:
        shift = [0] * len(pole)
        for v in range(len(pole)):
            if pole[v] > 0:
                k = min(pole[v], min(x[v] for x in body.terms))
                shift[v] = k
                pole[v] -= k
        if any(shift):
            body = body.shift(tuple(-k for k in shift))
    if inplace:
        e.body = body
        e.pole = tuple(pole)
        return e
    return LaurentElement(ring, body, pole, prec, normalize=False)


# -- Beauville-Laszlo exactness check --------------------------------------------

@dataclass
class BLReport:
    injective: bool
    middle_exact: bool
    surjective: bool
    level: int
    degree_bound: int
    kernel_dim: int = 0
    checked_targets: int = 0
    witnesses: list = field(default_factory=list)

    @property
    def exact(self) -> bool:
        return self.injective and self.middle_exact and self.surjective


def check_bl_sequence(R: PresentedRing, f: str, prec: Precision, degree_bound: int, seed: int = 0) -> BLReport:
    """Check 0 -> R -> R_f ⊕ R^ -> R^_f -> 0 on bounded pieces at truncation ``prec.level``.

    R_f is realized by :func:`localize`, R^ by the level of :func:`completion_tower`;
    R^_f elements are Laurent polynomials in f truncated at f-degree ``prec.level``.
    """
    if R.relations:
        raise StructuralError("check_bl_sequence expects a polynomial ring")
    if f not in R.vars:
        raise StructuralError(f"{f!r} is not a variable")
    L, d = prec.level, degree_bound
    poly = R.poly
    fi = poly.index(f)
    nv = poly.nvars
    one = poly.field.one
    loc = localize(R, f)
    hat = completion_tower(R, [f], L).level(L)
    t = loc.tvars[0]
    ti = loc.ring.poly.index(t)

    def other_monos(maxdeg):
        others = [v for v in range(nv) if v != fi]
        out = []
        for tot in range(maxdeg + 1):
            for combo in itertools.combinations_with_replacement(others, tot):
                e = [0] * nv
                for v in combo:
                    e[v] += 1
                out.append(e)
        return out

    def rf_image(p: Polynomial) -> dict:
        q = loc.canonical(p)
        out = {}
        for e, c in q.terms.items():
            x = list(e[:nv])
            x[fi] -= e[ti]
            out[tuple(x)] = out.get(tuple(x), 0) + c
        return {k: v for k, v in out.items() if v}

    def hat_image(p: Polynomial) -> dict:
        return dict(hat.nf(p).terms)

    report = BLReport(True, True, True, L, d)

    # (i) injectivity of R -> R_f ⊕ R^ on polynomials of degree <= d
    monos = [tuple(e[:fi] + [a] + e[fi + 1:]) for a in range(d + 1) for e in (m[:] for m in other_monos(d - a))]
    coords = {}
    images = []
    for m in monos:
        p = poly.monomial(m)
        img = {("f",) + k: c for k, c in rf_image(p).items()}
        img.update({("h",) + k: c for k, c in hat_image(p).items()})
        images.append(img)
        for k in img:
            coords.setdefault(k, len(coords))
    rows = [[one * 0] * len(monos) for _ in coords]
    for j, img in enumerate(images):
        for k, c in img.items():
            rows[coords[k]][j] = c
    ker = nullspace(rows, len(monos), one)
    if ker:
        report.injective = False
        w = {m: c for m, c in zip(monos, ker[0]) if c}
        report.witnesses.append(("not injective", format_terms(w, poly.vars)))

    # (ii) kernel of R_f ⊕ R^ -> R^_f (difference map) equals the image of R
    lmonos = []
    for a in range(-d, d + 1):
        for e in other_monos(d - max(a, 0)):
            x = list(e)
            x[fi] = a
            lmonos.append(("p", tuple(x)))
    for a in range(0, min(d, L - 1) + 1):
        for e in other_monos(d - a):
            x = list(e)
            x[fi] = a
            lmonos.append(("q", tuple(x)))
    coords = {}
    cols = []
    for kind, x in lmonos:
        img = {} if x[fi] >= L else {x: one if kind == "p" else -one}
        cols.append(img)
        for k in img:
            coords.setdefault(k, len(coords))
    rows = [[one * 0] * len(lmonos) for _ in coords]
    for j, img in enumerate(cols):
        for k, c in img.items():
            rows[coords[k]][j] = c
    ker = nullspace(rows, len(lmonos), one)
    report.kernel_dim = len(ker)
    for vec in ker:
        p = {x: c for (kind, x), c in zip(lmonos, vec) if kind == "p" and c}
        q = {x: c for (kind, x), c in zip(lmonos, vec) if kind == "q" and c}
        if any(x[fi] < 0 for x in p):
            report.middle_exact = False
            report.witnesses.append(("kernel element with a pole", format_terms(p, poly.vars)))
            continue
        r = Polynomial(poly, p)
        # the preimage r must map to (p, q) at the tracked precision
        if rf_image(r) != {x: c for x, c in p.items()}:
            report.middle_exact = False
            report.witnesses.append(("preimage mismatch in R_f", repr(r)))
        hq = hat_image(r)
        qt = {x: c for x, c in q.items()}
        if {x: c for x, c in hq.items() if x[fi] < L} != {x: c for x, c in qt.items() if x[fi] < L}:
            report.middle_exact = False
            report.witnesses.append(("preimage mismatch in R^", repr(r)))

    # (iii) surjectivity onto R^_f: split into principal part and integral part
    rng = random.Random(seed)
    targets = []
    for a in range(-d, L):
        for e in other_monos(max(d - max(a, 0), 0)):
            x = list(e)
            x[fi] = a
            targets.append({tuple(x): one})
    for _ in range(10):
        z = {}
        for _ in range(4):
            x = list(rng.choice(other_monos(d)))
            x[fi] = rng.randint(-d, L - 1)
            z[tuple(x)] = z.get(tuple(x), 0) + poly.field(rng.randint(-5, 5))
        targets.append({k: v for k, v in z.items() if v})
    for z in targets:
        principal = {x: c for x, c in z.items() if x[fi] < 0}
        integral = {x: c for x, c in z.items() if x[fi] >= 0}
        # p in R_f is the principal part, q in R^ is minus the integral part
        p_body = {x: c for x, c in principal.items()}
        q = Polynomial(poly, {x: -c for x, c in integral.items()})
        diff = dict(p_body)
        for x, c in hat_image(q).items():
            diff[x] = diff.get(x, 0) - c
        diff = {x: c for x, c in diff.items() if c and x[fi] < L}
        if diff != {x: c for x, c in z.items() if x[fi] < L}:
            report.surjective = False
            report.witnesses.append(("no preimage", format_terms(z, poly.vars)))
        report.checked_targets += 1
    return report
