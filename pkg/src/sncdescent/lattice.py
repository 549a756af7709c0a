"""R-lattices for modules over chain rings.

A module over a chain ring is stored with Laurent-element entries. For kernel
computations over the base polynomial ring R, each column is multiplied by a
monomial in the inverted variables (a unit of the chain ring) so its entries lie in
R, and truncation relations are added for the completed variables.
"""

from __future__ import annotations

import itertools

from .constructors import ChainRing, LaurentElement
from .modules import PresentedModule, kernel_columns
from .poly import Polynomial
from .rings import PresentedRing


def clearing_exponent(ring: ChainRing, cols) -> tuple:
    """Per-variable maximal pole over a matrix of Laurent elements."""
    nv = ring.poly.nvars
    out = [0] * nv
    for col in cols:
        for e in col:
            for v in range(nv):
                out[v] = max(out[v], e.pole[v])
    return tuple(out)


def cleared(e: LaurentElement, shift) -> Polynomial:
    """x^shift * e as a polynomial; requires shift >= pole componentwise."""
    return e.body.shift(tuple(s - p for s, p in zip(shift, e.pole)))


def clear_matrix(ring: ChainRing, cols, shift=None):
    """Multiply a Laurent matrix by one monomial so every entry is a polynomial."""
    if shift is None:
        shift = clearing_exponent(ring, cols)
    return [[cleared(e, shift) for e in col] for col in cols], shift


def monomial(R: PresentedRing, exp) -> Polynomial:
    return R.poly.monomial(tuple(exp))


def inverted_monomial(R: PresentedRing, ring: ChainRing, k: int = 1) -> Polynomial:
    """Product of the inverted variables of a chain ring, to the power k."""
    exp = [k if v in ring.inverted else 0 for v in range(ring.poly.nvars)]
    return monomial(R, exp)


def truncation_columns(R: PresentedRing, ring: ChainRing, n: int, level: int) -> list:
    """a^level e_i for the ideal a of the completed variables (empty when none)."""
    gens = [R.poly.gen(R.poly.vars[v]) for v in sorted(ring.completed)]
    if not gens:
        return []
    powers = []
    for combo in itertools.combinations_with_replacement(gens, level):
        p = R.poly.one
        for g in combo:
            p = p * g
        powers.append(p)
    zero = R.poly.zero
    return [[g if i == r else zero for i in range(n)] for r in range(n) for g in powers]


def colon(R: PresentedRing, n: int, rels, m: Polynomial) -> list:
    """Generators of (span(rels) : m) inside R^n."""
    zero = R.poly.zero
    images = [[m if i == j else zero for i in range(n)] for j in range(n)]
    return kernel_columns(R, images, n, rels)


def saturate(R: PresentedRing, n: int, rels, m: Polynomial, limit: int = 64):
    """(span(rels) : m^∞) and the least exponent c with (rels : m^c) already saturated."""
    if n == 0:
        return [], 0
    current = PresentedModule(R, n, rels)
    c = 0
    while True:
        nxt = PresentedModule(R, n, colon(R, n, current.relations, m) + current.relations)
        if nxt.same_submodule(current):
            return current.relations, c
        current = nxt
        c += 1
        if c > limit:
            raise RuntimeError("saturation did not terminate")
