"""Seeded example modules, towers and data shared by the demos and the test suite."""

from __future__ import annotations

import random

from .constructors import DivisorSpec, Precision, completion_tower
from .descent import DescentDatum, datum_from_module
from .modules import PresentedModule
from .rings import PresentedRing
from .towers import TowerModule


def _small_poly(rng: random.Random, R: PresentedRing, deg: int = 1):
    p = R.poly.zero
    for _ in range(rng.randint(1, 2)):
        e = [0] * len(R.vars)
        for _ in range(rng.randint(0, deg)):
            e[rng.randrange(len(R.vars))] += 1
        p = p + R.poly.monomial(tuple(e), rng.choice([-2, -1, 1, 2]))
    return p


def torsion_module(R: PresentedRing, free: int, torsion, var: str = "x") -> PresentedModule:
    """R^free ⊕ ⊕ R/(var^k) for k in ``torsion``, in diagonal form."""
    n = free + len(torsion)
    x = R.gen(var)
    cols = [[x ** k if i == free + j else R.poly.zero for i in range(n)] for j, k in enumerate(torsion)]
    return PresentedModule(R, n, cols)


def disguise(rng: random.Random, M: PresentedModule, ops: int = 2) -> PresentedModule:
    """Apply random elementary row and column operations (an isomorphic presentation)."""
    R = M.ring
    n = M.n_gens
    cols = [list(c) for c in M.relations]
    if n >= 2:
        for _ in range(ops):
            i, j = rng.sample(range(n), 2)
            a = _small_poly(rng, R)
            # new generator basis: row i += a * row j
            cols = [[R.nf(c[k] + a * c[j]) if k == i else c[k] for k in range(n)] for c in cols]
    if len(cols) >= 2:
        for _ in range(ops):
            i, j = rng.sample(range(len(cols)), 2)
            a = _small_poly(rng, R)
            cols[i] = [R.nf(p + a * q) for p, q in zip(cols[i], cols[j])]
    return PresentedModule(R, n, cols)


def random_qx_module(rng: random.Random, R: PresentedRing | None = None) -> PresentedModule:
    """Free rank <= 3 plus at most 3 summands x^k (k <= 5), disguised."""
    R = R or PresentedRing(["x"])
    free = rng.randint(0, 3)
    torsion = [rng.randint(1, 5) for _ in range(rng.randint(0, 3))]
    if free + len(torsion) == 0:
        free = 1
    return disguise(rng, torsion_module(R, free, torsion))


def random_module(rng: random.Random, R: PresentedRing, max_gens: int = 2, max_rels: int = 2, deg: int = 2) -> PresentedModule:
    """A small module with random sparse relations."""
    n = rng.randint(1, max_gens)
    cols = []
    for _ in range(rng.randint(0, max_rels)):
        cols.append([_small_poly(rng, R, deg) if rng.random() < 0.6 else R.poly.zero for _ in range(n)])
    return PresentedModule(R, n, cols)


def a1_suite(R: PresentedRing | None = None) -> list:
    """Fixed modules over k[x] used by the a1 demo."""
    R = R or PresentedRing(["x"])
    rng = random.Random(0)
    return [
        ("R", torsion_module(R, 1, [])),
        ("R/(x^2)", torsion_module(R, 0, [2])),
        ("R + R/(x^2)", torsion_module(R, 1, [2])),
        ("R/(x^3) + R/(x)", torsion_module(R, 0, [3, 1])),
        ("R/(x - 1)", PresentedModule.from_rows(R, [["x - 1"]])),
        ("disguised R^2 + R/(x^4)", disguise(rng, torsion_module(R, 2, [4]))),
    ]


def noncocartesian_towers(R: PresentedRing | None = None) -> list:
    """Towers over k[x] with (x) that are not coCartesian, with the expected (k, l) witness."""
    R = R or PresentedRing(["x"])
    x = R.gen("x")
    t2 = completion_tower(R, [x], 2)
    t3 = completion_tower(R, [x], 3)
    L1, L2 = t2.level(1), t2.level(2)
    out = []
    # zero transition onto a nonzero module
    out.append(("zero map", TowerModule(t2, [PresentedModule.free(L1, 1), PresentedModule.free(L2, 1)], [[[L1(0)]]]), (1, 2)))
    # multiplication by x on k[x]/(x^2)
    out.append((
        "multiplication by x",
        TowerModule(t2, [PresentedModule.from_rows(L1, [["x^2"]]), PresentedModule.from_rows(L2, [["x^2"]])], [[[x]]]),
        (1, 2),
    ))
    # projection R_2^2 -> R_1 onto the first coordinate: kernel too big
    out.append((
        "projection",
        TowerModule(t2, [PresentedModule.free(L1, 1), PresentedModule.free(L2, 2)], [[[L1(1)], [L1(0)]]]),
        (1, 2),
    ))
    # R_2 -> R_1^2 diagonal: not surjective
    out.append((
        "diagonal",
        TowerModule(t2, [PresentedModule.free(L1, 2), PresentedModule.free(L2, 1)], [[[L1(1), L1(1)]]]),
        (1, 2),
    ))
    # depth 3: unit transition 2 -> 1, multiplication by x from 3 -> 2
    M1, M2, M3 = (PresentedModule.free(t3.level(n), 1) for n in (1, 2, 3))
    out.append((
        "late failure",
        TowerModule(t3, [M1, M2, M3], [[[t3.level(1)(1)]], [[t3.level(2)(x)]]]),
        (1, 3),
    ))
    return out


def broken_cocycle_datum(prec: Precision | None = None) -> DescentDatum:
    """Free rank-1 datum over k[x,y] with rho for {} -> {x,y} multiplied by (1 + x)."""
    prec = prec or Precision(4)
    R = PresentedRing(["x", "y"])
    spec = DivisorSpec(R, ["x", "y"])
    d = datum_from_module(PresentedModule.free(R, 1), spec, prec)
    rho = dict(d.rho)
    key = (frozenset(), frozenset({1, 2}))
    ring = d.ring(key)
    rho[key] = [[ring.element("1 + x")]]
    return DescentDatum(spec, prec, d.modules, rho, name="broken cocycle")


def a1_ring_checks(prec: Precision | None = None) -> list:
    """Stratum and chain rings for the origin in the affine line against their expected shapes.

    Returns (label, ok, description) triples.
    """
    from .constructors import chain_ring, stratum_ring

    prec = prec or Precision(8)
    R = PresentedRing(["x"])
    spec = DivisorSpec(R, ["x"])
    L = prec.level
    out = []

    loc = stratum_ring(spec, [], prec)
    expected = PresentedRing(["x", "t_x"], ["x*t_x - 1"])
    ok = loc.ring.same_presentation(expected) and loc.units_check()
    out.append(("R_Y = k[x,1/x]", ok, f"{loc.ring!r}"))

    tower = stratum_ring(spec, ["x"], prec)
    ok = len(tower.levels) == L and all(
        tower.level(n).same_presentation(PresentedRing(["x"], [f"x^{n}"])) for n in range(1, L + 1)
    )
    same = chain_ring(spec, [["x"]], prec).tower
    ok = ok and all(a.same_presentation(b) for a, b in zip(same.levels, tower.levels))
    out.append(("R_D = k[[x]]", ok, f"levels QQ[x]/(x^n), n = 1..{L}"))

    cr = chain_ring(spec, [[], ["x"]], prec)
    x = cr.element("x")
    ok = (
        cr.laurent_vars == ("x",)
        and not cr.coefficient_ring.vars
        and (x * cr.element("x^-1")).equals(1)
        and (cr.element("1 - x").inverse() * cr.element("1 - x")).equals(1)
    )
    out.append(("R_{Y,D} = k[[x]][1/x]", ok, cr.describe()))
    return out


def brute_force_chain_counts(n: int, m: int) -> int:
    """Number of strictly increasing m-tuples of subsets of an n-set, by bitmask search."""
    full = 1 << n

    def extend(last, left):
        if left == 0:
            return 1
        return sum(extend(b, left - 1) for b in range(full) if b != last and b & last == last)

    return sum(extend(a, m - 1) for a in range(full)) if m >= 1 else 0
