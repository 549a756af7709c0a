"""Finitely presented modules over presented rings.

A module is the cokernel of its presentation: ``n_gens`` generators and a list of
relation columns, each a list of ``n_gens`` ring elements. Maps are matrices stored
column-wise (column j is the image of source generator j).
"""

from __future__ import annotations

from functools import cached_property

from .errors import StructuralError
from .groebner import VectorReducer, groebner_vectors, term_key
from .poly import Polynomial
from .rings import PresentedRing, RingMorphism


def col_to_vec(col, offset: int = 0) -> dict:
    v = {}
    for i, p in enumerate(col):
        for e, c in p.terms.items():
            v[(i + offset, e)] = c
    return v


def vec_to_col(v: dict, ring: PresentedRing, n: int, offset: int = 0) -> list:
    parts = [{} for _ in range(n)]
    for (i, e), c in v.items():
        j = i - offset
        if 0 <= j < n:
            parts[j][e] = c
    return [Polynomial(ring.poly, t) for t in parts]


def _ring_rel_vectors(ring: PresentedRing, start: int, stop: int) -> list:
    return [{(i, e): c for e, c in g.terms.items()} for i in range(start, stop) for g in ring.gb]


def _zero_exp(ring):
    return (0,) * len(ring.vars)


def kernel_columns(ring: PresentedRing, images, t: int, relations=()) -> list:
    """Generators of {a in R^s : sum a_j images[j] lies in span(relations)}, R^t the target.

    Computed from a position-over-term basis of the vectors (images[j] | e_j).
    """
    s = len(images)
    if s == 0:
        return []
    z = _zero_exp(ring)
    vecs = []
    for j, col in enumerate(images):
        v = col_to_vec(col)
        v[(t + j, z)] = ring.field.one
        vecs.append(v)
    vecs.extend(col_to_vec(r) for r in relations)
    vecs.extend(_ring_rel_vectors(ring, 0, t + s))
    basis = groebner_vectors(vecs, ring.order)
    out = []
    for v in basis:
        if all(c >= t for (c, _) in v):
            col = [ring.nf(p) for p in vec_to_col(v, ring, s, t)]
            if any(not p.is_zero() for p in col):
                out.append(col)
    return out


def lift(ring: PresentedRing, target_col, gens, relations=()):
    """Coefficients a with target_col = sum a_j gens[j] modulo ``relations``, or None."""
    t = len(target_col)
    s = len(gens)
    z = _zero_exp(ring)
    vecs = []
    for j, col in enumerate(gens):
        v = col_to_vec(col)
        v[(t + j, z)] = ring.field.one
        vecs.append(v)
    vecs.extend(col_to_vec(r) for r in relations)
    vecs.extend(_ring_rel_vectors(ring, 0, t + s))
    basis = groebner_vectors(vecs, ring.order)
    rem = VectorReducer(basis, ring.order)(col_to_vec(target_col))
    if any(c < t for (c, _) in rem):
        return None
    return [ring.nf(-p) for p in vec_to_col(rem, ring, s, t)]


def mat_apply(ring: PresentedRing, cols, vec) -> list:
    """Matrix (given by columns) times a column vector."""
    n = len(cols[0]) if cols else 0
    out = [ring.poly.zero] * n
    for c, a in zip(cols, vec):
        if a.is_zero():
            continue
        out = [o + a * e for o, e in zip(out, c)]
    return [ring.nf(o) for o in out]


class PresentedModule:
    """coker(R^k -> R^n) for a presentation matrix with ``n_gens`` rows."""

    def __init__(self, ring: PresentedRing, n_gens: int, relations=()):
        self.ring = ring
        self.n_gens = n_gens
        rels = []
        for col in relations:
            col = [ring(p) for p in col]
            if len(col) != n_gens:
                raise StructuralError(f"relation has {len(col)} entries, module has {n_gens} generators")
            if any(not p.is_zero() for p in col):
                rels.append(col)
        self.relations = rels

    @classmethod
    def free(cls, ring: PresentedRing, rank: int) -> "PresentedModule":
        return cls(ring, rank, [])

    @classmethod
    def from_rows(cls, ring: PresentedRing, rows) -> "PresentedModule":
        """Build from a presentation matrix written row by row (strings or polynomials)."""
        rows = [list(r) for r in rows]
        n = len(rows)
        k = len(rows[0]) if rows else 0
        return cls(ring, n, [[rows[i][j] for i in range(n)] for j in range(k)])

    @property
    def matrix(self) -> list:
        """Presentation as rows (n_gens x number of relations)."""
        return [[col[i] for col in self.relations] for i in range(self.n_gens)]

    @cached_property
    def gb(self) -> list:
        vecs = [col_to_vec(c) for c in self.relations]
        vecs.extend(_ring_rel_vectors(self.ring, 0, self.n_gens))
        return groebner_vectors(vecs, self.ring.order)

    @cached_property
    def _reducer(self):
        return VectorReducer(self.gb, self.ring.order)

    def reduce(self, col) -> list:
        """Normal form of an element of R^n modulo the relations."""
        return vec_to_col(self._reducer(col_to_vec([self.ring(p) for p in col])), self.ring, self.n_gens)

    def contains(self, col) -> bool:
        """Is the element ``col`` of R^n zero in the module?"""
        return not self._reducer(col_to_vec([self.ring(p) for p in col]))

    def is_zero(self) -> bool:
        z = _zero_exp(self.ring)
        lead = {max(v, key=term_key(self.ring.order)) for v in self.gb}
        return all((i, z) in lead for i in range(self.n_gens))

    def same_submodule(self, other: "PresentedModule") -> bool:
        """Same relation submodule of the same free module."""
        return (
            self.n_gens == other.n_gens
            and all(other.contains(c) for c in self.relations)
            and all(self.contains(c) for c in other.relations)
        )

    def __repr__(self):
        if not self.relations:
            return f"{self.ring!r}^{self.n_gens}"
        rows = "; ".join(", ".join(map(repr, r)) for r in self.matrix)
        return f"coker[{rows}] over {self.ring!r}"


class ModuleMap:
    """R-linear map between presented modules over the same ring; columns are images of generators."""

    def __init__(self, source: PresentedModule, target: PresentedModule, cols, check: bool = True):
        if not source.ring.same_presentation(target.ring):
            raise StructuralError("module map between modules over different rings")
        ring = target.ring
        cols = [[ring(p) for p in c] for c in cols]
        if len(cols) != source.n_gens or any(len(c) != target.n_gens for c in cols):
            raise StructuralError(
                f"matrix shape does not match {target.n_gens} x {source.n_gens}"
            )
        self.source = source
        self.target = target
        self.cols = cols
        if check:
            for r in source.relations:
                if not target.contains(self.apply(r)):
                    raise StructuralError("matrix does not send source relations into the target relations")

    @property
    def ring(self):
        return self.target.ring

    @property
    def matrix(self) -> list:
        return [[c[i] for c in self.cols] for i in range(self.target.n_gens)]

    def apply(self, vec) -> list:
        if not self.cols:
            return [self.ring.poly.zero] * self.target.n_gens
        return mat_apply(self.ring, self.cols, vec)

    def compose(self, inner: "ModuleMap") -> "ModuleMap":
        """``self ∘ inner``."""
        return ModuleMap(inner.source, self.target, [self.apply(c) for c in inner.cols], check=False)

    @classmethod
    def identity(cls, module: PresentedModule) -> "ModuleMap":
        R = module.ring
        n = module.n_gens
        return cls(module, module, [[R(int(i == j)) for i in range(n)] for j in range(n)], check=False)

    def is_zero(self) -> bool:
        return all(self.target.contains(c) for c in self.cols)

    def __repr__(self):
        return f"ModuleMap({self.matrix!r})"


def syzygy_kernel(f: ModuleMap):
    """Kernel of ``f`` as a presented module K together with the inclusion K -> source."""
    ring = f.ring
    M = f.source
    gens = kernel_columns(ring, f.cols, f.target.n_gens, f.target.relations)
    gens = [g for g in gens if not M.contains(g)]
    rels = kernel_columns(ring, gens, M.n_gens, M.relations)
    K = PresentedModule(ring, len(gens), rels)
    incl = ModuleMap(K, M, gens, check=False)
    Kp, _, back = prune(K)
    return Kp, incl.compose(back)


def cokernel(f: ModuleMap) -> PresentedModule:
    return PresentedModule(f.ring, f.target.n_gens, f.target.relations + f.cols)


def is_module_iso(f: ModuleMap) -> bool:
    """True iff ``f`` has zero cokernel and zero kernel."""
    if not cokernel(f).is_zero():
        return False
    gens = kernel_columns(f.ring, f.cols, f.target.n_gens, f.target.relations)
    return all(f.source.contains(g) for g in gens)


def base_change(M: PresentedModule, phi: RingMorphism) -> PresentedModule:
    """M ⊗ T along phi: S -> T, entrywise image of the presentation."""
    if not M.ring.same_presentation(phi.source):
        raise StructuralError("base_change: module does not live over the source of the morphism")
    return PresentedModule(phi.target, M.n_gens, [[phi(p) for p in col] for col in M.relations])


def base_change_map(f: ModuleMap, phi: RingMorphism, source=None, target=None) -> ModuleMap:
    src = source or base_change(f.source, phi)
    tgt = target or base_change(f.target, phi)
    return ModuleMap(src, tgt, [[phi(p) for p in c] for c in f.cols], check=False)


def direct_sum(*mods: PresentedModule) -> PresentedModule:
    ring = mods[0].ring
    n = sum(m.n_gens for m in mods)
    rels = []
    off = 0
    for m in mods:
        for col in m.relations:
            full = [ring.poly.zero] * n
            full[off:off + m.n_gens] = col
            rels.append(full)
        off += m.n_gens
    return PresentedModule(ring, n, rels)


def prune(M: PresentedModule):
    """Drop generators that a relation with a constant entry expresses through the others.

    Returns ``(P, to_p, from_p)`` with mutually inverse maps M -> P and P -> M.
    """
    R = M.ring
    n = M.n_gens
    rels = [list(c) for c in M.relations]
    alive = list(range(n))
    # expression of each original generator in terms of surviving ones (as length-n columns)
    express = [[R(int(i == j)) for i in range(n)] for j in range(n)]
    changed = True
    while changed:
        changed = False
        for ci, col in enumerate(rels):
            pivot = None
            for i in alive:
                p = col[i]
                if not p.is_zero() and p.is_constant():
                    pivot = i
                    break
            if pivot is None:
                continue
            u = col[pivot].constant_coeff()
            # generator pivot = -(1/u) * sum_{k != pivot} col[k] e_k
            sub = [R.nf(col[k] * (-1 / u)) if k != pivot else R.poly.zero for k in range(n)]
            new_rels = []
            for cj, other in enumerate(rels):
                if cj == ci:
                    continue
                a = other[pivot]
                if a.is_zero():
                    new_rels.append(other)
                    continue
                new = [R.nf(other[k] + a * sub[k]) if k != pivot else R.poly.zero for k in range(n)]
                if any(not q.is_zero() for q in new):
                    new_rels.append(new)
            rels = new_rels
            for j in range(n):
                a = express[j][pivot]
                if not a.is_zero():
                    express[j] = [R.nf(express[j][k] + a * sub[k]) if k != pivot else R.poly.zero for k in range(n)]
            alive.remove(pivot)
            changed = True
            break
    P = PresentedModule(R, len(alive), [[col[g] for g in alive] for col in rels])
    to_p = ModuleMap(M, P, [[express[j][g] for g in alive] for j in range(n)], check=False)
    from_p = ModuleMap(P, M, [[R(int(k == g)) for k in range(n)] for g in alive], check=False)
    return P, to_p, from_p
