"""Strata poset, its nerve, the category ∫S, and diagrams of rings and modules over it.

A chain is a tuple of frozensets T_1 ⊂ T_2 ⊂ ... of vanishing components, i.e. a
strictly decreasing chain of strata Y_1 > Y_2 > ... .
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .constructors import ChainRing, DivisorSpec, LaurentElement, Precision, chain_ring
from .errors import StructuralError, UnsupportedError
from .lattice import (
    clear_matrix,
    clearing_exponent,
    inverted_monomial,
    saturate,
    truncation_columns,
)
from .modules import PresentedModule, kernel_columns, prune
from .rings import PresentedRing


# -- combinatorics ----------------------------------------------------------------

class StrataPoset:
    """Subsets T of {1..n}; Y_T <= Y_T' iff T ⊇ T'."""

    def __init__(self, n: int):
        self.n = n
        idx = range(1, n + 1)
        self.elements = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(idx, k)]

    def leq(self, a, b) -> bool:
        return a >= b

    def less(self, a, b) -> bool:
        return a > b

    def strict_relations(self) -> list:
        """Pairs (Z, Y) with Z < Y."""
        return [(a, b) for a in self.elements for b in self.elements if self.less(a, b)]

    def __len__(self):
        return len(self.elements)


def strata_poset(n: int) -> StrataPoset:
    if not 1 <= n <= 5:
        raise UnsupportedError(f"strata poset is enumerated only for 1 <= n <= 5, got {n}")
    return StrataPoset(n)


class Nerve:
    """Strict chains [Y_1 > ... > Y_m] with deletion face maps."""

    def __init__(self, poset: StrataPoset):
        self.poset = poset
        self.chains = {}
        layer = [(e,) for e in poset.elements]
        m = 1
        while layer:
            self.chains[m] = layer
            layer = [c + (e,) for c in layer for e in poset.elements if poset.less(e, c[-1])]
            m += 1

    def S(self, m: int) -> list:
        return self.chains.get(m, [])

    def counts(self, upto: int | None = None) -> tuple:
        upto = upto or max(self.chains)
        return tuple(len(self.S(m)) for m in range(1, upto + 1))

    @staticmethod
    def face(chain, i: int):
        """d_i: delete the i-th entry (0-based)."""
        if not 0 <= i < len(chain):
            raise IndexError(i)
        return chain[:i] + chain[i + 1:]

    def check_identities(self) -> bool:
        """d_i d_j = d_{j-1} d_i for i < j on every chain."""
        for m, chains in self.chains.items():
            for c in chains:
                for j in range(m):
                    for i in range(j):
                        if m < 2:
                            continue
                        if self.face(self.face(c, j), i) != self.face(self.face(c, i), j - 1):
                            return False
        return True

    def listing(self, label=None) -> list:
        label = label or (lambda T: "{" + ",".join(map(str, sorted(T))) + "}")
        out = []
        for m in sorted(self.chains):
            for c in self.chains[m]:
                out.append(f"S{m} " + " > ".join("Y" + label(T) for T in c))
        return out


def nerve(poset: StrataPoset) -> Nerve:
    return Nerve(poset)


@dataclass(frozen=True)
class Morphism:
    """(m, ξ) -> (m', ξ') given by the injective monotone map mu with ξ'∘mu = ξ."""

    src: tuple
    tgt: tuple
    mu: tuple

    @property
    def is_identity(self) -> bool:
        return self.src == self.tgt


class IntSCategory:
    """Objects (m, ξ) for ξ in S_m; morphisms from subchains to superchains."""

    def __init__(self, nv: Nerve):
        self.nerve = nv
        self.objects = [c for m in sorted(nv.chains) for c in nv.chains[m]]
        self._pos = {c: i for i, c in enumerate(self.objects)}
        self.morphisms = []
        self.hom = {}
        for a in self.objects:
            for b in self.objects:
                if len(a) <= len(b) and set(a) <= set(b):
                    mu = tuple(b.index(x) for x in a)
                    f = Morphism(a, b, mu)
                    self.morphisms.append(f)
                    self.hom[(a, b)] = f

    def identity(self, obj) -> Morphism:
        return self.hom[(obj, obj)]

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        """g ∘ f."""
        if f.tgt != g.src:
            raise StructuralError("morphisms are not composable")
        h = Morphism(f.src, g.tgt, tuple(g.mu[i] for i in f.mu))
        if self.hom.get((h.src, h.tgt)) != h:
            raise StructuralError("composite is not a morphism of the category")
        return h

    def non_identity(self) -> list:
        return [f for f in self.morphisms if not f.is_identity]

    def check_composition(self) -> bool:
        for f in self.morphisms:
            for g in self.morphisms:
                if f.tgt != g.src:
                    continue
                gf = self.compose(g, f)
                for h in self.morphisms:
                    if g.tgt == h.src and self.compose(h, gf) != self.compose(self.compose(h, g), f):
                        return False
            if self.compose(self.identity(f.tgt), f) != f or self.compose(f, self.identity(f.src)) != f:
                return False
        return True

    def slice_over(self, obj) -> list:
        """Objects mapping to ``obj`` (the index category of the limit at obj)."""
        return [a for a in self.objects if (a, obj) in self.hom]

    def __len__(self):
        return len(self.objects)


def grothendieck_construction(nv: Nerve) -> IntSCategory:
    return IntSCategory(nv)


# -- ring diagram ----------------------------------------------------------------

class RingDiagram:
    """chain ↦ chain ring, morphisms ↦ canonical embeddings."""

    def __init__(self, spec: DivisorSpec, prec: Precision, category: IntSCategory):
        self.spec = spec
        self.prec = prec
        self.category = category
        self.rings = {c: chain_ring(spec, c, prec) for c in category.objects}

    def ring(self, chain) -> ChainRing:
        return self.rings[tuple(chain)]

    def apply(self, f: Morphism, e: LaurentElement) -> LaurentElement:
        return self.rings[f.tgt].coerce(e)

    def check_functoriality(self) -> bool:
        cat = self.category
        for f in cat.morphisms:
            gens = self.rings[f.src].generator_images()
            for g in cat.morphisms:
                if g.src != f.tgt:
                    continue
                h = cat.compose(g, f)
                for e in gens.values():
                    if not self.apply(g, self.apply(f, e)).equals(self.apply(h, e)):
                        return False
        return True


def ring_diagram(spec: DivisorSpec, prec: Precision) -> RingDiagram:
    return RingDiagram(spec, prec, grothendieck_construction(nerve(strata_poset(spec.n))))


# -- modules over chain rings ------------------------------------------------------

class ChainModule:
    """coker of a matrix of Laurent elements over a chain ring (relations are columns)."""

    def __init__(self, ring: ChainRing, n_gens: int, relations=()):
        self.ring = ring
        self.n_gens = n_gens
        rels = []
        for col in relations:
            col = [ring.coerce(e) if isinstance(e, LaurentElement) else ring.element(e, exact=False) for e in col]
            if len(col) != n_gens:
                raise StructuralError(f"relation has {len(col)} entries, module has {n_gens} generators")
            if any(not e.is_zero() for e in col):
                rels.append(col)
        self.relations = rels

    @classmethod
    def from_module(cls, ring: ChainRing, M: PresentedModule) -> "ChainModule":
        """M ⊗ (chain ring) for a module over the polynomial ring of the divisor."""
        if M.relations and not M.ring.same_presentation(ring.spec.ring):
            raise StructuralError("module is not over the ring of the divisor")
        return cls(ring, M.n_gens, [[ring.element(p, exact=False) for p in col] for col in M.relations])

    def base_change(self, ring: ChainRing) -> "ChainModule":
        return ChainModule(ring, self.n_gens, [[ring.coerce(e) for e in col] for col in self.relations])

    def lattice(self, R: PresentedRing, level: int):
        """(P0, P_trunc): relation columns cleared into R, and truncation columns at ``level``."""
        P0 = []
        for col in self.relations:
            cols, _ = clear_matrix(self.ring, [col])
            P0.append([R(p) for p in cols[0]])
        return P0, truncation_columns(R, self.ring, self.n_gens, level)

    def __repr__(self):
        if not self.relations:
            return f"free({self.n_gens}) over {self.ring!r}"
        return f"coker{[[repr(e) for e in c] for c in self.relations]} over {self.ring!r}"


def _budget(level: int) -> int:
    return max(level // 2, 1)


def chain_module_iso(src: ChainModule, tgt: ChainModule, cols) -> bool:
    """Is src ⊗ R_c -> tgt (columns of Laurent elements over R_c) an isomorphism?

    Decided on R-lattices at the working level: after clearing poles, the cokernel
    must be killed and the kernel pushed into the source relations by a power m^b
    of the inverted variables, b at most half the level plus the saturation exponents.
    Without inverted completed variables this is an exact test at the level.
    """
    ring = tgt.ring
    R = ring.spec.ring
    L = ring.level
    src = src.base_change(ring)
    F, _ = clear_matrix(ring, cols)
    F = [[R(p) for p in c] for c in F]
    m = inverted_monomial(R, ring)
    P0t, Ptt = tgt.lattice(R, L)
    P0s, Pts = src.lattice(R, L)
    if m == R.poly.one:
        b = 0
    else:
        _, ct = saturate(R, tgt.n_gens, P0t, m)
        _, cs = saturate(R, src.n_gens, P0s, m)
        b = _budget(L) + max(ct, cs)
    mb = m ** b
    image = PresentedModule(R, tgt.n_gens, F + P0t + Ptt)
    zero = R.poly.zero
    for k in range(tgt.n_gens):
        if not image.contains([mb if i == k else zero for i in range(tgt.n_gens)]):
            return False
    src_mod = PresentedModule(R, src.n_gens, P0s + Pts)
    for g in kernel_columns(R, F, tgt.n_gens, P0t + Ptt):
        if not src_mod.contains([R.nf(mb * p) for p in g]):
            return False
    return True


class DiagramModule:
    """A module per object of ∫S and, per non-identity morphism f: a -> b, the columns
    (over the ring of b) of the structure map M_a ⊗ R_b -> M_b."""

    def __init__(self, diagram: RingDiagram, modules: dict, maps: dict):
        self.diagram = diagram
        self.modules = {tuple(k): v for k, v in modules.items()}
        self.maps = {}
        for f in diagram.category.non_identity():
            cols = maps.get((f.src, f.tgt))
            if cols is None:
                raise StructuralError(f"missing structure map for {f.src} -> {f.tgt}")
            ring = diagram.rings[f.tgt]
            self.maps[(f.src, f.tgt)] = [[ring.coerce(e) if isinstance(e, LaurentElement) else ring.element(e) for e in c] for c in cols]

    @classmethod
    def from_module(cls, diagram: RingDiagram, M: PresentedModule) -> "DiagramModule":
        """Base changes of one module everywhere, with identity structure maps."""
        mods = {c: ChainModule.from_module(r, M) for c, r in diagram.rings.items()}
        maps = {}
        for f in diagram.category.non_identity():
            ring = diagram.rings[f.tgt]
            maps[(f.src, f.tgt)] = [[ring.element(int(i == j)) for i in range(M.n_gens)] for j in range(M.n_gens)]
        return cls(diagram, mods, maps)


@dataclass
class DiagramVerdict:
    ok: bool
    morphism: tuple | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok


def is_cocartesian_diagram(M: DiagramModule) -> DiagramVerdict:
    """Every structure map must be an isomorphism after base change; first failure is returned."""
    for f in M.diagram.category.non_identity():
        cols = M.maps[(f.src, f.tgt)]
        if not chain_module_iso(M.modules[f.src], M.modules[f.tgt], cols):
            return DiagramVerdict(False, (f.src, f.tgt), "structure map is not an isomorphism")
    return DiagramVerdict(True)


# -- limits over the strata ------------------------------------------------------

@dataclass
class Edge:
    """Condition F1(a_src) = F2(a_tgt) in ``module`` (over the chain ring of the edge)."""

    src: frozenset
    tgt: frozenset
    module: ChainModule
    F1: list
    F2: list
    stage: int = 0


@dataclass
class LatticeLimit:
    module: PresentedModule
    gens: list  # columns in the direct sum of the strata blocks
    offsets: dict
    window: int
    relations: list = field(default_factory=list)

    def block(self, T, col) -> list:
        off, n = self.offsets[T]
        return col[off:off + n]


def _embed(col, off, total, zero):
    out = [zero] * total
    out[off:off + len(col)] = col
    return out


def lattice_limit(R: PresentedRing, strata: dict, edges, level: int, window: int = 0) -> LatticeLimit:
    """Limit of stratum modules under edge conditions, as a module over R.

    Elements of the stratum T are sought in the window m_T^{-window} * (R-span of the
    generators); conditions are imposed edge by edge in increasing ``stage``. Such
    elements are only known to ``level - window`` digits, so both the stratum blocks
    and the edge conditions are truncated there.
    """
    eff = level - window
    if eff < 1:
        raise ValueError(f"window {window} leaves no digits at level {level}")
    keys = list(strata)
    offsets = {}
    total = 0
    for T in keys:
        offsets[T] = (total, strata[T].n_gens)
        total += strata[T].n_gens
    zero = R.poly.zero
    one = R.poly.one
    rel = []
    for T in keys:
        Mt = strata[T]
        P0, Pt = Mt.lattice(R, eff)
        m = inverted_monomial(R, Mt.ring)
        sat = saturate(R, Mt.n_gens, P0 + Pt, m)[0] if m != one else P0 + Pt
        rel.extend(_embed(c, offsets[T][0], total, zero) for c in sat)

    gens = [[R(int(i == j)) for i in range(total)] for j in range(total)]
    for stage in sorted({e.stage for e in edges}):
        group = [e for e in edges if e.stage == stage]
        tgt_total = sum(e.module.n_gens for e in group)
        images = [[zero] * tgt_total for _ in gens]
        tgt_rels = []
        toff = 0
        for e in group:
            ring = e.module.ring
            nv = ring.poly.nvars
            s1 = clearing_exponent(ring, e.F1)
            s2 = clearing_exponent(ring, e.F2)
            inv_src = strata[e.src].ring.inverted
            inv_tgt = strata[e.tgt].ring.inverted
            u1 = [s1[v] + (window if v in inv_src else 0) for v in range(nv)]
            u2 = [s2[v] + (window if v in inv_tgt else 0) for v in range(nv)]
            U = [max(a, b) for a, b in zip(u1, u2)]
            P0, Pt = e.module.lattice(R, eff)
            m = inverted_monomial(R, ring)
            # zero over the chain ring = in the m-saturation of the lattice, up to truncation
            if m != one:
                P0 = saturate(R, e.module.n_gens, P0, m)[0]
            Pt = [[p.shift(tuple(U)) for p in col] for col in Pt]
            A1 = [[R(p.shift(tuple(a - b for a, b in zip(U, u1)))) for p in col] for col in clear_matrix(ring, e.F1, s1)[0]]
            A2 = [[R(p.shift(tuple(a - b for a, b in zip(U, u2)))) for p in col] for col in clear_matrix(ring, e.F2, s2)[0]]
            o1, n1 = offsets[e.src]
            o2, n2 = offsets[e.tgt]
            nt = e.module.n_gens
            for gi, g in enumerate(gens):
                acc = [zero] * nt
                for j in range(n1):
                    a = g[o1 + j]
                    if not a.is_zero():
                        acc = [x + a * y for x, y in zip(acc, A1[j])]
                for j in range(n2):
                    a = g[o2 + j]
                    if not a.is_zero():
                        acc = [x - a * y for x, y in zip(acc, A2[j])]
                images[gi][toff:toff + nt] = [R.nf(x) for x in acc]
            tgt_rels.extend(_embed(col, toff, tgt_total, zero) for col in P0 + Pt)
            toff += nt
        K = kernel_columns(R, images, tgt_total, tgt_rels)
        new = []
        for k in K:
            col = [zero] * total
            for a, g in zip(k, gens):
                if not a.is_zero():
                    col = [x + a * y for x, y in zip(col, g)]
            new.append([R.nf(x) for x in col])
        gens = new

    relmod = PresentedModule(R, total, rel)
    gens = [g for g in gens if not relmod.contains(g)]
    nrels = kernel_columns(R, gens, total, rel)
    N = PresentedModule(R, len(gens), nrels)
    P, to_p, from_p = prune(N)
    pruned = [
        [R.nf(sum((a * g[i] for a, g in zip(col, gens)), zero)) for i in range(total)]
        for col in from_p.cols
    ]
    return LatticeLimit(P, pruned, offsets, window, rel)


def kan_limit(M: DiagramModule, objects=None, window: int = 0):
    """Limit of the diagram restricted to ``objects`` (default: all of ∫S).

    A single object returns its module. Otherwise the limit is computed over the base
    ring: stratum modules (length-1 chains) in a window, and for every longer chain c
    receiving maps from two strata a, b in the slice the condition M(a->c) = M(b->c).
    """
    diagram = M.diagram
    cat = diagram.category
    objects = list(objects) if objects is not None else list(cat.objects)
    if len(objects) == 1:
        return M.modules[objects[0]]
    strata = {c[0]: M.modules[c] for c in objects if len(c) == 1}
    edges = []
    for c in objects:
        if len(c) != 2:
            continue
        a, b = (c[0],), (c[1],)
        if a in objects and b in objects:
            edges.append(
                Edge(c[0], c[1], M.modules[c], M.maps[(a, c)], M.maps[(b, c)], stage=-max(c[1] - c[0]))
            )
    R = diagram.spec.ring
    return lattice_limit(R, strata, edges, diagram.prec.level, window).module


def chain_module_is_zero(M: ChainModule) -> bool:
    """Zero test on the lattice: every generator is killed by a power of the inverted variables."""
    R = M.ring.spec.ring
    P0, Pt = M.lattice(R, M.ring.level)
    m = inverted_monomial(R, M.ring)
    rels = saturate(R, M.n_gens, P0 + Pt, m)[0] if m != R.poly.one else P0 + Pt
    return PresentedModule(R, M.n_gens, rels).is_zero()
