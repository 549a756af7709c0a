"""Descent data over the strata of a divisor, the cocycle check, and gluing.

Gluing forms the kernel of the difference map between stratum modules and their
images over the chain rings, at finite precision and in a finite pole window, and
then verifies the result: a glued module is only returned once its base changes to
every stratum are checked to be isomorphic to the given stratum modules.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .constructors import DivisorSpec, Precision, stratum_ring
from .diagrams import (
    ChainModule,
    Edge,
    LatticeLimit,
    chain_module_iso,
    lattice_limit,
    nerve,
    ring_diagram,
    strata_poset,
)
from .errors import CocycleInvalid, NoStabilization, PrecisionExhausted, StructuralError
from .lattice import clear_matrix, clearing_exponent, inverted_monomial, saturate
from .modules import ModuleMap, PresentedModule, is_module_iso, lift
from .smith import smith_invariants
from .towers import TowerModule, tower_stabilized_presentation


class DescentDatum:
    """Stratum modules M_T and comparison maps rho[(T, T')] for every T ⊂ T'.

    ``modules[T]`` is a ChainModule over the ring of the one-element chain (T,);
    ``rho[(T, T')]`` holds the columns (over the chain ring of (T, T')) of
    M_T ⊗ R_{T,T'} -> M_T' ⊗ R_{T,T'}.
    """

    def __init__(self, spec: DivisorSpec, prec: Precision, modules: dict, rho: dict, name: str = ""):
        self.spec = spec
        self.prec = prec
        self.name = name
        self.diagram = ring_diagram(spec, prec)
        self.poset = strata_poset(spec.n)
        self.modules = {}
        for T in self.poset.elements:
            if T not in modules:
                raise StructuralError(f"datum has no module on stratum {spec.label(T)}")
            M = modules[T]
            self.modules[T] = M.base_change(self.ring((T,))) if M.ring is not self.ring((T,)) else M
        self.rho = {}
        for Z, Y in self.poset.strict_relations():
            key = (Y, Z)  # Y ⊂ Z as vanishing sets
            if key not in rho:
                raise StructuralError(f"datum has no comparison map for {spec.label(Y)} -> {spec.label(Z)}")
            ring = self.ring(key)
            cols = [[ring.coerce(e) if hasattr(e, "body") else ring.element(e, exact=False) for e in c] for c in rho[key]]
            n_src, n_tgt = self.modules[Y].n_gens, self.modules[Z].n_gens
            if len(cols) != n_src or any(len(c) != n_tgt for c in cols):
                raise StructuralError(
                    f"comparison map {spec.label(Y)} -> {spec.label(Z)} must be {n_tgt} x {n_src}"
                )
            self.rho[key] = cols
        self.valid = None

    def ring(self, chain):
        return self.diagram.ring(chain)

    def at_precision(self, prec: Precision) -> "DescentDatum":
        """Same data over the rings at another precision (entries keep their own precision)."""
        return DescentDatum(self.spec, prec, self.modules, self.rho, self.name)

    def rho_is_iso(self, T, T2) -> bool:
        ring = self.ring((T, T2))
        return chain_module_iso(self.modules[T], self.modules[T2].base_change(ring), self.rho[(T, T2)])

    def localized_module(self) -> PresentedModule:
        """M on the open stratum as a module over the Rabinowitsch presentation."""
        loc = stratum_ring(self.spec, frozenset(), self.prec)
        return _to_presented(self.modules[frozenset()], loc.ring)

    def tower_module(self, T) -> TowerModule:
        """M_T for a nonempty T as a module over the truncation tower of its stratum ring."""
        T = self.spec.subset(T)
        if not T:
            raise StructuralError("the open stratum has no tower")
        tower = stratum_ring(self.spec, T, self.prec)
        M = self.modules[T]
        return TowerModule(tower, [_to_presented(M, R) for R in tower.levels], check=False)


def _to_ring(e, C):
    """A Laurent element with poles only in plainly inverted variables, as an element of C."""
    p = e.body
    for v, k in enumerate(e.pole):
        if k:
            p = C.poly.convert(p) * C.poly.gen(f"t_{e.ring.poly.vars[v]}") ** k
    return C(p)


def _to_presented(M: ChainModule, C) -> PresentedModule:
    return PresentedModule(C, M.n_gens, [[_to_ring(e, C) for e in col] for col in M.relations])


def datum_from_module(M: PresentedModule, spec: DivisorSpec, prec: Precision) -> DescentDatum:
    """Base changes of M to every stratum ring, with identity comparison maps."""
    if not M.ring.same_presentation(spec.ring):
        raise StructuralError("module is not over the ring of the divisor")
    diagram = ring_diagram(spec, prec)
    poset = strata_poset(spec.n)
    modules = {T: ChainModule.from_module(diagram.ring((T,)), M) for T in poset.elements}
    rho = {}
    for Z, Y in poset.strict_relations():
        ring = diagram.ring((Y, Z))
        rho[(Y, Z)] = [[ring.element(int(i == j)) for i in range(M.n_gens)] for j in range(M.n_gens)]
    d = DescentDatum(spec, prec, modules, rho, name="from module")
    d.valid = True
    return d


@dataclass
class CocycleVerdict:
    ok: bool
    triple: tuple | None = None
    entry: tuple | None = None
    witness: str = ""

    def __bool__(self):
        return self.ok


def _matmul(ring, A, B):
    """Columns of A·B for column-stored Laurent matrices (A: p x q, B: q x r)."""
    p = len(A[0]) if A else 0
    out = []
    for bcol in B:
        col = [ring.zero() for _ in range(p)]
        for a, acol in zip(bcol, A):
            if a.is_zero():
                continue
            col = [c + a * x for c, x in zip(col, acol)]
        out.append(col)
    return out


def check_cocycle(d: DescentDatum) -> CocycleVerdict:
    """rho_{Z,W} ∘ rho_{Y,Z} = rho_{Y,W} over the triple-chain ring, entrywise at working precision."""
    triples = nerve(d.poset).S(3)
    for Y, Z, W in triples:
        ring = d.ring((Y, Z, W))
        A = [[ring.coerce(e) for e in c] for c in d.rho[(Z, W)]]
        B = [[ring.coerce(e) for e in c] for c in d.rho[(Y, Z)]]
        C = [[ring.coerce(e) for e in c] for c in d.rho[(Y, W)]]
        AB = _matmul(ring, A, B) if B else []
        for j, (col, ccol) in enumerate(zip(AB, C)):
            for i, (x, y) in enumerate(zip(col, ccol)):
                if not x.equals(y):
                    d.valid = False
                    labels = tuple("Y" + d.spec.label(T) for T in (Y, Z, W))
                    return CocycleVerdict(False, labels, (i, j), f"entry ({i},{j}): {x!r} != {y!r}")
    d.valid = True
    return CocycleVerdict(True)


@dataclass
class GlueReport:
    module: PresentedModule | None
    verdicts: dict
    precision: Precision
    window: int
    stabilization: dict = field(default_factory=dict)
    attempts: list = field(default_factory=list)
    limit: LatticeLimit | None = None

    @property
    def ok(self) -> bool:
        return self.module is not None and all(self.verdicts.values())

    @property
    def counit(self) -> bool:
        return all(v for k, v in self.verdicts.items() if k.startswith("counit"))


def _window_ladder(level: int) -> list:
    """Pole windows 0, 1, 2, 4, ... leaving at least one digit."""
    out = [0, 1]
    k = 2
    while k < level:
        out.append(k)
        k *= 2
    return [w for w in out if w < level]


def _edges(d: DescentDatum) -> list:
    edges = []
    for T in d.poset.elements:
        for j in range(1, d.spec.n + 1):
            if j in T:
                continue
            T2 = T | {j}
            ring = d.ring((T, T2))
            tgt = d.modules[T2].base_change(ring)
            ident = [[ring.element(int(i == k)) for i in range(tgt.n_gens)] for k in range(tgt.n_gens)]
            edges.append(Edge(T, T2, tgt, d.rho[(T, T2)], ident, stage=-j))
    return edges


def _counit(d: DescentDatum, lim: LatticeLimit, prec: Precision) -> dict:
    """Base change of the glued module to each stratum ring must be the given stratum module."""
    R = d.spec.ring
    N = lim.module
    out = {}
    for T in d.poset.elements:
        rep = stratum_ring(d.spec, T, prec)
        C = rep.ring if not T else rep.levels[prec.level - lim.window - 1]
        MT = _to_presented(d.modules[T], C)
        ring = d.modules[T].ring
        tpow = C.poly.one
        for v in sorted(ring.inverted):
            tpow = tpow * C.poly.gen(f"t_{ring.poly.vars[v]}") ** lim.window
        cols = [[C(C.poly.convert(R.poly.convert(p)) * tpow) for p in lim.block(T, g)] for g in lim.gens]
        NC = PresentedModule(C, N.n_gens, [[C(C.poly.convert(p)) for p in col] for col in N.relations])
        label = "counit " + "Y" + d.spec.label(T)
        try:
            f = ModuleMap(NC, MT, cols)
        except StructuralError:
            out[label] = False
            continue
        out[label] = is_module_iso(f)
    return out


def _surjectivity(d: DescentDatum, prec: Precision, window: int) -> bool:
    """The difference map hits every x^{-k} e_j of the chain-ring module, k <= window.

    Preimages are searched with twice the pole window (capped by the level).
    """
    R = d.spec.ring
    wa = min(2 * window, prec.level - 1)
    for e in _edges(d):
        ring = e.module.ring
        nv = ring.poly.nvars
        s1 = clearing_exponent(ring, e.F1)
        inv_src = d.modules[e.src].ring.inverted
        inv_tgt = d.modules[e.tgt].ring.inverted
        u1 = [s1[v] + (wa if v in inv_src else 0) for v in range(nv)]
        u2 = [wa if v in inv_tgt else 0 for v in range(nv)]
        U = [max(a, b) for a, b in zip(u1, u2)]
        P0, Pt = e.module.lattice(R, prec.level - wa)
        m = inverted_monomial(R, ring)
        if m != R.poly.one:
            P0 = saturate(R, e.module.n_gens, P0, m)[0]
        Pt = [[p.shift(tuple(U)) for p in col] for col in Pt]
        A1 = [[R(p.shift(tuple(a - b for a, b in zip(U, u1)))) for p in col] for col in clear_matrix(ring, e.F1, s1)[0]]
        nt = e.module.n_gens
        A2 = [[R.poly.monomial(tuple(a - b for a, b in zip(U, u2))) if i == j else R.poly.zero for i in range(nt)] for j in range(nt)]
        span = PresentedModule(R, nt, A1 + A2 + P0 + Pt)
        for k in range(window + 1):
            exp = tuple(U[v] - min(k, U[v]) if v in ring.laurent else U[v] for v in range(nv))
            for j in range(nt):
                target = [R.poly.monomial(exp) if i == j else R.poly.zero for i in range(nt)]
                if not span.contains(target):
                    return False
    return True


def _stabilization(d: DescentDatum) -> dict:
    out = {}
    full = frozenset(range(1, d.spec.n + 1))
    try:
        out["Y" + d.spec.label(full)] = tower_stabilized_presentation(d.tower_module(full)).level
    except NoStabilization:
        out["Y" + d.spec.label(full)] = None
    return out


def _glue_once(d: DescentDatum, prec: Precision, attempts: list):
    R = d.spec.ring
    strata = {T: d.modules[T] for T in d.poset.elements}
    edges = _edges(d)
    for window in _window_ladder(prec.level):
        lim = lattice_limit(R, strata, edges, prec.level, window)
        verdicts = _counit(d, lim, prec)
        if all(verdicts.values()):
            verdicts["surjectivity"] = _surjectivity(d, prec, window)
        ok = all(verdicts.values())
        attempts.append((prec.level, window, ok))
        if ok:
            return lim, verdicts
    return None, None


def glue(d: DescentDatum, prec: Precision | None = None, escalate: bool = True) -> GlueReport:
    """Glue a descent datum into a module over the base ring.

    Raises CocycleInvalid when the datum fails its cocycle check, and
    PrecisionExhausted when no window verifies before the precision cap.
    """
    verdict = check_cocycle(d)
    if not verdict:
        raise CocycleInvalid(f"cocycle condition fails on {verdict.triple}: {verdict.witness}", verdict.triple)
    prec = prec or d.prec
    attempts = []
    while True:
        dd = d if prec == d.prec else d.at_precision(prec)
        lim, verdicts = _glue_once(dd, prec, attempts)
        if lim is not None:
            return GlueReport(lim.module, verdicts, prec, lim.window, _stabilization(dd), attempts, lim)
        nxt = prec.escalate() if escalate else None
        if nxt is None:
            raise PrecisionExhausted(
                f"gluing did not verify up to precision {prec.level} (cap {prec.cap})"
            )
        prec = nxt


@dataclass
class RoundtripReport:
    glue: GlueReport | None
    iso: bool
    smith_input: object = None
    smith_output: object = None

    @property
    def smith_agree(self):
        if self.smith_input is None:
            return None
        return self.smith_input == self.smith_output

    @property
    def ok(self) -> bool:
        return self.glue is not None and self.glue.ok and self.iso and self.smith_agree is not False


def _unit(M: PresentedModule, lim: LatticeLimit, d: DescentDatum) -> bool:
    """The canonical map M -> N is an isomorphism."""
    R = M.ring
    total = sum(n for _, n in lim.offsets.values())
    cols = []
    for i in range(M.n_gens):
        vec = [R.poly.zero] * total
        for T, (off, n) in lim.offsets.items():
            vec[off + i] = inverted_monomial(R, d.modules[T].ring, lim.window)
        coeffs = lift(R, vec, lim.gens, lim.relations)
        if coeffs is None:
            return False
        cols.append(coeffs)
    try:
        f = ModuleMap(M, lim.module, cols)
    except StructuralError:
        return False
    return is_module_iso(f)


def verify_roundtrip(M: PresentedModule, spec: DivisorSpec, prec: Precision) -> RoundtripReport:
    """Descend M to its datum, glue it back, and check the result is isomorphic to M.

    Over a univariate polynomial ring the Smith invariants of input and output are
    compared as well.
    """
    p = prec
    while True:
        d = datum_from_module(M, spec, p)
        try:
            rep = glue(d, p, escalate=False)
        except PrecisionExhausted:
            rep = None
        if rep is not None and _unit(M, rep.limit, d):
            out = RoundtripReport(rep, True)
            if len(spec.ring.vars) == 1:
                out.smith_input = smith_invariants(M)
                out.smith_output = smith_invariants(rep.module)
            return out
        p = p.escalate()
        if p is None:
            raise PrecisionExhausted(f"round trip did not verify up to the cap {prec.cap}")
