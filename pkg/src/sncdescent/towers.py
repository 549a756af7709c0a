"""Modules over completion towers: the finite stand-in for modules over a completed ring."""

from __future__ import annotations

from dataclasses import dataclass

from .constructors import CompletionTower
from .errors import NoStabilization, StructuralError
from .modules import (
    ModuleMap,
    PresentedModule,
    base_change,
    cokernel,
    kernel_columns,
)
from .rings import RingMorphism


class TowerModule:
    """Modules M_n over tower level n with maps M_{n+1} -> M_n.

    ``transitions[n-1]`` holds the columns (over level n) of the map M_{n+1} -> M_n:
    column j is the image of generator j of M_{n+1}.
    """

    def __init__(self, tower: CompletionTower, levels, transitions=None, check: bool = True):
        levels = list(levels)
        if len(levels) != tower.depth:
            raise StructuralError(f"tower has depth {tower.depth} but {len(levels)} modules were given")
        for n, M in enumerate(levels, start=1):
            if not M.ring.same_presentation(tower.level(n)):
                raise StructuralError(f"module at level {n} is not over {tower.level(n)!r}")
        if transitions is None:
            transitions = []
            for n in range(1, tower.depth):
                if levels[n].n_gens != levels[n - 1].n_gens:
                    raise StructuralError("identity transitions need equal generator counts")
                R = tower.level(n)
                k = levels[n].n_gens
                transitions.append([[R(int(i == j)) for i in range(k)] for j in range(k)])
        if len(transitions) != tower.depth - 1:
            raise StructuralError("wrong number of transition maps")
        self.tower = tower
        self.levels = levels
        self.transitions = [[[tower.level(n)(p) for p in c] for c in cols] for n, cols in enumerate(transitions, start=1)]
        if check:
            for n in range(1, tower.depth):
                self.transition_map(n + 1)

    @property
    def depth(self) -> int:
        return self.tower.depth

    def level(self, n: int) -> PresentedModule:
        return self.levels[n - 1]

    def transition_map(self, n: int) -> ModuleMap:
        """M_n ⊗ R_{n-1} -> M_{n-1} as a checked ModuleMap over level n-1."""
        phi = self.tower.transition(n, n - 1)
        src = base_change(self.level(n), phi)
        return ModuleMap(src, self.level(n - 1), self.transitions[n - 2])

    def composite_cols(self, l: int, k: int) -> list:
        """Columns over level k of the composite M_l -> M_k."""
        R = self.tower.level(k)
        m = self.level(l).n_gens
        cols = [[R(int(i == j)) for i in range(m)] for j in range(m)]
        for n in range(l, k, -1):
            step = self.transitions[n - 2]
            cols = [_mat_vec(R, step, c, self.level(n - 1).n_gens) for c in cols]
        return cols

    def __repr__(self):
        return f"TowerModule(depth={self.depth}, levels={self.levels!r})"


def _mat_vec(R, cols, vec, nrows):
    out = [R.poly.zero] * nrows
    for c, a in zip(cols, vec):
        if not a.is_zero():
            out = [o + a * e for o, e in zip(out, c)]
    return [R.nf(o) for o in out]


def module_to_tower(M: PresentedModule, tower: CompletionTower) -> TowerModule:
    """Level n is M ⊗ R/a^n, with identity transitions."""
    if not M.ring.same_presentation(tower.base):
        raise StructuralError("module is not over the base of the tower")
    levels = [base_change(M, RingMorphism.canonical(tower.base, R)) for R in tower.levels]
    return TowerModule(tower, levels, check=False)


@dataclass
class TowerVerdict:
    ok: bool
    k: int | None = None
    l: int | None = None
    reason: str = ""
    witness: object = None

    def __bool__(self):
        return self.ok


def is_cocartesian_tower(T: TowerModule) -> TowerVerdict:
    """Check exactness of 0 -> a^k M_l -> M_l -> M_k -> 0 for all k < l <= depth.

    The first failure (ordered by l, then k) is returned with a witness: either a
    generator of ker(M_l -> M_k) outside a^k M_l, or a generator of M_k not hit.
    """
    tower = T.tower
    for l in range(2, T.depth + 1):
        Rl = tower.level(l)
        Ml = T.level(l)
        for k in range(1, l):
            Mk = T.level(k)
            cols = T.composite_cols(l, k)
            # surjectivity, over level k
            fk = ModuleMap(base_change(Ml, tower.transition(l, k)), Mk, cols, check=False)
            coker = cokernel(fk)
            if not coker.is_zero():
                miss = next(i for i in range(Mk.n_gens) if not coker.contains([Mk.ring(int(r == i)) for r in range(Mk.n_gens)]))
                return TowerVerdict(False, k, l, "not surjective", f"generator {miss} of M_{k}")
            # kernel, over level l: M_k viewed as a quotient of R_l^m by its relations and a^k
            ak = tower.ideal_power(k)
            m = Mk.n_gens
            extra = [[Rl(g) if i == r else Rl.poly.zero for i in range(m)] for r in range(m) for g in ak]
            mk_rels = [[Rl(p) for p in c] for c in Mk.relations] + extra
            ker = kernel_columns(Rl, [[Rl(p) for p in c] for c in cols], m, mk_rels)
            n = Ml.n_gens
            ak_ml = PresentedModule(
                Rl, n, Ml.relations + [[Rl(g) if i == r else Rl.poly.zero for i in range(n)] for r in range(n) for g in ak]
            )
            for g in ker:
                if not ak_ml.contains(g):
                    return TowerVerdict(False, k, l, "kernel larger than a^k M_l", g)
    return TowerVerdict(True)


@dataclass
class StabilizedPresentation:
    module: PresentedModule
    level: int


def _lifted(T: TowerModule, n: int) -> list:
    """Relations of M_n as columns over the base ring (normal forms lift verbatim)."""
    base = T.tower.base
    return [[base(base.poly.convert(p)) for p in col] for col in T.level(n).relations]


def _plus_power(T: TowerModule, m: int, cols, n: int) -> PresentedModule:
    base = T.tower.base
    zero = base.poly.zero
    power = [[g if i == r else zero for i in range(m)] for r in range(m) for g in T.tower.ideal_power(n)]
    return PresentedModule(base, m, list(cols) + power)


def tower_stabilized_presentation(T: TowerModule, run: int = 3) -> StabilizedPresentation:
    """Lift the tower to a presentation over the base ring.

    The lifted relations N of level s are accepted when N + a^k R^m equals the lifted
    level k module for every k from s to the depth. The reported level is the least
    such s, and at least ``run`` levels must confirm it.
    """
    depth = T.depth
    full = {k: _plus_power(T, T.level(k).n_gens, _lifted(T, k), k) for k in range(1, depth + 1)}
    best = None
    for s in range(depth, 0, -1):
        m = T.level(s).n_gens
        cand = _lifted(T, s)
        if all(
            T.level(k).n_gens == m and _plus_power(T, m, cand, k).same_submodule(full[k])
            for k in range(s, depth + 1)
        ):
            best = (s, m, cand)
        else:
            break
    start = best[0] if best else depth
    if best is None or depth - start + 1 < run:
        seen = depth - start + 1 if best else 0
        raise NoStabilization(
            f"no stable presentation at depth {depth}: {seen} level(s) agree, {run} needed"
        )
    s, m, cand = best
    return StabilizedPresentation(PresentedModule(T.tower.base, m, cand), s)
