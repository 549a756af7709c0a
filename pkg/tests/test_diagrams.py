import itertools

import pytest

from sncdescent.constructors import DivisorSpec, Precision
from sncdescent.diagrams import (
    ChainModule,
    DiagramModule,
    chain_module_is_zero,
    chain_module_iso,
    grothendieck_construction,
    is_cocartesian_diagram,
    kan_limit,
    nerve,
    ring_diagram,
    strata_poset,
)
from sncdescent.errors import UnsupportedError
from sncdescent.modules import PresentedModule
from sncdescent.rings import PresentedRing
from sncdescent.samples import brute_force_chain_counts
from sncdescent.smith import smith_invariants

E, X, Y, XY = frozenset(), frozenset({1}), frozenset({2}), frozenset({1, 2})


def _brute_strict_pairs(n):
    subsets = [frozenset(c) for k in range(n + 1) for c in itertools.combinations(range(n), k)]
    return sum(1 for a, b in itertools.product(subsets, repeat=2) if a < b)


@pytest.mark.parametrize("n,size,rels", [(1, 2, 1), (2, 4, 5), (3, 8, 19)])
def test_poset_sizes(n, size, rels):
    P = strata_poset(n)
    assert len(P) == size
    assert len(P.strict_relations()) == rels == 3 ** n - 2 ** n == _brute_strict_pairs(n)


def test_poset_bounds():
    with pytest.raises(UnsupportedError):
        strata_poset(0)
    with pytest.raises(UnsupportedError):
        strata_poset(6)


@pytest.mark.parametrize("n,counts", [(1, (2, 1, 0)), (2, (4, 5, 2, 0)), (3, (8, 19, 18))])
def test_nerve_counts(n, counts):
    assert nerve(strata_poset(n)).counts(len(counts)) == counts


def test_nerve_counts_match_brute_force():
    for n in range(1, 5):
        nv = nerve(strata_poset(n))
        for m in range(1, n + 3):
            assert len(nv.S(m)) == brute_force_chain_counts(n, m)


def test_inclusion_exclusion_for_triples():
    n = 3
    assert len(nerve(strata_poset(n)).S(3)) == 4 ** n - 2 * 3 ** n + 2 ** n


def test_face_identities():
    for n in (1, 2, 3):
        assert nerve(strata_poset(n)).check_identities()


def test_face_maps():
    c = (E, X, XY)
    assert nerve(strata_poset(2)).face(c, 1) == (E, XY)
    with pytest.raises(IndexError):
        nerve(strata_poset(2)).face(c, 3)


def test_grothendieck_construction_n1():
    cat = grothendieck_construction(nerve(strata_poset(1)))
    assert len(cat) == 3
    arrows = cat.non_identity()
    assert len(arrows) == 2
    assert {(f.src, f.tgt) for f in arrows} == {((E,), (E, X)), ((X,), (E, X))}
    assert cat.check_composition()


def test_grothendieck_construction_n2():
    cat = grothendieck_construction(nerve(strata_poset(2)))
    assert len(cat) == 11
    assert cat.check_composition()
    assert set(cat.slice_over((E, X, XY))) == {(E,), (X,), (XY,), (E, X), (E, XY), (X, XY), (E, X, XY)}


def test_ring_diagram_n1_shape():
    spec = DivisorSpec(PresentedRing(["x"]), ["x"])
    d = ring_diagram(spec, Precision(4))
    assert set(d.rings) == {(E,), (X,), (E, X)}
    assert d.ring((E,)).tower is None and d.ring((E,)).localized is not None
    assert d.ring((X,)).laurent_vars == () and d.ring((X,)).tower is not None
    assert d.ring((E, X)).laurent_vars == ("x",)


def test_ring_diagram_functoriality():
    for names in (["x"], ["x", "y"]):
        spec = DivisorSpec(PresentedRing(names), names)
        assert ring_diagram(spec, Precision(3)).check_functoriality()


def test_module_diagram_is_cocartesian():
    for names in (["x"], ["x", "y"]):
        R = PresentedRing(names)
        d = ring_diagram(DivisorSpec(R, names), Precision(4))
        M = PresentedModule(R, 2, [["x", "0"]])
        assert is_cocartesian_diagram(DiagramModule.from_module(d, M))


def _diagram_with_map(names, key, value):
    R = PresentedRing(names)
    d = ring_diagram(DivisorSpec(R, names), Precision(4))
    M = DiagramModule.from_module(d, PresentedModule.free(R, 1))
    maps = dict(M.maps)
    maps[key] = [[d.rings[key[1]].element(value)]]
    return DiagramModule(d, M.modules, maps)


def test_zero_structure_map_is_not_cocartesian():
    key = ((E,), (E, X))
    v = is_cocartesian_diagram(_diagram_with_map(["x"], key, 0))
    assert not v and v.morphism == key


def test_unit_structure_map_is_cocartesian():
    # every nonzero element of the truncated Laurent field is a unit
    assert is_cocartesian_diagram(_diagram_with_map(["x"], ((E,), (E, X)), "x^2 + x^3"))


def test_perturbed_structure_map_is_not_cocartesian():
    # 1 + y is not a unit over k[y, 1/y]((x))
    key = ((E,), (E, X))
    v = is_cocartesian_diagram(_diagram_with_map(["x", "y"], key, "1 + y"))
    assert not v and v.morphism == key


def test_chain_module_iso_examples():
    spec = DivisorSpec(PresentedRing(["x"]), ["x"])
    d = ring_diagram(spec, Precision(6))
    C = d.ring((E, X))
    F = ChainModule(C, 1)
    assert chain_module_iso(F, F, [[C.element("x^2")]])
    assert chain_module_iso(F, F, [[C.element("x^-3 + 1 + x")]])
    assert not chain_module_iso(F, F, [[C.element(0)]])
    D = d.ring((X,))
    G = ChainModule(D, 1)
    assert not chain_module_iso(G, G, [[D.element("x")]])


def test_chain_module_is_zero():
    spec = DivisorSpec(PresentedRing(["x"]), ["x"])
    d = ring_diagram(spec, Precision(4))
    assert chain_module_is_zero(ChainModule(d.ring((E,)), 1, [["x^3"]]))
    assert not chain_module_is_zero(ChainModule(d.ring((X,)), 1, [["x^3"]]))
    assert chain_module_is_zero(ChainModule(d.ring((X,)), 1, [["1 + x"]]))


def test_kan_limit_single_object():
    R = PresentedRing(["x"])
    d = ring_diagram(DivisorSpec(R, ["x"]), Precision(4))
    M = DiagramModule.from_module(d, PresentedModule.free(R, 1))
    assert kan_limit(M, [(X,)]) is M.modules[(X,)]


@pytest.mark.parametrize("level", [2, 3, 5, 8])
def test_kan_limit_structure_diagram_is_r(level):
    R = PresentedRing(["x"])
    d = ring_diagram(DivisorSpec(R, ["x"]), Precision(level))
    N = kan_limit(DiagramModule.from_module(d, PresentedModule.free(R, 1)))
    assert smith_invariants(N) == (1, ())


def test_kan_limit_discrete_slice_is_product():
    R = PresentedRing(["x"])
    d = ring_diagram(DivisorSpec(R, ["x"]), Precision(5))
    N = kan_limit(DiagramModule.from_module(d, PresentedModule.free(R, 1)), [(E,), (X,)])
    # lattice of R_x (window 0) times R/(x^5)
    assert smith_invariants(N) == (1, (R.gen("x") ** 5,))
