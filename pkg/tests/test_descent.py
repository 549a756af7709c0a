import random

import pytest

from sncdescent.constructors import DivisorSpec, Precision
from sncdescent.descent import DescentDatum, check_cocycle, datum_from_module, glue, verify_roundtrip
from sncdescent.diagrams import ChainModule, chain_module_is_zero, ring_diagram
from sncdescent.errors import CocycleInvalid, PrecisionExhausted, StructuralError
from sncdescent.modules import PresentedModule
from sncdescent.rings import PresentedRing
from sncdescent.samples import a1_suite, broken_cocycle_datum, random_qx_module, torsion_module
from sncdescent.smith import smith_invariants

E, X = frozenset(), frozenset({1})


def _a1():
    R = PresentedRing(["x"])
    return R, DivisorSpec(R, ["x"])


def rank_one_datum(rho, prec, exact=False):
    R, spec = _a1()
    d = ring_diagram(spec, prec)
    mods = {E: ChainModule(d.ring((E,)), 1), X: ChainModule(d.ring((X,)), 1)}
    return DescentDatum(spec, prec, mods, {(E, X): [[d.ring((E, X)).element(rho, exact=exact)]]})


def torsion_datum(prec):
    R, spec = _a1()
    d = ring_diagram(spec, prec)
    mods = {E: ChainModule(d.ring((E,)), 0), X: ChainModule(d.ring((X,)), 1, [["x^3"]])}
    return DescentDatum(spec, prec, mods, {(E, X): []})


# -- data from modules -------------------------------------------------------------

def test_datum_of_free_module():
    R, spec = _a1()
    d = datum_from_module(PresentedModule.free(R, 1), spec, Precision(4))
    assert d.modules[E].n_gens == 1 and d.modules[E].relations == []
    assert d.modules[X].n_gens == 1 and d.modules[X].relations == []
    assert d.rho[(E, X)][0][0].equals(1)
    assert d.rho_is_iso(E, X)


def test_datum_of_torsion_module():
    R, spec = _a1()
    d = datum_from_module(torsion_module(R, 0, [2]), spec, Precision(4))
    assert chain_module_is_zero(d.modules[E])
    T = d.tower_module(["x"])
    x = R.gen("x")
    for n in range(1, 5):
        lifted = PresentedModule(R, 1, [[R(p) for p in c] for c in T.level(n).relations] + [[x ** n]])
        assert lifted.same_submodule(PresentedModule(R, 1, [[x ** min(n, 2)]]))


def test_datum_on_crossing():
    R = PresentedRing(["x", "y"])
    spec = DivisorSpec(R, ["x", "y"])
    d = datum_from_module(torsion_module(R, 0, [1]), spec, Precision(3))
    for T in d.poset.elements:
        assert chain_module_is_zero(d.modules[T]) == (1 not in T)


def test_datum_needs_the_divisor_ring():
    _, spec = _a1()
    with pytest.raises(StructuralError):
        datum_from_module(PresentedModule.free(PresentedRing(["y"]), 1), spec, Precision(3))


# -- cocycle ---------------------------------------------------------------------

def test_cocycle_of_module_datum():
    R = PresentedRing(["x", "y"])
    d = datum_from_module(PresentedModule.free(R, 2), DivisorSpec(R, ["x", "y"]), Precision(3))
    assert check_cocycle(d)


def test_broken_cocycle_witness():
    v = check_cocycle(broken_cocycle_datum())
    assert not v
    assert v.triple == ("Y{}", "Y{x}", "Y{x,y}")


def test_cocycle_vacuous_for_one_component():
    assert check_cocycle(rank_one_datum("x^-1 + 3", Precision(4)))


def test_glue_refuses_broken_cocycle():
    with pytest.raises(CocycleInvalid) as exc:
        glue(broken_cocycle_datum())
    assert exc.value.witness == ("Y{}", "Y{x}", "Y{x,y}")


# -- gluing ------------------------------------------------------------------------

def test_glue_trivial_datum():
    R, spec = _a1()
    rep = glue(datum_from_module(PresentedModule.free(R, 1), spec, Precision(4)))
    assert rep.ok and smith_invariants(rep.module) == (1, ())


def test_glue_twisted_by_x_squared():
    rep = glue(rank_one_datum("x^2", Precision(8)))
    assert rep.ok and rep.window == 2
    assert smith_invariants(rep.module) == (1, ())


def test_glue_torsion_datum():
    R, _ = _a1()
    rep = glue(torsion_datum(Precision(8)))
    assert rep.ok
    assert smith_invariants(rep.module) == (0, (R.gen("x") ** 3,))
    assert rep.stabilization == {"Y{x}": 4}


@pytest.mark.parametrize("rho", ["x^-3 + 1 + x", "-x^5 + 2*x^6", "1/2 - x^2", "x^-1"])
def test_counit_for_unit_comparison_maps(rho):
    rep = glue(rank_one_datum(rho, Precision(8)))
    assert rep.counit and rep.verdicts["surjectivity"]
    assert smith_invariants(rep.module) == (1, ())


def test_under_precise_map_exhausts():
    # 2x^4 + x^5 truncated at level 4 is zero
    with pytest.raises(PrecisionExhausted):
        glue(rank_one_datum("2*x^4 + x^5", Precision(3, 4)))


def test_escalation_records_attempts():
    rep = glue(rank_one_datum("x^2", Precision(2, 8), exact=True))
    assert rep.ok and rep.precision.level > 2
    assert rep.attempts[0][0] == 2 and not rep.attempts[0][2]


def test_precision_monotone_on_suite():
    R, spec = _a1()
    for name, M in a1_suite(R):
        for level in (4, 8):
            d = datum_from_module(M, spec, Precision(level, level))
            assert glue(d, escalate=False).ok, (name, level)


# -- round trips -----------------------------------------------------------------------

def test_roundtrip_free_plus_torsion():
    R, spec = _a1()
    rep = verify_roundtrip(torsion_module(R, 1, [2]), spec, Precision(6))
    assert rep.ok and rep.iso and rep.smith_agree
    assert rep.smith_input == (1, (R.gen("x") ** 2,))


def test_roundtrip_zero_module():
    R, spec = _a1()
    rep = verify_roundtrip(PresentedModule.from_rows(R, [["1"]]), spec, Precision(4))
    assert rep.ok and rep.glue.module.is_zero()


def test_roundtrip_crossing_free():
    R = PresentedRing(["x", "y"])
    rep = verify_roundtrip(PresentedModule.free(R, 1), DivisorSpec(R, ["x", "y"]), Precision(4))
    assert rep.ok and rep.smith_agree is None


def test_unit_law_random():
    R, spec = _a1()
    rng = random.Random(99)
    for _ in range(8):
        assert verify_roundtrip(random_qx_module(rng, R), spec, Precision(8)).ok
