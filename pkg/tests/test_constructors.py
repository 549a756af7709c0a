import warnings

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from sncdescent.constructors import (
    DivisorSpec,
    Precision,
    chain_ring,
    check_bl_sequence,
    completion_tower,
    localize,
    stratum_ring,
)
from sncdescent.errors import ChainError, PrecisionExhausted, StructuralError
from sncdescent.rings import PresentedRing


def test_precision_escalation():
    p = Precision(8, 64)
    assert p.escalate() == Precision(16, 64)
    assert Precision(64, 64).escalate() is None
    assert Precision(40, 64).escalate() == Precision(64, 64)


def test_localize_univariate():
    R = PresentedRing(["x"])
    L = localize(R, "x")
    assert L.ring.same_presentation(PresentedRing(["x", "t_x"], ["x*t_x - 1"]))
    assert L.units_check()


def test_localize_product_makes_both_units():
    R = PresentedRing(["x", "y"])
    L = localize(R, "x*y")
    P = L.ring.poly
    t = P.gen(L.tvars[0])
    assert L.ring.equal(t * P.gen("x") * P.gen("y"), 1)
    # x is a unit: t*y is its inverse
    assert L.ring.equal(P.gen("x") * (t * P.gen("y")), 1)


def test_localize_at_one_and_zero():
    R = PresentedRing(["x"])
    L = localize(R, 1)
    assert L.ring.equal(L.ring.poly.gen(L.tvars[0]), 1)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        Z = localize(R, 0)
    assert Z.ring.is_zero_ring and caught


def test_completion_tower_levels():
    R = PresentedRing(["x"])
    T = completion_tower(R, [R.gen("x")], 3)
    for n in (1, 2, 3):
        assert T.level(n).same_presentation(PresentedRing(["x"], [f"x^{n}"]))
    S = PresentedRing(["x", "y"])
    T2 = completion_tower(S, [S.gen("x"), S.gen("y")], 2)
    assert T2.level(2).same_presentation(PresentedRing(["x", "y"], ["x^2", "x*y", "y^2"]))


def test_completion_over_localized_base():
    R = PresentedRing(["x", "y"])
    spec = DivisorSpec(R, ["x", "y"])
    T = stratum_ring(spec, ["x"], Precision(3))
    for n in (1, 2, 3):
        assert T.level(n).same_presentation(PresentedRing(["x", "y", "t_y"], ["t_y*y - 1", f"x^{n}"]))


def test_transitions_compose():
    R = PresentedRing(["x", "y"])
    T = completion_tower(R, [R.gen("x"), R.gen("y")], 4)
    for n in range(1, 3):
        assert T.transition(n + 1, n).compose(T.transition(n + 2, n + 1)).equals(T.transition(n + 2, n))


def test_stratum_rings_a1():
    R = PresentedRing(["x"])
    spec = DivisorSpec(R, ["x"])
    prec = Precision(5)
    Y = stratum_ring(spec, [], prec)
    assert Y.ring.same_presentation(PresentedRing(["x", "t_x"], ["x*t_x - 1"]))
    D = stratum_ring(spec, ["x"], prec)
    plain = completion_tower(R, [R.gen("x")], 5)
    assert all(a.same_presentation(b) for a, b in zip(D.levels, plain.levels))


def test_chain_of_length_one_is_the_stratum_ring():
    R = PresentedRing(["x", "y"])
    spec = DivisorSpec(R, ["x", "y"])
    prec = Precision(4)
    for T in (["x"], ["y"], ["x", "y"]):
        c = chain_ring(spec, [T], prec)
        s = stratum_ring(spec, T, prec)
        assert all(a.same_presentation(b) for a, b in zip(c.tower.levels, s.levels))


def test_chain_ring_a1_is_laurent():
    R = PresentedRing(["x"])
    spec = DivisorSpec(R, ["x"])
    C = chain_ring(spec, [[], ["x"]], Precision(6))
    assert C.laurent_vars == ("x",)
    assert C.describe() == "(QQ[])((x)) at precision 6"


def test_chain_ring_crossing():
    R = PresentedRing(["x", "y"])
    spec = DivisorSpec(R, ["x", "y"])
    C = chain_ring(spec, [[], ["x", "y"]], Precision(3))
    assert C.laurent_vars == ("x", "y")
    xy = C.element("x*y")
    assert (xy * C.element("x^-1*y^-1")).equals(1)
    u = C.element("1 - x - y")
    assert (u.inverse() * u).equals(1)
    with pytest.raises(ValueError):
        C.element("x + y").inverse()
    # the middle chain ring keeps y plainly inverted over the completion in x
    M = chain_ring(spec, [[], ["x"]], Precision(3))
    assert M.laurent_vars == ("x",) and M.localized is not None


def test_bad_chains():
    spec = DivisorSpec(PresentedRing(["x", "y"]), ["x", "y"])
    with pytest.raises(ChainError):
        chain_ring(spec, [["x"], ["y"]], Precision(3))
    with pytest.raises(ChainError):
        chain_ring(spec, [], Precision(3))
    with pytest.raises(ChainError):
        spec.subset(["z"])


def test_laurent_normalize_examples():
    spec = DivisorSpec(PresentedRing(["x"]), ["x"])
    C = chain_ring(spec, [[], ["x"]], Precision(5))
    one = C.element("x") * C.element("x^-1")
    assert one.equals(1) and one.pole_order == 0
    s = C.element("x^-1 + 1") + C.element("-x^-1")
    assert s.equals(1) and s.pole_order == 0
    inv = C.element("1 - x").inverse()
    assert inv.terms() == {(k,): 1 for k in range(5)}
    assert (inv * C.element("1 - x")).equals(1)


def test_total_precision_loss_raises():
    spec = DivisorSpec(PresentedRing(["x"]), ["x"])
    C = chain_ring(spec, [[], ["x"]], Precision(3))
    a = C.element("x", exact=False) - C.element("x", exact=False)
    with pytest.raises(PrecisionExhausted):
        a * C.element("x^-3")


def test_negative_power_of_completed_variable_rejected():
    spec = DivisorSpec(PresentedRing(["x", "y"]), ["x"])
    C = chain_ring(spec, [["x"]], Precision(3))
    with pytest.raises(StructuralError):
        C.element("x^-1")


_RING = chain_ring(DivisorSpec(PresentedRing(["x"]), ["x"]), [[], ["x"]], Precision(6))
_exact_terms = st.dictionaries(st.integers(-3, 7), st.integers(-4, 4), max_size=4)
# truncated operands get small poles so that no product loses every digit
_trunc_terms = st.dictionaries(st.integers(-1, 7), st.integers(-4, 4), max_size=4)


def _elem(d, exact):
    return _RING.element({(k,): c for k, c in d.items()}, exact=exact)


@settings(max_examples=200, deadline=None)
@given(_trunc_terms, _trunc_terms, _exact_terms)
def test_laurent_ring_axioms(a, b, c):
    a, b, c = _elem(a, False), _elem(b, False), _elem(c, True)
    assert ((a + b) + c).equals(a + (b + c))
    assert (a * (b + c)).equals(a * b + a * c)
    assert ((a * b) * c).equals(a * (b * c))


def test_laurent_product_matches_sympy(rng):
    x = sympy.Symbol("x")
    for _ in range(30):
        da = {rng.randint(-2, 5): rng.randint(-3, 3) for _ in range(3)}
        db = {rng.randint(-2, 5): rng.randint(-3, 3) for _ in range(3)}
        a, b = _elem(da, False), _elem(db, True)
        p = a * b
        oracle = sympy.expand(sum(c * x ** k for k, c in da.items()) * sum(c * x ** k for k, c in db.items()))
        prec = [p.precision]
        got = sum(c * x ** e[0] for e, c in p.terms().items())
        poly = sympy.Poly(sympy.expand(oracle * x ** 20), x)
        truncated = sum(c * x ** (m[0] - 20) for m, c in zip(poly.monoms(), poly.coeffs()) if m[0] - 20 < prec[0])
        assert sympy.expand(got - truncated) == 0


def test_bl_sequence_small():
    rep = check_bl_sequence(PresentedRing(["x"]), "x", Precision(6), 4)
    assert rep.exact and not rep.witnesses
    rep = check_bl_sequence(PresentedRing(["x", "y"]), "x", Precision(4), 3)
    assert rep.exact
