import random

import pytest
import sympy

from sncdescent.constructors import completion_tower
from sncdescent.modules import PresentedModule
from sncdescent.poly import Polynomial
from sncdescent.towers import module_to_tower


def to_sympy(p: Polynomial, symbols=None):
    """Independent view of a polynomial as a sympy expression (exact rationals)."""
    symbols = symbols or sympy.symbols(p.ring.vars)
    if not isinstance(symbols, (list, tuple)):
        symbols = [symbols]
    expr = sympy.Integer(0)
    for exp, c in p.terms.items():
        term = sympy.Rational(c.numerator, c.denominator)
        for s, k in zip(symbols, exp):
            term *= s ** k
        expr += term
    return sympy.expand(expr)


def random_poly(rng, ring, terms=3, deg=3):
    p = ring.zero
    for _ in range(rng.randint(0, terms)):
        e = tuple(rng.randint(0, deg) for _ in ring.vars)
        p = p + ring.monomial(e, rng.randint(-5, 5))
    return p


def sympy_invariants(M):
    """Invariant factors from sympy's Smith normal form over QQ[x]."""
    from sympy.matrices.normalforms import smith_normal_form

    x = sympy.Symbol("x")
    rows = [[to_sympy(p, [x]) for p in row] for row in M.matrix]
    if not rows or not rows[0]:
        return M.n_gens, []
    S = smith_normal_form(sympy.Matrix(rows), domain=sympy.QQ[x])
    diag = [S[i, i] for i in range(min(S.shape)) if S[i, i] != 0]
    factors = sorted(str(sympy.Poly(d, x).monic().as_expr()) for d in diag if sympy.Poly(d, x).degree() > 0)
    return M.n_gens - len(diag), factors


def tensor_limit_levels_agree(M: PresentedModule, depth: int) -> bool:
    """Level n of the tower, lifted to the base, spans the same submodule as M's relations + a^n."""
    R = M.ring
    x = R.gen("x")
    T = module_to_tower(M, completion_tower(R, [x], depth))
    for n in range(1, depth + 1):
        m = M.n_gens
        an = [[x ** n if i == r else R.poly.zero for i in range(m)] for r in range(m)]
        lifted = PresentedModule(R, m, [[R(R.poly.convert(p)) for p in c] for c in T.level(n).relations] + an)
        direct = PresentedModule(R, m, M.relations + an)
        if not lifted.same_submodule(direct):
            return False
    return True


@pytest.fixture
def rng():
    return random.Random(1234)


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
