"""Smith normal form over k[x], used as an independent oracle for module isomorphism.

Works on dense coefficient lists (lowest degree first) and shares no code with the
Gröbner machinery.
"""

from __future__ import annotations

from typing import NamedTuple

from .errors import UnsupportedError
from .poly import Polynomial


def _trim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _deg(a):
    return len(a) - 1


def _sub(a, b):
    n = max(len(a), len(b))
    zero = (a or b or [0])[0] * 0
    return _trim([(a[i] if i < len(a) else zero) - (b[i] if i < len(b) else zero) for i in range(n)])


def _mul(a, b):
    if not a or not b:
        return []
    out = [a[0] * 0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _trim(out)


def _divmod(a, b):
    a = _trim(a)
    q = [b[-1] * 0] * max(len(a) - len(b) + 1, 0)
    lead = b[-1]
    while a and len(a) >= len(b):
        c = a[-1] / lead
        k = len(a) - len(b)
        q[k] = c
        a = _sub(a, [b[-1] * 0] * k + [c * y for y in b])
    return _trim(q), a


def _monic(a):
    return [c / a[-1] for c in a] if a else a


class SmithInvariants(NamedTuple):
    rank: int
    factors: tuple  # monic Polynomials d_1 | d_2 | ... of positive degree


def smith_diagonal(matrix):
    """Diagonal of the Smith form of a matrix of coefficient lists (rows of columns)."""
    A = [[_trim(e) for e in row] for row in matrix]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        # pivot: nonzero entry of least degree in the trailing block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or _deg(A[i][j]) < _deg(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q, r = _divmod(A[i][t], p)
                    A[i] = [_sub(A[i][k], _mul(q, A[t][k])) for k in range(n)]
                    if r:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q, r = _divmod(A[t][j], p)
                    for row in A:
                        row[j] = _sub(row[j], _mul(q, row[t]))
                    if r:
                        done = False
            if not done:
                # a smaller remainder appeared: move it to the pivot slot and repeat
                best = None
                for i in range(t, m):
                    if A[i][t] and (best is None or _deg(A[i][t]) < _deg(A[best][t])):
                        best = i
                A[t], A[best] = A[best], A[t]
                bj = None
                for j in range(t, n):
                    if A[t][j] and (bj is None or _deg(A[t][j]) < _deg(A[t][bj])):
                        bj = j
                for row in A:
                    row[t], row[bj] = row[bj], row[t]
                continue
            # enforce divisibility of the trailing block by the pivot
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] and _divmod(A[i][j], p)[1]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            A[t] = [_sub(A[t][k], [c * -1 for c in A[bad][k]]) if A[bad][k] else A[t][k] for k in range(n)]
        diag.append(_monic(A[t][t]))
        t += 1
    return diag


def smith_invariants(M) -> SmithInvariants:
    """Free rank and invariant factors of a presented module over k[x] (no relations)."""
    ring = M.ring
    if len(ring.vars) != 1 or ring.relations:
        raise UnsupportedError("smith_invariants needs a univariate polynomial ring without relations")
    zero = ring.field.zero

    def dense(p: Polynomial):
        if p.is_zero():
            return []
        d = p.degree()
        out = [zero] * (d + 1)
        for (k,), c in p.terms.items():
            out[k] = c
        return out

    diag = smith_diagonal([[dense(e) for e in row] for row in M.matrix])
    nonzero = [d for d in diag if d]
    factors = tuple(
        Polynomial(ring.poly, {(k,): c for k, c in enumerate(d) if c}) for d in nonzero if _deg(d) > 0
    )
    return SmithInvariants(M.n_gens - len(nonzero), factors)
