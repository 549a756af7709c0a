"""Exact dense linear algebra over a field (row reduction, null spaces)."""

from __future__ import annotations


def rref(rows, ncols: int):
    """Reduced row echelon form; returns (rows, pivot columns)."""
    A = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def nullspace(rows, ncols: int, one=1):
    """Basis of {v : A v = 0}."""
    R, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    zero = one * 0
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(v)
    return basis


def rank(rows, ncols: int) -> int:
    return len(rref(rows, ncols)[1])
