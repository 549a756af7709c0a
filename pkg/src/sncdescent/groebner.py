"""Buchberger's algorithm for ideals and for submodules of free modules.

Vectors of a free module R^m are plain dicts mapping ``(component, exponent)`` to a
nonzero coefficient; an ideal is the case m = 1. Terms are compared position over
term: a lower component index beats any term of a higher component, so a basis
computed for ``(target | tracking)`` vectors eliminates the target block.
"""

from __future__ import annotations

import heapq

from .poly import MonomialOrder, Polynomial


def term_key(order: MonomialOrder):
    okey = order.key
    return lambda t: (-t[0], okey(t[1]))


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def leading_term(v: dict, key):
    return max(v, key=key)


class _Basis:
    """Working set of monic vectors indexed by leading component."""

    def __init__(self, key):
        self.key = key
        self.items = []  # (comp, exp, vec)
        self.by_comp = {}

    def add(self, vec):
        t = max(vec, key=self.key)
        lc = vec[t]
        if lc != 1:
            vec = {k: c / lc for k, c in vec.items()}
        idx = len(self.items)
        self.items.append((t[0], t[1], vec))
        self.by_comp.setdefault(t[0], []).append(idx)
        return idx

    def reduce(self, v: dict, full: bool = True, skip=()) -> dict:
        v = dict(v)
        rem = {}
        key = self.key
        items = self.items
        while v:
            t = max(v, key=key)
            c = v[t]
            comp, e = t
            for idx in self.by_comp.get(comp, ()):
                if idx in skip:
                    continue
                _, ge, gvec = items[idx]
                if _divides(ge, e):
                    shift = _sub(e, ge)
                    for (gc, gx), gco in gvec.items():
                        k = (gc, tuple(a + b for a, b in zip(gx, shift)))
                        nv = v.get(k, 0) - c * gco
                        if nv:
                            v[k] = nv
                        else:
                            v.pop(k, None)
                    break
            else:
                if not full:
                    rem.update(v)
                    return rem
                rem[t] = c
                del v[t]
        return rem


def groebner_vectors(gens, order: MonomialOrder) -> list:
    """Reduced, monic Gröbner basis of the submodule spanned by ``gens`` (list of vector dicts)."""
    key = term_key(order)
    okey = order.key
    B = _Basis(key)
    gens = [dict(g) for g in gens if g]
    single = all(c == 0 for g in gens for (c, _) in g)
    # cheap generators first keeps intermediate growth down
    gens.sort(key=lambda g: (len(g), max(map(key, g))))
    pairs = []
    pending = set()
    counter = 0

    def push_pairs(j):
        nonlocal counter
        cj, ej, _ = B.items[j]
        for i in range(j):
            ci, ei, _ = B.items[i]
            if ci != cj:
                continue
            l = _lcm(ei, ej)
            if single and all(min(a, b) == 0 for a, b in zip(ei, ej)):
                continue
            counter += 1
            heapq.heappush(pairs, (sum(l), okey(l), counter, i, j))
            pending.add((i, j))

    for g in gens:
        r = B.reduce(g)
        if r:
            push_pairs(B.add(r))

    while pairs:
        _, _, _, i, j = heapq.heappop(pairs)
        pending.discard((i, j))
        ci, ei, gi = B.items[i]
        _, ej, gj = B.items[j]
        l = _lcm(ei, ej)
        # chain criterion
        skip = False
        for k in B.by_comp.get(ci, ()):
            if k == i or k == j:
                continue
            if _divides(B.items[k][1], l):
                a, b = (i, k) if i < k else (k, i)
                c, d = (j, k) if j < k else (k, j)
                if (a, b) not in pending and (c, d) not in pending:
                    skip = True
                    break
        if skip:
            continue
        si = _sub(l, ei)
        sj = _sub(l, ej)
        s = {}
        for (c, x), co in gi.items():
            k = (c, tuple(a + b for a, b in zip(x, si)))
            s[k] = s.get(k, 0) + co
        for (c, x), co in gj.items():
            k = (c, tuple(a + b for a, b in zip(x, sj)))
            nv = s.get(k, 0) - co
            if nv:
                s[k] = nv
            else:
                s.pop(k, None)
        r = B.reduce(s)
        if r:
            push_pairs(B.add(r))

    return _interreduce(B, key)


def _interreduce(B: _Basis, key) -> list:
    keep = []
    items = B.items
    for idx, (c, e, _) in enumerate(items):
        redundant = False
        for jdx in B.by_comp.get(c, ()):
            if jdx == idx:
                continue
            e2 = items[jdx][1]
            if _divides(e2, e) and (e2 != e or jdx < idx):
                redundant = True
                break
        if not redundant:
            keep.append(idx)
    R = _Basis(key)
    for idx in keep:
        R.add(items[idx][2])
    out = []
    for idx in range(len(R.items)):
        c, e, vec = R.items[idx]
        lead = (c, e)
        tail = {k: v for k, v in vec.items() if k != lead}
        red = R.reduce(tail, skip=(idx,))
        red[lead] = vec[lead]
        out.append(red)
    out.sort(key=lambda v: max(map(key, v)), reverse=True)
    return out


def reduce_vector(v: dict, basis: list, order: MonomialOrder) -> dict:
    """Full reduction of ``v`` by a list of vectors (normally a Gröbner basis)."""
    B = _Basis(term_key(order))
    for g in basis:
        B.add(g)
    return B.reduce(v)


class VectorReducer:
    """Reusable reducer for repeated normal forms against one Gröbner basis."""

    def __init__(self, basis: list, order: MonomialOrder):
        self.basis = basis
        self._b = _Basis(term_key(order))
        for g in basis:
            self._b.add(g)

    def __call__(self, v: dict) -> dict:
        return self._b.reduce(v)


# -- polynomial (ideal) front end ------------------------------------------------

def _as_vec(p: Polynomial) -> dict:
    return {(0, e): c for e, c in p.terms.items()}


def _as_poly(ring, v: dict) -> Polynomial:
    return Polynomial(ring, {e: c for (_, e), c in v.items()})


def groebner_basis(gens, order: MonomialOrder | None = None) -> list:
    """Reduced Gröbner basis (monic, sorted by decreasing leading term) of the ideal of ``gens``."""
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        return []
    ring = gens[0].ring
    if any(g.ring != ring for g in gens):
        raise ValueError("generators live in different rings")
    if order is not None and order != ring.order:
        ring = ring.with_order(order)
        gens = [ring.convert(g) for g in gens]
    basis = groebner_vectors([_as_vec(g) for g in gens], ring.order)
    return [_as_poly(ring, v) for v in basis]


def normal_form(p: Polynomial, basis: list) -> Polynomial:
    """Remainder of ``p`` on division by ``basis`` (unique when ``basis`` is a Gröbner basis)."""
    if basis and any(b.ring.vars != p.ring.vars for b in basis):
        raise ValueError("normal_form: polynomial and basis live in different rings")
    if not basis or p.is_zero():
        return p
    order = basis[0].ring.order
    r = reduce_vector(_as_vec(p), [_as_vec(b) for b in basis], order)
    return _as_poly(p.ring, r)
