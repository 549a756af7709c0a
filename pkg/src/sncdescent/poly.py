"""Sparse multivariate polynomials with exact coefficients."""

from __future__ import annotations

import re

from .field import QQ, Field


class MonomialOrder:
    """A monomial order, given by a sort key on exponent tuples (bigger key = bigger monomial).

    ``block`` is the number of leading variables forming the first (eliminated) block;
    within each block degrevlex is used.
    """

    def __init__(self, name: str = "degrevlex", block: int | None = None):
        if name not in ("lex", "degrevlex", "block"):
            raise ValueError(f"unknown monomial order {name!r}")
        if name == "block" and block is None:
            raise ValueError("block order needs the size of its first block")
        self.name = name
        self.block = block
        if name == "lex":
            self.key = _lex_key
        elif name == "degrevlex":
            self.key = _grevlex_key
        else:
            k = block
            self.key = lambda e: (_grevlex_key(e[:k]), _grevlex_key(e[k:]))

    def __eq__(self, other):
        return isinstance(other, MonomialOrder) and (self.name, self.block) == (other.name, other.block)

    def __hash__(self):
        return hash((self.name, self.block))

    def __repr__(self):
        return self.name if self.name != "block" else f"block({self.block})"


def _lex_key(e):
    return e


def _grevlex_key(e):
    return (sum(e), tuple(-a for a in reversed(e)))


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


class PolyRing:
    """The free polynomial ring k[vars] with a fixed monomial order."""

    def __init__(self, vars, field: Field = QQ, order: MonomialOrder = DEGREVLEX):
        self.vars = tuple(vars)
        if len(set(self.vars)) != len(self.vars):
            raise ValueError("variable names must be distinct")
        self.field = field
        self.order = order
        self.nvars = len(self.vars)
        self._index = {v: i for i, v in enumerate(self.vars)}

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.vars == other.vars
            and self.field == other.field
            and self.order == other.order
        )

    def __hash__(self):
        return hash((self.vars, self.field, self.order))

    def __repr__(self):
        return f"{self.field}[{','.join(self.vars)}]"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"{name!r} is not a variable of {self}") from None

    @property
    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    @property
    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def gen(self, name: str) -> "Polynomial":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): self.field.one})

    def gens(self):
        return [self.gen(v) for v in self.vars]

    def monomial(self, exp, coeff=1) -> "Polynomial":
        return Polynomial(self, {tuple(exp): self.field(coeff)})

    def __call__(self, value) -> "Polynomial":
        """Coerce a scalar, a string or a polynomial (by variable names) into this ring."""
        if isinstance(value, Polynomial):
            return self.convert(value)
        if isinstance(value, str):
            return self.parse(value)
        return self.const(value)

    def convert(self, p: "Polynomial") -> "Polynomial":
        if p.ring == self:
            return p
        idx = [self.index(v) for v in p.ring.vars]
        terms = {}
        for e, c in p.terms.items():
            ne = [0] * self.nvars
            for i, a in zip(idx, e):
                ne[i] = a
            terms[tuple(ne)] = self.field(c)
        return Polynomial(self, terms)

    def parse(self, text: str) -> "Polynomial":
        terms = parse_laurent(text, self.vars, self.field)
        for e in terms:
            if min(e, default=0) < 0:
                raise ValueError(f"negative exponent in polynomial {text!r}")
        return Polynomial(self, terms)

    def with_order(self, order: MonomialOrder) -> "PolyRing":
        return PolyRing(self.vars, self.field, order)

    def extend(self, names, order: MonomialOrder | None = None) -> "PolyRing":
        """Ring with extra variables appended."""
        return PolyRing(self.vars + tuple(names), self.field, order or self.order)


class Polynomial:
    """Element of a :class:`PolyRing`; terms map exponent tuples to nonzero coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = {e: c for e, c in terms.items() if c}

    def _lift(self, other):
        if isinstance(other, Polynomial):
            if other.ring != self.ring:
                return self.ring.convert(other)
            return other
        return self.ring.const(other)

    def __add__(self, other):
        other = self._lift(other)
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Polynomial(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        t = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Polynomial(self.ring, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = self.ring.one
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            try:
                other = self.ring.const(other)
            except (TypeError, ValueError):
                return False
        return self.ring.vars == other.ring.vars and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring.vars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coeff(self):
        return self.terms.get((0,) * self.ring.nvars, self.ring.field.zero)

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        i = self.ring.index(var)
        return max(e[i] for e in self.terms)

    def leading_exp(self):
        return max(self.terms, key=self.ring.order.key)

    def leading_coeff(self):
        return self.terms[self.leading_exp()]

    def monic(self) -> "Polynomial":
        if not self.terms:
            return self
        lc = self.leading_coeff()
        return Polynomial(self.ring, {e: c / lc for e, c in self.terms.items()})

    def scale(self, c) -> "Polynomial":
        return Polynomial(self.ring, {e: c * v for e, v in self.terms.items()})

    def shift(self, exp) -> "Polynomial":
        """Multiply by the monomial with exponent vector ``exp``."""
        return Polynomial(self.ring, {tuple(a + b for a, b in zip(e, exp)): c for e, c in self.terms.items()})

    def substitute(self, images) -> "Polynomial":
        """Evaluate with variable i replaced by ``images[i]`` (polynomials in a common ring)."""
        images = list(images)
        if not images:
            raise ValueError("no images given")
        target = images[0].ring
        result = target.zero
        powers = [{0: target.one, 1: im} for im in images]

        def pw(i, k):
            cache = powers[i]
            if k not in cache:
                cache[k] = images[i] ** k
            return cache[k]

        acc = {}
        for e, c in self.terms.items():
            m = target.const(c)
            for i, k in enumerate(e):
                if k:
                    m = m * pw(i, k)
            for te, tc in m.terms.items():
                acc[te] = acc.get(te, 0) + tc
        result = Polynomial(target, acc)
        return result

    def __repr__(self):
        return format_terms(self.terms, self.ring.vars, self.ring.order)


def format_terms(terms: dict, names, order: MonomialOrder = DEGREVLEX) -> str:
    """Infix text for a term dict; exponents may be negative (Laurent terms)."""
    if not terms:
        return "0"
    out = []
    for e in sorted(terms, key=order.key, reverse=True):
        c = terms[e]
        mono = "*".join(n if a == 1 else f"{n}^{a}" for n, a in zip(names, e) if a)
        cs = str(c)
        neg = cs.startswith("-")
        if neg:
            cs = cs[1:]
        if mono:
            body = mono if cs == "1" else f"{cs}*{mono}"
        else:
            body = cs
        if not out:
            out.append("-" + body if neg else body)
        else:
            out.append(("- " if neg else "+ ") + body)
    return " ".join(out)


class ParseError(ValueError):
    """Malformed polynomial text; ``pos`` is the 0-based column of the problem."""

    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at column {pos + 1}")
        self.msg = msg
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def parse_laurent(text: str, names, field: Field = QQ) -> dict:
    """Parse infix text such as ``3*x^2*y - 1/2`` or ``x^-2 + 1`` into a term dict.

    Exponents may be negative; division is only allowed by constants and monomials.
    """
    tokens = []
    pos = 0
    text_s = text.rstrip()
    while pos < len(text_s):
        m = _TOKEN.match(text_s, pos)
        if not m or m.end() == pos:
            pos += len(text_s[pos:]) - len(text_s[pos:].lstrip())
            raise ParseError(f"unexpected character {text_s[pos]!r}", pos)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), m.lastindex, start))
        pos = m.end()
    if not tokens:
        raise ParseError("empty polynomial", 0)
    n = len(names)
    index = {v: i for i, v in enumerate(names)}
    zero = (0,) * n

    def add(a, b, sign=1):
        t = dict(a)
        for e, c in b.items():
            t[e] = t.get(e, 0) + sign * c
        return {e: c for e, c in t.items() if c}

    def mul(a, b):
        t = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return {e: c for e, c in t.items() if c}

    def power(a, k, at):
        if k < 0:
            if len(a) != 1:
                raise ParseError("negative power of a non-monomial", at)
            (e, c), = a.items()
            return {tuple(x * k for x in e): field(1) / c ** (-k)}
        r = {zero: field(1)}
        for _ in range(k):
            r = mul(r, a)
        return r

    i = 0

    def peek():
        return tokens[i] if i < len(tokens) else (None, None, len(text_s))

    def take():
        nonlocal i
        t = peek()
        i += 1
        return t

    def expr():
        sign = 1
        tok = peek()
        if tok[0] in ("+", "-"):
            take()
            sign = -1 if tok[0] == "-" else 1
        acc = term()
        if sign < 0:
            acc = {e: -c for e, c in acc.items()}
        while peek()[0] in ("+", "-"):
            op = take()[0]
            acc = add(acc, term(), 1 if op == "+" else -1)
        return acc

    def term():
        acc = factor()
        while peek()[0] in ("*", "/") or (peek()[1] in (1, 2) or peek()[0] == "("):
            tok = peek()
            if tok[0] == "*":
                take()
                acc = mul(acc, factor())
            elif tok[0] == "/":
                take()
                at = peek()[2]
                d = factor()
                acc = mul(acc, power(d, -1, at))
            else:
                acc = mul(acc, factor())
        return acc

    def factor():
        base = atom()
        if peek()[0] in ("^", "**"):
            take()
            sign = 1
            if peek()[0] == "-":
                take()
                sign = -1
            tok = take()
            if tok[1] != 1:
                raise ParseError("expected an integer exponent", tok[2])
            base = power(base, sign * int(tok[0]), tok[2])
        return base

    def atom():
        tok = take()
        val, kind, at = tok
        if kind == 1:
            return {zero: field(int(val))}
        if kind == 2:
            if val not in index:
                raise ParseError(f"unknown variable {val!r}", at)
            e = [0] * n
            e[index[val]] = 1
            return {tuple(e): field(1)}
        if val == "(":
            inner = expr()
            close = take()
            if close[0] != ")":
                raise ParseError("expected ')'", close[2])
            return inner
        if val is None:
            raise ParseError("unexpected end of input", at)
        raise ParseError(f"unexpected token {val!r}", at)

    result = expr()
    if i < len(tokens):
        raise ParseError(f"unexpected token {tokens[i][0]!r}", tokens[i][2])
    return result
