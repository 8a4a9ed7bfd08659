"""Quantum torus: Laurent polynomials in X^e, e in Z^n, with
X^e X^f = v^Lambda(e,f) X^(e+f)."""

from __future__ import annotations

from typing import Mapping

from .scalars import ONE, Scalar, bar, exact_divide


def as_form(L) -> tuple:
    L = tuple(tuple(int(x) for x in row) for row in L)
    n = len(L)
    for i in range(n):
        if len(L[i]) != n:
            raise ValueError("form must be square")
        for j in range(n):
            if L[i][j] != -L[j][i]:
                raise ValueError(f"form is not skew-symmetric at ({i + 1},{j + 1})")
    return L


def pair(L, e, f) -> int:
    s = 0
    for i, ei in enumerate(e):
        if ei:
            row = L[i]
            for j, fj in enumerate(f):
                if fj:
                    s += ei * row[j] * fj
    return s


class TorusElement:
    __slots__ = ("L", "terms")

    def __init__(self, L, terms: Mapping | None = None):
        self.L = L
        self.terms = {tuple(e): c for e, c in (terms or {}).items() if not c.is_zero()}

    @property
    def rank(self) -> int:
        return len(self.L)

    @classmethod
    def monomial(cls, L, e, c: Scalar = ONE) -> "TorusElement":
        return cls(L, {tuple(e): c})

    @classmethod
    def one(cls, L) -> "TorusElement":
        return cls.monomial(L, (0,) * len(L))

    def _check(self, other):
        if other.L != self.L:
            raise ValueError("torus elements live over different forms")

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return TorusElement(self.L, out)

    def __neg__(self):
        return TorusElement(self.L, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c: Scalar) -> "TorusElement":
        return TorusElement(self.L, {e: c * x for e, x in self.terms.items()})

    def shift(self, k: int) -> "TorusElement":
        return TorusElement(self.L, {e: x.shift(k) for e, x in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Scalar):
            return self.scale(other)
        return torus_mul(self, other)

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1:
                raise ValueError("only monomials are invertible in the torus")
            (e, c), = self.terms.items()
            if not c.exact or len(c.c) != 1 or abs(next(iter(c.c.values()))) != 1:
                raise ValueError("monomial coefficient is not a unit")
            (s, u), = c.c.items()
            inv = TorusElement.monomial(self.L, tuple(-x for x in e), Scalar({-s: u}))
            return inv ** (-k)
        out = TorusElement.one(self.L)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, TorusElement):
            return NotImplemented
        return self.L == other.L and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(sorted(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list:
        return sorted(self.terms)

    def coefficient(self, e) -> Scalar:
        return self.terms.get(tuple(e), Scalar())

    def items(self):
        return sorted(self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c!r})*X^{e}" for e, c in self.items())


def torus_mul(a: TorusElement, b: TorusElement) -> TorusElement:
    a._check(b)
    L = a.L
    out = {}
    for e, x in a.terms.items():
        for f, y in b.terms.items():
            g = tuple(i + j for i, j in zip(e, f))
            z = (x * y).shift(pair(L, e, f))
            out[g] = out[g] + z if g in out else z
    return TorusElement(L, out)


def torus_bar(a: TorusElement) -> TorusElement:
    """Bar involution: v -> 1/v on coefficients, X^e fixed."""
    return TorusElement(a.L, {e: bar(c) for e, c in a.terms.items()})


def is_bar_invariant(a: TorusElement) -> bool:
    return all(bar(c) == c for c in a.terms.values())


def right_divide(num: TorusElement, den: TorusElement) -> TorusElement:
    """Return Q with Q * den == num, by long division for the lexicographic
    order on exponents. Raises ArithmeticError if den does not divide num."""
    num._check(den)
    if den.is_zero():
        raise ZeroDivisionError("division by zero torus element")
    L = num.L
    dlead = max(den.terms)
    dlow = min(den.terms)
    kappa = den.terms[dlead]
    floor = None
    if num.terms:
        floor = tuple(a - b for a, b in zip(min(num.terms), dlow))
    rem = dict(num.terms)
    quot = {}
    while rem:
        r = max(rem)
        e = tuple(a - b for a, b in zip(r, dlead))
        if e < floor:
            raise ArithmeticError("torus element does not divide exactly")
        alpha = exact_divide(rem[r], kappa.shift(pair(L, e, dlead)))
        quot[e] = alpha
        for f, y in den.terms.items():
            g = tuple(i + j for i, j in zip(e, f))
            z = (alpha * y).shift(pair(L, e, f))
            if g in rem:
                w = rem[g] - z
                if w.is_zero():
                    del rem[g]
                else:
                    rem[g] = w
            else:
                rem[g] = -z
        if rem.get(r) is not None:
            raise ArithmeticError("leading term failed to cancel")
    return TorusElement(L, quot)


def classical_limit(a: TorusElement) -> dict:
    from .scalars import eval_classical
    return {e: eval_classical(c) for e, c in a.items()}


def torus_to_json(a: TorusElement) -> dict:
    from .scalars import to_json
    return {",".join(map(str, e)): to_json(c) for e, c in a.items()}
