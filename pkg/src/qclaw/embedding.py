"""The map Y^e -> X^(-B e) from the quantum affine space into the quantum
torus, and series in its image (shifted by a fixed monomial X^g)."""

from __future__ import annotations

from typing import Mapping, Sequence

from .scalars import ONE, Scalar
from .series import AffineSeries, _add, _monoid_keys, _sub, _leq
from .torus import TorusElement, as_form, pair


class IncompatiblePair(ValueError):
    pass


def compatibility_defect(B, L):
    """First (i, j, value, expected) where B^T L differs from [I | 0], or None."""
    n, m = len(B), len(B[0]) if B else 0
    if len(L) != n:
        return ("shape", n, len(L), None)
    for i in range(m):
        for j in range(n):
            val = sum(B[k][i] * L[k][j] for k in range(n))
            want = 1 if i == j else 0
            if val != want:
                return (i + 1, j + 1, val, want)
    return None


def check_compatibility(B, L) -> None:
    bad = compatibility_defect(B, L)
    if bad is not None:
        i, j, val, want = bad
        if i == "shape":
            raise IncompatiblePair(f"form has size {val}, exchange matrix has {j} rows")
        raise IncompatiblePair(f"(B^T L)[{i},{j}] = {val}, expected {want}")


class TorusSeries:
    """Sum over e in N^m, |e| <= cap, of c_e X^(g - B e)."""

    __slots__ = ("L", "B", "g", "terms", "cap")

    def __init__(self, L, B, g, terms: Mapping, cap: int):
        self.L = L
        self.B = tuple(tuple(r) for r in B)
        self.g = tuple(g)
        self.cap = cap
        self.terms = {tuple(e): c for e, c in terms.items()
                      if sum(e) <= cap and not (c.is_zero() and c.exact)}

    @property
    def m(self):
        return len(self.B[0]) if self.B else 0

    def exponent(self, e) -> tuple:
        return tuple(self.g[i] - sum(self.B[i][k] * e[k] for k in range(len(e)))
                     for i in range(len(self.g)))

    @classmethod
    def monomial(cls, L, B, g, cap: int, c: Scalar = ONE) -> "TorusSeries":
        m = len(B[0]) if B else 0
        return cls(L, B, g, {(0,) * m: c}, cap)

    def _check(self, other):
        if self.L != other.L or self.B != other.B:
            raise ValueError("torus series over different data")

    def __mul__(self, other: "TorusSeries") -> "TorusSeries":
        self._check(other)
        cap = min(self.cap, other.cap)
        L = self.L
        g = _add(self.g, other.g)
        out = {}
        ex = {e: self.exponent(e) for e in self.terms}
        fx = {f: other.exponent(f) for f in other.terms}
        for e, x in self.terms.items():
            for f, y in other.terms.items():
                if sum(e) + sum(f) > cap:
                    continue
                d = _add(e, f)
                z = (x * y).shift(pair(L, ex[e], fx[f]))
                out[d] = out[d] + z if d in out else z
        return TorusSeries(L, self.B, g, out, cap)

    def __add__(self, other):
        self._check(other)
        if self.g != other.g:
            raise ValueError("torus series with different offsets")
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return TorusSeries(self.L, self.B, self.g, out, min(self.cap, other.cap))

    def inverse(self) -> "TorusSeries":
        """Inverse of an offset-free series with constant term 1."""
        zero = (0,) * self.m
        if any(self.g) or self.terms.get(zero) != ONE:
            raise ValueError("only offset-free series with constant term 1 are inverted")
        rest = [(f, c) for f, c in self.terms.items() if f != zero]
        inv = {zero: ONE}
        L = self.L
        for d in _monoid_keys([f for f, _ in rest], self.cap, self.m):
            if d == zero:
                continue
            acc = None
            for f, c in rest:
                if _leq(f, d):
                    e = _sub(d, f)
                    u = inv.get(e)
                    if u is None:
                        continue
                    z = (u * c).shift(pair(L, self.exponent(e), self.exponent(f)))
                    acc = z if acc is None else acc + z
            if acc is not None:
                inv[d] = -acc
        return TorusSeries(L, self.B, self.g, inv, self.cap)

    def to_element(self) -> TorusElement:
        out = {}
        for e, c in self.terms.items():
            x = self.exponent(e)
            out[x] = out[x] + c if x in out else c
        return TorusElement(self.L, out)

    def grades(self) -> list:
        return sorted({sum(e) for e in self.terms})

    def __repr__(self):
        return repr(self.to_element()) + f"  [grade <= {self.cap}]"


def iota(B, L, f: AffineSeries, check: bool = True) -> TorusSeries:
    """Y^e -> X^(-B e). With ``check`` the pair must be compatible, which
    makes the map an algebra homomorphism."""
    L = as_form(L)
    B = tuple(tuple(int(x) for x in r) for r in B)
    m = len(B[0]) if B else 0
    if check:
        check_compatibility(B, L)
        princ = tuple(tuple(-x for x in B[i]) for i in range(m))
        if f.A != princ:
            raise ValueError("series is not over the principal part of this exchange matrix")
    return TorusSeries(L, B, (0,) * len(L), f.terms, f.cap)


def conjugate(S: TorusSeries, g: Sequence[int], cap: int | None = None) -> TorusSeries:
    """S X^g S^-1, truncated at Y-grade ``cap``."""
    if cap is not None:
        S = TorusSeries(S.L, S.B, S.g, S.terms, min(cap, S.cap))
    X = TorusSeries.monomial(S.L, S.B, g, S.cap)
    return S * X * S.inverse()
