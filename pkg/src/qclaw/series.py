"""Truncated series in the quantum affine space of a quiver.

Elements are sums of a_d Y^d over dimension vectors d with |d| <= cap, and
Y^e Y^f = v^<f,e> Y^(e+f), <,> the antisymmetrised Euler form.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from .quiver import IceQuiver, antisym_matrix
from .scalars import ONE, Scalar, adams, series_inverse

DEFAULT_WINDOW = 24


def form_of(q) -> tuple:
    if isinstance(q, IceQuiver):
        return tuple(tuple(r) for r in antisym_matrix(q))
    return tuple(tuple(r) for r in q)


def bracket(A, d, e) -> int:
    """<d, e> = d^T A e."""
    s = 0
    for i, di in enumerate(d):
        if di:
            row = A[i]
            for j, ej in enumerate(e):
                if ej:
                    s += di * row[j] * ej
    return s


def _add(d, e):
    return tuple(a + b for a, b in zip(d, e))


def _sub(d, e):
    return tuple(a - b for a, b in zip(d, e))


def _leq(e, d):
    return all(a <= b for a, b in zip(e, d))


class NonCommutingSupport(ValueError):
    pass


class AffineSeries:
    __slots__ = ("A", "terms", "cap")

    def __init__(self, A, terms: Mapping | None = None, cap: int = 8):
        self.A = A
        self.cap = cap
        self.terms = {}
        for d, c in (terms or {}).items():
            d = tuple(d)
            if any(x < 0 for x in d):
                raise ValueError(f"negative dimension vector {d}")
            if sum(d) <= cap and not (c.is_zero() and c.exact):
                self.terms[d] = c

    @property
    def m(self) -> int:
        return len(self.A)

    @classmethod
    def one(cls, A, cap: int) -> "AffineSeries":
        return cls(A, {(0,) * len(A): ONE}, cap)

    @classmethod
    def monomial(cls, A, d, cap: int, c: Scalar = ONE) -> "AffineSeries":
        return cls(A, {tuple(d): c}, cap)

    def _check(self, other):
        if self.A != other.A:
            raise ValueError("series belong to different quivers")

    def coefficient(self, d) -> Scalar:
        return self.terms.get(tuple(d), Scalar())

    def constant(self) -> Scalar:
        return self.coefficient((0,) * self.m)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def with_cap(self, cap: int) -> "AffineSeries":
        return AffineSeries(self.A, self.terms, min(cap, self.cap))

    def __add__(self, other):
        self._check(other)
        out = dict(self.terms)
        for d, c in other.terms.items():
            out[d] = out[d] + c if d in out else c
        return AffineSeries(self.A, out, min(self.cap, other.cap))

    def __neg__(self):
        return AffineSeries(self.A, {d: -c for d, c in self.terms.items()}, self.cap)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AffineSeries":
        return AffineSeries(self.A, {d: x * c for d, x in self.terms.items()}, self.cap)

    def __mul__(self, other):
        if not isinstance(other, AffineSeries):
            return self.scale(other)
        return affine_mul(self, other)

    def restrict(self, keep: Callable[[tuple], bool]) -> "AffineSeries":
        return AffineSeries(self.A, {d: c for d, c in self.terms.items() if keep(d)}, self.cap)

    def agrees(self, other) -> bool:
        """Coefficientwise agreement on everything known to both sides."""
        self._check(other)
        cap = min(self.cap, other.cap)
        zero = Scalar()
        for d in set(self.terms) | set(other.terms):
            if sum(d) <= cap and not self.terms.get(d, zero).agrees(other.terms.get(d, zero)):
                return False
        return True

    def first_disagreement(self, other):
        self._check(other)
        cap = min(self.cap, other.cap)
        zero = Scalar()
        for d in sorted(set(self.terms) | set(other.terms), key=lambda x: (sum(x), x)):
            a, b = self.terms.get(d, zero), other.terms.get(d, zero)
            if sum(d) <= cap and not a.agrees(b):
                return d, a, b
        return None

    def min_relative_precision(self) -> int | None:
        """Smallest prec - valuation over all stored coefficients (None if exact)."""
        best = None
        for c in self.terms.values():
            if c.prec is not None:
                r = c.prec - (min(c.c) if c.c else c.prec)
                best = r if best is None else min(best, r)
        return best

    def __eq__(self, other):
        if not isinstance(other, AffineSeries):
            return NotImplemented
        return self.A == other.A and self.cap == other.cap and self.terms == other.terms

    def __repr__(self):
        body = " + ".join(f"({c!r})Y^{d}" for d, c in self.items()) or "0"
        return f"{body}  [|d| <= {self.cap}]"

    def inverse(self) -> "AffineSeries":
        return affine_inverse(self)


def affine_mul(a: AffineSeries, b: AffineSeries) -> AffineSeries:
    a._check(b)
    A = a.A
    cap = min(a.cap, b.cap)
    out = {}
    bt = list(b.terms.items())
    for e, x in a.terms.items():
        se = sum(e)
        for f, y in bt:
            if se + sum(f) > cap:
                continue
            d = _add(e, f)
            z = (x * y).shift(bracket(A, f, e))
            out[d] = out[d] + z if d in out else z
    return AffineSeries(A, out, cap)


def affine_inverse(s: AffineSeries) -> AffineSeries:
    """Two-sided inverse of a series whose constant term is 1."""
    zero = (0,) * s.m
    if s.constant() != ONE:
        raise ValueError("series inverse needs constant term 1")
    rest = [(f, c) for f, c in s.terms.items() if f != zero]
    keys = _monoid_keys([f for f, _ in rest], s.cap, s.m)
    inv = {zero: ONE}
    A = s.A
    for d in keys:
        if d == zero:
            continue
        acc = None
        for f, c in rest:
            if _leq(f, d):
                e = _sub(d, f)
                u = inv.get(e)
                if u is None:
                    continue
                # (U * S)_d = sum U_e S_f v^<f,e> = 0
                z = (u * c).shift(bracket(A, f, e))
                acc = z if acc is None else acc + z
        if acc is not None:
            inv[d] = -acc
    return AffineSeries(A, inv, s.cap)


def _monoid_keys(gens: Sequence[tuple], cap: int, m: int) -> list:
    """All sums of generators with total degree <= cap, sorted by degree."""
    zero = (0,) * m
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for k in frontier:
            for g in gens:
                d = _add(k, g)
                if sum(d) <= cap and d not in seen:
                    seen.add(d)
                    nxt.append(d)
        frontier = nxt
    return sorted(seen, key=lambda x: (sum(x), x))


def _check_commuting(f: AffineSeries):
    supp = [d for d in f.terms if any(d)]
    for i, d in enumerate(supp):
        for e in supp[i + 1:]:
            if bracket(f.A, d, e) != 0:
                raise NonCommutingSupport(f"monomials Y^{d} and Y^{e} do not commute")


# plethystic exponential ------------------------------------------------------

def pleth_exp(f: AffineSeries, method: str = "product") -> AffineSeries:
    """EXP(f) for f with pairwise commuting support and no constant term.

    The signed convention is used: with f_d = sum_h a_{d,h} (-v)^h,
    EXP(f) = prod (1 - Y^d (-v)^h)^(-a_{d,h}); Adams operations send
    (-v) -> (-v)^j and Y^d -> Y^(jd). ``method`` picks the evaluation route:
    "product" expands the product formula, "adams" uses exp(sum psi_j f / j)
    with exact rational arithmetic.
    """
    zero = (0,) * f.m
    if not f.coefficient(zero).is_zero():
        raise ValueError("plethystic exponential needs zero constant term")
    _check_commuting(f)
    if method == "adams":
        return _pleth_exp_adams(f)
    if method != "product":
        raise ValueError(f"unknown method {method!r}")
    out = AffineSeries.one(f.A, f.cap)
    for d, c in sorted(f.terms.items()):
        out = _commutative_mul(out, _ray_exp_factor(f.A, d, c, f.cap))
    return _assert_integral(out)


def _ray_exp_factor(A, d, c: Scalar, cap: int) -> AffineSeries:
    """prod_h (1 - Y^d (-v)^h)^(-a_h) for c = sum_h a_h (-v)^h, plus the
    unknown tail for exponents at or beyond c.prec."""
    deg = sum(d)
    jmax = cap // deg
    # work with a list of scalars indexed by multiples of d
    coeffs = [ONE] + [Scalar() for _ in range(jmax)]
    for h, x in sorted(c.c.items()):
        a = x if h % 2 == 0 else -x  # coefficient of (-v)^h
        w_sign = -1 if h % 2 else 1
        # (1 - z)^(-a) = sum_j binom(a + j - 1, j) z^j, z = Y^d (-v)^h
        series = [ONE]
        binom = Fraction(1)
        for j in range(1, jmax + 1):
            binom = binom * (a + j - 1) / j
            if binom == 0:
                break
            series.append(Scalar({h * j: binom * (w_sign ** j)}))
        coeffs = _ray_mul(coeffs, series, jmax)
    if c.prec is not None:
        tail = [ONE] + [Scalar({}, j * c.prec) for j in range(1, jmax + 1)]
        coeffs = _ray_mul(coeffs, tail, jmax)
    terms = {tuple(j * x for x in d): s for j, s in enumerate(coeffs)}
    return AffineSeries(A, terms, cap)


def _ray_mul(a: list, b: list, jmax: int) -> list:
    out = [Scalar() for _ in range(jmax + 1)]
    have = [False] * (jmax + 1)
    for i, x in enumerate(a):
        if x.is_zero() and x.prec is None:
            continue
        for j, y in enumerate(b):
            if i + j > jmax:
                break
            if y.is_zero() and y.prec is None:
                continue
            z = x * y
            out[i + j] = out[i + j] + z if have[i + j] else z
            have[i + j] = True
    return out


def _commutative_mul(a: AffineSeries, b: AffineSeries) -> AffineSeries:
    cap = min(a.cap, b.cap)
    out = {}
    for e, x in a.terms.items():
        for f, y in b.terms.items():
            if sum(e) + sum(f) > cap:
                continue
            d = _add(e, f)
            z = x * y
            out[d] = out[d] + z if d in out else z
    return AffineSeries(a.A, out, cap)


def _assert_integral(s: AffineSeries) -> AffineSeries:
    out = {}
    for d, c in s.terms.items():
        coeffs = {}
        for k, x in c.c.items():
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ArithmeticError(f"non-integral coefficient {x} at Y^{d} v^{k}")
                x = x.numerator
            coeffs[k] = x
        out[d] = Scalar(coeffs, c.prec)
    return AffineSeries(s.A, out, s.cap)


def adams_series(f: AffineSeries, j: int) -> AffineSeries:
    terms = {}
    for d, c in f.terms.items():
        if j * sum(d) <= f.cap:
            terms[tuple(j * x for x in d)] = adams(c, j)
    return AffineSeries(f.A, terms, f.cap)


def _exp_commutative(g: dict, m: int, cap: int) -> dict:
    """exp of a commutative series g (no constant term) via the Euler-operator
    recursion |d| F_d = sum_e |e| g_e F_(d-e)."""
    zero = (0,) * m
    keys = _monoid_keys(list(g), cap, m)
    F = {zero: ONE}
    for d in keys:
        if d == zero:
            continue
        acc = None
        for e, c in g.items():
            if _leq(e, d) and _sub(d, e) in F:
                z = (c * F[_sub(d, e)]) * sum(e)
                acc = z if acc is None else acc + z
        if acc is not None:
            F[d] = acc * Fraction(1, sum(d))
    return F


def _log_commutative(F: dict, m: int, cap: int) -> dict:
    zero = (0,) * m
    keys = sorted((d for d in F if d != zero), key=lambda x: (sum(x), x))
    L = {}
    for d in keys:
        acc = F[d]
        corr = None
        for e, c in L.items():
            if _leq(e, d) and e != d and _sub(d, e) in F:
                z = (c * F[_sub(d, e)]) * sum(e)
                corr = z if corr is None else corr + z
        if corr is not None:
            acc = acc - corr * Fraction(1, sum(d))
        L[d] = acc
    return L


def _pleth_exp_adams(f: AffineSeries) -> AffineSeries:
    g = {}
    for d, c in f.terms.items():
        for j in range(1, f.cap // sum(d) + 1):
            k = tuple(j * x for x in d)
            z = adams(c, j) * Fraction(1, j)
            g[k] = g[k] + z if k in g else z
    F = _exp_commutative(g, f.m, f.cap)
    return _assert_integral(AffineSeries(f.A, F, f.cap))


def _mobius(n: int) -> int:
    res, p, k = 1, 2, n
    while p * p <= k:
        if k % p == 0:
            k //= p
            if k % p == 0:
                return 0
            res = -res
        p += 1
    if k > 1:
        res = -res
    return res


def pleth_log(F: AffineSeries) -> AffineSeries:
    """Inverse of pleth_exp: Log(F) = sum_j mu(j)/j psi_j(log F)."""
    if F.constant() != ONE:
        raise ValueError("plethystic logarithm needs constant term 1")
    _check_commuting(F)
    L = _log_commutative(F.terms, F.m, F.cap)
    out = {}
    for d, c in L.items():
        for j in range(1, F.cap // sum(d) + 1):
            mu = _mobius(j)
            if mu == 0:
                continue
            k = tuple(j * x for x in d)
            z = adams(c, j) * Fraction(mu, j)
            out[k] = out[k] + z if k in out else z
    return _assert_integral(AffineSeries(F.A, out, F.cap))


# dilogarithms ---------------------------------------------------------------

def inv_v_minus_v(window: int = DEFAULT_WINDOW) -> Scalar:
    """1/(v^-1 - v) = v + v^3 + v^5 + ..., known below v^(1 + window)."""
    return Scalar({k: 1 for k in range(1, 1 + window, 2)}, 1 + window)


def pochhammer_inverse(k: int, shift: int, window: int) -> Scalar:
    """v^shift / prod_{j=1..k} (1 - v^(2j)) with relative precision ``window``."""
    den = ONE
    for j in range(1, k + 1):
        den = den * Scalar({0: 1, 2 * j: -1})
    return series_inverse(den, window).shift(shift)


def qdilog(q, d: Sequence[int], sign: int = 1, cap: int = 8,
           window: int = DEFAULT_WINDOW, method: str = "closed") -> AffineSeries:
    """E(Y^d)^sign with E(Y^d) = EXP(Y^d / (v^-1 - v)).

    "closed" uses E(Y^d) = sum_k v^(k^2) Y^(kd) / prod_{j<=k}(1 - v^(2j)), each
    coefficient to relative precision ``window``; "pleth" goes through
    pleth_exp of Y^d/(v^-1 - v).
    """
    A = form_of(q)
    d = tuple(d)
    if not any(d) or any(x < 0 for x in d):
        raise ValueError("dilogarithm needs a nonzero dimension vector")
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if method == "closed":
        jmax = cap // sum(d)
        terms = {tuple(0 for _ in d): ONE}
        for k in range(1, jmax + 1):
            terms[tuple(k * x for x in d)] = pochhammer_inverse(k, k * k, window)
        E = AffineSeries(A, terms, cap)
    elif method == "pleth":
        E = pleth_exp(AffineSeries.monomial(A, d, cap, inv_v_minus_v(window)))
    else:
        raise ValueError(f"unknown method {method!r}")
    return E if sign == 1 else affine_inverse(E)


def ordered_product(factors: Iterable[AffineSeries]) -> AffineSeries:
    out = None
    for f in factors:
        out = f if out is None else out * f
    return out


def series_to_json(s: AffineSeries) -> dict:
    from .scalars import to_json
    return {"cap": s.cap,
            "terms": {",".join(map(str, d)): to_json(c) for d, c in s.items()}}
