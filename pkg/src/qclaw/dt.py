"""Stability conditions, tropical c/g-vectors, wall-crossing factorisation of
the stacky generating series, DT invariants, and cluster monomials computed
by conjugating with products of quantum dilogarithms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from typing import Mapping, Sequence

from .embedding import TorusSeries, check_compatibility, iota
from .lefschetz import is_unimodal_symmetric, parity
from .potential import QP, nondegenerate_along, qp_from_quiver
from .quiver import IceQuiver, b_matrix, euler_form, mutate_quiver, require_valid
from .scalars import ONE, Scalar
from .series import (DEFAULT_WINDOW, AffineSeries, NonCommutingSupport, affine_inverse,
                     bracket, form_of, ordered_product, pleth_log, pochhammer_inverse, qdilog)
from .torus import TorusElement, as_form, pair


# stability conditions and slopes ------------------------------------------------

def _frac(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class Stability:
    """Central charges zeta_s = re_s + i im_s, one per principal vertex."""
    re: tuple
    im: tuple

    def __post_init__(self):
        object.__setattr__(self, "re", tuple(_frac(x) for x in self.re))
        object.__setattr__(self, "im", tuple(_frac(x) for x in self.im))
        if len(self.re) != len(self.im):
            raise ValueError("real and imaginary parts have different lengths")
        for s, (a, b) in enumerate(zip(self.re, self.im), start=1):
            if b < 0 or (b == 0 and a <= 0):
                raise ValueError(f"zeta_{s} = {a} + {b}i is not in the upper half plane")

    @classmethod
    def from_pairs(cls, pairs) -> "Stability":
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs))

    @property
    def m(self):
        return len(self.re)

    def central_charge(self, d) -> tuple:
        if len(d) != self.m:
            raise ValueError("dimension vector has the wrong length")
        return (sum(x * a for x, a in zip(d, self.re)), sum(x * b for x, b in zip(d, self.im)))


def degenerate_stability(m: int) -> Stability:
    return Stability((0,) * m, (1,) * m)


class Phase:
    """The argument of a nonzero point in the closed upper half plane, compared
    exactly by cross-multiplication."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        re, im = Fraction(re), Fraction(im)
        if im < 0 or (im == 0 and re <= 0):
            raise ValueError("phase of a point outside the upper half plane")
        self.re, self.im = re, im

    def _cross(self, other) -> Fraction:
        return self.re * other.im - self.im * other.re

    def __lt__(self, other):
        return self._cross(other) > 0

    def __gt__(self, other):
        return self._cross(other) < 0

    def __le__(self, other):
        return self._cross(other) >= 0

    def __ge__(self, other):
        return self._cross(other) <= 0

    def __eq__(self, other):
        return isinstance(other, Phase) and self._cross(other) == 0

    def __hash__(self):
        return hash(("ray", 0) if self.im == 0 else ("ray", self.re / self.im))

    def __repr__(self):
        return f"Phase({self.re}, {self.im})"


RIGHT_ANGLE = Phase(0, 1)


def slope(zeta: Stability, d) -> Phase:
    if not any(d) or any(x < 0 for x in d):
        raise ValueError("slope is defined for nonzero dimension vectors")
    return Phase(*zeta.central_charge(d))


def dimension_vectors(m: int, cap: int, lo: int = 1) -> list:
    out = [d for d in iproduct(range(cap + 1), repeat=m) if lo <= sum(d) <= cap]
    return sorted(out, key=lambda d: (sum(d), d))


@dataclass
class GenericityReport:
    ok: bool
    bound: int
    witness: tuple | None = None

    def __bool__(self):
        return self.ok


def is_generic(q, zeta: Stability, theta: Phase | None = None, bound: int = 6) -> GenericityReport:
    """Equal-slope classes of size <= bound (and slope <= theta) must pair to zero
    under the antisymmetrised Euler form."""
    A = form_of(q.principal() if isinstance(q, IceQuiver) else q)
    groups: dict = {}
    for d in dimension_vectors(len(A), bound):
        ph = slope(zeta, d)
        if theta is not None and ph > theta:
            continue
        groups.setdefault(ph, []).append(d)
    for ds in groups.values():
        for i, d in enumerate(ds):
            for e in ds[i + 1:]:
                if bracket(A, d, e):
                    return GenericityReport(False, bound, (d, e))
    return GenericityReport(True, bound)


# tropical c- and g-vectors -------------------------------------------------------

class SignCoherenceError(ArithmeticError):
    pass


@dataclass(frozen=True)
class CGData:
    C: tuple          # C[j] is the j-th c-vector (length m)
    G: tuple          # G[j] is the j-th g-vector (length n)
    signs: tuple      # '-' additive, '+' subtractive
    simples: tuple    # the simple class used at each step (componentwise >= 0 or <= 0)
    seq: tuple
    quiver: IceQuiver

    def g_image(self, f) -> tuple:
        n = len(self.G)
        return tuple(sum(f[j] * self.G[j][i] for j in range(n)) for i in range(n))


def initial_cg(q: IceQuiver) -> CGData:
    require_valid(q)
    m, n = q.m, q.n
    C = tuple(tuple(int(i == j) for i in range(m)) for j in range(m))
    G = tuple(tuple(int(i == j) for i in range(n)) for j in range(n))
    return CGData(C, G, (), (), (), q)


def tropical_step(cg: CGData, s: int) -> CGData:
    q = cg.quiver
    if not 1 <= s <= q.m:
        raise ValueError(f"cannot mutate at vertex {s}: not principal")
    k = s - 1
    sigma = cg.C[k]
    if all(x >= 0 for x in sigma):
        sign = "-"
    elif all(x <= 0 for x in sigma):
        sign = "+"
    else:
        raise SignCoherenceError(f"c-vector {sigma} at step {len(cg.seq) + 1} is not sign-coherent")
    B = b_matrix(q)
    C = [list(c) for c in cg.C]
    for i in range(q.m):
        if i == k:
            continue
        b = B[k][i]
        coef = max(0, -b) if sign == "-" else max(0, b)
        if coef:
            C[i] = [x + coef * y for x, y in zip(C[i], sigma)]
    C[k] = [-x for x in sigma]
    G = [list(g) for g in cg.G]
    acc = [-x for x in cg.G[k]]
    for (a, b), cnt in q.counts().items():
        if sign == "-" and a == s:
            acc = [x + cnt * y for x, y in zip(acc, cg.G[b - 1])]
        elif sign == "+" and b == s:
            acc = [x + cnt * y for x, y in zip(acc, cg.G[a - 1])]
    G[k] = acc
    return CGData(tuple(map(tuple, C)), tuple(map(tuple, G)), cg.signs + (sign,),
                  cg.simples + (tuple(sigma),), cg.seq + (s,), mutate_quiver(q, s))


def cg_along(q: IceQuiver, seq: Sequence[int]) -> CGData:
    cg = initial_cg(q)
    for s in seq:
        cg = tropical_step(cg, s)
    return cg


def _solve(M, r):
    """Solve M x = r over the rationals (M square, nonsingular)."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(M, r)]
    for col in range(n):
        piv = next((i for i in range(col, n) if A[i][col] != 0), None)
        if piv is None:
            raise ArithmeticError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for i in range(n):
            if i != col and A[i][col] != 0:
                f = A[i][col]
                A[i] = [x - f * y for x, y in zip(A[i], A[col])]
    return [A[i][n] for i in range(n)]


def psi(cg: CGData, d) -> tuple:
    """Coordinates of d in the basis of current c-vectors."""
    m = len(cg.C)
    M = [[cg.C[j][i] for j in range(m)] for i in range(m)]
    x = _solve(M, d)
    if any(v.denominator != 1 for v in x):
        raise ArithmeticError("c-vector matrix is not unimodular")
    return tuple(int(v) for v in x)


SUBTRACTIVE_OFFSET = Fraction(1, 1000)


def make_stability(cg: CGData) -> tuple:
    """(zeta, theta) with Im zeta_s = 1, Re Z(c_j) = -1 for j != last vertex,
    and Re Z(c_last) = 0 (additive) or -1/1000 (subtractive); theta = pi/2."""
    m = len(cg.C)
    if not cg.seq:
        return degenerate_stability(m), RIGHT_ANGLE
    last = cg.seq[-1] - 1
    r = [Fraction(-1)] * m
    r[last] = Fraction(0) if cg.signs[-1] == "-" else -SUBTRACTIVE_OFFSET
    x = _solve(cg.C, r)
    return Stability(tuple(x), (1,) * m), RIGHT_ANGLE


def duality_defects(q: IceQuiver, L, cg: CGData) -> list:
    """Pairs (s, s') where Lambda(g_s, -B c_s') differs from delta."""
    L = as_form(L)
    B = b_matrix(q)
    n, m = q.n, q.m
    bad = []
    for s in range(n):
        for t in range(m):
            w = tuple(-sum(B[i][k] * cg.C[t][k] for k in range(m)) for i in range(n))
            val = pair(L, cg.G[s], w)
            if val != int(s == t):
                bad.append((s + 1, t + 1, val))
    return bad


def parity_defects(q0: IceQuiver, cg: CGData, bound: int = 2) -> list:
    """Dimension vectors d (entries in [-bound, bound]) where the Euler form of
    the mutated quiver on psi(d) differs mod 2 from that of the initial one."""
    m = q0.m
    out = []
    for d in iproduct(range(-bound, bound + 1), repeat=m):
        e = psi(cg, d)
        if (euler_form(cg.quiver, e, e) - euler_form(q0, d, d)) % 2:
            out.append(d)
    return out


# stack series, HN factorisation, DT invariants ------------------------------------

def stack_ic_series(q: IceQuiver, cap: int = 8, window: int = DEFAULT_WINDOW) -> AffineSeries:
    """sum_d v^chi(d,d) prod_i prod_{k<=d_i} (1 - v^2k)^-1 Y^d over the principal part."""
    p = q.principal()
    A = form_of(p)
    m = len(A)
    terms = {(0,) * m: ONE}
    cache = {}
    for d in dimension_vectors(m, cap):
        c = Scalar.mono(euler_form(p, d, d))
        for x in d:
            if x:
                if x not in cache:
                    cache[x] = pochhammer_inverse(x, 0, window)
                c = c * cache[x]
        terms[d] = c
    return AffineSeries(A, terms, cap)


@dataclass
class HNFactor:
    phase: Phase
    support: tuple
    series: AffineSeries

    @property
    def trivial(self) -> bool:
        return all(c.is_zero() for d, c in self.series.terms.items() if any(d))


def hn_factorize(T: AffineSeries, zeta: Stability) -> list:
    """Factor T = prod of slope-ray series in descending slope order.

    Peels the highest ray first: the restriction of T to that ray is its
    factor, since every other ray contributes strictly smaller slopes."""
    if T.constant() != ONE:
        raise ValueError("factorisation needs constant term 1")
    rays: dict = {}
    for d in dimension_vectors(T.m, T.cap):
        rays.setdefault(slope(zeta, d), []).append(d)
    order = sorted(rays, key=_phase_sort_key, reverse=True)
    rest = T
    factors = []
    for ph in order:
        supp = set(rays[ph])
        S = rest.restrict(lambda d, supp=supp: d in supp or not any(d))
        factors.append(HNFactor(ph, tuple(sorted(supp, key=lambda d: (sum(d), d))), S))
        rest = affine_inverse(S) * rest
    for d, c in rest.terms.items():
        if any(d) and not c.is_zero():
            raise ArithmeticError(f"factorisation left a remainder at Y^{d}")
    return factors


def _phase_sort_key(ph: Phase):
    # monotone in the angle: -cot on the open half plane, angle 0 first
    return (0, Fraction(0)) if ph.im == 0 else (1, -ph.re / ph.im)


def recompose(factors: Sequence[HNFactor]) -> AffineSeries:
    return ordered_product(f.series for f in factors)


def product_up_to(factors: Sequence[HNFactor], theta: Phase) -> AffineSeries:
    """Ordered product of the factors with slope <= theta (1 if there are none)."""
    if not factors:
        raise ValueError("no factors")
    base = factors[0].series
    out = AffineSeries.one(base.A, base.cap)
    for f in factors:
        if f.phase <= theta:
            out = out * f.series
    return out


class CapInsufficient(ArithmeticError):
    pass


LAURENT_MARGIN = 3
V_INV_MINUS_V = Scalar({-1: 1, 1: -1})


def _finalize_laurent(x: Scalar, where) -> Scalar:
    """Exact Laurent polynomial from a truncated series whose tail is known to vanish."""
    if x.exact:
        return x
    nz = [k for k, c in x.c.items() if c]
    reach = max([0] + [abs(k) for k in nz])
    if x.prec - reach < LAURENT_MARGIN:
        raise CapInsufficient(f"coefficient at {where} known only below v^{x.prec}; "
                              f"cannot certify a Laurent polynomial")
    return Scalar({k: x.c[k] for k in nz})


def dt_extract(S: AffineSeries) -> dict:
    """Omega_d with pleth_log(S) (v^-1 - v) = sum Omega_d Y^d, for S supported on
    one slope ray with commuting support."""
    log = pleth_log(S)
    out = {}
    for d, c in log.items():
        if any(d):
            out[d] = _finalize_laurent(c * V_INV_MINUS_V, d)
    return out


@dataclass
class ExoticsVerdict:
    ok: bool
    b: list | None
    nonnegative: bool
    single_parity: bool
    symmetric: bool
    unimodal: bool


def no_exotics_check(omega: Scalar) -> ExoticsVerdict:
    c = omega.c
    if not c:
        return ExoticsVerdict(True, [], True, True, True, True)
    nonneg = all(x >= 0 for x in c.values())
    single = parity(omega) is not None
    sym = all(c.get(-k, 0) == x for k, x in c.items())
    uni = is_unimodal_symmetric(omega)
    ok = nonneg and single and sym and uni
    b = None
    if ok:
        D = max(c)
        b = [int(c.get(2 * j - D, 0)) for j in range(D + 1)]
    return ExoticsVerdict(ok, b, nonneg, single, sym, uni)


@dataclass
class DTRecord:
    omega: dict                       # d -> exact Laurent polynomial
    verdicts: dict = field(default_factory=dict)
    cap: int = 0
    quiver_has_cycles: bool = False

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.verdicts.values())

    def nonzero(self) -> dict:
        return {d: w for d, w in self.omega.items() if not w.is_zero()}


def dt_invariants(q: IceQuiver, zeta: Stability, cap: int = 8,
                  window: int = DEFAULT_WINDOW) -> DTRecord:
    T = stack_ic_series(q, cap, window)
    rec = DTRecord({}, cap=cap, quiver_has_cycles=q.principal().has_cycles())
    for fac in hn_factorize(T, zeta):
        if fac.trivial:
            for d in fac.support:
                rec.omega[d] = Scalar()
            continue
        try:
            om = dt_extract(fac.series)
        except NonCommutingSupport as exc:
            raise NonCommutingSupport(f"stability is not generic on {fac.phase}: {exc}") from None
        for d in fac.support:
            rec.omega[d] = om.get(d, Scalar())
    for d, w in rec.omega.items():
        rec.verdicts[d] = no_exotics_check(w)
    return rec


# dilogarithm products and the DT formula for cluster monomials ---------------------

class DegenerateSequence(ValueError):
    pass


def _gate(q: IceQuiver, seq, qp: QP | None, trusted: bool, order: int):
    if trusted:
        return None
    if qp is None:
        qp = qp_from_quiver(q, {}, order=order)
    trace = nondegenerate_along(qp, seq, order)
    if not trace.ok:
        raise DegenerateSequence(f"potential is degenerate at step {trace.failed_at + 1} of {tuple(seq)}")
    return trace


def dilog_factors(cg: CGData) -> list:
    """(dimension vector, exponent) for t = |S| down to 1."""
    out = []
    for sigma, sign in zip(reversed(cg.simples), reversed(cg.signs)):
        if sign == "-":
            out.append((tuple(sigma), 1))
        else:
            out.append((tuple(-x for x in sigma), -1))
    return out


def dilog_product(q: IceQuiver, seq: Sequence[int], cap: int = 8, qp: QP | None = None,
                  trusted: bool = False, order: int = 8, window: int = DEFAULT_WINDOW) -> AffineSeries:
    _gate(q, seq, qp, trusted, order)
    cg = cg_along(q, seq)
    A = form_of(q.principal())
    out = AffineSeries.one(A, cap)
    for d, e in dilog_factors(cg):
        out = out * qdilog(A, d, e, cap, window)
    return out


class NotStabilized(ArithmeticError):
    pass


def _ad_dilog(terms: dict, L, w: tuple, inverse: bool, grade, cap: int, step: int) -> dict:
    """Apply u -> E(y) u E(y)^-1 (or with E(y)^-1) termwise, y = X^w; only
    terms of grade <= cap are kept (grade(y) = step)."""
    out: dict = {}
    for h, c in terms.items():
        lam = pair(L, h, w)
        room = (cap - grade(h)) // step
        # E(y) X^h E(y)^-1 = X^h prod_{j=1}^{lam} (1 + y v^(1-2j))      (lam > 0)
        #                  = X^h prod_{j=1}^{-lam} (1 + y v^(2j-1))^-1  (lam < 0)
        if lam == 0:
            poly = [ONE]
        else:
            k = abs(lam)
            expo = [1 - 2 * j for j in range(1, k + 1)] if lam > 0 else [2 * j - 1 for j in range(1, k + 1)]
            polynomial = (lam > 0) != inverse
            poly = [ONE]
            for a in expo:
                if polynomial:
                    fac = [ONE, Scalar.mono(a)]
                else:
                    fac = [Scalar({a * j: (-1) ** j}) for j in range(room + 1)]
                nxt = [Scalar() for _ in range(min(room, len(poly) + len(fac) - 2) + 1)]
                for i, x in enumerate(poly):
                    for j, y in enumerate(fac):
                        if i + j < len(nxt):
                            nxt[i + j] = nxt[i + j] + x * y
                poly = nxt
        for j, p in enumerate(poly[: room + 1]):
            if p.is_zero():
                continue
            e = tuple(a + j * b for a, b in zip(h, w))
            z = c * p.shift(j * lam)
            out[e] = out[e] + z if e in out else z
    return {e: c for e, c in out.items() if not c.is_zero()}


def _conjugate_adjoint(q: IceQuiver, L, cg: CGData, f, cap: int) -> TorusElement:
    n, m = q.n, q.m
    B = b_matrix(q)
    g0 = cg.g_image(f)

    def grade(h):
        diff = [a - b for a, b in zip(h, g0)]
        return sum(sum(L[i][k] * diff[k] for k in range(n)) for i in range(m))

    terms = {g0: ONE}
    # chi^-1 X chi with chi = E_t ... E_1: innermost conjugation uses E_t
    for sigma, sign in zip(reversed(cg.simples), reversed(cg.signs)):
        c = sigma if sign == "-" else tuple(-x for x in sigma)
        w = tuple(-sum(B[i][k] * c[k] for k in range(m)) for i in range(n))
        terms = _ad_dilog(terms, L, w, inverse=(sign == "-"), grade=grade, cap=cap, step=sum(c))
    return TorusElement(L, terms)


def _conjugate_product(q: IceQuiver, L, cg: CGData, f, cap: int, window: int) -> TorusElement:
    A = form_of(q.principal())
    chi = AffineSeries.one(A, cap)
    for d, e in dilog_factors(cg):
        chi = chi * qdilog(A, d, e, cap, window)
    B = b_matrix(q)
    ichi = iota(B, L, chi)
    X = TorusSeries.monomial(L, B, cg.g_image(f), cap)
    res = ichi.inverse() * X * ichi
    out = {}
    for e, c in res.terms.items():
        if sum(e) == cap and not c.is_zero():
            raise NotStabilized(f"term at the truncation grade {cap}: raise the cap")
        x = res.exponent(e)
        c = _finalize_laurent(c, x)
        if not c.is_zero():
            out[x] = out[x] + c if x in out else c
    return TorusElement(L, out)


def cluster_via_dt(q: IceQuiver, L, seq: Sequence[int], f: Sequence[int], cap: int = 8,
                   qp: QP | None = None, trusted: bool = False, order: int = 8,
                   method: str = "adjoint", window: int = DEFAULT_WINDOW) -> TorusElement:
    """iota(chi_S)^-1 X^(G f) iota(chi_S), checked to be stable under raising the cap.

    "adjoint" applies the conjugations one dilogarithm at a time on Laurent
    coefficients; "product" multiplies the truncated series out literally."""
    require_valid(q)
    L = as_form(L)
    check_compatibility(b_matrix(q), L)
    f = tuple(f)
    if len(f) != q.n or any(x < 0 for x in f):
        raise ValueError(f"f must be a vector in N^{q.n}")
    _gate(q, seq, qp, trusted, order)
    cg = cg_along(q, seq)
    if method == "adjoint":
        a = _conjugate_adjoint(q, L, cg, f, cap)
        b = _conjugate_adjoint(q, L, cg, f, cap + 2)
    elif method == "product":
        a = _conjugate_product(q, L, cg, f, cap, window)
        b = _conjugate_product(q, L, cg, f, cap + 2, window)
    else:
        raise ValueError(f"unknown method {method!r}")
    if a != b:
        raise NotStabilized(f"result changed between cap {cap} and {cap + 2}")
    return a


def stabilizing_cluster_via_dt(q, L, seq, f, cap: int = 8, max_cap: int = 40, **kw) -> tuple:
    """Raise the cap by 2 until cluster_via_dt stabilises; returns (element, cap)."""
    while True:
        try:
            return cluster_via_dt(q, L, seq, f, cap, **kw), cap
        except NotStabilized:
            if cap >= max_cap:
                raise
            cap += 2


# JSON -------------------------------------------------------------------------------

def stability_to_json(z: Stability) -> dict:
    return {"re": [str(x) for x in z.re], "im": [str(x) for x in z.im]}


def stability_from_json(obj: Mapping) -> Stability:
    return Stability(tuple(Fraction(str(x)) for x in obj["re"]),
                     tuple(Fraction(str(x)) for x in obj["im"]))


def dt_record_to_json(rec: DTRecord) -> dict:
    from .scalars import to_json
    out = []
    for d in sorted(rec.omega, key=lambda x: (sum(x), x)):
        v = rec.verdicts.get(d)
        out.append({"d": list(d), "omega": to_json(rec.omega[d]),
                    "no_exotics": bool(v.ok) if v else None,
                    "b": [str(x) for x in v.b] if v and v.b is not None else None})
    return {"cap": rec.cap, "quiver_has_cycles": rec.quiver_has_cycles, "invariants": out}
