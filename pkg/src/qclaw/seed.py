"""Quantum seeds: compatible pairs, quantization, mutation of toric frames and
Laurent expansions of quantum cluster monomials."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .embedding import IncompatiblePair, check_compatibility, compatibility_defect
from .lefschetz import lefschetz_decompose, parity
from .quiver import IceQuiver, b_matrix, mutate_quiver, require_valid
from .scalars import eval_classical
from .torus import TorusElement, as_form, is_bar_invariant, pair, right_divide


@dataclass(frozen=True)
class QuantumSeed:
    quiver: IceQuiver
    B: tuple
    L0: tuple
    Ls: tuple
    vars: tuple
    history: tuple = ()

    @property
    def n(self):
        return self.quiver.n

    @property
    def m(self):
        return self.quiver.m


def _tup(M):
    return tuple(tuple(int(x) for x in r) for r in M)


def initial_seed(q: IceQuiver, L) -> QuantumSeed:
    require_valid(q)
    L = as_form(L)
    B = _tup(b_matrix(q))
    check_compatibility(B, L)
    n = q.n
    vs = tuple(TorusElement.monomial(L, tuple(int(i == j) for j in range(n))) for i in range(n))
    return QuantumSeed(q, B, L, L, vs, ())


def quantize(q: IceQuiver):
    """Principal extension (one new frozen vertex n+i with an arrow i -> n+i for
    each principal i) together with a compatible skew form."""
    require_valid(q)
    n, m = q.n, q.m
    counts = dict(q.counts())
    for i in range(1, m + 1):
        counts[(i, n + i)] = 1
    ext = IceQuiver.from_counts(n + m, m, counts)
    B = b_matrix(q)[:m]
    N = n + m
    L = [[0] * N for _ in range(N)]
    for i in range(m):
        L[i][n + i] = -1
        L[n + i][i] = 1
        for j in range(m):
            L[n + i][n + j] = -B[i][j]
    L = as_form(L)
    check_compatibility(_tup(b_matrix(ext)), L)
    return ext, L


def _is_principal_extension(q: IceQuiver) -> bool:
    n, m = q.n, q.m
    if n != 2 * m:
        return False
    for (i, j), c in q.counts().items():
        if i > m or (j > m and (j != i + m or c != 1)):
            return False
    return all(q.count(i, i + m) == 1 for i in range(1, m + 1))


def compatible_form(q: IceQuiver):
    """A skew form compatible with the exchange matrix of q, when one is
    determined by the shape of q: the inverse transpose of B for square
    unimodular B, or the standard form of a principal extension."""
    require_valid(q)
    B = b_matrix(q)
    n, m = q.n, q.m
    if n == m:
        from fractions import Fraction
        M = [[Fraction(B[j][i]) for j in range(n)] + [Fraction(int(i == k)) for k in range(n)]
             for i in range(n)]
        for c in range(n):
            piv = next((r for r in range(c, n) if M[r][c] != 0), None)
            if piv is None:
                raise IncompatiblePair("exchange matrix is singular: no compatible form")
            M[c], M[piv] = M[piv], M[c]
            p = M[c][c]
            M[c] = [x / p for x in M[c]]
            for r in range(n):
                if r != c and M[r][c] != 0:
                    f = M[r][c]
                    M[r] = [x - f * y for x, y in zip(M[r], M[c])]
        L = [row[n:] for row in M]
        if any(x.denominator != 1 for row in L for x in row):
            raise IncompatiblePair("exchange matrix is not unimodular: no integral compatible form")
        L = as_form([[int(x) for x in row] for row in L])
        check_compatibility(_tup(B), L)
        return L
    if _is_principal_extension(q):
        base = IceQuiver.from_counts(m, m, {k: c for k, c in q.counts().items() if k[1] <= m})
        return quantize(base)[1]
    raise IncompatiblePair("no canonical compatible form for this quiver; supply one")


def cluster_monomial(seed: QuantumSeed, d: Sequence[int]) -> TorusElement:
    d = tuple(d)
    if len(d) != seed.n:
        raise ValueError(f"exponent vector must have length {seed.n}")
    if any(x < 0 for x in d[: seed.m]):
        raise ValueError("negative exponent on a cluster variable")
    Ls = seed.Ls
    prefactor = 0
    for k in range(len(d)):
        for l in range(k + 1, len(d)):
            prefactor -= d[k] * d[l] * Ls[k][l]
    out = TorusElement.one(seed.L0)
    for i, x in enumerate(d):
        if x:
            out = out * (seed.vars[i] ** x)
    return out.shift(prefactor)


def _unit(n, s):
    return tuple(int(i == s) for i in range(n))


def mutate_seed(seed: QuantumSeed, s: int) -> QuantumSeed:
    if not 1 <= s <= seed.m:
        raise ValueError(f"cannot mutate at vertex {s}: not principal")
    n = seed.n
    k = s - 1
    col = [seed.B[r][k] for r in range(n)]
    bplus = tuple(max(0, b) for b in col)
    bminus = tuple(max(0, -b) for b in col)
    es = _unit(n, k)
    Ls = seed.Ls
    num = (cluster_monomial(seed, bplus).shift(pair(Ls, bplus, es))
           + cluster_monomial(seed, bminus).shift(pair(Ls, bminus, es)))
    new_var = right_divide(num, seed.vars[k])
    vs = list(seed.vars)
    vs[k] = new_var
    q2 = mutate_quiver(seed.quiver, s)
    B2 = _tup(b_matrix(q2))
    E = [[int(i == j) for j in range(n)] for i in range(n)]
    for r in range(n):
        E[r][k] = max(0, -col[r])
    E[k][k] = -1
    Ls2 = _tup([[sum(E[a][i] * Ls[a][b] * E[b][j] for a in range(n) for b in range(n))
                 for j in range(n)] for i in range(n)])
    bad = compatibility_defect(B2, Ls2)
    if bad is not None:
        raise IncompatiblePair(f"compatibility lost after mutation at {s}: {bad}")
    return QuantumSeed(q2, B2, seed.L0, Ls2, tuple(vs), seed.history + (s,))


def mutate_seed_sequence(seed: QuantumSeed, seq: Sequence[int]) -> QuantumSeed:
    for s in seq:
        seed = mutate_seed(seed, s)
    return seed


def reduce_sequence(seq: Sequence[int]) -> tuple:
    """Cancel adjacent repeated mutations (mutation is an involution)."""
    out = []
    for s in seq:
        if out and out[-1] == s:
            out.pop()
        else:
            out.append(s)
    return tuple(out)


@dataclass
class ExpansionReport:
    coefficients: dict
    witnesses: dict = field(default_factory=dict)
    positive: bool = True
    lefschetz: bool = True
    single_parity: bool = True
    classical_nonnegative: bool = True
    parities: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.positive and self.lefschetz and self.single_parity and self.classical_nonnegative


def report_from_element(y: TorusElement) -> ExpansionReport:
    rep = ExpansionReport(dict(y.terms))
    for e, c in y.items():
        w = lefschetz_decompose(c)
        rep.witnesses[e] = w
        rep.parities[e] = parity(c)
        if any(x < 0 for x in c.c.values()):
            rep.positive = False
        if not w.ok:
            rep.lefschetz = False
        if rep.parities[e] is None:
            rep.single_parity = False
        if eval_classical(c) < 0:
            rep.classical_nonnegative = False
    return rep


def rerooted_seed(initial: QuantumSeed, target: Sequence[int]) -> QuantumSeed:
    """The seed reached along ``target``, relabelled as an initial seed."""
    s = mutate_seed_sequence(initial, target)
    return initial_seed(s.quiver, s.Ls)


def expand(initial: QuantumSeed, target: Sequence[int], monomial_seq: Sequence[int],
           d: Sequence[int]) -> ExpansionReport:
    """Expand mu_monomial_seq(M)(d) in the frame mu_target(M)."""
    root = rerooted_seed(initial, target)
    path = tuple(reversed(tuple(target))) + tuple(monomial_seq)
    final = mutate_seed_sequence(root, path)
    return report_from_element(cluster_monomial(final, d))


def positivity_report(report: ExpansionReport) -> dict:
    kinds = sorted({p for p in report.parities.values() if p is not None})
    return {
        "terms": len(report.coefficients),
        "positive": report.positive,
        "lefschetz": report.lefschetz,
        "single_parity": report.single_parity,
        "classical_nonnegative": report.classical_nonnegative,
        "parities": kinds,
    }


def seed_vars_bar_invariant(seed: QuantumSeed) -> bool:
    return all(is_bar_invariant(x) for x in seed.vars)
