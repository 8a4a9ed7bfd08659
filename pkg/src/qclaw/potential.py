"""Quivers with potential: cyclic derivatives, premutation, truncated
reduction and mutation.

Arrows carry identities (their index in ``QP.arrows``). A word is a tuple of
arrow ids read right to left: in (c, b, a) the arrow a acts first, so
t(a) = s(b) and t(b) = s(c). Cyclic words are stored as their
lexicographically least rotation.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .quiver import IceQuiver, file_arrow_list, require_valid

DEFAULT_ORDER = 8


def canonical(word: Sequence[int]) -> tuple:
    word = tuple(word)
    if not word:
        raise ValueError("empty cyclic word")
    return min(word[i:] + word[:i] for i in range(len(word)))


@dataclass(frozen=True)
class QP:
    n: int
    m: int
    arrows: tuple            # arrow id -> (src, tgt)
    names: tuple             # arrow id -> label
    terms: tuple             # sorted ((word, Fraction), ...)
    order: int = DEFAULT_ORDER
    truncated: bool = False

    @property
    def potential(self) -> dict:
        return dict(self.terms)

    def quiver(self) -> IceQuiver:
        return IceQuiver.from_counts(self.n, self.m, Counter(self.arrows))

    def src(self, a):
        return self.arrows[a][0]

    def tgt(self, a):
        return self.arrows[a][1]

    def word_str(self, w) -> str:
        return "".join(self.names[a] if len(self.names[a]) == 1 else f"({self.names[a]})" for a in w)

    def describe(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.terms:
            coef = "" if c == 1 else ("-" if c == -1 else f"{c}*")
            parts.append(f"{coef}{self.word_str(w)}")
        return " + ".join(parts)


def _default_names(k: int) -> tuple:
    letters = "abcdefghijklmnopqrstuvwxyz"
    if k <= len(letters):
        return tuple(letters[:k])
    return tuple(f"a{i}" for i in range(k))


def is_cycle(arrows, word) -> bool:
    L = len(word)
    for i in range(L):
        # word[i + 1] acts just before word[i]
        if arrows[word[(i + 1) % L]][1] != arrows[word[i]][0]:
            return False
    return True


def make_qp(n: int, m: int, arrows: Sequence, potential: Mapping | None = None,
            names: Sequence[str] | None = None, order: int = DEFAULT_ORDER,
            truncated: bool = False) -> QP:
    arrows = tuple((int(s), int(t)) for s, t in arrows)
    names = tuple(names) if names is not None else _default_names(len(arrows))
    acc: dict = {}
    for w, c in (potential or {}).items():
        c = Fraction(c)
        if not c:
            continue
        if not is_cycle(arrows, w):
            raise ValueError(f"word {w} is not a cycle")
        if len(w) > order:
            truncated = True
            continue
        w = canonical(w)
        acc[w] = acc.get(w, 0) + c
    terms = tuple(sorted((w, c) for w, c in acc.items() if c))
    return QP(n, m, arrows, names, terms, order, truncated)


def qp_from_quiver(q: IceQuiver, potential: Mapping | None = None,
                   order: int = DEFAULT_ORDER) -> QP:
    require_valid(q)
    return make_qp(q.n, q.m, q.arrow_list(), potential, order=order)


def three_cycle_qp(order: int = DEFAULT_ORDER) -> QP:
    """a: 1->2, b: 2->3, c: 3->1 with W = cba."""
    return make_qp(3, 3, [(1, 2), (2, 3), (3, 1)], {(2, 1, 0): 1}, order=order)


# cyclic derivative -----------------------------------------------------------

def cyclic_derivative(qp: QP, a: int) -> dict:
    """Sum over occurrences of a in each cyclic word c = (b a g) of g b;
    returns a combination of paths from t(a) to s(a)."""
    if not 0 <= a < len(qp.arrows):
        raise ValueError(f"arrow {a} is not in the quiver")
    out: dict = {}
    for w, c in qp.terms:
        for i, x in enumerate(w):
            if x == a:
                path = w[i + 1:] + w[:i]
                out[path] = out.get(path, 0) + c
    return {p: c for p, c in out.items() if c}


# premutation -----------------------------------------------------------------

def premutate(qp: QP, s: int) -> QP:
    if not 1 <= s <= qp.m:
        raise ValueError(f"cannot mutate at vertex {s}: not principal")
    require_valid(qp.quiver())
    arrows, names = qp.arrows, qp.names
    into = [a for a, (x, y) in enumerate(arrows) if y == s]
    out_of = [a for a, (x, y) in enumerate(arrows) if x == s]
    new_arrows, new_names, remap = [], [], {}
    for a, (x, y) in enumerate(arrows):
        if x != s and y != s:
            remap[a] = len(new_arrows)
            new_arrows.append((x, y))
            new_names.append(names[a])
    rev = {}
    for a in into + out_of:
        x, y = arrows[a]
        rev[a] = len(new_arrows)
        new_arrows.append((y, x))
        new_names.append(names[a] + "*")
    comp = {}
    for c in out_of:
        for b in into:
            comp[(c, b)] = len(new_arrows)
            new_arrows.append((arrows[b][0], arrows[c][1]))
            new_names.append(f"[{names[c]}{names[b]}]")
    pot: dict = {}
    for w, coeff in qp.terms:
        L = len(w)
        j = next(i for i in range(L) if arrows[w[i]][1] != s)
        r = w[j:] + w[:j]
        nw, i = [], 0
        while i < L:
            x = r[i]
            if arrows[x][0] == s:
                nw.append(comp[(x, r[i + 1])])
                i += 2
            else:
                nw.append(remap[x])
                i += 1
        nw = canonical(nw)
        pot[nw] = pot.get(nw, 0) + coeff
    for (c, b), cb in comp.items():
        w = canonical((cb, rev[b], rev[c]))
        pot[w] = pot.get(w, 0) + 1
    return make_qp(qp.n, qp.m, new_arrows, pot, new_names, qp.order, qp.truncated)


# reduction -------------------------------------------------------------------

class ReductionError(RuntimeError):
    pass


def _substitute(terms: Mapping, subs: Mapping, order: int):
    """Apply the simultaneous substitution arrow -> {path: coeff}; words longer
    than ``order`` are dropped. Returns (terms, truncated_flag)."""
    out: dict = {}
    truncated = False
    for w, c in terms.items():
        partial = {(): Fraction(c)}
        for x in w:
            rep = subs.get(x, {(x,): 1})
            nxt: dict = {}
            for p, k in partial.items():
                for u, k2 in rep.items():
                    if len(p) + len(u) > order:
                        truncated = True
                        continue
                    nxt[p + u] = nxt.get(p + u, 0) + k * k2
            partial = nxt
        for p, k in partial.items():
            if k:
                cw = canonical(p)
                out[cw] = out.get(cw, 0) + k
    return {w: c for w, c in out.items() if c}, truncated


def _normal_form(M):
    """Invertible U, V with U M V = diag(1, .., 1, 0, ..); returns (U, V, rank)."""
    r, c = len(M), len(M[0]) if M else 0
    A = [[Fraction(x) for x in row] for row in M]
    U = [[Fraction(int(i == j)) for j in range(r)] for i in range(r)]
    V = [[Fraction(int(i == j)) for j in range(c)] for i in range(c)]
    rank = 0
    for k in range(min(r, c)):
        piv = next(((i, j) for i in range(k, r) for j in range(k, c) if A[i][j] != 0), None)
        if piv is None:
            break
        i, j = piv
        A[k], A[i] = A[i], A[k]
        U[k], U[i] = U[i], U[k]
        for row in A:
            row[k], row[j] = row[j], row[k]
        for row in V:
            row[k], row[j] = row[j], row[k]
        p = A[k][k]
        A[k] = [x / p for x in A[k]]
        U[k] = [x / p for x in U[k]]
        for i2 in range(r):
            if i2 != k and A[i2][k] != 0:
                f = A[i2][k]
                A[i2] = [x - f * y for x, y in zip(A[i2], A[k])]
                U[i2] = [x - f * y for x, y in zip(U[i2], U[k])]
        for j2 in range(c):
            if j2 != k and A[k][j2] != 0:
                f = A[k][j2]
                for row in A:
                    row[j2] -= f * row[k]
                for row in V:
                    row[j2] -= f * row[k]
        rank += 1
    return U, V, rank


def reduce_qp(qp: QP, order: int | None = None) -> QP:
    """Split off the trivial part of the potential to the given order and
    delete the arrows it pairs up."""
    N = qp.order if order is None else order
    arrows = qp.arrows
    terms = {w: c for w, c in qp.terms if len(w) <= N}
    truncated = qp.truncated or len(terms) < len(qp.terms)
    if any(len(w) == 1 for w in terms):
        raise ReductionError("potential has a loop term")

    # diagonalise the quadratic part, one vertex pair at a time
    pairs = []
    vertex_pairs = sorted({tuple(sorted(arrows[w[0]])) for w in terms if len(w) == 2})
    for (i, j) in vertex_pairs:
        As = [a for a, e in enumerate(arrows) if e == (i, j)]
        Bs = [b for b, e in enumerate(arrows) if e == (j, i)]
        M = [[terms.get(canonical((a, b)), 0) for b in Bs] for a in As]
        U, V, rank = _normal_form(M)
        subs = {}
        for k, a in enumerate(As):
            subs[a] = {(As[r],): U[r][k] for r in range(len(As)) if U[r][k]}
        for l, b in enumerate(Bs):
            subs[b] = {(Bs[s],): V[l][s] for s in range(len(Bs)) if V[l][s]}
        terms, t = _substitute(terms, subs, N)
        truncated = truncated or t
        pairs.extend((As[r], Bs[r]) for r in range(rank))

    trivial_a = {a: b for a, b in pairs}
    trivial_b = {b: a for a, b in pairs}
    quad = {canonical((a, b)) for a, b in pairs}
    for w in quad:
        if terms.get(w) != 1:
            raise ReductionError(f"quadratic normal form failed at {w}")

    for _ in range(N + 1):
        dirty = [(w, c) for w, c in terms.items()
                 if w not in quad and any(x in trivial_a or x in trivial_b for x in w)]
        if not dirty:
            break
        L = min(len(w) for w, _ in dirty)
        subs: dict = {}
        for w, c in sorted(dirty):
            if len(w) != L:
                continue
            pos = next((p for p, x in enumerate(w) if x in trivial_b), None)
            if pos is not None:
                b = w[pos]
                a = trivial_b[b]
                u = w[pos + 1:] + w[:pos]
                rep = subs.setdefault(a, {(a,): Fraction(1)})
                rep[u] = rep.get(u, 0) - c
            else:
                pos = next(p for p, x in enumerate(w) if x in trivial_a)
                a = w[pos]
                b = trivial_a[a]
                u = w[pos + 1:] + w[:pos]
                rep = subs.setdefault(b, {(b,): Fraction(1)})
                rep[u] = rep.get(u, 0) - c
        terms, t = _substitute(terms, subs, N)
        truncated = truncated or t
    else:
        raise ReductionError(f"trivial part did not decouple within order {N}")

    dead = set(trivial_a) | set(trivial_b)
    for w in quad:
        if terms.get(w) != 1:
            raise ReductionError("quadratic pair coefficient changed during reduction")
        del terms[w]
    for w in terms:
        if any(x in dead for x in w):
            raise ReductionError("reduced potential still involves a deleted arrow")
    keep = [a for a in range(len(arrows)) if a not in dead]
    idx = {a: i for i, a in enumerate(keep)}
    new_terms = {tuple(idx[x] for x in w): c for w, c in terms.items()}
    return make_qp(qp.n, qp.m, [arrows[a] for a in keep], new_terms,
                   [qp.names[a] for a in keep], N, truncated)


def qp_mutate(qp: QP, s: int, order: int | None = None) -> QP:
    return reduce_qp(premutate(qp, s), order)


def has_two_cycles(q: IceQuiver) -> bool:
    c = q.counts()
    return any((j, i) in c for (i, j) in c)


@dataclass
class NondegeneracyTrace:
    ok: bool
    steps: list = field(default_factory=list)   # (vertex, QP after the step)
    failed_at: int | None = None
    truncated: bool = False


def nondegenerate_along(qp: QP, seq: Sequence[int], order: int | None = None) -> NondegeneracyTrace:
    N = qp.order if order is None else order
    trace = NondegeneracyTrace(True, truncated=qp.truncated)
    cur = qp
    for t, s in enumerate(seq):
        nxt = qp_mutate(cur, s, N)
        trace.steps.append((s, nxt))
        trace.truncated = trace.truncated or nxt.truncated
        if has_two_cycles(nxt.quiver()):
            trace.ok = False
            trace.failed_at = t
            return trace
        cur = nxt
    return trace


# random potentials -------------------------------------------------------------

def enumerate_cycles(arrows: Sequence, max_len: int, min_len: int = 1) -> list:
    """All cyclic words of length min_len..max_len, canonical and sorted."""
    out = set()
    by_src: dict = {}
    for a, (x, y) in enumerate(arrows):
        by_src.setdefault(x, []).append(a)

    def walk(start, v, acting):
        if len(acting) > max_len:
            return
        if acting and v == start and len(acting) >= min_len:
            out.add(canonical(tuple(reversed(acting))))
        if len(acting) == max_len:
            return
        for a in by_src.get(v, []):
            walk(start, arrows[a][1], acting + [a])

    for v in sorted(by_src):
        walk(v, v, [])
    return sorted(out, key=lambda w: (len(w), w))


def random_potential(q: IceQuiver, max_len: int, rng_seed: int, order: int = DEFAULT_ORDER,
                     arrows: Sequence | None = None) -> QP:
    if max_len < 3:
        raise ValueError("random potentials use cycles of length >= 3")
    require_valid(q)
    arrows = list(arrows) if arrows is not None else q.arrow_list()
    rng = random.Random(rng_seed)
    pot = {}
    for w in enumerate_cycles(arrows, max_len, 3):
        c = rng.randint(-2, 2)
        if c:
            pot[w] = c
    return make_qp(q.n, q.m, arrows, pot, order=order)


# JSON -------------------------------------------------------------------------

def potential_to_json(qp: QP) -> dict:
    return {"terms": [{"word": list(w), "num": c.numerator, "den": c.denominator}
                      for w, c in qp.terms],
            "order": qp.order}


def qp_to_json(qp: QP) -> dict:
    return {"n": qp.n, "m": qp.m,
            "arrows": [[s, t] for s, t in qp.arrows],
            "names": list(qp.names),
            "potential": potential_to_json(qp),
            "truncated": qp.truncated}


def qp_from_files(quiver_obj: Mapping, potential_obj: Mapping | None, order: int | None = None) -> QP:
    arrows = file_arrow_list(quiver_obj)
    n = int(quiver_obj["n"])
    m = int(quiver_obj.get("m", n))
    require_valid(IceQuiver.build(n, m, arrows))
    pot = {}
    N = order
    if potential_obj:
        for t in potential_obj.get("terms", []):
            w = tuple(int(x) for x in t["word"])
            c = Fraction(int(t.get("num", 1)), int(t.get("den", 1)))
            pot[w] = pot.get(w, 0) + c
        if N is None:
            N = int(potential_obj.get("order", DEFAULT_ORDER))
    return make_qp(n, m, arrows, pot, order=N or DEFAULT_ORDER)
