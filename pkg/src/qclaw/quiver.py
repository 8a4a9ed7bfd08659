"""Ice quivers, their mutation, the exchange matrix and the two bilinear forms.

Vertices are numbered 1..n; vertices 1..m are principal (mutable), the rest
frozen. Dimension vectors are plain tuples indexed from 0.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence


class InvalidQuiver(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class IceQuiver:
    n: int
    m: int
    arrows: tuple  # sorted tuple of ((src, tgt), count), count > 0

    @classmethod
    def build(cls, n: int, m: int | None = None, arrows: Iterable = ()) -> "IceQuiver":
        """``arrows`` holds (src, tgt) pairs or (src, tgt, count) triples."""
        counts = Counter()
        for a in arrows:
            if len(a) == 2:
                counts[(a[0], a[1])] += 1
            else:
                counts[(a[0], a[1])] += a[2]
        return cls.from_counts(n, n if m is None else m, counts)

    @classmethod
    def from_counts(cls, n: int, m: int, counts: Mapping) -> "IceQuiver":
        items = tuple(sorted((tuple(k), int(c)) for k, c in counts.items() if c > 0))
        return cls(n, m, items)

    def counts(self) -> dict:
        return dict(self.arrows)

    def count(self, i: int, j: int) -> int:
        return self.counts().get((i, j), 0)

    def arrow_list(self) -> list:
        """Individual arrows, multiplicities expanded, in canonical order."""
        out = []
        for (i, j), c in self.arrows:
            out.extend([(i, j)] * c)
        return out

    def num_arrows(self) -> int:
        return sum(c for _, c in self.arrows)

    def principal(self) -> "IceQuiver":
        """Full subquiver on the principal vertices."""
        return IceQuiver.from_counts(
            self.m, self.m,
            {(i, j): c for (i, j), c in self.arrows if i <= self.m and j <= self.m})

    def has_cycles(self) -> bool:
        adj = {}
        for (i, j), _ in self.arrows:
            adj.setdefault(i, []).append(j)
        state = {}

        def visit(u):
            state[u] = 1
            for w in adj.get(u, []):
                if state.get(w) == 1 or (w not in state and visit(w)):
                    return True
            state[u] = 2
            return False

        return any(u not in state and visit(u) for u in range(1, self.n + 1))

    def __str__(self):
        arr = ", ".join(f"{i}->{j}" + (f" x{c}" if c > 1 else "") for (i, j), c in self.arrows)
        return f"IceQuiver(n={self.n}, m={self.m}, [{arr}])"


def validate_quiver(q: IceQuiver) -> list:
    errors = []
    if q.m > q.n:
        errors.append(f"principal count m={q.m} exceeds n={q.n}")
    if q.m < 0 or q.n < 0:
        errors.append("negative vertex count")
    counts = q.counts()
    for (i, j), c in q.arrows:
        if not (1 <= i <= q.n and 1 <= j <= q.n):
            errors.append(f"arrow {i}->{j} has an endpoint outside 1..{q.n}")
        elif i == j:
            errors.append(f"loop at {i}")
        elif i < j and (j, i) in counts:
            errors.append(f"2-cycle {{{i},{j}}}")
    return errors


def require_valid(q: IceQuiver) -> None:
    errors = validate_quiver(q)
    if errors:
        raise InvalidQuiver(errors)


def b_matrix(q: IceQuiver) -> list:
    """n x m matrix with entries a_ji - a_ij (frozen columns dropped)."""
    require_valid(q)
    B = [[0] * q.m for _ in range(q.n)]
    for (i, j), c in q.arrows:
        if j <= q.m:
            B[i - 1][j - 1] -= c
        if i <= q.m:
            B[j - 1][i - 1] += c
    return B


def b_matrix_principal(q: IceQuiver) -> list:
    return b_matrix(q)[: q.m]


def fz_mutate_matrix(B: Sequence[Sequence[int]], k: int) -> list:
    """Fomin-Zelevinsky mutation of an n x m matrix at column k (1-based)."""
    k -= 1
    out = [list(r) for r in B]
    for i in range(len(B)):
        for j in range(len(B[0])):
            if i == k or j == k:
                out[i][j] = -B[i][j]
            else:
                bik, bkj = B[i][k], B[k][j]
                if bik * bkj > 0:
                    s = 1 if bik > 0 else -1
                    out[i][j] = B[i][j] + s * bik * bkj
    return out


def mutate_quiver(q: IceQuiver, s: int) -> IceQuiver:
    require_valid(q)
    if not 1 <= s <= q.m:
        raise ValueError(f"cannot mutate at vertex {s}: not principal (m={q.m})")
    counts = Counter()
    into = {i: c for (i, j), c in q.arrows if j == s}
    out_of = {j: c for (i, j), c in q.arrows if i == s}
    for (i, j), c in q.arrows:
        if i == s:
            counts[(j, i)] += c
        elif j == s:
            counts[(j, i)] += c
        else:
            counts[(i, j)] += c
    for i, ci in into.items():
        for j, cj in out_of.items():
            if i != j:
                counts[(i, j)] += ci * cj
    # cancel opposite pairs
    for (i, j) in list(counts):
        if i < j and (j, i) in counts:
            c = min(counts[(i, j)], counts[(j, i)])
            counts[(i, j)] -= c
            counts[(j, i)] -= c
    return IceQuiver.from_counts(q.n, q.m, counts)


def mutate_sequence(q: IceQuiver, seq: Iterable[int]) -> IceQuiver:
    for s in seq:
        q = mutate_quiver(q, s)
    return q


def _pad(q: IceQuiver, d: Sequence[int]) -> tuple:
    if len(d) == q.n:
        return tuple(d)
    if len(d) == q.m:
        return tuple(d) + (0,) * (q.n - q.m)
    raise ValueError(f"vector of length {len(d)} does not fit a quiver with n={q.n}, m={q.m}")


def euler_form(q: IceQuiver, d: Sequence[int], e: Sequence[int]) -> int:
    d, e = _pad(q, d), _pad(q, e)
    val = sum(x * y for x, y in zip(d, e))
    for (i, j), c in q.arrows:
        val -= c * d[j - 1] * e[i - 1]
    return val


def antisym_form(q: IceQuiver, d: Sequence[int], e: Sequence[int]) -> int:
    return euler_form(q, d, e) - euler_form(q, e, d)


def antisym_matrix(q: IceQuiver) -> list:
    """Matrix A with <d, e> = d^T A e, on the principal vertices."""
    m = q.m
    A = [[0] * m for _ in range(m)]
    for (i, j), c in q.arrows:
        if i <= m and j <= m:
            A[i - 1][j - 1] += c
            A[j - 1][i - 1] -= c
    return A


def canonical_form(q: IceQuiver) -> tuple:
    return (q.n, q.m, q.arrows)


# JSON ---------------------------------------------------------------------

def quiver_to_json(q: IceQuiver) -> dict:
    return {"n": q.n, "m": q.m, "arrows": [[i, j, c] for (i, j), c in q.arrows]}


def quiver_from_json(obj: Mapping, validate: bool = True) -> IceQuiver:
    n = int(obj["n"])
    m = int(obj.get("m", n))
    arrows = []
    for a in obj.get("arrows", []):
        if len(a) == 2:
            arrows.append((int(a[0]), int(a[1]), 1))
        else:
            arrows.append((int(a[0]), int(a[1]), int(a[2])))
    q = IceQuiver.build(n, m, arrows)
    if validate:
        require_valid(q)
    return q


def file_arrow_list(obj: Mapping) -> list:
    """Individual arrows in the order they occur in a quiver file."""
    out = []
    for a in obj.get("arrows", []):
        c = int(a[2]) if len(a) > 2 else 1
        out.extend([(int(a[0]), int(a[1]))] * c)
    return out


def load_quiver(path: str) -> IceQuiver:
    with open(path) as fh:
        return quiver_from_json(json.load(fh))


# standard examples used across the package and tests
def a2() -> IceQuiver:
    return IceQuiver.build(2, 2, [(2, 1)])


def kronecker(k: int = 2) -> IceQuiver:
    return IceQuiver.build(2, 2, [(2, 1, k)])


def three_cycle() -> IceQuiver:
    return IceQuiver.build(3, 3, [(1, 2), (2, 3), (3, 1)])
