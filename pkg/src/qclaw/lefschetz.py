"""Lefschetz-type Laurent polynomials: nonnegative sums of quantum integers."""

from __future__ import annotations

from dataclasses import dataclass, field

from .scalars import Scalar, quantum_integer


@dataclass(frozen=True)
class LefschetzResult:
    ok: bool
    multiplicities: dict = field(default_factory=dict)  # d -> mult of [d]_v
    remainder: Scalar | None = None

    def reconstruct(self) -> Scalar:
        out = Scalar()
        for d, k in self.multiplicities.items():
            out = out + quantum_integer(d) * k
        return out


def lefschetz_decompose(a: Scalar) -> LefschetzResult:
    """Greedy peeling from the top degree."""
    if not a.exact:
        raise ValueError("Lefschetz decomposition needs an exact Laurent polynomial")
    rem = dict(a.c)
    mult = {}
    while rem:
        top = max(rem)
        c = rem[top]
        if c <= 0 or top < 0:
            return LefschetzResult(False, mult, Scalar(rem))
        mult[top + 1] = mult.get(top + 1, 0) + c
        for k in range(-top, top + 1, 2):
            val = rem.get(k, 0) - c
            if val:
                rem[k] = val
            else:
                rem.pop(k, None)
    return LefschetzResult(True, mult, Scalar())


def parity(a: Scalar) -> str | None:
    """'even' / 'odd' if all exponents share a parity, 'zero' for 0, else None."""
    if not a.c:
        return "zero"
    ps = {k % 2 for k in a.c}
    if len(ps) > 1:
        return None
    return "odd" if ps.pop() else "even"


def is_unimodal_symmetric(a: Scalar) -> bool:
    """Nonnegative, bar-symmetric, single parity and unimodal (no gaps)."""
    if not a.c:
        return True
    if parity(a) is None:
        return False
    if any(c < 0 for c in a.c.values()):
        return False
    if any(a.c.get(-k, 0) != c for k, c in a.c.items()):
        return False
    top = max(a.c)
    seq = [a.c.get(k, 0) for k in range(-top, top + 1, 2)]
    half = seq[: (len(seq) + 1) // 2]
    return all(x > 0 for x in seq) and all(x <= y for x, y in zip(half, half[1:]))
