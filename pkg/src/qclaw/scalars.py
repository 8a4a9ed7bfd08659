"""Scalars in one variable v (v**2 = q).

A ``Scalar`` is a Laurent polynomial in v when ``prec`` is None, and a
truncated Laurent series otherwise: every coefficient of v**k with k < prec
is known exactly, nothing is known at or above ``prec``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping


def _clean(coeffs, prec):
    out = {}
    for k, c in coeffs.items():
        if c and (prec is None or k < prec):
            if isinstance(c, Fraction) and c.denominator == 1:
                c = c.numerator
            out[k] = c
    return out


def _pmin(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class Scalar:
    __slots__ = ("c", "prec", "_hash")

    def __init__(self, coeffs: Mapping[int, int] | None = None, prec: int | None = None):
        self.c = _clean(coeffs or {}, prec)
        self.prec = prec
        self._hash = None

    # construction helpers
    @classmethod
    def mono(cls, k: int, c=1) -> "Scalar":
        return cls({k: c})

    @classmethod
    def const(cls, c) -> "Scalar":
        return cls({0: c})

    @classmethod
    def from_list(cls, low: int, coeffs: Iterable[int], prec=None) -> "Scalar":
        return cls({low + i: c for i, c in enumerate(coeffs)}, prec)

    # basic queries
    @property
    def exact(self) -> bool:
        return self.prec is None

    def is_zero(self) -> bool:
        return not self.c

    def valuation(self) -> int | None:
        """Lowest exponent with a known nonzero coefficient; for a zero series
        the precision (nothing below it is nonzero)."""
        if self.c:
            return min(self.c)
        return self.prec

    def degree(self) -> int | None:
        return max(self.c) if self.c else None

    def __getitem__(self, k: int):
        if self.prec is not None and k >= self.prec:
            raise IndexError(f"coefficient of v^{k} beyond precision {self.prec}")
        return self.c.get(k, 0)

    def items(self):
        return sorted(self.c.items())

    # ring operations
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.c)
        for k, c in other.c.items():
            out[k] = out.get(k, 0) + c
        return Scalar(out, _pmin(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return Scalar({k: -c for k, c in self.c.items()}, self.prec)

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Scalar({k: c * other for k, c in self.c.items()}, self.prec)
        other = _coerce(other)
        prec = None
        if self.prec is not None or other.prec is not None:
            va, vb = self.valuation(), other.valuation()
            cand = []
            if self.prec is not None and vb is not None:
                cand.append(self.prec + vb)
            if other.prec is not None and va is not None:
                cand.append(other.prec + va)
            prec = min(cand) if cand else None
        out = {}
        for i, a in self.c.items():
            for j, b in other.c.items():
                k = i + j
                if prec is None or k < prec:
                    out[k] = out.get(k, 0) + a * b
        return Scalar(out, prec)

    __rmul__ = __mul__

    def shift(self, k: int) -> "Scalar":
        """Multiply by v**k."""
        if k == 0:
            return self
        return Scalar({e + k: c for e, c in self.c.items()},
                      None if self.prec is None else self.prec + k)

    def truncate(self, prec: int | None) -> "Scalar":
        return Scalar(self.c, _pmin(self.prec, prec))

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("use series_inverse for negative powers")
        out = Scalar.const(1)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    # comparisons
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Scalar.const(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        return self.c == other.c and self.prec == other.prec

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((tuple(sorted(self.c.items())), self.prec))
        return self._hash

    def agrees(self, other) -> bool:
        """Equality on every exponent known to both operands."""
        other = _coerce(other)
        p = _pmin(self.prec, other.prec)
        keys = set(self.c) | set(other.c)
        return all(self.c.get(k, 0) == other.c.get(k, 0) for k in keys if p is None or k < p)

    def __repr__(self):
        if not self.c:
            body = "0"
        else:
            body = " + ".join(f"{c}*v^{k}" for k, c in self.items())
        if self.prec is not None:
            body += f" + O(v^{self.prec})"
        return body

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.c.values())


def _coerce(x) -> Scalar:
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return Scalar.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a scalar")


ONE = Scalar.const(1)
ZERO = Scalar()
V = Scalar.mono(1)
V_INV = Scalar.mono(-1)


def bar(x: Scalar) -> Scalar:
    """v -> 1/v. Only defined for exact Laurent polynomials."""
    if not x.exact:
        raise ValueError("bar involution needs an exact Laurent polynomial")
    return Scalar({-k: c for k, c in x.c.items()})


def eval_classical(x: Scalar):
    """Evaluate at v = 1."""
    if not x.exact:
        raise ValueError("cannot evaluate a truncated series at v = 1")
    return sum(x.c.values())


def series_inverse(x: Scalar, prec: int | None = None) -> Scalar:
    """Inverse in Z((v)). The lowest coefficient must be a unit (+-1).

    For an exact input ``prec`` gives the absolute precision of the answer;
    for a truncated input the answer carries the precision the data supports.
    """
    if x.is_zero():
        raise ZeroDivisionError("inverse of zero")
    low = min(x.c)
    u = x.c[low]
    if u not in (1, -1):
        raise ValueError(f"lowest coefficient {u} is not a unit")
    if x.prec is not None:
        target = x.prec - 2 * low
        if prec is not None:
            target = min(target, prec)
    elif prec is None:
        if len(x.c) == 1:
            return Scalar({-low: u})
        raise ValueError("exact non-monomial input needs an explicit precision")
    else:
        target = prec
    # y = x / (u v^low) = 1 + r ; 1/y by the standard recursion
    r = {k - low: c * u for k, c in x.c.items()}
    n = target + low  # number of coefficients of 1/y needed
    inv = {}
    if n > 0:
        inv[0] = 1
        for k in range(1, n):
            s = 0
            for j, c in r.items():
                if 0 < j <= k:
                    s += c * inv.get(k - j, 0)
            if s:
                inv[k] = -s
    return Scalar({k - low: c * u for k, c in inv.items()}, target)


def exact_divide(a: Scalar, b: Scalar) -> Scalar:
    """a / b in Z[v, 1/v]; raises ArithmeticError if b does not divide a."""
    if not (a.exact and b.exact):
        raise ValueError("exact division needs Laurent polynomials")
    if b.is_zero():
        raise ZeroDivisionError("division by zero")
    if a.is_zero():
        return ZERO
    if len(b.c) == 1:
        (k, c), = b.c.items()
        out = {}
        for e, x in a.c.items():
            qt, rem = divmod(x, c)
            if rem:
                raise ArithmeticError(f"{b!r} does not divide {a!r}")
            out[e - k] = qt
        return Scalar(out)
    rem = dict(a.c)
    bt = max(b.c)
    bl = min(b.c)
    lead = b.c[bt]
    quot = {}
    while rem:
        top = max(rem)
        if top - bt < min(a.c) - bl:
            raise ArithmeticError(f"{b!r} does not divide {a!r}")
        qc, r0 = divmod(rem[top], lead)
        if r0:
            raise ArithmeticError(f"{b!r} does not divide {a!r}")
        e = top - bt
        quot[e] = qc
        for k, c in b.c.items():
            nk = k + e
            val = rem.get(nk, 0) - qc * c
            if val:
                rem[nk] = val
            else:
                rem.pop(nk, None)
    return Scalar(quot)


def adams(x: Scalar, j: int) -> Scalar:
    """Adams operation on scalars for the signed lambda-ring structure in
    which -v is the line element: (-v) -> (-v)**j, i.e. v**k -> (-1)**((j+1)k) v**(jk)."""
    if j == 1:
        return x
    flip = (j + 1) % 2
    out = {}
    for k, c in x.c.items():
        out[j * k] = -c if (flip and k % 2) else c
    return Scalar(out, None if x.prec is None else j * x.prec)


def quantum_integer(d: int) -> Scalar:
    """[d]_v = v^(1-d) + v^(3-d) + ... + v^(d-1)."""
    if d < 1:
        raise ValueError("quantum integers are indexed by d >= 1")
    return Scalar({k: 1 for k in range(1 - d, d, 2)})


def to_json(x: Scalar) -> dict:
    out = {"coeffs": {str(k): str(c) for k, c in x.items()}}
    if x.prec is not None:
        out["prec"] = x.prec
    return out


def from_json(obj: Mapping) -> Scalar:
    coeffs = {}
    for k, c in obj["coeffs"].items():
        c = Fraction(c)
        coeffs[int(k)] = c.numerator if c.denominator == 1 else c
    return Scalar(coeffs, obj.get("prec"))
