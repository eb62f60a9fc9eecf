"""
Exact arithmetic in Q(w), w = exp(i*pi/6) a primitive 12th root of unity.

Elements are stored in the power basis {1, w, w^2, w^3}, reduced with
w^4 = w^2 - 1 (the minimal polynomial x^4 - x^2 + 1).  Internally the four
rational coefficients share one positive denominator, which keeps
multiplication on plain Python integers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

__all__ = [
    "CycNum", "ComplexApprox", "Rat", "ZERO", "ONE", "OMEGA",
    "cyc_add", "cyc_mul", "cyc_inv", "cyc_conj", "embed_numeric", "sqrt3",
    "to_json", "from_json",
]

Rat = Fraction

_OMEGA_C = cmath.exp(1j * math.pi / 6)


def _canon(nums, den):
    if den < 0:
        nums = [-n for n in nums]
        den = -den
    g = den
    for n in nums:
        g = gcd(g, n)
        if g == 1:
            break
    if g != 1:
        nums = [n // g for n in nums]
        den //= g
    return tuple(nums), den


class CycNum:
    """An element c0 + c1 w + c2 w^2 + c3 w^3 of Q(w)."""

    __slots__ = ("_n", "_d", "_hash")

    def __init__(self, c0=0, c1=0, c2=0, c3=0):
        cs = [Fraction(c) for c in (c0, c1, c2, c3)]
        den = 1
        for c in cs:
            den = den * c.denominator // gcd(den, c.denominator)
        nums = [c.numerator * (den // c.denominator) for c in cs]
        self._n, self._d = _canon(nums, den)
        self._hash = None

    @classmethod
    def _raw(cls, nums, den):
        obj = cls.__new__(cls)
        obj._n, obj._d = _canon(nums, den)
        obj._hash = None
        return obj

    @classmethod
    def coerce(cls, x) -> "CycNum":
        if isinstance(x, CycNum):
            return x
        if isinstance(x, (int, Fraction)):
            x = Fraction(x)
            return cls._raw((x.numerator, 0, 0, 0), x.denominator)
        raise TypeError(f"cannot coerce {type(x).__name__} to CycNum")

    # -- accessors -------------------------------------------------------

    @property
    def coeffs(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return tuple(Fraction(n, self._d) for n in self._n)

    c0 = property(lambda self: Fraction(self._n[0], self._d))
    c1 = property(lambda self: Fraction(self._n[1], self._d))
    c2 = property(lambda self: Fraction(self._n[2], self._d))
    c3 = property(lambda self: Fraction(self._n[3], self._d))

    def is_zero(self) -> bool:
        return not any(self._n)

    def is_rational(self) -> bool:
        return not (self._n[1] or self._n[2] or self._n[3])

    def height(self) -> int:
        return max(max(abs(n) for n in self._n), self._d)

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        try:
            o = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        d1, d2 = self._d, o._d
        if d1 == d2:
            return CycNum._raw([a + b for a, b in zip(self._n, o._n)], d1)
        return CycNum._raw([a * d2 + b * d1 for a, b in zip(self._n, o._n)], d1 * d2)

    __radd__ = __add__

    def __neg__(self):
        obj = CycNum.__new__(CycNum)
        obj._n = tuple(-n for n in self._n)
        obj._d = self._d
        obj._hash = None
        return obj

    def __pos__(self):
        return self

    def __sub__(self, other):
        try:
            o = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        try:
            o = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            return CycNum._raw([n * f.numerator for n in self._n], self._d * f.denominator)
        if not isinstance(other, CycNum):
            return NotImplemented
        a0, a1, a2, a3 = self._n
        b0, b1, b2, b3 = other._n
        p0 = a0 * b0
        p1 = a0 * b1 + a1 * b0
        p2 = a0 * b2 + a1 * b1 + a2 * b0
        p3 = a0 * b3 + a1 * b2 + a2 * b1 + a3 * b0
        p4 = a1 * b3 + a2 * b2 + a3 * b1
        p5 = a2 * b3 + a3 * b2
        p6 = a3 * b3
        # w^4 = w^2 - 1, w^5 = w^3 - w, w^6 = -1
        return CycNum._raw((p0 - p4 - p6, p1 - p5, p2 + p4, p3 + p5), self._d * other._d)

    __rmul__ = __mul__

    def inverse(self) -> "CycNum":
        """Solve the 4x4 rational system (multiplication by self) * y = 1."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(w)")
        if self.is_rational():
            return CycNum._raw((self._d, 0, 0, 0), self._n[0])
        basis = [OMEGA_POWERS[j] for j in range(4)]
        cols = [(self * e).coeffs for e in basis]
        # augmented rows: A[i][j] = i-th coefficient of self * w^j
        rows = [[cols[j][i] for j in range(4)] + [Fraction(int(i == 0))] for i in range(4)]
        y = _solve(rows)
        return CycNum(*y)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            f = Fraction(other)
            if not f:
                raise ZeroDivisionError("division by zero in Q(w)")
            return CycNum._raw([n * f.denominator for n in self._n], self._d * f.numerator)
        if not isinstance(other, CycNum):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        try:
            o = CycNum.coerce(other)
        except TypeError:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "CycNum":
        """Complex conjugation, the automorphism w -> w^11 = w - w^3."""
        c0, c1, c2, c3 = self._n
        # w -> w - w^3, w^2 -> 1 - w^2, w^3 -> -w^3
        return CycNum._raw((c0 + c2, c1, -c2, -c1 - c3), self._d)

    # -- comparison ------------------------------------------------------

    def __eq__(self, other):
        if isinstance(other, CycNum):
            return self._d == other._d and self._n == other._n
        if isinstance(other, (int, Fraction)):
            return self == CycNum.coerce(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            if self.is_rational():
                self._hash = hash(Fraction(self._n[0], self._d))
            else:
                self._hash = hash((self._n, self._d))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    # -- display ---------------------------------------------------------

    def __complex__(self):
        return embed_numeric(self).value

    def __repr__(self):
        return f"CycNum({', '.join(repr(str(c)) for c in self.coeffs)})"

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = ["", "w", "w^2", "w^3"][i]
            if mono and abs(c) == 1:
                s = mono
            else:
                s = str(abs(c)) if not mono else f"{abs(c)}*{mono}"
            terms.append(("-" if c < 0 else "+", s))
        if not terms:
            return "0"
        out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, s in terms[1:]:
            out += f" {sign} {s}"
        return out


def _solve(rows):
    """Gauss-Jordan elimination over Fractions on an augmented square system."""
    n = len(rows)
    rows = [list(r) for r in rows]
    for col in range(n):
        piv = next(r for r in range(col, n) if rows[r][col] != 0)
        rows[col], rows[piv] = rows[piv], rows[col]
        p = rows[col][col]
        rows[col] = [v / p for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col] != 0:
                f = rows[r][col]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[col])]
    return [rows[i][n] for i in range(n)]


ZERO = CycNum()
ONE = CycNum(1)
OMEGA = CycNum(0, 1)
OMEGA_POWERS = [CycNum(*[int(i == j) for i in range(4)]) for j in range(4)]


@dataclass(frozen=True)
class ComplexApprox:
    re: float
    im: float
    precision_hint: int = 53

    @property
    def value(self) -> complex:
        return complex(self.re, self.im)


def cyc_add(x: CycNum, y: CycNum) -> CycNum:
    return x + y


def cyc_mul(x: CycNum, y: CycNum) -> CycNum:
    return x * y


def cyc_inv(x: CycNum) -> CycNum:
    return x.inverse()


def cyc_conj(x: CycNum) -> CycNum:
    return x.conj()


def embed_numeric(x: CycNum, precision_hint: int = 53) -> ComplexApprox:
    """Evaluate x at w = exp(i*pi/6).  Display and cross-checks only."""
    if precision_hint <= 53:
        z = sum(complex(c) * _OMEGA_C**i for i, c in enumerate(x.coeffs))
        return ComplexApprox(z.real, z.imag, 53)
    with mpmath.workprec(precision_hint):
        w = mpmath.expjpi(mpmath.mpf(1) / 6)
        z = sum(mpmath.mpf(c.numerator) / c.denominator * w**i for i, c in enumerate(x.coeffs))
        return ComplexApprox(float(z.real), float(z.imag), precision_hint)


def sqrt3() -> CycNum:
    """The positive square root of 3, equal to 2w - w^3."""
    return CycNum(0, 2, 0, -1)


def to_json(x: CycNum) -> list[str]:
    return [str(c) for c in x.coeffs]


def from_json(data) -> CycNum:
    if len(data) != 4:
        raise ValueError("CycNum JSON must have four coefficients")
    return CycNum(*[Fraction(s) for s in data])
