"""
2x2 matrices over an exact field, extended Moebius maps, and word evaluation.

An :class:`ExtMoebius` is a matrix together with a ``flip`` flag; with
``flip=True`` the map is z -> (a conj(z) + b) / (c conj(z) + d).  Composition
twists the right factor by complex conjugation:

    (M1, f1) o (M2, f2) = (M1 * conj^f1(M2), f1 xor f2)

Words act leftmost-outermost: ``g1 g2 ... gn`` is the map g1 o g2 o ... o gn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping

import mpmath

from .cyclofield import CycNum, ONE, ZERO, OMEGA, embed_numeric
from . import cyclofield

__all__ = [
    "Mat2", "ExtMoebius", "ProjPoint", "INFINITY", "Representation",
    "SingularMatrix", "UnknownGenerator", "NoSquareRootFound", "NotHyperbolic",
    "gen_a", "gen_b", "default_representation",
    "compose", "inverse", "eval_word", "is_projective_identity", "trace", "det",
    "normalize_to_sl", "field_sqrt", "fixed_points", "diagonalize_hyperbolic",
    "mat_to_json", "mat_from_json", "moebius_to_json", "moebius_from_json",
    "representation_to_json", "representation_from_json",
]


class SingularMatrix(ArithmeticError):
    pass


class UnknownGenerator(KeyError):
    pass


class NoSquareRootFound(ArithmeticError):
    pass


class NotHyperbolic(ValueError):
    pass


def _conj(x):
    return x.conj() if hasattr(x, "conj") else x


@dataclass(frozen=True)
class Mat2:
    """The matrix [[a, b], [c, d]] over any exact field."""

    a: Any
    b: Any
    c: Any
    d: Any

    @classmethod
    def identity(cls, one=ONE, zero=ZERO) -> "Mat2":
        return cls(one, zero, zero, one)

    @classmethod
    def diag(cls, x, y, zero=ZERO) -> "Mat2":
        return cls(x, zero, zero, y)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, other: "Mat2") -> "Mat2":
        if not isinstance(other, Mat2):
            return NotImplemented
        a, b, c, d = self.entries()
        e, f, g, h = other.entries()
        return Mat2(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def scale(self, s) -> "Mat2":
        return Mat2(self.a * s, self.b * s, self.c * s, self.d * s)

    def __neg__(self):
        return Mat2(-self.a, -self.b, -self.c, -self.d)

    def det(self):
        return self.a * self.d - self.b * self.c

    def trace(self):
        return self.a + self.d

    def adjugate(self) -> "Mat2":
        return Mat2(self.d, -self.b, -self.c, self.a)

    def inverse(self) -> "Mat2":
        dt = self.det()
        if not dt:
            raise SingularMatrix(f"singular matrix {self}")
        adj = self.adjugate()
        if dt == 1:
            return adj
        inv = 1 / dt
        return adj.scale(inv)

    def conj(self) -> "Mat2":
        return Mat2(*(_conj(x) for x in self.entries()))

    def map(self, fn) -> "Mat2":
        return Mat2(*(fn(x) for x in self.entries()))

    def is_scalar(self) -> bool:
        return not self.b and not self.c and self.a == self.d

    def is_identity(self) -> bool:
        return self.is_scalar() and self.a == 1

    def __str__(self):
        return f"[[{self.a}, {self.b}], [{self.c}, {self.d}]]"


def trace(m: Mat2):
    return m.trace()


def det(m: Mat2):
    return m.det()


@dataclass(frozen=True)
class ExtMoebius:
    mat: Mat2
    flip: bool = False

    @classmethod
    def identity(cls) -> "ExtMoebius":
        return cls(Mat2.identity(), False)

    def __call__(self, z):
        """Apply to a complex number (numerically) or a ProjPoint (exactly)."""
        if isinstance(z, ProjPoint):
            return self.apply_exact(z)
        z = complex(z)
        if self.flip:
            z = z.conjugate()
        a, b, c, d = (complex(x) for x in self.mat.entries())
        den = c * z + d
        if den == 0:
            return complex("inf")
        return (a * z + b) / den

    def apply_exact(self, p: "ProjPoint") -> "ProjPoint":
        x, y = p.homogeneous()
        if self.flip:
            x, y = _conj(x), _conj(y)
        a, b, c, d = self.mat.entries()
        return ProjPoint.from_homogeneous(a * x + b * y, c * x + d * y)


def compose(m1: ExtMoebius, m2: ExtMoebius) -> ExtMoebius:
    right = m2.mat.conj() if m1.flip else m2.mat
    return ExtMoebius(m1.mat * right, m1.flip != m2.flip)


def inverse(m: ExtMoebius) -> ExtMoebius:
    inv = m.mat.inverse()
    return ExtMoebius(inv.conj() if m.flip else inv, m.flip)


def is_projective_identity(m: ExtMoebius) -> bool:
    mat = m.mat if isinstance(m, ExtMoebius) else m
    flip = m.flip if isinstance(m, ExtMoebius) else False
    return not flip and mat.is_scalar() and bool(mat.a)


Representation = Mapping[str, ExtMoebius]


def eval_word(w, rep: Representation, alphabet=None) -> ExtMoebius:
    """Evaluate a word (a ``Word`` or a letter string) under ``rep``.

    Lower-case letters name generators and upper-case letters their inverses
    when ``w`` is a string; for a ``Word`` generator g is named
    ``alphabet.names[g]`` (the two-generator alphabet by default).
    """
    letters = _letters(w, alphabet)
    cache: dict[tuple[str, int], ExtMoebius] = {}
    result = ExtMoebius.identity()
    for name, sign in letters:
        key = (name, sign)
        if key not in cache:
            if name not in rep:
                raise UnknownGenerator(name)
            cache[key] = rep[name] if sign > 0 else inverse(rep[name])
        result = compose(result, cache[key])
    return result


def _letters(w, alphabet=None):
    if isinstance(w, str):
        out = []
        for ch in w:
            if ch.isspace():
                continue
            out.append((ch.lower(), 1 if ch.islower() else -1))
        return out
    if alphabet is None:
        from .freewords import TWO_GEN as alphabet
    return [(alphabet.name(g), s) for g, s in w.letters]


# -- the default two-generator representation -------------------------------

_WBAR = cyclofield.cyc_conj(OMEGA)

gen_a = ExtMoebius(Mat2(ONE, ONE + OMEGA * OMEGA, ONE, ZERO), flip=True)
gen_b = ExtMoebius(
    Mat2(-3 * _WBAR, 9 * OMEGA - 6 * _WBAR, OMEGA + _WBAR, -7 * OMEGA + 5 * _WBAR),
    flip=False,
)


def default_representation() -> dict[str, ExtMoebius]:
    return {"a": gen_a, "b": gen_b}


# -- square roots and normalization -----------------------------------------

DEFAULT_HEIGHT_BOUND = 10**6


def _is_positive(x: CycNum) -> bool:
    z = embed_numeric(x)
    if abs(z.re) > 1e-12:
        return z.re > 0
    return z.im > 0


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    rn, rd = math.isqrt(q.numerator), math.isqrt(q.denominator)
    if rn * rn == q.numerator and rd * rd == q.denominator:
        return Fraction(rn, rd)
    return None


def field_sqrt(x: CycNum, height_bound: int = DEFAULT_HEIGHT_BOUND, dps: int = 50):
    """Return y in Q(w) with y*y == x, or ``None`` if none was recognized.

    The root is guessed numerically at the two embeddings w -> exp(i pi/6) and
    w -> exp(5 i pi/6) (the other two are their complex conjugates), the four
    coefficients are recovered by a real linear solve with rational
    reconstruction, and the candidate is verified exactly.  ``None`` does not
    prove that no root exists.  The returned root is normalized to have
    positive real part (positive imaginary part on ties).
    """
    x = CycNum.coerce(x)
    if x.is_zero():
        return ZERO
    if x.is_rational():
        r = _rational_sqrt(x.c0)
        if r is not None:
            return CycNum(r)
    with mpmath.workdps(dps):
        roots = [mpmath.expjpi(mpmath.mpf(k) / 6) for k in (1, 5)]
        vals = [sum(mpmath.mpf(c.numerator) / c.denominator * r**i
                    for i, c in enumerate(x.coeffs)) for r in roots]
        s1 = mpmath.sqrt(vals[0])
        for sign in (1, -1):
            s5 = sign * mpmath.sqrt(vals[1])
            rows, rhs = [], []
            for r, s in ((roots[0], s1), (roots[1], s5)):
                powers = [r**i for i in range(4)]
                rows.append([p.real for p in powers])
                rhs.append(s.real)
                rows.append([p.imag for p in powers])
                rhs.append(s.imag)
            try:
                sol = mpmath.lu_solve(mpmath.matrix(rows), mpmath.matrix(rhs))
            except ZeroDivisionError:
                continue
            coeffs = []
            for v in sol:
                f = Fraction(str(mpmath.nstr(v, dps - 5, strip_zeros=False))).limit_denominator(height_bound)
                coeffs.append(f)
            y = CycNum(*coeffs)
            if y * y == x:
                return y if _is_positive(y) else -y
    return None


def normalize_to_sl(m: Mat2, height_bound: int = DEFAULT_HEIGHT_BOUND) -> Mat2:
    """Divide by the square root of the determinant (positive-real branch)."""
    dt = m.det()
    if dt == 1:
        return m
    s = field_sqrt(dt, height_bound)
    if s is None:
        raise NoSquareRootFound(f"no square root recognized for det {dt}")
    return m.scale(s.inverse())


# -- fixed points ------------------------------------------------------------

@dataclass(frozen=True)
class ProjPoint:
    """A point of the projective line: a field element, or infinity when ``z`` is None."""

    z: Any = None

    @property
    def is_infinity(self) -> bool:
        return self.z is None

    def homogeneous(self):
        if self.z is None:
            return (ONE, ZERO)
        return (self.z, ONE)

    @classmethod
    def from_homogeneous(cls, x, y) -> "ProjPoint":
        if not y:
            if not x:
                raise ValueError("[0:0] is not a projective point")
            return cls(None)
        return cls(x / y)

    def __str__(self):
        return "oo" if self.z is None else str(self.z)


INFINITY = ProjPoint(None)


def fixed_points(m: Mat2) -> tuple[ProjPoint, ProjPoint]:
    """Solutions of c z^2 + (d - a) z - b = 0 on the projective line."""
    if m.is_scalar():
        raise ValueError("a scalar matrix fixes every point")
    a, b, c, d = m.entries()
    if not c:
        # infinity is fixed; the other root solves (d - a) z = b
        if a == d:
            return (INFINITY, INFINITY)
        return (ProjPoint(b / (a - d)), INFINITY)
    disc = (d - a) * (d - a) + 4 * b * c
    s = field_sqrt(disc)
    if s is None:
        raise NoSquareRootFound(f"discriminant {disc} has no recognized square root")
    two_c = c * 2
    return (ProjPoint((a - d + s) / two_c), ProjPoint((a - d - s) / two_c))


def diagonalize_hyperbolic(m: Mat2) -> tuple[Mat2, Mat2]:
    """Return (P, D) with P m P^-1 = D = diag(lam, 1/lam), |lam| > 1.

    P is the map z -> (z - p_rep) / (z - p_att), sending the attracting fixed
    point to infinity and the repelling one to 0.
    """
    if m.det() != 1:
        raise ValueError("diagonalize_hyperbolic expects an SL matrix")
    tr = embed_numeric(m.trace())
    if abs(tr.im) > 1e-9 or abs(tr.re) <= 2 + 1e-12:
        raise NotHyperbolic(f"trace {m.trace()} is not real of modulus > 2")
    p, q = fixed_points(m)
    if p.is_infinity or q.is_infinity:
        raise NotHyperbolic("fixed point at infinity; conjugate first")
    # eigenvalue for fixed point z is c z + d
    lam_p = m.c * p.z + m.d
    lam_q = m.c * q.z + m.d
    if abs(complex(lam_p)) > abs(complex(lam_q)):
        att, rep, lam = p.z, q.z, lam_p
    else:
        att, rep, lam = q.z, p.z, lam_q
    P = Mat2(ONE, -rep, ONE, -att)
    D = P * m * P.inverse()
    if D.b or D.c or D.a != lam or D.a * D.d != 1:
        raise ArithmeticError("diagonalization failed exact check")
    return P, D


# -- JSON ------------------------------------------------------------------

def mat_to_json(m: Mat2):
    return [cyclofield.to_json(CycNum.coerce(x)) for x in m.entries()]


def mat_from_json(data) -> Mat2:
    return Mat2(*(cyclofield.from_json(x) for x in data))


def moebius_to_json(m: ExtMoebius):
    return {"mat": mat_to_json(m.mat), "flip": m.flip}


def moebius_from_json(data) -> ExtMoebius:
    return ExtMoebius(mat_from_json(data["mat"]), bool(data["flip"]))


def representation_to_json(rep: Representation):
    return {k: moebius_to_json(v) for k, v in rep.items()}


def representation_from_json(data) -> dict[str, ExtMoebius]:
    rep = {k: moebius_from_json(v) for k, v in data.items()}
    for k, v in rep.items():
        if not v.mat.det():
            raise SingularMatrix(f"generator {k} has zero determinant")
    return rep
