"""
Rational functions over Q(w) in one indeterminate t, the valuation at t = 0,
and the amalgam SL2(K) = A *_C B it induces.

    A = SL2(O)                      O = {f : v(f) >= 0}
    C = {[[a, b], [c, d]] in A : v(c) >= 1}
    B = X A X^-1,  X = diag(1/t, 1)

A matrix m lies in B iff [[a, t b], [c/t, d]] lies in A.  Alternating
products of elements of A - C and B - C are never the identity, which is
what :func:`ping_pong_certify` exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .cyclofield import CycNum, ONE, ZERO
from .freewords import MU, RANK6, Word
from .matmoebius import Mat2, UnknownGenerator

__all__ = [
    "Poly", "RatFun", "T", "valuation", "in_O", "AmalgamSide", "classify_amalgam",
    "mu_power", "lift", "eval_in_K", "PingPongCertificate", "ping_pong_certify",
    "specialize", "syllables", "NotUnimodular", "MalformedSyllables", "PoleAtSpecialization",
    "poly_to_json", "ratfun_to_json", "ratfun_from_json", "certificate_to_json",
]


class NotUnimodular(ValueError):
    pass


class MalformedSyllables(ValueError):
    pass


class PoleAtSpecialization(ZeroDivisionError):
    pass


def _strip(cs):
    cs = list(cs)
    while cs and not cs[-1]:
        cs.pop()
    return tuple(cs)


class Poly:
    """Dense polynomial in t; ``coeffs[i]`` multiplies t**i."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        self.coeffs = _strip(CycNum.coerce(c) for c in coeffs)

    @classmethod
    def _raw(cls, coeffs):
        p = cls.__new__(cls)
        p.coeffs = _strip(coeffs)
        return p

    @classmethod
    def monomial(cls, k: int, c=ONE) -> "Poly":
        return cls._raw((ZERO,) * k + (CycNum.coerce(c),))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> CycNum:
        return self.coeffs[-1]

    def ord0(self) -> int:
        """Order of vanishing at t = 0 (math.inf for the zero polynomial)."""
        for i, c in enumerate(self.coeffs):
            if c:
                return i
        return math.inf

    def is_monomial(self) -> bool:
        return bool(self.coeffs) and self.ord0() == self.degree

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly._raw(tuple(x + y for x, y in zip(a, b)) + a[len(b):])

    def __neg__(self):
        return Poly._raw(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Poly):
            a, b = self.coeffs, other.coeffs
            if not a or not b:
                return Poly._raw(())
            out = [ZERO] * (len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if not x:
                    continue
                for j, y in enumerate(b):
                    if y:
                        out[i + j] = out[i + j] + x * y
            return Poly._raw(out)
        c = CycNum.coerce(other)
        return Poly._raw(tuple(x * c for x in self.coeffs))

    def shift(self, k: int) -> "Poly":
        """Multiply by t**k (k >= 0) or divide exactly by t**-k."""
        if k >= 0:
            return Poly._raw((ZERO,) * k + self.coeffs) if self.coeffs else self
        return Poly._raw(self.coeffs[-k:])

    def divmod(self, other: "Poly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [ZERO] * max(len(rem) - len(other.coeffs) + 1, 0)
        inv = other.lead().inverse()
        dg = other.degree
        while len(rem) - 1 >= dg and rem:
            k = len(rem) - 1 - dg
            c = rem[-1] * inv
            q[k] = c
            for i, oc in enumerate(other.coeffs):
                rem[k + i] = rem[k + i] - c * oc
            rem = list(_strip(rem))
        return Poly._raw(q), Poly._raw(rem)

    def monic(self) -> "Poly":
        inv = self.lead().inverse()
        return Poly._raw(tuple(c * inv for c in self.coeffs))

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, other
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic() if not a.is_zero() else a

    def __call__(self, x):
        acc = ZERO if isinstance(x, CycNum) else 0
        for c in reversed(self.coeffs):
            acc = acc * x + (c if isinstance(x, CycNum) else complex(c))
        return acc

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            cs = str(c)
            if mono:
                cs = mono if c == 1 else f"({cs})*{mono}"
            terms.append(cs)
        return " + ".join(terms)


_ONE_POLY = Poly((ONE,))


class RatFun:
    """num/den in lowest terms with monic den."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly((num,))
        den = _ONE_POLY if den is None else (den if isinstance(den, Poly) else Poly((den,)))
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        self.num, self.den = _normalize(num, den)

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "RatFun":
        r = cls.__new__(cls)
        r.num, r.den = _normalize(num, den)
        return r

    @classmethod
    def coerce(cls, x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, Poly):
            return cls._raw(x, _ONE_POLY)
        return cls._raw(Poly((x,)), _ONE_POLY)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def __add__(self, other):
        o = RatFun.coerce(other)
        if self.den.is_monomial() and o.den.is_monomial():
            # Laurent fast path: dens are t^j and t^k
            j, k = self.den.degree, o.den.degree
            m = max(j, k)
            return RatFun._raw(self.num.shift(m - j) + o.num.shift(m - k), Poly.monomial(m))
        if self.den == o.den:
            return RatFun._raw(self.num + o.num, self.den)
        return RatFun._raw(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        r = RatFun.__new__(RatFun)
        r.num, r.den = -self.num, self.den
        return r

    def __sub__(self, other):
        return self + (-RatFun.coerce(other))

    def __rsub__(self, other):
        return RatFun.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, (CycNum, int)):
            return RatFun._raw(self.num * other, self.den)
        o = RatFun.coerce(other)
        return RatFun._raw(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFun._raw(self.den, self.num)

    def __truediv__(self, other):
        return self * RatFun.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFun.coerce(other) * self.inverse()

    def __eq__(self, other):
        try:
            o = RatFun.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant(self) -> CycNum:
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self.num.coeffs[0] if self.num.coeffs else ZERO

    def __call__(self, t0):
        d = self.den(t0)
        if d == 0:
            raise PoleAtSpecialization(f"denominator of {self} vanishes at t = {t0}")
        return self.num(t0) / d

    def __str__(self):
        if self.den == _ONE_POLY:
            return str(self.num)
        return f"({self.num})/({self.den})"

    __repr__ = __str__


def _normalize(num: Poly, den: Poly):
    if num.is_zero():
        return num, _ONE_POLY
    if den.is_monomial():
        k = den.degree
        j = min(num.ord0(), k)
        lead = den.lead()
        num = num.shift(-j)
        if lead != 1:
            num = num * lead.inverse()
        return num, Poly.monomial(k - j)
    g = num.gcd(den)
    if g.degree > 0:
        num = num.divmod(g)[0]
        den = den.divmod(g)[0]
    lead = den.lead()
    if lead != 1:
        inv = lead.inverse()
        num, den = num * inv, den * inv
    return num, den


T = RatFun(Poly((ZERO, ONE)))


def valuation(f: RatFun):
    """Order of vanishing at t = 0; math.inf for the zero function."""
    f = RatFun.coerce(f)
    if f.is_zero():
        return math.inf
    return f.num.ord0() - f.den.ord0()


def in_O(f: RatFun) -> bool:
    return valuation(f) >= 0


class AmalgamSide:
    C = "C"
    A_MINUS_C = "A_minus_C"
    B_MINUS_C = "B_minus_C"
    OUTSIDE = "Outside"


def lift(m: Mat2) -> Mat2:
    """View a matrix over Q(w) as a matrix over K."""
    return m.map(RatFun.coerce)


def classify_amalgam(m: Mat2) -> str:
    m = lift(m)
    if m.det() != 1:
        raise NotUnimodular(f"det {m.det()} != 1")
    if all(in_O(x) for x in m.entries()):
        return AmalgamSide.C if valuation(m.c) >= 1 else AmalgamSide.A_MINUS_C
    # X^-1 m X with X = diag(1/t, 1)
    if in_O(m.a) and in_O(m.d) and valuation(m.b) >= -1 and valuation(m.c) >= 1:
        return AmalgamSide.B_MINUS_C
    return AmalgamSide.OUTSIDE


def mu_power(k: int) -> Mat2:
    one, zero = RatFun.coerce(ONE), RatFun.coerce(ZERO)
    return Mat2(one, RatFun(Poly((k,)), Poly((ZERO, ONE))) if k else zero, zero, one)


def _letter_matrix(images: Mapping, g: int, s: int, cache: dict) -> Mat2:
    key = (g, s)
    if key not in cache:
        if g not in images:
            raise UnknownGenerator(g)
        m = lift(images[g])
        cache[key] = m if s > 0 else m.inverse()
    return cache[key]


def default_images(f_gens: Sequence[Mat2]) -> dict[int, Mat2]:
    images = {i: lift(m) for i, m in enumerate(f_gens)}
    images[MU] = mu_power(1)
    return images


def eval_in_K(w: Word, images: Mapping) -> Mat2:
    cache: dict = {}
    one, zero = RatFun.coerce(ONE), RatFun.coerce(ZERO)
    result = Mat2(one, zero, zero, one)
    for g, s in w.letters:
        result = result * _letter_matrix(images, g, s, cache)
    return result


@dataclass(frozen=True)
class PingPongCertificate:
    syllables: tuple[tuple[Word, Mat2, str], ...]
    verdict: str  # "NonTrivial" or "Inconclusive"

    @property
    def nontrivial(self) -> bool:
        return self.verdict == "NonTrivial"


def syllables(w: Word, mu: int = MU) -> list[Word]:
    """Split a reduced word into maximal F- and mu-syllables."""
    out: list[list] = []
    for g, s in w.letters:
        kind = g == mu
        if out and (out[-1][0][0] == mu) == kind:
            out[-1].append((g, s))
        else:
            out.append([(g, s)])
    return [Word(tuple(x)) for x in out]


def ping_pong_certify(w, images: Mapping, mu: int = MU) -> PingPongCertificate:
    """Certify w != 1 in F * Z from the amalgam normal form.

    ``w`` is a reduced Word or an explicit list of syllable Words.  F-syllables
    must land in A - C and mu-syllables in B - C; any other classification
    gives an Inconclusive certificate, never a claim of triviality.
    """
    if isinstance(w, Word):
        sylls = syllables(w, mu)
    else:
        sylls = list(w)
        for i, sy in enumerate(sylls):
            if not isinstance(sy, Word) or not sy:
                raise MalformedSyllables(f"syllable {i} is empty")
            kinds = {g == mu for g, _ in sy.letters}
            if len(kinds) != 1:
                raise MalformedSyllables(f"syllable {i} mixes F and mu letters")
            if i and (sylls[i - 1].letters[0][0] == mu) == (sy.letters[0][0] == mu):
                raise MalformedSyllables(f"syllables {i - 1} and {i} do not alternate")
    cache: dict = {}
    entries = []
    ok = True
    for sy in sylls:
        m = Mat2(*(RatFun.coerce(x) for x in (ONE, ZERO, ZERO, ONE)))
        for g, s in sy.letters:
            m = m * _letter_matrix(images, g, s, cache)
        side = classify_amalgam(m)
        want = AmalgamSide.B_MINUS_C if sy.letters[0][0] == mu else AmalgamSide.A_MINUS_C
        ok = ok and side == want
        entries.append((sy, m, side))
    return PingPongCertificate(tuple(entries), "NonTrivial" if ok else "Inconclusive")


def specialize(m: Mat2, t0) -> Mat2:
    """Evaluate entries at t = t0: exact for CycNum/int t0, numeric otherwise."""
    if isinstance(t0, (int,)):
        t0 = CycNum.coerce(t0)
    if not isinstance(t0, CycNum):
        t0 = complex(t0)
    return lift(m).map(lambda f: f(t0))


# -- JSON -----------------------------------------------------------------

def poly_to_json(p: Poly):
    from .cyclofield import to_json
    return [to_json(c) for c in p.coeffs]


def ratfun_to_json(f: RatFun):
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def ratfun_from_json(data) -> RatFun:
    from .cyclofield import from_json
    return RatFun(Poly([from_json(c) for c in data["num"]]), Poly([from_json(c) for c in data["den"]]))


def certificate_to_json(cert: PingPongCertificate):
    return {
        "verdict": cert.verdict,
        "syllables": [
            {"word": RANK6.format(w), "side": side,
             "matrix": [ratfun_to_json(x) for x in m.entries()]}
            for w, m, side in cert.syllables
        ],
    }
