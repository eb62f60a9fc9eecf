"""
Fibering decisions for integral characters of a two-generator one-relator group.

A character chi = (p, q) is first divided by its content, then carried to
(1, 0) by elementary Nielsen moves.  The relator is rewritten in the new
basis and Magnus-rewritten against the first generator; the character is
declared fibered exactly when both the minimal and the maximal subscript of
the (cyclically reduced) rewrite occur once, with kernel rank max - min.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

from .freewords import (
    ExtremesRepeat, FreeOfRank, NonzeroExponentSum, Word, apply_character,
    cyclic_reduce, kernel_rank, magnus_rewrite,
)

__all__ = [
    "NielsenMove", "Fibered", "NotFibered", "ZeroCharacter", "DegenerateRewrite",
    "primitive_reduce", "apply_moves_to_character", "transform_relator",
    "decide_fibering", "scan_characters",
]


class ZeroCharacter(ValueError):
    pass


class DegenerateRewrite(ValueError):
    pass


@dataclass(frozen=True)
class NielsenMove:
    """One elementary change of basis (x0, x1) -> (y0, y1).

    kind "swap":     y0 = x1, y1 = x0
    kind "invert":   y_i = x_i^-1
    kind "multiply": y_i = x_i x_j^e   (j = 1 - i)
    """

    kind: str
    index: int = 0
    power: int = 1

    def on_character(self, chi: tuple[int, int]) -> tuple[int, int]:
        p = list(chi)
        if self.kind == "swap":
            return (p[1], p[0])
        if self.kind == "invert":
            p[self.index] = -p[self.index]
        else:
            p[self.index] += self.power * p[1 - self.index]
        return (p[0], p[1])

    def old_in_new(self) -> dict[int, Word]:
        """The old generators written in the new basis (the inverse substitution)."""
        i = self.index
        if self.kind == "swap":
            return {0: Word(((1, 1),)), 1: Word(((0, 1),))}
        if self.kind == "invert":
            return {i: Word(((i, -1),)), 1 - i: Word(((1 - i, 1),))}
        j = 1 - i
        return {i: Word(((i, 1), (j, -self.power))), j: Word(((j, 1),))}

    def __str__(self):
        if self.kind == "swap":
            return "swap"
        if self.kind == "invert":
            return f"invert x{self.index}"
        return f"x{self.index} -> x{self.index} x{1 - self.index}^{self.power}"


def _primitive(chi: Sequence[int]) -> tuple[int, int]:
    p, q = chi
    if p == 0 and q == 0:
        raise ZeroCharacter("the zero character")
    g = gcd(p, q)
    return (p // g, q // g)


def primitive_reduce(chi: Sequence[int]) -> list[NielsenMove]:
    """Euclidean sequence of moves carrying chi (made primitive) to (1, 0).

    When |p| >= |q| the first generator absorbs a multiple of the second, so
    ties subtract the second from the first.
    """
    p, q = _primitive(chi)
    moves: list[NielsenMove] = []
    while (p, q) != (1, 0):
        if q == 0:
            mv = NielsenMove("invert", 0)
        elif p == 0:
            mv = NielsenMove("swap")
        elif abs(p) >= abs(q):
            mv = NielsenMove("multiply", 0, -1 if (p > 0) == (q > 0) else 1)
        else:
            mv = NielsenMove("multiply", 1, -1 if (p > 0) == (q > 0) else 1)
        moves.append(mv)
        p, q = mv.on_character((p, q))
    return moves


def apply_moves_to_character(chi: Sequence[int], moves: Sequence[NielsenMove]) -> tuple[int, int]:
    c = tuple(chi)
    for mv in moves:
        c = mv.on_character(c)
    return c


def transform_relator(relator: Word, moves: Sequence[NielsenMove]) -> Word:
    w = relator
    for mv in moves:
        w = w.substitute(mv.old_in_new())
    return cyclic_reduce(w)


@dataclass(frozen=True)
class Fibered:
    kernel_rank: int

    def __str__(self):
        return "Fibered"


@dataclass(frozen=True)
class NotFibered:
    min_subscript: int
    max_subscript: int
    min_count: int
    max_count: int

    def __str__(self):
        return "NotFibered"


def decide_fibering(relator: Word, chi: Sequence[int]):
    prim = _primitive(chi)
    if apply_character(prim, relator) != 0:
        raise DegenerateRewrite(f"character {tuple(chi)} does not vanish on the relator")
    moves = primitive_reduce(prim)
    w = transform_relator(relator, moves)
    try:
        sw = cyclic_reduce(magnus_rewrite(w, stable=0))
    except NonzeroExponentSum as exc:  # pragma: no cover - excluded by the check above
        raise DegenerateRewrite(str(exc)) from exc
    if not sw:
        raise DegenerateRewrite(f"no subscripted letters survive for character {tuple(chi)}")
    rk = kernel_rank(sw)
    if isinstance(rk, FreeOfRank):
        return Fibered(rk.rank)
    assert isinstance(rk, ExtremesRepeat)
    return NotFibered(rk.min_subscript, rk.max_subscript, rk.min_count, rk.max_count)


def _representatives(bound: int):
    for p in range(0, bound + 1):
        for q in range(-bound, bound + 1):
            if p == 0 and q <= 0:
                continue
            if gcd(p, q) != 1:
                continue
            yield (p, q)


def scan_characters(relator: Word, bound: int):
    """Verdicts for primitive (p, q), |p|, |q| <= bound, one per sign class.

    Representatives have p > 0, or p = 0 and q = 1.  Rows are sorted by
    (p, q); a character outside the criterion's hypotheses yields a row whose
    verdict is the raised exception.
    """
    if bound < 1:
        raise ValueError("bound must be >= 1")
    rows = []
    for p, q in sorted(_representatives(bound)):
        try:
            verdict = decide_fibering(relator, (p, q))
        except (DegenerateRewrite, NonzeroExponentSum) as exc:
            verdict = exc
        rows.append((p, q, verdict))
    return rows
