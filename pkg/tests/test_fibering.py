import random
from math import gcd

import pytest

from hnnfree.fibering import (
    DegenerateRewrite, Fibered, NielsenMove, NotFibered, ZeroCharacter,
    apply_moves_to_character, decide_fibering, primitive_reduce, scan_characters,
    transform_relator,
)
from hnnfree.freewords import (
    DEFAULT_RELATOR, apply_character, cyclic_reduce, format_word, kernel_rank,
    magnus_rewrite, parse_word,
)

R = parse_word(DEFAULT_RELATOR)


def signature(v):
    """Shift-invariant summary of a verdict."""
    if isinstance(v, Fibered):
        return ("F", v.kernel_rank)
    return ("N", v.max_subscript - v.min_subscript, sorted((v.min_count, v.max_count)))


class TestPrimitiveReduce:
    @pytest.mark.parametrize("chi", [(1, 0), (0, 1), (1, 1), (1, -2), (3, 5), (-7, 4), (0, -1), (-1, 0), (6, 4)])
    def test_reaches_stable(self, chi):
        moves = primitive_reduce(chi)
        g = gcd(*chi)
        assert apply_moves_to_character((chi[0] // g, chi[1] // g), moves) == (1, 0)

    def test_trivial(self):
        assert primitive_reduce((1, 0)) == []

    def test_swap(self):
        assert primitive_reduce((0, 1)) == [NielsenMove("swap")]

    def test_zero(self):
        with pytest.raises(ZeroCharacter):
            primitive_reduce((0, 0))

    def test_random(self):
        rng = random.Random(31)
        for _ in range(500):
            chi = (rng.randint(-50, 50), rng.randint(-50, 50))
            if chi == (0, 0):
                continue
            g = gcd(*chi)
            prim = (chi[0] // g, chi[1] // g)
            assert apply_moves_to_character(prim, primitive_reduce(chi)) == (1, 0)


class TestTransform:
    def test_character_is_carried(self):
        rng = random.Random(32)
        for _ in range(100):
            chi = (rng.randint(-6, 6), rng.randint(-6, 6))
            if chi == (0, 0):
                continue
            moves = primitive_reduce(chi)
            w = transform_relator(R, moves)
            g = gcd(*chi)
            # the new stable exponent sum equals the old character value
            assert apply_character((1, 0), w) * g == apply_character(chi, R)

    def test_swap(self):
        w = transform_relator(R, [NielsenMove("swap")])
        assert format_word(w) == "bbaabbABabAbaBBAABaBBA"
        rk = kernel_rank(magnus_rewrite(w))
        assert (rk.min_subscript, rk.min_count, rk.max_subscript, rk.max_count) == (0, 3, 2, 5)


class TestDecide:
    def test_stable(self):
        assert decide_fibering(R, (1, 0)) == Fibered(5)

    def test_diagonal(self):
        assert decide_fibering(R, (1, 1)) == Fibered(6)

    def test_swap(self):
        v = decide_fibering(R, (0, 1))
        assert v == NotFibered(0, 2, 3, 5)
        assert str(v) == "NotFibered"

    def test_other_negative(self):
        assert isinstance(decide_fibering(R, (1, -2)), NotFibered)

    @pytest.mark.parametrize("chi", [(1, 0), (0, 1), (1, 1), (2, 3), (1, -2)])
    def test_sign_invariance(self, chi):
        a, b = decide_fibering(R, chi), decide_fibering(R, (-chi[0], -chi[1]))
        assert signature(a) == signature(b)

    def test_content_invariance(self):
        assert decide_fibering(R, (3, 3)) == decide_fibering(R, (1, 1))

    def test_consistent_with_kernel_rank(self):
        assert decide_fibering(R, (1, 0)).kernel_rank == kernel_rank(magnus_rewrite(R)).rank

    def test_nonvanishing(self):
        with pytest.raises(DegenerateRewrite):
            decide_fibering(parse_word("aab"), (1, 0))

    def test_nielsen_invariance(self):
        rng = random.Random(33)
        moves_pool = [NielsenMove("swap"), NielsenMove("invert", 0), NielsenMove("invert", 1),
                      NielsenMove("multiply", 0, 1), NielsenMove("multiply", 0, -1),
                      NielsenMove("multiply", 1, 1), NielsenMove("multiply", 1, -1)]
        chars = [(1, 0), (0, 1), (1, 1), (1, -2), (2, 1), (3, -1)]
        for _ in range(60):
            chi = rng.choice(chars)
            moves = [rng.choice(moves_pool) for _ in range(rng.randint(1, 4))]
            r2 = transform_relator(R, moves)
            chi2 = apply_moves_to_character(chi, moves)
            a, b = decide_fibering(R, chi), decide_fibering(r2, chi2)
            assert type(a) is type(b)
            if isinstance(a, Fibered):
                assert a.kernel_rank == b.kernel_rank


class TestScan:
    def test_bound_one(self):
        rows = scan_characters(R, 1)
        assert [(p, q) for p, q, _ in rows] == [(0, 1), (1, -1), (1, 0), (1, 1)]
        assert isinstance(rows[0][2], NotFibered)
        assert all(isinstance(v, Fibered) for _, _, v in rows[1:])

    def test_bound_two(self):
        rows = scan_characters(R, 2)
        assert len(rows) == 8
        bad = [(p, q) for p, q, v in rows if not isinstance(v, Fibered)]
        assert bad == [(0, 1), (1, -2)]

    def test_degenerate_row(self):
        rows = scan_characters(parse_word("b"), 1)
        verdicts = {(p, q): v for p, q, v in rows}
        assert isinstance(verdicts[(0, 1)], DegenerateRewrite)
        assert verdicts[(1, 0)] == Fibered(0)

    def test_bad_bound(self):
        with pytest.raises(ValueError):
            scan_characters(R, 0)


def test_cyclic_conjugate_relator_same_verdicts():
    for k in (1, 5, 11):
        r2 = cyclic_reduce(R.rotate(k))
        for chi in [(1, 0), (0, 1), (1, 1), (1, -2)]:
            assert signature(decide_fibering(R, chi)) == signature(decide_fibering(r2, chi))
