import json
import math
import random
from fractions import Fraction

import pytest

from hnnfree.construction import build_conjugated_system
from hnnfree.cyclofield import CycNum, OMEGA, ONE, ZERO
from hnnfree.freewords import MU, RANK6, Word
from hnnfree.matmoebius import Mat2, default_representation
from hnnfree.ratfunc import (
    AmalgamSide, MalformedSyllables, NotUnimodular, PoleAtSpecialization, Poly, RatFun, T,
    certificate_to_json, classify_amalgam, default_images, eval_in_K, in_O, lift, mu_power,
    ping_pong_certify, ratfun_from_json, ratfun_to_json, specialize, syllables, valuation,
)
from strategies import rand_cyc, rand_ratfun, rand_word

R1, R0 = RatFun.coerce(ONE), RatFun.coerce(ZERO)


@pytest.fixture(scope="module")
def system():
    return build_conjugated_system("aa", default_representation())


@pytest.fixture(scope="module")
def images(system):
    return default_images(system.F_gens)


def X(k):
    """diag(t^k, 1)"""
    tk = RatFun(Poly.monomial(k)) if k >= 0 else RatFun(Poly((ONE,)), Poly.monomial(-k))
    return Mat2(tk, R0, R0, R1)


class TestRatFun:
    def test_normal_form(self):
        f = RatFun(Poly((0, 2)), Poly((0, 4)))
        assert f == RatFun(Poly((Fraction(1, 2),)))

    def test_cancel_common_factor(self):
        p = Poly((1, 1))
        f = RatFun(p * Poly((2, 0, 1)), p * Poly((0, 1)))
        assert f == RatFun(Poly((2, 0, 1)), Poly((0, 1)))

    def test_field_ops(self):
        rng = random.Random(3)
        for _ in range(200):
            f, g = rand_ratfun(rng), rand_ratfun(rng)
            assert (f + g) - g == f
            if g:
                assert (f * g) / g == f
                assert g * g.inverse() == 1

    def test_zero_division(self):
        with pytest.raises(ZeroDivisionError):
            R0.inverse()


class TestValuation:
    def test_examples(self):
        assert valuation(RatFun(Poly((1,)))) == 0
        assert valuation(T) == 1
        assert valuation(T.inverse()) == -1
        assert valuation(RatFun(Poly((0, 0, 3)), Poly((1, 1)))) == 2
        assert valuation(R0) == math.inf

    def test_in_O(self):
        assert in_O(T)
        assert in_O(RatFun(Poly((1,)), Poly((1, 1))))
        assert not in_O(T.inverse())

    def test_axioms(self):
        rng = random.Random(4)
        for _ in range(1000):
            f, g = rand_ratfun(rng), rand_ratfun(rng)
            assert valuation(f * g) == valuation(f) + valuation(g)
            assert valuation(f + g) >= min(valuation(f), valuation(g))


class TestClassify:
    def test_identity_in_C(self):
        assert classify_amalgam(Mat2.identity()) == AmalgamSide.C

    def test_mu_in_B(self):
        assert classify_amalgam(mu_power(1)) == AmalgamSide.B_MINUS_C

    def test_S_in_A(self):
        assert classify_amalgam(Mat2(ZERO, -ONE, ONE, ZERO)) == AmalgamSide.A_MINUS_C

    def test_outside(self):
        m = Mat2(R1, T.inverse() * T.inverse(), R0, R1)
        assert classify_amalgam(m) == AmalgamSide.OUTSIDE

    def test_not_unimodular(self):
        with pytest.raises(NotUnimodular):
            classify_amalgam(Mat2.diag(CycNum(2), ONE))

    def test_x_conjugation(self):
        rng = random.Random(5)
        for _ in range(200):
            # random element of SL2 over O: a + t-polynomial entries with det 1
            a = RatFun.coerce(rand_cyc(rng, 3) or ONE)
            b = RatFun(Poly([rand_cyc(rng, 3) for _ in range(2)]))
            c = RatFun(Poly([rand_cyc(rng, 3) for _ in range(2)]))
            d = (R1 + b * c) / a
            if not in_O(d):
                continue
            m = Mat2(a, b, c, d)
            conj = X(-1) * m * X(1)
            side = classify_amalgam(conj)
            assert side == (AmalgamSide.C if valuation(b) >= 1 else AmalgamSide.B_MINUS_C)


class TestMu:
    def test_power(self):
        assert mu_power(3) == Mat2(R1, RatFun(Poly((3,)), Poly((0, 1))), R0, R1)

    def test_group_law(self):
        assert mu_power(2) * mu_power(-5) == mu_power(-3)
        assert mu_power(0) == Mat2(R1, R0, R0, R1)

    def test_conjugation_by_D(self, system):
        D = lift(system.D)
        assert D * mu_power(1) * D.inverse() == mu_power(3)


class TestEvalInK:
    def test_empty(self, images):
        assert eval_in_K(Word(()), images) == Mat2(R1, R0, R0, R1)

    def test_mu(self, images):
        assert eval_in_K(Word(((MU, 1), (MU, 1))), images) == mu_power(2)

    def test_numeric_specialization(self, images):
        rng = random.Random(6)
        t0 = 0.37 + 0.11j
        for _ in range(50):
            w = rand_word(rng, 6, 8)
            exact = specialize(eval_in_K(w, images), t0)
            prod = [[1, 0], [0, 1]]
            for g, s in w.letters:
                m = specialize(images[g] if s > 0 else lift(images[g]).inverse(), t0)
                e = [[m.a, m.b], [m.c, m.d]]
                prod = [[sum(prod[i][k] * e[k][j] for k in range(2)) for j in range(2)] for i in range(2)]
            got = [[exact.a, exact.b], [exact.c, exact.d]]
            for i in range(2):
                for j in range(2):
                    assert got[i][j] == pytest.approx(prod[i][j], rel=1e-9, abs=1e-9)


class TestPingPong:
    def test_single_f(self, images):
        cert = ping_pong_certify(RANK6.parse("b0"), images)
        assert cert.verdict == "NonTrivial"

    def test_single_mu(self, images):
        assert ping_pong_certify(RANK6.parse("u"), images).nontrivial

    def test_alternating(self, images):
        w = RANK6.parse("b0 u b1 U U b2")
        assert [len(s) for s in syllables(w)] == [1, 1, 1, 2, 1]
        cert = ping_pong_certify(w, images)
        assert cert.nontrivial
        assert [side for _, _, side in cert.syllables] == [
            "A_minus_C", "B_minus_C", "A_minus_C", "B_minus_C", "A_minus_C"]

    def test_inconclusive_with_diagonal_image(self):
        imgs = {0: Mat2.diag(CycNum(2), CycNum(1, 0, 0, 0) / 2), MU: mu_power(1)}
        cert = ping_pong_certify(RANK6.parse("b0 u"), imgs)
        assert cert.verdict == "Inconclusive"

    def test_explicit_syllables(self, images):
        sylls = [RANK6.parse("b0 b1"), RANK6.parse("u")]
        assert ping_pong_certify(sylls, images).nontrivial

    def test_malformed(self, images):
        with pytest.raises(MalformedSyllables):
            ping_pong_certify([RANK6.parse("b0 u")], images)
        with pytest.raises(MalformedSyllables):
            ping_pong_certify([RANK6.parse("b0"), RANK6.parse("b1")], images)

    def test_json(self, images):
        data = certificate_to_json(ping_pong_certify(RANK6.parse("b0 u"), images))
        assert json.loads(json.dumps(data))["verdict"] == "NonTrivial"


class TestSpecialize:
    def test_mu_at_one(self):
        assert specialize(mu_power(1), 1) == Mat2(ONE, ONE, ZERO, ONE)

    def test_exact_cyc(self):
        m = specialize(mu_power(2), OMEGA)
        assert m.b * OMEGA == 2

    def test_pole(self):
        with pytest.raises(PoleAtSpecialization):
            specialize(mu_power(1), 0)


def test_json_round_trip():
    rng = random.Random(8)
    for _ in range(100):
        f = rand_ratfun(rng)
        assert ratfun_from_json(json.loads(json.dumps(ratfun_to_json(f)))) == f
