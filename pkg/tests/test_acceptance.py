"""Acceptance gate: one verdict line per criterion in the terminal summary."""

import random
import time

import pytest

from hnnfree.construction import (
    build_conjugated_system, certify_free_product, certify_no_fix_infinity,
    certify_strict_ascent, compute_psi, verify_requirement,
)
from hnnfree.cyclofield import ONE, cyc_conj, cyc_inv, embed_numeric, sqrt3, CycNum
from hnnfree.fibering import Fibered, NotFibered, scan_characters
from hnnfree.freewords import (
    FreeOfRank, MU, DEFAULT_RELATOR, SubscriptedWord, Word, free_reduce, kernel_rank,
    magnus_rewrite, membership, parse_word, shift_rewrite, stallings_fold,
)
from hnnfree.matmoebius import compose, eval_word, gen_a, is_projective_identity, normalize_to_sl, default_representation
from hnnfree.ratfunc import eval_in_K, lift, mu_power, valuation
from strategies import rand_cyc, rand_ratfun, rand_word

RELATOR = parse_word(DEFAULT_RELATOR)


@pytest.fixture(scope="module")
def system():
    return build_conjugated_system("aa", default_representation())


@pytest.mark.acceptance("AC-1 relation is the projective identity")
def test_ac1_relation():
    t0 = time.perf_counter()
    m = eval_word(DEFAULT_RELATOR, default_representation())
    elapsed = time.perf_counter() - t0
    assert m.flip is False
    assert is_projective_identity(m)
    assert elapsed < 1.0


@pytest.mark.acceptance("AC-2 trace of normalized a^2 is sqrt3 + 1/sqrt3")
def test_ac2_trace():
    tr = normalize_to_sl(compose(gen_a, gen_a).mat).trace()
    closed = CycNum(0, 8, 0, -4) / 3
    assert tr == closed
    assert tr == sqrt3() + cyc_inv(sqrt3())
    z = embed_numeric(tr, precision_hint=120)
    assert abs(z.re - 2.3094010767585030580) < 1e-12
    assert abs(z.im) < 1e-12


@pytest.mark.acceptance("AC-3 multiplier n = 3 and D mu D^-1 = mu^3")
def test_ac3_multiplier(system):
    assert verify_requirement("aa").n == 3
    D = lift(system.D)
    assert D * mu_power(1) * lift(system.D.inverse()) == mu_power(3)
    assert system.n == 3


@pytest.mark.acceptance("AC-4 Magnus rewrite of the relator")
def test_ac4_magnus():
    assert str(magnus_rewrite(RELATOR)).split() == "b2 b2 B4 b3 B4 b5 B3 B3 b2 B0".split()


@pytest.mark.acceptance("AC-5 kernel free of rank 5 on b0..b4")
def test_ac5_kernel():
    rk = kernel_rank(magnus_rewrite(RELATOR))
    assert isinstance(rk, FreeOfRank)
    assert rk.rank == 5 and set(rk.basis) == {0, 1, 2, 3, 4}


@pytest.mark.acceptance("AC-6 fibering scan |p|,|q| <= 10")
def test_ac6_scan():
    t0 = time.perf_counter()
    rows = scan_characters(RELATOR, 10)
    elapsed = time.perf_counter() - t0
    bad = sorted((p, q) for p, q, v in rows if isinstance(v, NotFibered))
    assert bad == [(0, 1), (1, -2)]
    assert all(isinstance(v, (Fibered, NotFibered)) for _, _, v in rows)
    assert len(rows) == 128
    assert elapsed < 10.0


@pytest.mark.acceptance("AC-7 strict ascent with exact matrix consistency")
def test_ac7_ascent(system):
    psi = compute_psi(system)  # raises unless all six identities hold exactly
    assert len(psi) == 6
    D, D_inv = system.D, system.D.inverse()
    for i in range(5):
        assert D * system.F_gens[i] * D_inv == system.f_matrix(psi[i])
    images = system.images()
    assert lift(D) * images[MU] * lift(D_inv) == eval_in_K(psi[MU], images)
    graph = stallings_fold([psi[k] for k in sorted(psi)])
    assert membership(Word(((MU, 1),)), graph) is False
    assert not certify_strict_ascent(psi).mu_in_image


@pytest.mark.acceptance("AC-8 free-product sampling, 1000 words")
def test_ac8_free_product(system):
    t0 = time.perf_counter()
    out = certify_free_product(system, samples=1000, max_syllables=10)
    elapsed = time.perf_counter() - t0
    assert out["count"] == 1000
    assert out["nontrivial"] == 1000 and out["failures"] == 0
    assert elapsed < 60.0


@pytest.mark.acceptance("AC-9 no kernel word of length <= 5 fixes infinity")
def test_ac9_no_fix(system):
    t0 = time.perf_counter()
    checked = certify_no_fix_infinity(system, 5)
    elapsed = time.perf_counter() - t0
    assert checked == sum(10 * 9 ** k for k in range(5))
    assert elapsed < 60.0


N = 1000


@pytest.mark.acceptance("AC-10 algebra property suites")
class TestAC10:
    def test_field_axioms(self):
        rng = random.Random(101)
        for _ in range(N):
            x, y, z = rand_cyc(rng), rand_cyc(rng), rand_cyc(rng)
            assert (x * y) * z == x * (y * z)
            assert x * (y + z) == x * y + x * z
            assert x * y == y * x and x + y == y + x
            assert x + (-x) == 0
            if x:
                assert x * x.inverse() == ONE

    def test_valuation_axioms(self):
        rng = random.Random(102)
        for _ in range(N):
            f, g = rand_ratfun(rng), rand_ratfun(rng)
            assert valuation(f * g) == valuation(f) + valuation(g)
            assert valuation(f + g) >= min(valuation(f), valuation(g))

    def test_conjugation_involution(self):
        rng = random.Random(103)
        for _ in range(N):
            x, y = rand_cyc(rng), rand_cyc(rng)
            assert cyc_conj(cyc_conj(x)) == x
            assert cyc_conj(x * y) == cyc_conj(x) * cyc_conj(y)
            assert cyc_conj(x + y) == cyc_conj(x) + cyc_conj(y)

    def test_fold_order_invariance(self):
        rng = random.Random(104)
        for _ in range(N):
            gens = [rand_word(rng, 4, 6) for _ in range(rng.randint(1, 4))]
            shuffled = gens[:]
            rng.shuffle(shuffled)
            assert stallings_fold(gens) == stallings_fold(shuffled)

    def test_shift_rewrite_round_trip(self):
        rng = random.Random(105)
        for _ in range(N):
            w = SubscriptedWord(rand_word(rng, 5, 6).letters)
            k = rng.choice((1, 2, 3))
            assert free_reduce(shift_rewrite(shift_rewrite(w, k), -k)) == free_reduce(w)
