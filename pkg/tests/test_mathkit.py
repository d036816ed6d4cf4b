import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

import oracles
from hgcount.errors import PreconditionError
from hgcount.mathkit import (build_schedule, g, karamata_check, karamata_premise, max_overhead,
                             round_half)

betas = st.builds(lambda k, q: (k, Fraction(q, 4)), st.integers(2, 8), st.integers(0, 32)).filter(
    lambda kb: kb[1] <= kb[0])


def test_round_half_examples():
    assert round_half(Fraction(1, 2)) == 1
    assert round_half(Fraction(14, 10)) == 1
    assert round_half(Fraction(-1, 2)) == 0


def test_g_examples():
    assert g(2, 1) == 0
    assert g(2, 0) == Fraction(1, 2)
    with pytest.raises(PreconditionError):
        g(2, 3)


@given(betas)
def test_g_upper_bound(kb):
    k, b = kb
    assert g(k, b) <= (k - b) ** 2 / Fraction(4 * k)


@given(betas)
def test_g_lower_bound_from_g0(kb):
    k, b = kb
    assert g(k, b) >= g(k, 0) - b / 2


@given(betas)
def test_g_zero_iff_beta_at_least_k_minus_1(kb):
    k, b = kb
    assert (g(k, b) == 0) == (b >= k - 1)


@given(betas)
def test_g_matches_direct_float_formula(kb):
    k, b = kb
    assert float(g(k, b)) == pytest.approx(oracles.g_direct(k, float(b)))


def test_schedule_examples():
    s = build_schedule(16, 2, Fraction(1, 2))
    assert (s[2].L, s[2].gamma, s[2].F) == (1, 0, 4)
    assert (s[1].L, s[1].gamma, s[1].F) == (0, Fraction(1, 2), 2)
    assert (s[0].F, s[0].t, s[0].M) == (1, 2560, 20480)


def test_schedule_rejects_non_power_of_two():
    with pytest.raises(PreconditionError):
        build_schedule(24, 2, Fraction(1, 2))


@given(st.integers(1, 14), st.integers(2, 6), st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(9, 10)]))
def test_schedule_invariants(ell, k, eps):
    n = 2 ** ell
    s = build_schedule(n, k, eps)
    assert len(s) == ell
    for st_ in s:
        # n^(L + gamma) = 2^(ik)
        assert (st_.L + st_.gamma) * ell == st_.i * k
        assert 0 <= st_.L <= k and 0 <= st_.gamma < 1
        assert st_.M == 2 ** (k + 1) * st_.t
        assert isinstance(st_.t, int) and isinstance(st_.F, int)


def test_overhead_examples():
    big = max_overhead(2 ** 60, 12, 0)
    # the maximum is n^(k/4): base-2 exponent 60 * 12/4 = 180, i.e. 15 per unit of k
    assert big.max_exponent == 180 == big.g_exponent
    assert big.max_exponent / 12 == 15
    top = max_overhead(2 ** 10, 3, 3)
    assert top.max_exponent == 0 and top.g_exponent == 0
    one = max_overhead(2 ** 10, 2, 1)
    assert one.max_exponent == one.g_exponent == 0


@given(st.integers(2, 6), st.integers(4, 20), st.integers(0, 12))
def test_overhead_never_exceeds_g(k, ell, q):
    b = Fraction(q, 2)
    if b > k:
        return
    chk = max_overhead(2 ** ell, k, b)
    assert chk.max_exponent <= chk.g_exponent


def test_karamata_examples():
    assert karamata_premise((2, 2, 1), 1, 2, 5)
    assert karamata_check((2, 2, 1), 1, 2, 2, 5) == 1
    assert karamata_check((), 1, 2, 2, 5) == 1
    with pytest.raises(PreconditionError):
        karamata_check((1,), 2, 1, 2, 5)


@given(st.lists(st.fractions(0, 5), max_size=8), st.integers(0, 3), st.integers(0, 3),
       st.fractions(Fraction(1, 10), 10))
def test_karamata_holds_under_premise(s, alpha, extra, W):
    c = Fraction(5)
    if karamata_premise(s, alpha, c, W):
        assert karamata_check(s, alpha, alpha + extra, c, W) == 1


def test_karamata_real_exponents():
    rng = random.Random(0)
    for _ in range(500):
        c = rng.uniform(0.5, 4)
        s = [rng.uniform(0, c) for _ in range(rng.randrange(1, 6))]
        a = rng.uniform(0, 2)
        r = a + rng.uniform(0, 2)
        W = sum(x ** a for x in s) * rng.uniform(1, 2)
        assert karamata_check(s, a, r, c, W) == 1
