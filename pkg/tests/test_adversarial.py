import math
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from hgcount.adversarial import (ClassAuditSession, TPower, _random_r_sets, col_parameters,
                                 distinguish_experiment, gap_check, gen_col_pair, gen_uncol_pair,
                                 q_grid, smallest_uncol_n, strategy_full, strategy_nothing,
                                 uncol_hypotheses, uncol_probabilities)
from hgcount.bits import to_set
from hgcount.errors import PreconditionError
from hgcount.oracle import CINDORA, INDORA
from hgcount.sampling import RngStream

RELAXED = {"c_sqrt": 1}


def test_expected_root_count_is_the_constant():
    for n, r in ((960, 1), (50, 2), (30, 3)):
        _, p2 = uncol_probabilities(n, 3, r, Fraction(1, 2))
        assert p2 * n ** r / math.factorial(r) == 240


def test_probability_formulas_recomputed():
    import random
    rnd = random.Random(0)
    for _ in range(100):
        k = rnd.randrange(2, 6)
        r = rnd.randrange(1, k + 1)
        n = rnd.randrange(k, 400)
        eps = Fraction(rnd.randrange(1, 20), 20)
        c = rnd.choice([1, 24, 240])
        p1, p2 = uncol_probabilities(n, k, r, eps, c)
        assert p1 == Fraction(math.factorial(k), 1) / eps / Fraction(n) ** r
        assert p2 == Fraction(c) * math.factorial(r) / Fraction(n) ** r


def test_root_count_concentrates():
    # n = 480 is the least n with n^r >= 480 r! for r = 1; E|R| = 240
    n = 480
    _, p2 = uncol_probabilities(n, 2, 1, Fraction(1, 2))
    inside = sum(30 <= len(_random_r_sets(n, 1, p2, RngStream(s))) <= 360 for s in range(200))
    assert inside >= 180


def test_smallest_n_meets_hypotheses():
    n = smallest_uncol_n(2, 1, Fraction(1, 2), c_sqrt=1)
    assert n == 960
    assert all(uncol_hypotheses(n, 2, 1, Fraction(1, 2), c_sqrt=1).values())
    assert not all(uncol_hypotheses(n - 1, 2, 1, Fraction(1, 2), c_sqrt=1).values())


def test_theory_hypotheses_are_enforced():
    with pytest.raises(PreconditionError, match="hypotheses"):
        gen_uncol_pair(960, 2, 1, Fraction(1, 2), RngStream(0))


def test_p2_zero_gives_identical_graphs():
    pair = gen_uncol_pair(960, 2, 1, Fraction(1, 2), RngStream(0), dict(RELAXED, p2=0))
    assert pair.G1 == pair.G2 and pair.roots == []
    rate = gap_check(lambda r: gen_uncol_pair(960, 2, 1, Fraction(1, 2), r, dict(RELAXED, p2=0)),
                     Fraction(1, 2), 5, RngStream(1))
    assert rate == 0


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_uncol_pair_structure(seed, r):
    n, k = 40, 3
    pair = gen_uncol_pair(n, k, r, Fraction(1, 2), RngStream(seed), {"p2": Fraction(3, n ** r)},
                          check=False)
    assert pair.G1.edges <= pair.G2.edges
    roots = [set(R) for R in pair.roots]
    for e in pair.G2.edges - pair.G1.edges:
        assert any(R <= set(e) for R in roots)
    for R in pair.roots:
        rest = [v for v in range(1, n + 1) if v not in R]
        for c in combinations(rest, k - r):
            assert tuple(sorted(R + c)) in pair.G2.edges


def test_col_parameters_recomputed():
    for t in (64, 256, 1024):
        for k, alpha in ((3, 0), (4, 0), (4, 1), (5, Fraction(3, 2))):
            P = col_parameters(t, k, alpha, beta=6, c24=1)
            a = math.floor(alpha)
            assert P["p"] == TPower(Fraction(1), Fraction(-(k + a + 2), 2))
            assert P["x"].exp == Fraction(-(k + a + 2), 2) + a + 2
            assert P["m"] == k - a - 2


K3 = {"beta": 6, "c24": 1}
K4 = {"beta": 6, "c24": 1, "c_exp": 1}


@pytest.mark.parametrize("k, ov", [(3, K3), (4, K4)])
def test_col_pair_structure(k, ov):
    t = 1024
    for s in range(5):
        pair = gen_col_pair(t, k, 0, RngStream(s), ov)
        P = pair.params
        prod = pair.q_product()
        assert prod == TPower(Fraction(2) ** (P["c_exp"] * P["m"]), Fraction(0)) * P["x"]
        assert sum(pair.j) == P["beta"] and all(P["j_min"] <= j <= P["B"] for j in pair.j)
        for i, v in pair.roots.items():
            assert to_set(pair.X[i]) == {v}
        assert pair.G1.edges <= pair.G2.edges
        sizes = [x.bit_count() for x in pair.X]
        lists = [sorted(to_set(x)) for x in pair.X]
        from itertools import product
        complete = set(product(*lists))
        assert len(pair.G2.edges - pair.G1.edges) + len(pair.G1.edges & complete) == math.prod(sizes)


def test_col_expected_h2_matches_closed_form():
    t = 1024
    pair = gen_col_pair(t, 3, 0, RngStream(0), K3)
    P = pair.params
    closed = TPower(Fraction(2) ** (5 * P["m"]), Fraction(0)) * P["p"] * TPower(Fraction(1), Fraction(3))
    assert pair.expected_h2() == closed
    assert pair.expected_h2().exact(t) == 1024


def test_q_grid_enumeration():
    P = col_parameters(1024, 4, 0, beta=6, c24=1, c_exp=1)
    assert q_grid(P) == [(2, 4), (3, 3), (4, 2)]


def test_col_grid_empty_is_rejected():
    with pytest.raises(PreconditionError):
        gen_col_pair(64, 3, 0, RngStream(0), {"beta": 1, "B": 0})


def test_distinguish_nothing_and_full():
    make = lambda r: gen_uncol_pair(960, 2, 1, Fraction(1, 2), r, RELAXED)
    rep = distinguish_experiment(strategy_nothing, make, 3, RngStream(0))
    assert rep.rate == 0 and rep.median_cost == 0
    rep = distinguish_experiment(strategy_full, make, 3, RngStream(0))
    assert rep.rate == 0 and rep.median_cost == 1
    from hgcount.cost import LINEAR
    rep = distinguish_experiment(strategy_full, make, 3, RngStream(0), INDORA, LINEAR)
    assert rep.median_cost == 960


def test_class_audit_counts_leaving_queries():
    pair = gen_col_pair(64, 3, 0, RngStream(0), {"beta": 6, "c24": 1, "c_exp": 1})
    s = ClassAuditSession(pair.G1)
    s.cindora([{1}, {65}, {129}])
    assert s.violations == 0
    s.cindora([{65}, {1}, {129}])
    assert s.violations == 1
