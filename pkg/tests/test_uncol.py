from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

import oracles
from hgcount.bits import to_mask, to_set
from hgcount.errors import PreconditionError
from hgcount.estimate import RTE, TOO_DENSE
from hgcount.generators import er
from hgcount.hypergraph import build_hypergraph
from hgcount.oracle import OracleSession
from hgcount.sampling import RngStream
from hgcount.uncol import rec_enum, sparse_count, uncol, uncol_approx


def collect(sess, parts, seed=0):
    out = []
    rec_enum(sess, [to_mask(p) for p in parts], lambda m: out.append(tuple(sorted(to_set(m)))), RngStream(seed))
    return sorted(out)


def test_rec_enum_examples():
    g = build_hypergraph(4, 2, [(1, 2), (3, 4)])
    s = OracleSession(g)
    assert collect(s, [set(), set()]) == []
    s1 = OracleSession(build_hypergraph(2, 2, [(1, 2)]))
    assert collect(s1, [{1}, {2}]) == [(1, 2)]
    assert len(s1.ledger) == 1
    assert collect(s, [{1, 3}, {2, 4}]) == [(1, 2), (3, 4)]


@given(st.integers(2, 4), st.data())
def test_rec_enum_lists_exactly_the_colourful_edges(k, data):
    n = data.draw(st.integers(k, 11))
    edges = data.draw(st.lists(st.sampled_from(list(combinations(range(1, n + 1), k))), max_size=25, unique=True))
    g = build_hypergraph(n, k, edges)
    colour = data.draw(st.lists(st.integers(-1, k - 1), min_size=n, max_size=n))
    parts = [{v + 1 for v in range(n) if colour[v] == c} for c in range(k)]
    got = collect(OracleSession(g), parts, data.draw(st.integers(0, 99)))
    assert got == oracles.colourful_edges(edges, parts)


def test_sparse_count_examples():
    rng = RngStream(0)
    empty = OracleSession(build_hypergraph(10, 2, []))
    assert sparse_count(empty, range(1, 11), 2, 0, 0.5, rng).value == 0
    g = build_hypergraph(10, 2, [(1, 2), (3, 4), (5, 9)])
    ok = sum(sparse_count(OracleSession(g), range(1, 11), 2, 10, 0.01, RngStream(s)).value == 3
             for s in range(1000))
    assert ok >= 990
    g5 = build_hypergraph(10, 2, [(1, 2), (3, 4), (5, 6), (7, 8), (9, 10)])
    tags = [sparse_count(OracleSession(g5), range(1, 11), 2, 2, 0.05, RngStream(s)).tag for s in range(200)]
    assert set(tags) <= {TOO_DENSE, RTE}
    assert tags.count(RTE) <= 0.05 * 200 * 2


@given(st.integers(2, 3), st.integers(0, 20), st.integers(0, 10 ** 6), st.data())
def test_sparse_count_numeric_is_exact(k, M, seed, data):
    n = data.draw(st.integers(k, 14))
    edges = data.draw(st.lists(st.sampled_from(list(combinations(range(1, n + 1), k))), max_size=20, unique=True))
    g = build_hypergraph(n, k, edges)
    U = data.draw(st.sets(st.integers(1, n)))
    out = sparse_count(OracleSession(g), U, k, M, 0.05, RngStream(seed), "fast")
    truth = oracles.count_within(edges, U)
    if out.is_count:
        assert out.value == truth and truth <= M
    elif out.tag == TOO_DENSE:
        assert truth > M


def test_uncol_approx_brute_force_branch():
    g = build_hypergraph(3, 2, [(1, 2), (2, 3)])
    s = OracleSession(g)
    est = uncol_approx(s, Fraction(1, 2), RngStream(0))
    assert est.ok and est.value == 2
    assert est.queries == 3


def test_uncol_approx_empty_graph_stops_at_level_zero():
    s = OracleSession(build_hypergraph(64, 2, []))
    est = uncol_approx(s, Fraction(1, 2), RngStream(1), "fast")
    assert est.value == 0 and est.halted_i == 0


def test_uncol_approx_rejects_bad_eps():
    with pytest.raises(PreconditionError):
        uncol_approx(OracleSession(build_hypergraph(3, 2, [])), 1, RngStream(0))


def test_padding_does_not_change_the_estimate():
    g = er(60, 2, 0.2, RngStream(7))
    a = uncol_approx(OracleSession(g), Fraction(1, 2), RngStream(3), "fast")
    b = uncol_approx(OracleSession(g, padding=4), Fraction(1, 2), RngStream(3), "fast")
    assert (a.value, a.status, a.cost, a.queries) == (b.value, b.status, b.cost, b.queries)


def test_uncol_on_empty_graph_is_zero():
    for seed in range(5):
        est = uncol(OracleSession(build_hypergraph(40, 3, [])), Fraction(1, 2), Fraction(1, 10),
                    RngStream(seed), "fast")
        assert est.ok and est.value == 0


def test_uncol_single_run_at_delta_one_third():
    g = er(64, 2, 0.3, RngStream(0))
    est = uncol(OracleSession(g), Fraction(1, 2), Fraction(1, 3), RngStream(0), "fast")
    assert est.extra["runs"] >= 1 and est.ok


def test_uncol_rejects_bad_delta():
    with pytest.raises(PreconditionError):
        uncol(OracleSession(build_hypergraph(3, 2, [])), Fraction(1, 2), 0, RngStream(0))
