import csv
import io
import json
from fractions import Fraction
from itertools import combinations

import pytest
from click.testing import CliRunner
from hypothesis import given, strategies as st

from hgcount.bench import (COLUMNS, csv_text, fit_slope, gtable, make_instance, run_accuracy_suite,
                           run_cost_scaling, strip_runtime)
from hgcount.cli import main
from hgcount.errors import HgFormatError, PreconditionError
from hgcount.generators import complete_partite, er, er_partite, multistar, planted_large_core, sparse, star
from hgcount.hgio import format_hg, parse_hg, read_hg, write_hg
from hgcount.hypergraph import PartitionedHypergraph, build_hypergraph
from hgcount.sampling import RngStream


# generators

def test_generator_shapes():
    g = star(6, 3)
    assert g.e == 4 and all(e[:2] == (1, 2) for e in g.edges)
    ms = multistar(20, 4)
    assert ms.e == 16 and {e[0] for e in ms.edges} == {1, 2, 3, 4}
    assert sparse(30, 3, 7, RngStream(0)).e == 7
    assert complete_partite([2, 3, 2]).e == 12
    lc = planted_large_core(10, 3, 2, RngStream(1))
    assert lc.e == 8


@given(st.integers(2, 4), st.integers(4, 14), st.floats(0, 1), st.integers(0, 10 ** 6))
def test_er_edges_are_valid(k, n, p, seed):
    if k > n:
        return
    g = er(n, k, p, RngStream(seed))
    for e in g.edges:
        assert len(set(e)) == k and 1 <= min(e) and max(e) <= n and list(e) == sorted(e)


def test_er_partite_is_partite():
    g = er_partite(5, 3, 0.5, RngStream(2))
    PartitionedHypergraph(g.base, g.class_masks, strict=True)


# .hg format

@given(st.integers(2, 3), st.integers(3, 9), st.data())
def test_hg_roundtrip(k, n, data):
    edges = data.draw(st.lists(st.sampled_from(list(combinations(range(1, n + 1), k))), unique=True, max_size=15))
    g = build_hypergraph(n, k, edges)
    h = parse_hg(format_hg(g, ["note"]).splitlines())
    assert h == g


def test_hg_partition_roundtrip(tmp_path):
    g = er_partite(4, 3, 0.5, RngStream(0))
    path = str(tmp_path / "p.hg")
    write_hg(g, path)
    h = read_hg(path)
    assert isinstance(h, PartitionedHypergraph)
    assert h.class_masks == g.class_masks and h.base == g.base


@pytest.mark.parametrize("text, line, word", [
    ("2 3\n", 1, "header"),
    ("2 3 1\n1 2\n1 2\n", 3, "duplicate"),
    ("2 3 1\n2 1\n", 2, "increasing"),
    ("2 3 1\n1 4\n", 2, "outside"),
    ("2 3 2\n1 2\n", 0, "promises"),
    ("2 3 1\n1 2\nP 1 1\n", 3, "partition"),
    ("# only comments\n", 0, "missing"),
    ("2 3 1\n1 x\n", 2, "integers"),
])
def test_hg_errors_name_the_line(text, line, word):
    with pytest.raises(HgFormatError) as exc:
        parse_hg(text.splitlines(), "f.hg")
    assert exc.value.line == line and word in str(exc.value)


def test_missing_file_is_a_format_error(tmp_path):
    with pytest.raises(HgFormatError):
        read_hg(str(tmp_path / "none.hg"))


# bench

def test_csv_schema_is_stable():
    assert COLUMNS == ("experiment", "family", "n", "k", "alpha", "eps", "delta", "profile", "seed",
                       "estimate", "exact", "within_eps", "total_cost", "queries", "runtime_ms")
    assert csv_text(run_accuracy_suite({"families": []})) == ",".join(COLUMNS) + "\n"


def test_accuracy_suite_rows_and_determinism():
    cfg = {"seed": 3, "profile": "fast", "families": [
        {"family": "er", "n": 24, "k": 2, "p": 0.3, "estimator": "uncol", "trials": 3},
        {"family": "er-partite", "t": 8, "k": 2, "p": 0.3, "estimator": "count-col", "trials": 3}]}
    recs = run_accuracy_suite(cfg)
    assert len(recs) == 6
    for r in recs:
        assert r.total_cost >= 0
        if isinstance(r.estimate, (int, float, Fraction)):
            assert r.within_eps == int(abs(Fraction(r.estimate) - r.exact) <= Fraction(r.eps) * r.exact)
    assert strip_runtime(csv_text(recs)) == strip_runtime(csv_text(run_accuracy_suite(cfg)))


def test_scaling_single_point_has_no_slope():
    _, fits = run_cost_scaling({"alphas": [0], "log_n": (6, 6), "trials": 2})
    assert fits[0]["slope"] is None
    assert fit_slope([8], [3.0]) is None
    assert fit_slope([2, 4, 8], [2, 4, 8]) == pytest.approx(1.0)


def test_gtable_grid():
    rows = gtable([3], Fraction(1, 2), 12)
    assert [r["beta"] for r in rows] == ["0", "1/2", "1", "3/2", "2", "5/2", "3"]
    assert rows[0]["g"] == "2/3"


def test_make_instance_rejects_unknown_family():
    with pytest.raises(PreconditionError):
        make_instance({"family": "nope"}, RngStream(0))


# cli

def run(args, **kw):
    return CliRunner().invoke(main, args, catch_exceptions=False, **kw)


def test_cli_gen_exact_and_counts(tmp_path):
    g = str(tmp_path / "g.hg")
    r = run(["--seed", "1", "gen", "--family", "er", "--params", "n=24,k=2,p=3/10", "--out", g])
    assert r.exit_code == 0
    m = json.loads(r.output)["m"]
    r = run(["exact", "--input", g])
    assert json.loads(r.output)["exact"] == m
    r = run(["--seed", "2", "count-uncol", "--input", g, "--verify"])
    rec = json.loads(r.output)
    assert r.exit_code == 0 and rec["exact"] == m and rec["seed"] == 2 and "stream" in rec
    r = run(["count-col", "--input", g])
    assert r.exit_code == 0 and json.loads(r.output)["status"] == "ok"


def test_cli_pairs_write_three_files(tmp_path):
    g = str(tmp_path / "u.hg")
    r = run(["gen", "--family", "uncol-lb", "--params", "n=960,k=2,r=1,c_sqrt=1", "--out", g])
    assert r.exit_code == 0
    for suffix in (".1.hg", ".2.hg", ".meta.json"):
        assert (tmp_path / ("u" + suffix)).exists()
    meta = json.loads((tmp_path / "u.meta.json").read_text())
    assert meta["params"]["relaxed"] is True
    g = str(tmp_path / "c.hg")
    r = run(["gen", "--family", "col-lb", "--params", "t=64,k=3,beta=6,c24=1,c_exp=1", "--out", g])
    assert r.exit_code == 0
    meta = json.loads((tmp_path / "c.meta.json").read_text())
    assert sum(meta["j"]) == 6 and len(meta["roots"]) == 2


def test_cli_exit_codes(tmp_path):
    bad = tmp_path / "bad.hg"
    bad.write_text("2 3 1\n2 1\n")
    assert run(["exact", "--input", str(bad)]).exit_code == 3
    assert run(["exact", "--input", str(tmp_path / "missing.hg")]).exit_code == 3
    g = tmp_path / "g.hg"
    g.write_text("2 4 1\n1 2\n")
    assert run(["count-uncol", "--input", str(g), "--eps", "2"]).exit_code == 2
    assert run(["coarse-col", "--input", str(g)]).exit_code == 2


def test_cli_rte_dominated_exit(tmp_path, monkeypatch):
    from hgcount import uncol as uncol_mod
    from hgcount.estimate import RTE, Estimate

    def always_rte(sess, eps, delta, rng, profile):
        est = Estimate(None, RTE, None, 0, 0, rng.seed, rng.stream_id)
        est.extra.update(runs=3, failed_runs=3)
        return est
    monkeypatch.setattr(uncol_mod, "uncol", always_rte)
    g = tmp_path / "g.hg"
    g.write_text("2 4 1\n1 2\n")
    assert run(["count-uncol", "--input", str(g)]).exit_code == 4


def test_cli_coarse_forced_core(tmp_path):
    g = str(tmp_path / "p.hg")
    run(["gen", "--family", "er-partite", "--params", "t=16,k=2,p=1/4", "--out", g])
    r = run(["coarse-col", "--input", g, "--force-I", "1", "--zeta", "1/40"])
    rec = json.loads(r.output)
    assert r.exit_code == 0 and rec["I"] == [1] and rec["zeta"] == pytest.approx(1 / 40)


def test_cli_ledger_dump(tmp_path):
    g = tmp_path / "g.hg"
    g.write_text("2 4 1\n1 2\n")
    led = tmp_path / "l.csv"
    r = run(["count-uncol", "--input", str(g), "--ledger", str(led)])
    rows = list(csv.reader(io.StringIO(led.read_text())))
    assert rows[0] == ["index", "kind", "size", "charge", "answer"]
    assert len(rows) - 1 == json.loads(r.output)["queries"]


def test_cli_gtable_and_scaling(tmp_path):
    out = tmp_path / "g.csv"
    r = run(["gtable", "--k", "2", "--beta-step", "1", "--csv", str(out)])
    assert r.exit_code == 0 and out.read_text().splitlines() == ["k,beta,g", "2,0,1/2", "2,1,0", "2,2,0"]
    gp = tmp_path / "s.dat"
    r = run(["scaling", "--alphas", "1", "--log-n-min", "5", "--log-n-max", "6", "--trials", "2",
             "--gnuplot", str(gp)])
    assert r.exit_code == 0 and "# alpha=1" in gp.read_text()


def test_cli_lb_experiment_custom_script(tmp_path):
    script = tmp_path / "s.py"
    script.write_text("def strategy(sess, rng):\n    return 0\n")
    out = tmp_path / "lb.csv"
    r = run(["lb-experiment", "--family", "uncol-lb", "--params", "n=960,k=2,r=1,c_sqrt=1",
             "--strategy", "custom-script", "--script", str(script), "--trials", "2", "--csv", str(out)])
    assert r.exit_code == 0 and json.loads(r.output)["rate"] == 0
    assert len(out.read_text().splitlines()) == 3
