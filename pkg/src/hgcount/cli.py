"""Command-line interface.

Exit codes: 0 success, 2 precondition violation, 3 I/O or format error,
4 when more than half of the runs ended in RTE.
"""

import csv
import json
import logging
import os
import runpy
import sys
from fractions import Fraction

import click

from .errors import HgFormatError, PreconditionError

EXIT_PRECONDITION = 2
EXIT_IO = 3
EXIT_RTE = 4


class RteDominated(Exception):
    pass


class FractionType(click.ParamType):
    name = "rational"

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return Fraction(str(value))
        except (ValueError, ZeroDivisionError):
            self.fail(f"{value!r} is not a rational number", param, ctx)


RATIONAL = FractionType()


def _jsonable(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else float(x)
    if isinstance(x, (set, frozenset, tuple)):
        return [_jsonable(v) for v in sorted(x)] if isinstance(x, (set, frozenset)) else [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_jsonable(v) for v in x]
    return x


class Output:
    def __init__(self, path):
        self.path = path
        self.fh = None

    def emit(self, record: dict):
        if self.fh is None:
            self.fh = sys.stdout if self.path in (None, "-") else open(self.path, "w")
        self.fh.write(json.dumps(_jsonable(record), sort_keys=True) + "\n")
        self.fh.flush()

    def close(self):
        if self.fh is not None and self.fh is not sys.stdout:
            self.fh.close()


class Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except HgFormatError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_IO)
        except OSError as exc:
            click.echo(f"error: {exc}", err=True)
            ctx.exit(EXIT_IO)
        except PreconditionError as exc:
            click.echo(f"precondition violated: {exc}", err=True)
            ctx.exit(EXIT_PRECONDITION)
        except RteDominated as exc:
            click.echo(f"RTE-dominated run: {exc}", err=True)
            ctx.exit(EXIT_RTE)


@click.group(cls=Cli)
@click.option("--seed", type=int, default=0, show_default=True, help="Root seed of all randomness.")
@click.option("--profile", type=click.Choice(["theory", "fast"]), default="fast", show_default=True)
@click.option("--threads", type=int, default=1, show_default=True, help="Worker threads for trial loops.")
@click.option("--out", "out", default="-", help="Destination of JSON-lines output.")
@click.option("-v", "--verbose", is_flag=True, help="Log relaxed constants and warnings.")
@click.pass_context
def main(ctx, seed, profile, threads, out, verbose):
    """Edge estimation in hypergraphs through independence oracles."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, stream=sys.stderr)
    ctx.obj = {"seed": seed, "profile": profile, "threads": threads, "out": Output(out)}
    ctx.call_on_close(ctx.obj["out"].close)


def _rng(ctx, *path):
    from .sampling import RngStream
    return RngStream(ctx.obj["seed"], path)


def _parse_params(text: str) -> dict:
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise PreconditionError(f"parameter {item!r} is not key=value")
        key, val = item.split("=", 1)
        val = val.strip()
        try:
            out[key.strip()] = int(val)
        except ValueError:
            try:
                out[key.strip()] = Fraction(val)
            except ValueError:
                out[key.strip()] = val
    return out


def _model(alpha, slow):
    from .cost import CostModel
    return CostModel(alpha, slow)


def _write_ledger(sess, path):
    if not path:
        return
    with open(path, "w") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "kind", "size", "charge", "answer"])
        for i, r in enumerate(sess.ledger.records()):
            w.writerow([i, r.kind, r.size, repr(r.charge) if isinstance(r.charge, float) else r.charge, r.answer])


# gen

def _pair_paths(out: str):
    stem = out[:-3] if out.endswith(".hg") else out
    return stem + ".1.hg", stem + ".2.hg", stem + ".meta.json"


@main.command()
@click.option("--family", required=True,
              type=click.Choice(["uncol-lb", "col-lb", "er", "er-partite", "star", "multistar", "sparse"]))
@click.option("--params", default="", help="Comma separated key=value pairs, e.g. n=64,k=2,p=3/10.")
@click.option("--out", "path", required=True, help="Output .hg path (pairs write .1.hg/.2.hg/.meta.json).")
@click.pass_context
def gen(ctx, family, params, path):
    """Generate a hypergraph or a lower-bound pair."""
    from .adversarial import gen_col_pair, gen_uncol_pair
    from .bench import make_instance
    from .hgio import write_hg
    prm = _parse_params(params)
    rng = _rng(ctx, 0)
    seed = ctx.obj["seed"]
    if family == "uncol-lb":
        ov = {k: prm[k] for k in ("c_root", "c_sqrt", "p1", "p2") if k in prm}
        pair = gen_uncol_pair(int(prm["n"]), int(prm.get("k", 2)), int(prm.get("r", 1)),
                              Fraction(prm.get("eps", Fraction(1, 2))), rng, ov)
        meta = {"seed": seed, "family": family, "params": pair.params, "roots": pair.roots}
    elif family == "col-lb":
        ov = {k: prm[k] for k in ("beta", "B", "c_exp", "c24") if k in prm}
        pair = gen_col_pair(int(prm["t"]), int(prm.get("k", 3)), prm.get("alpha", 0), rng, ov)
        prm_out = {k: (v if not hasattr(v, "coef") else {"coef": v.coef, "exp": v.exp})
                   for k, v in pair.params.items()}
        meta = {"seed": seed, "family": family, "params": prm_out, "j": pair.j,
                "Q": [{"coef": q.coef, "t_exp": q.exp} for q in pair.Q],
                "roots": {i + 1: v for i, v in pair.roots.items()}}
    else:
        desc = dict(prm, family=family)
        g = make_instance(desc, rng)
        write_hg(g, path, [f"family={family} params={params} seed={seed}"])
        ctx.obj["out"].emit({"command": "gen", "family": family, "path": path, "n": g.n, "k": g.k, "m": g.e})
        return
    p1, p2, pm = _pair_paths(path)
    write_hg(pair.G1, p1, [f"family={family} graph=1 seed={seed}"])
    write_hg(pair.G2, p2, [f"family={family} graph=2 seed={seed}"])
    with open(pm, "w") as fh:
        json.dump(_jsonable(meta), fh, sort_keys=True, indent=1)
    ctx.obj["out"].emit({"command": "gen", "family": family, "paths": [p1, p2, pm],
                         "m1": pair.G1.e, "m2": pair.G2.e})


# exact

@main.command()
@click.option("--input", "inp", required=True)
@click.pass_context
def exact(ctx, inp):
    """Exact edge count (and colourful count for partitioned inputs)."""
    from .hgio import read_hg
    from .hypergraph import PartitionedHypergraph
    g = read_hg(inp)
    rec = {"command": "exact", "input": inp, "n": g.n, "k": g.k, "exact": g.e}
    if isinstance(g, PartitionedHypergraph):
        rec["colourful"] = g.colourful_count()
    ctx.obj["out"].emit(rec)


# estimators

def _estimate_record(ctx, name, inp, est, eps, delta, exact_value):
    rec = est.to_record(exact_value)
    rec.update({"command": name, "input": inp, "eps": eps, "delta": delta,
                "profile": ctx.obj["profile"], "status": est.status})
    rec.update({k: v for k, v in est.extra.items() if isinstance(v, (int, float, str, Fraction))})
    return rec


@main.command("count-uncol")
@click.option("--input", "inp", required=True)
@click.option("--eps", type=RATIONAL, default="1/2", show_default=True)
@click.option("--delta", type=RATIONAL, default="1/10", show_default=True)
@click.option("--alpha", type=RATIONAL, default="0", show_default=True, help="Cost index alpha_k.")
@click.option("--slow", type=click.Choice(["identity", "log", "exp"]), default="identity")
@click.option("--verify", is_flag=True, help="Also report the exact count.")
@click.option("--ledger", "ledger_path", default=None, help="Write the query ledger as CSV.")
@click.pass_context
def count_uncol(ctx, inp, eps, delta, alpha, slow, verify, ledger_path):
    """Estimate e(G) with independence-oracle queries."""
    from .hgio import read_hg
    from .oracle import INDORA, OracleSession
    from .uncol import uncol
    g = read_hg(inp)
    sess = OracleSession(g, _model(alpha, slow), INDORA)
    est = uncol(sess, eps, delta, _rng(ctx, 1), ctx.obj["profile"])
    _write_ledger(sess, ledger_path)
    ctx.obj["out"].emit(_estimate_record(ctx, "count-uncol", inp, est, eps, delta, g.e if verify else None))
    runs, failed = est.extra.get("runs", 1), est.extra.get("failed_runs", 0)
    if not est.ok or 2 * failed > runs:
        raise RteDominated(f"{failed} of {runs} runs ended in RTE")


@main.command("count-col")
@click.option("--input", "inp", required=True)
@click.option("--eps", type=RATIONAL, default="1/2", show_default=True)
@click.option("--delta", type=RATIONAL, default="1/10", show_default=True)
@click.option("--alpha", type=RATIONAL, default="0", show_default=True)
@click.option("--slow", type=click.Choice(["identity", "log", "exp"]), default="identity")
@click.option("--verify", is_flag=True)
@click.option("--ledger", "ledger_path", default=None)
@click.pass_context
def count_col(ctx, inp, eps, delta, alpha, slow, verify, ledger_path):
    """Estimate e(G) with colourful-oracle queries."""
    from .col import fine_count
    from .hgio import read_hg
    from .oracle import CINDORA, OracleSession
    g = read_hg(inp)
    sess = OracleSession(g, _model(alpha, slow), CINDORA)
    est = fine_count(sess, eps, delta, _rng(ctx, 2), ctx.obj["profile"])
    _write_ledger(sess, ledger_path)
    ctx.obj["out"].emit(_estimate_record(ctx, "count-col", inp, est, eps, delta, g.e if verify else None))
    if not est.ok:
        raise RteDominated("the fine counter ended in RTE")


@main.command("coarse-col")
@click.option("--input", "inp", required=True)
@click.option("--force-I", "force_i", type=int, default=None, help="Bitmask of root classes (bit 0 = class 1).")
@click.option("--zeta", type=RATIONAL, default=None, help="Root threshold for the forced call, e.g. 1/33.")
@click.option("--delta", type=RATIONAL, default="1/64", show_default=True)
@click.option("--alpha", type=RATIONAL, default="0", show_default=True)
@click.option("--ledger", "ledger_path", default=None)
@click.pass_context
def coarse_col(ctx, inp, force_i, zeta, delta, alpha, ledger_path):
    """Coarse count of a partitioned input (dispatcher or one forced large-core call)."""
    from .col import coarse_b, coarse_large_core, colour_coarse_detail, large_core_b
    from .hgio import read_hg
    from .hypergraph import PartitionedHypergraph
    from .mathkit import next_power_of_two
    from .oracle import CINDORA, OracleSession
    g = read_hg(inp)
    if not isinstance(g, PartitionedHypergraph):
        raise PreconditionError("coarse-col needs a partitioned input (P line)")
    sess = OracleSession(g, _model(alpha, "identity"), CINDORA)
    n = next_power_of_two(g.n)
    rng = _rng(ctx, 3)
    if force_i is not None:
        I = frozenset(i for i in range(g.k) if force_i >> i & 1)
        z = zeta if zeta is not None else Fraction(1, 33)
        value = coarse_large_core(sess, g.class_masks, I, z, delta, rng, n, ctx.obj["profile"])
        rec = {"coarse": value, "b": large_core_b(n, g.k, I, z), "I": sorted(i + 1 for i in I), "zeta": z}
    else:
        res = colour_coarse_detail(sess, g.class_masks, rng, n, ctx.obj["profile"], alpha)
        rec = {"coarse": res.value, "b": coarse_b(n, g.k, alpha, ctx.obj["profile"]) if not res.exact else 1,
               "exact_path": res.exact}
    cost, q = sess.ledger.total()
    rec.update({"command": "coarse-col", "input": inp, "cost": cost, "queries": q,
                "seed": ctx.obj["seed"], "profile": ctx.obj["profile"]})
    _write_ledger(sess, ledger_path)
    ctx.obj["out"].emit(rec)


# tables and experiments

@main.command()
@click.option("--k", "k", type=int, default=None, help="Single uniformity (default: 2..--k-max).")
@click.option("--k-max", type=int, default=6, show_default=True)
@click.option("--beta-step", type=RATIONAL, default="1/2", show_default=True)
@click.option("--log-n", type=int, default=20, show_default=True, help="n = 2^log-n for the overhead check.")
@click.option("--csv", "csv_path", default=None, help="Also write (k, beta, g) rows as CSV.")
@click.pass_context
def gtable(ctx, k, k_max, beta_step, log_n, csv_path):
    """g(k, beta) with the exact schedule-overhead check."""
    from .bench import gtable as table
    rows = table([k] if k is not None else range(2, k_max + 1), beta_step, log_n)
    if csv_path:
        with open(csv_path, "w") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "beta", "g"])
            for r in rows:
                w.writerow([r["k"], r["beta"], r["g"]])
    for row in rows:
        ctx.obj["out"].emit(row)


LB_COLUMNS = ("trial", "family", "strategy", "distinguished", "cost_g1", "queries_g1",
              "answer_g1", "answer_g2", "violations")


@main.command("lb-experiment")
@click.option("--family", required=True, type=click.Choice(["uncol-lb", "col-lb"]))
@click.option("--params", default="")
@click.option("--strategy", required=True,
              type=click.Choice(["nothing", "full", "uncol", "count-col", "coarse-col", "custom-script"]))
@click.option("--script", default=None, help="Python file defining strategy(sess, rng) for custom-script.")
@click.option("--trials", type=int, default=10, show_default=True)
@click.option("--csv", "csv_path", default=None)
@click.pass_context
def lb_experiment(ctx, family, params, strategy, script, trials, csv_path):
    """Run a strategy on both graphs of fresh lower-bound pairs."""
    from .adversarial import STRATEGIES, distinguish_experiment, gen_col_pair, gen_uncol_pair
    from .oracle import CINDORA, INDORA
    prm = _parse_params(params)
    prof = ctx.obj["profile"]
    if family == "uncol-lb":
        ov = {k: prm[k] for k in ("c_root", "c_sqrt", "p1", "p2") if k in prm}
        n, k, r = int(prm["n"]), int(prm.get("k", 2)), int(prm.get("r", 1))
        eps = Fraction(prm.get("eps", Fraction(1, 2)))
        make = lambda rng: gen_uncol_pair(n, k, r, eps, rng, ov)
        mode = INDORA
    else:
        ov = {k: prm[k] for k in ("beta", "B", "c_exp", "c24") if k in prm}
        t, k, a = int(prm["t"]), int(prm.get("k", 3)), prm.get("alpha", 0)
        make = lambda rng: gen_col_pair(t, k, a, rng, ov)
        mode = CINDORA
    if strategy == "custom-script":
        if not script:
            raise PreconditionError("custom-script needs --script")
        fn = runpy.run_path(script).get("strategy")
        if fn is None:
            raise PreconditionError(f"{script} defines no strategy(sess, rng)")
    elif strategy in ("uncol", "count-col", "coarse-col"):
        fn = STRATEGIES[strategy](profile=prof)
    else:
        fn = STRATEGIES[strategy]()
    if strategy == "uncol" and mode != INDORA or strategy in ("count-col", "coarse-col") and mode != CINDORA:
        raise PreconditionError(f"strategy {strategy} does not match the {family} oracle")
    rep = distinguish_experiment(fn, make, trials, _rng(ctx, 4), mode)
    if csv_path:
        with open(csv_path, "w") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(LB_COLUMNS)
            for t in rep.trials:
                w.writerow([t["trial"], family, strategy, int(t["distinguished"]), t["cost_g1"],
                            t["queries_g1"], _jsonable(t["answer_g1"]), _jsonable(t["answer_g2"]),
                            t["violations"]])
    summary = dict(rep.summary(), command="lb-experiment", family=family, strategy=strategy,
                   seed=ctx.obj["seed"])
    ctx.obj["out"].emit(summary)
    rte = sum(1 for t in rep.trials if t["answer_g1"] == "RTE")
    if rep.trials and 2 * rte > len(rep.trials):
        raise RteDominated(f"{rte} of {len(rep.trials)} trials ended in RTE")


@main.command()
@click.option("--alphas", default="0,1", show_default=True)
@click.option("--k", type=int, default=2, show_default=True)
@click.option("--log-n-min", type=int, default=6, show_default=True)
@click.option("--log-n-max", type=int, default=11, show_default=True)
@click.option("--trials", type=int, default=50, show_default=True)
@click.option("--eps", type=RATIONAL, default="1/2", show_default=True)
@click.option("--csv", "csv_path", default=None)
@click.option("--gnuplot", "gp_path", default=None, help="Two-column 'n median_cost' export per alpha.")
@click.pass_context
def scaling(ctx, alphas, k, log_n_min, log_n_max, trials, eps, csv_path, gp_path):
    """Median oracle cost against n, with fitted log-log slopes."""
    from .bench import run_cost_scaling, write_csv
    cfg = {"k": k, "alphas": [Fraction(a) for a in alphas.split(",")], "log_n": (log_n_min, log_n_max),
           "trials": trials, "eps": eps, "seed": ctx.obj["seed"], "profile": ctx.obj["profile"],
           "threads": ctx.obj["threads"]}
    records, fits = run_cost_scaling(cfg)
    if csv_path:
        with open(csv_path, "w") as fh:
            write_csv(records, fh)
    if gp_path:
        with open(gp_path, "w") as fh:
            for a, f in fits.items():
                fh.write(f"# alpha={a}\n")
                for n, c in zip(f["n"], f["median_cost"]):
                    fh.write(f"{n} {c}\n")
                fh.write("\n\n")
    for a, f in fits.items():
        ctx.obj["out"].emit(dict(f, command="scaling", alpha=a, seed=ctx.obj["seed"]))


if __name__ == "__main__":
    main()
