"""Experiment runners: accuracy against exact counts and cost scaling."""

import csv
import io
import math
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .cost import CostModel
from .errors import PreconditionError
from .estimate import Estimate, within_eps
from .hypergraph import PartitionedHypergraph, exact_edge_count
from .mathkit import g as g_exponent
from .oracle import CINDORA, INDORA, OracleSession
from .profiles import get_profile
from .sampling import RngStream

COLUMNS = ("experiment", "family", "n", "k", "alpha", "eps", "delta", "profile", "seed",
           "estimate", "exact", "within_eps", "total_cost", "queries", "runtime_ms")


@dataclass
class ExperimentRecord:
    experiment: str
    family: str
    n: int
    k: int
    alpha: object
    eps: object
    delta: object
    profile: str
    seed: int
    estimate: object
    exact: Optional[int]
    within_eps: int
    total_cost: object
    queries: int
    runtime_ms: float

    def row(self) -> List[str]:
        return [_fmt(getattr(self, c)) for c in COLUMNS]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else repr(float(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(records: Iterable[ExperimentRecord], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in records:
        w.writerow(r.row())


def csv_text(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def strip_runtime(text: str) -> str:
    """CSV text with the runtime column blanked, for determinism checks."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return ""
    j = rows[0].index("runtime_ms")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r[:j] + [""] + r[j + 1:])
    return buf.getvalue()


def make_instance(desc: dict, rng: RngStream):
    """Build a graph from a family description such as {"family": "er", "n": 64, "k": 2, "p": 0.3}."""
    from . import generators as gen
    fam = desc["family"]
    k = int(desc.get("k", 2))
    if fam == "er":
        return gen.er(int(desc["n"]), k, desc["p"], rng)
    if fam == "er-partite":
        return gen.er_partite(int(desc["t"]), k, desc["p"], rng)
    if fam == "star":
        return gen.star(int(desc["n"]), k, desc.get("r"))
    if fam == "multistar":
        return gen.multistar(int(desc["n"]), int(desc.get("s", 8)))
    if fam == "sparse":
        return gen.sparse(int(desc["n"]), k, int(desc.get("m", 1)), rng)
    if fam == "empty":
        from .hypergraph import Hypergraph
        return Hypergraph(int(desc["n"]), k, [], trusted=True)
    if fam == "small-core":
        return gen.planted_small_core(int(desc["t"]), k, int(desc.get("roots", 2)), desc.get("p", 0.5), rng)
    if fam == "large-core":
        return gen.planted_large_core(int(desc["t"]), k, int(desc["side"]), rng, desc.get("noise", 0.0))
    if fam == "complete-partite":
        return gen.complete_partite([int(desc["t"])] * k)
    raise PreconditionError(f"unknown family {fam!r}")


def run_estimator(name: str, graph, eps, delta, rng: RngStream, profile, model: CostModel) -> Estimate:
    from .col import fine_count
    from .uncol import uncol, uncol_approx
    if name == "uncol":
        return uncol(OracleSession(graph, model, INDORA), eps, delta, rng, profile)
    if name == "uncol-approx":
        return uncol_approx(OracleSession(graph, model, INDORA), eps, rng, profile)
    if name == "count-col":
        return fine_count(OracleSession(graph, model, CINDORA), eps, delta, rng, profile)
    raise PreconditionError(f"unknown estimator {name!r}")


def _map(fn, items, threads: int):
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_accuracy_suite(config: dict) -> List[ExperimentRecord]:
    """One record per trial; every family's graph is fixed, the estimator seed varies.

    config: {"seed", "profile", "threads", "families": [{"family", params...,
    "estimator", "eps", "delta", "alpha", "trials"}]}
    """
    seed = int(config.get("seed", 0))
    prof = get_profile(config.get("profile", "fast"))
    threads = int(config.get("threads", 1))
    out: List[ExperimentRecord] = []
    for fi, desc in enumerate(config.get("families", [])):
        graph = make_instance(desc, RngStream(seed, (fi, 0)))
        exact = exact_edge_count(graph)
        est_name = desc.get("estimator", "uncol")
        eps = Fraction(desc.get("eps", "1/2"))
        delta = Fraction(desc.get("delta", "1/10"))
        alpha = desc.get("alpha", 0)
        model = CostModel(alpha)

        def trial(j, graph=graph, exact=exact, est_name=est_name, eps=eps, delta=delta,
                  alpha=alpha, model=model, desc=desc, fi=fi):
            t0 = time.perf_counter()
            est = run_estimator(est_name, graph, eps, delta, RngStream(seed + j, (fi, 1)), prof, model)
            ms = (time.perf_counter() - t0) * 1000
            return ExperimentRecord(
                est_name, desc["family"], graph.n, graph.k, alpha, eps, delta, prof.name, seed + j,
                est.value if est.ok else est.status, exact,
                int(est.ok and within_eps(est.value, exact, eps)), est.cost, est.queries, round(ms, 3))

        out.extend(_map(trial, range(int(desc.get("trials", 1))), threads))
    return out


def scaling_family(alpha, n: int, k: int = 2) -> dict:
    """Hard family per cost index.

    At alpha = 0 the cost peaks for about n edges concentrated on a few
    roots, so eight disjoint stars; otherwise a single edge.
    """
    if alpha == 0:
        return {"family": "multistar", "n": n, "k": k, "s": 8}
    return {"family": "sparse", "n": n, "k": k, "m": 1}


def fit_slope(ns: Sequence[int], costs: Sequence[float]) -> Optional[float]:
    """Least-squares slope of log cost against log n; None with fewer than two points."""
    pts = [(math.log(n), math.log(c)) for n, c in zip(ns, costs) if c > 0]
    if len(pts) < 2:
        return None
    mx = statistics.fmean(p[0] for p in pts)
    my = statistics.fmean(p[1] for p in pts)
    sxx = sum((p[0] - mx) ** 2 for p in pts)
    if sxx == 0:
        return None
    return sum((p[0] - mx) * (p[1] - my) for p in pts) / sxx


def run_cost_scaling(config: dict) -> Tuple[List[ExperimentRecord], Dict[object, dict]]:
    """Median single-run cost of the uncoloured estimator against n.

    config: {"k", "alphas", "log_n": [lo, hi], "trials", "eps", "seed",
    "profile", "threads"}. Returns the per-trial records and, per alpha,
    the medians, the fitted slope over the top half of the grid and the
    predicted slope alpha + g(k, alpha).
    """
    seed = int(config.get("seed", 0))
    prof = get_profile(config.get("profile", "fast"))
    k = int(config.get("k", 2))
    lo, hi = config.get("log_n", (6, 11))
    grid = [2 ** e for e in range(lo, hi + 1)]
    trials = int(config.get("trials", 50))
    eps = Fraction(config.get("eps", "1/2"))
    threads = int(config.get("threads", 1))
    records: List[ExperimentRecord] = []
    fits: Dict[object, dict] = {}
    for alpha in config.get("alphas", (0, 1)):
        model = CostModel(alpha)
        medians = []
        for n in grid:
            desc = scaling_family(alpha, n, k)
            graph = make_instance(desc, RngStream(seed, (n, 0)))
            exact = graph.e

            def trial(j, graph=graph, exact=exact, desc=desc, n=n, alpha=alpha, model=model):
                t0 = time.perf_counter()
                rng = RngStream(seed + j, (n, 1))
                est = run_estimator("uncol-approx", graph, eps, None, rng, prof, model)
                ms = (time.perf_counter() - t0) * 1000
                return ExperimentRecord(
                    "scaling", desc["family"], n, k, alpha, eps, "", prof.name, seed + j,
                    est.value if est.ok else est.status, exact,
                    int(est.ok and within_eps(est.value, exact, eps)), est.cost, est.queries,
                    round(ms, 3))

            recs = _map(trial, range(trials), threads)
            records.extend(recs)
            medians.append(statistics.median(float(r.total_cost) for r in recs))
        top = len(grid) // 2
        fits[alpha] = {
            "n": grid, "median_cost": medians,
            "slope": fit_slope(grid[top:], medians[top:]) if len(grid) > 1 else None,
            "predicted": float(alpha + g_exponent(k, alpha)),
        }
    return records, fits


def gtable(k_values: Sequence[int] = range(2, 7), beta_step=Fraction(1, 2), log_n: int = 20) -> List[dict]:
    """g(k, beta) on the grid beta = 0, step, ..., k with the schedule overhead check."""
    from .mathkit import max_overhead
    step = Fraction(beta_step)
    if step <= 0:
        raise PreconditionError("beta step must be positive")
    rows = []
    for k in k_values:
        beta = Fraction(0)
        while beta <= k:
            chk = max_overhead(2 ** log_n, k, beta)
            rows.append({"k": k, "beta": str(beta), "g": str(g_exponent(k, beta)),
                         "log_n": log_n, "max_exponent": str(chk.max_exponent),
                         "g_exponent": str(chk.g_exponent), "equal": chk.equal})
            beta += step
    return rows
