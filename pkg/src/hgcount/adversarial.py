"""Hard input pairs for the lower bounds and the distinguishing game.

Uncoloured pairs: G1 is Erdos-Renyi at p1 = k!/(eps n^r); G2 adds every
k-set containing one of the random size-r roots (each kept with
p2 = 240 r!/n^r).

Colourful pairs: G1 is k-partite Erdos-Renyi at p = t^-(k+a+2)/2 with
a = floor(alpha); G2 adds the complete k-partite graph on sets X_i that
are binomial thinnings of the first k-a-2 classes and single random
roots of the remaining a+2 classes.
"""

import logging
import math
import statistics
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bits import to_mask
from .cost import UNIT, CostModel
from .errors import PreconditionError
from .generators import _distinct_random_sets, er
from .hypergraph import Hypergraph, PartitionedHypergraph, contiguous_classes
from .oracle import CINDORA, INDORA, OracleSession
from .sampling import RngStream

log = logging.getLogger(__name__)

UNCOL_DEFAULTS = {"c_root": 240, "c_sqrt": 10 ** 4}
COL_DEFAULTS = {"c_exp": 5, "c24": 24}
# cap on materialised H2 edges
MAX_H2_EDGES = 5_000_000


@dataclass(frozen=True)
class TPower:
    """coef * t**exp with rational coef and exponent."""
    coef: Fraction
    exp: Fraction

    def __mul__(self, other: "TPower") -> "TPower":
        return TPower(self.coef * other.coef, self.exp + other.exp)

    def value(self, t: int) -> float:
        return float(self.coef) * float(t) ** float(self.exp)

    def exact(self, t: int) -> Optional[Fraction]:
        """Exact rational value when t**exp is rational (t a power of two)."""
        if t & (t - 1) == 0:
            e2 = (t.bit_length() - 1) * self.exp
            if e2.denominator == 1:
                return self.coef * Fraction(2) ** int(e2)
        if self.exp.denominator == 1:
            return self.coef * Fraction(t) ** int(self.exp)
        return None


# uncoloured pairs

@dataclass
class UncolPair:
    G1: Hypergraph
    G2: Hypergraph
    roots: List[tuple]
    params: dict

    def gap_holds(self, eps) -> bool:
        return self.G2.e > (1 + Fraction(eps)) * self.G1.e


def uncol_probabilities(n: int, k: int, r: int, eps, c_root=240) -> Tuple[Fraction, Fraction]:
    e = Fraction(eps)
    p1 = Fraction(math.factorial(k)) / (e * n ** r)
    p2 = Fraction(c_root * math.factorial(r), n ** r)
    return p1, p2


def uncol_hypotheses(n: int, k: int, r: int, eps, c_root=240, c_sqrt=10 ** 4) -> Dict[str, bool]:
    e = Fraction(eps)
    return {
        "sqrt(n)/c_sqrt >= k": n >= (k * c_sqrt) ** 2,
        "k >= r >= 1": k >= r >= 1,
        "c_root k!/n^r <= eps": Fraction(c_root * math.factorial(k), n ** r) <= e,
    }


def smallest_uncol_n(k: int, r: int, eps, c_root=240, c_sqrt=10 ** 4) -> int:
    """Least n meeting the (possibly rescaled) hypotheses."""
    e = Fraction(eps)
    n = max(k, (k * c_sqrt) ** 2)
    # c_root k!/n^r <= eps  <=>  n^r >= c_root k!/eps
    need = Fraction(c_root * math.factorial(k)) / e
    lo = max(n, math.floor(float(need) ** (1 / r)) - 2)
    n = max(n, lo)
    while Fraction(n) ** r < need:
        n += 1
    return n


def _random_r_sets(n: int, r: int, p: Fraction, rng: RngStream) -> List[tuple]:
    total = math.comb(n, r)
    if total <= 2_000_000:
        keep = np.flatnonzero(rng.gen.random(total) < float(p)).tolist()
        if r == 1:
            return [(v + 1,) for v in keep]
        want = set(keep)
        return [c for j, c in enumerate(combinations(range(1, n + 1), r)) if j in want]
    m = int(rng.gen.binomial(total, float(p)))
    return sorted(_distinct_random_sets(n, r, m, rng))


def gen_uncol_pair(n: int, k: int, r: int, eps, rng: RngStream, overrides: Optional[dict] = None,
                   check: bool = True) -> UncolPair:
    """Draw (G1, G2).

    ``overrides`` may set c_root / c_sqrt (rescaled constants) or p1 / p2
    directly; any override marks the pair as relaxed. With ``check`` the
    hypotheses are enforced for the constants in use.
    """
    ov = dict(overrides or {})
    unknown = set(ov) - {"c_root", "c_sqrt", "p1", "p2"}
    if unknown:
        raise PreconditionError(f"unknown overrides {sorted(unknown)}")
    if not 1 <= r <= k <= n:
        raise PreconditionError("need 1 <= r <= k <= n")
    e = Fraction(eps)
    if not 0 < e < 1:
        raise PreconditionError("need 0 < eps < 1")
    c_root = ov.get("c_root", UNCOL_DEFAULTS["c_root"])
    c_sqrt = ov.get("c_sqrt", UNCOL_DEFAULTS["c_sqrt"])
    hyp = uncol_hypotheses(n, k, r, e, c_root, c_sqrt)
    if check and not all(hyp.values()):
        bad = [h for h, ok in hyp.items() if not ok]
        raise PreconditionError(f"hypotheses fail at n={n}: {', '.join(bad)}")
    p1, p2 = uncol_probabilities(n, k, r, e, c_root)
    if "p1" in ov:
        p1 = Fraction(ov["p1"])
    if "p2" in ov:
        p2 = Fraction(ov["p2"])
    if not 0 <= p1 <= 1:
        raise PreconditionError(f"p1 = k!/(eps n^r) = {p1} > 1")
    if not 0 <= p2 <= 1:
        raise PreconditionError(f"p2 = {c_root} r!/n^r = {p2} > 1")
    h1 = er(n, k, p1, rng)
    roots = _random_r_sets(n, r, p2, rng) if p2 > 0 else []
    if len(roots) * math.comb(n - r, k - r) > MAX_H2_EDGES:
        raise PreconditionError("H2 would exceed the edge cap; lower n or p2")
    h2 = set()
    for R in roots:
        rest = [v for v in range(1, n + 1) if v not in R]
        for c in combinations(rest, k - r):
            h2.add(tuple(sorted(R + c)))
    g2 = Hypergraph(n, k, h1.edges | h2, trusted=True)
    params = {
        "n": n, "k": k, "r": r, "eps": e, "p1": p1, "p2": p2,
        "c_root": c_root, "c_sqrt": c_sqrt, "overrides": ov,
        "relaxed": bool(ov), "hypotheses": hyp, "h2_edges": len(h2),
    }
    if ov:
        log.info("uncol pair uses relaxed constants %s", ov)
    return UncolPair(h1, g2, roots, params)


# colourful pairs

@dataclass
class ColPair:
    G1: PartitionedHypergraph
    G2: PartitionedHypergraph
    Q: Tuple[TPower, ...]
    j: Tuple[int, ...]
    roots: Dict[int, int]          # class index -> root vertex
    X: Tuple[int, ...]             # masks of the planted classes
    params: dict

    def gap_holds(self, factor=4) -> bool:
        return self.G2.e >= factor * self.G1.e

    def q_product(self) -> TPower:
        out = TPower(Fraction(1), Fraction(0))
        for q in self.Q:
            out = out * q
        return out

    def expected_h2(self) -> TPower:
        """E[e(H2) | Q]: each non-rooted class gives q_i t, each rooted class 1."""
        t = TPower(Fraction(1), Fraction(1))
        out = TPower(Fraction(1), Fraction(0))
        for q in self.Q:
            out = out * q * t
        return out


def col_parameters(t: int, k: int, alpha, beta=None, B=None, c_exp=5, c24=24) -> dict:
    """p, x, beta, B and the admissible range of j as exact quantities."""
    if k < 2:
        raise PreconditionError("need k >= 2")
    a = math.floor(alpha)
    if not 0 <= alpha <= k - 3:
        raise PreconditionError("need 0 <= alpha <= k - 3")
    if t < 4 or t & (t - 1):
        raise PreconditionError("t must be a power of two, at least 4")
    m = k - a - 2
    lt = t.bit_length() - 1
    p = TPower(Fraction(1), Fraction(-(k + a + 2), 2))
    x = TPower(Fraction(1), Fraction(a + 2)) * p
    if beta is None:
        beta = math.floor(lt / (20 * k ** 4 * math.log2(lt)))
    if beta < 1:
        raise PreconditionError(f"beta = {beta} < 1; pass a beta override")
    if B is None:
        # log base x^(1/beta) of c24 log t / t, with x = t^(-m/2)
        y = math.log2(c24 * lt / t)
        B = math.floor(y / (-(m / 2) * lt / beta) + 2.0 ** -40)
    # q = 2^c_exp x^(j/beta) <= 1  <=>  j >= 2 beta c_exp / (m log t)
    j_min = max(0, math.ceil(Fraction(2 * beta * c_exp, m * lt)))
    return {"t": t, "k": k, "alpha": alpha, "a": a, "m": m, "p": p, "x": x,
            "beta": beta, "B": B, "j_min": j_min, "c_exp": c_exp, "c24": c24}


def q_grid(params: dict) -> List[Tuple[int, ...]]:
    """All admissible j vectors: m parts in [j_min, B] summing to beta."""
    m, beta, lo, hi = params["m"], params["beta"], params["j_min"], params["B"]
    out = []

    def rec(prefix, left, parts):
        if parts == 1:
            if lo <= left <= hi:
                out.append(tuple(prefix + [left]))
            return
        for j in range(lo, min(hi, left) + 1):
            rec(prefix + [j], left - j, parts - 1)

    rec([], beta, m)
    return out


def _grid_size(params) -> int:
    m, beta, lo, hi = params["m"], params["beta"], params["j_min"], params["B"]
    if hi < lo:
        return 0
    return (hi - lo + 1) ** (m - 1)


def _draw_j(params: dict, rng: RngStream) -> Tuple[int, ...]:
    if _grid_size(params) <= 10 ** 6:
        grid = q_grid(params)
        if not grid:
            raise PreconditionError(
                f"no admissible Q grid point for beta={params['beta']}, B={params['B']}")
        return grid[rng.below(len(grid))]
    m, beta, lo, hi = params["m"], params["beta"], params["j_min"], params["B"]
    for _ in range(10 ** 6):
        head = [lo + rng.below(hi - lo + 1) for _ in range(m - 1)]
        last = beta - sum(head)
        if lo <= last <= hi:
            return tuple(head + [last])
    raise PreconditionError(f"could not sample a Q grid point for beta={params['beta']}, B={params['B']}")


def q_of_j(params: dict, j: int) -> TPower:
    """q = 2^c_exp x^(j/beta)."""
    x = params["x"]
    return TPower(Fraction(2) ** params["c_exp"], x.exp * Fraction(j, params["beta"]))


def _partite_er_sparse(t: int, k: int, p: float, rng: RngStream) -> set:
    total = t ** k
    if total <= 20_000_000:
        keep = np.flatnonzero(rng.gen.random(total) < p)
        idx = np.unravel_index(keep, [t] * k)
        cols = [(idx[i] + 1 + i * t).tolist() for i in range(k)]
        return set(zip(*cols))
    m = int(rng.gen.binomial(total, p))
    out = set()
    while len(out) < m:
        rows = rng.gen.integers(0, t, size=(m - len(out), k)) + np.arange(k) * t + 1
        out.update(map(tuple, rows.tolist()))
    return out


def gen_col_pair(t: int, k: int, alpha, rng: RngStream, overrides: Optional[dict] = None) -> ColPair:
    """Draw (G1, G2) on k classes of t vertices; class i holds (i-1)t+1..it."""
    ov = dict(overrides or {})
    unknown = set(ov) - {"beta", "B", "c_exp", "c24"}
    if unknown:
        raise PreconditionError(f"unknown overrides {sorted(unknown)}")
    params = col_parameters(t, k, alpha, ov.get("beta"), ov.get("B"),
                            ov.get("c_exp", COL_DEFAULTS["c_exp"]), ov.get("c24", COL_DEFAULTS["c24"]))
    # t >= 2^(400 k^6) never holds at desk scale, so every pair is relaxed
    params["relaxed"] = True
    params["overrides"] = ov
    log.info("col pair is relaxed (t=%d far below the theory threshold)", t)
    j = _draw_j(params, rng)
    Q = tuple(q_of_j(params, ji) for ji in j)
    m = params["m"]
    h1 = _partite_er_sparse(t, k, params["p"].value(t), rng)
    X = []
    roots = {}
    for i in range(k):
        base = i * t + 1
        if i < m:
            keep = np.flatnonzero(rng.gen.random(t) < Q[i].value(t)).tolist()
            X.append(to_mask(base + v for v in keep))
        else:
            v = base + rng.below(t)
            roots[i] = v
            X.append(1 << v)
    sizes = [x.bit_count() for x in X]
    if math.prod(sizes) > MAX_H2_EDGES:
        raise PreconditionError("H2 would exceed the edge cap; lower c_exp or t")
    lists = [[v for v in range(i * t + 1, (i + 1) * t + 1) if X[i] >> v & 1] for i in range(k)]
    h2 = set(product(*lists))
    classes = contiguous_classes([t] * k)
    g1 = PartitionedHypergraph(Hypergraph(k * t, k, h1, trusted=True), classes, strict=False)
    g2 = PartitionedHypergraph(Hypergraph(k * t, k, h1 | h2, trusted=True), classes, strict=False)
    params["h2_edges"] = len(h2)
    return ColPair(g1, g2, Q, j, roots, tuple(X), params)


# experiments

def gap_check(make_pair: Callable[[RngStream], object], factor, trials: int, rng: RngStream) -> float:
    """Fraction of fresh pairs whose G2 beats G1 by the gap.

    For uncoloured pairs ``factor`` is eps (e(G2) > (1+eps) e(G1)); for
    colourful pairs it is the multiplier (e(G2) >= factor e(G1)).
    """
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    hits = 0
    for _ in range(trials):
        pair = make_pair(rng.split())
        if pair.gap_holds(factor):
            hits += 1
    return hits / trials


class ClassAuditSession(OracleSession):
    """cindora session that logs queries whose sets leave their classes."""

    def __init__(self, graph: PartitionedHypergraph, model: CostModel = UNIT):
        super().__init__(graph, model, CINDORA)
        self.violations = 0

    def cindora(self, sets):
        for s, c in zip(sets, self.partition.class_masks):
            m = s if isinstance(s, int) else to_mask(s)
            if m & ~c:
                self.violations += 1
                log.warning("cindora set leaves its class")
                break
        return super().cindora(sets)


@dataclass
class DistinguishReport:
    trials: List[dict] = field(default_factory=list)

    @property
    def rate(self) -> float:
        return sum(t["distinguished"] for t in self.trials) / len(self.trials) if self.trials else 0.0

    @property
    def median_cost(self):
        return statistics.median(t["cost_g1"] for t in self.trials) if self.trials else 0

    @property
    def violations(self) -> int:
        return sum(t.get("violations", 0) for t in self.trials)

    def summary(self) -> dict:
        return {"trials": len(self.trials), "rate": self.rate, "median_cost": self.median_cost,
                "violations": self.violations}


def _session(g, mode, model):
    if mode == CINDORA and isinstance(g, PartitionedHypergraph):
        return ClassAuditSession(g, model)
    return OracleSession(g, model, mode)


def distinguish_experiment(strategy: Callable[[OracleSession, RngStream], object],
                           make_pair: Callable[[RngStream], object], trials: int, rng: RngStream,
                           mode: str = INDORA, model: CostModel = UNIT) -> DistinguishReport:
    """Run ``strategy`` on both graphs of fresh pairs with identical randomness."""
    rep = DistinguishReport()
    for i in range(trials):
        pair = make_pair(rng.split())
        seed_stream = rng.split()
        s1 = _session(pair.G1, mode, model)
        s2 = _session(pair.G2, mode, model)
        a1 = strategy(s1, RngStream(seed_stream.seed, seed_stream.path))
        a2 = strategy(s2, RngStream(seed_stream.seed, seed_stream.path))
        cost, queries = s1.ledger.total()
        rep.trials.append({
            "trial": i, "distinguished": a1 != a2, "cost_g1": cost, "queries_g1": queries,
            "answer_g1": a1, "answer_g2": a2,
            "violations": getattr(s1, "violations", 0) + getattr(s2, "violations", 0),
        })
    return rep


def strategy_nothing(sess, rng):
    return 0


def strategy_full(sess, rng):
    if sess.mode == CINDORA:
        return sess.cindora(sess.classes)
    return sess.indora(((1 << sess.n) - 1) << 1)


def strategy_uncol(eps=Fraction(1, 2), delta=Fraction(1, 3), profile="fast"):
    from .uncol import uncol

    def run(sess, rng):
        est = uncol(sess, eps, delta, rng, profile)
        return est.value if est.ok else "RTE"
    return run


def strategy_count_col(eps=Fraction(1, 2), delta=Fraction(1, 3), profile="fast"):
    from .col import fine_count

    def run(sess, rng):
        est = fine_count(sess, eps, delta, rng, profile)
        return est.value if est.ok else "RTE"
    return run


def strategy_coarse_col(profile="fast"):
    from .col import colour_coarse

    def run(sess, rng):
        return colour_coarse(sess, sess.classes, rng, profile=profile)
    return run


STRATEGIES = {
    "nothing": lambda **kw: strategy_nothing,
    "full": lambda **kw: strategy_full,
    "uncol": strategy_uncol,
    "count-col": strategy_count_col,
    "coarse-col": strategy_coarse_col,
}
