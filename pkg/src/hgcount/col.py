"""Edge estimation with the colourful independence oracle.

* :func:`find_core` computes an (I, zeta)-core directly from the edges.
* :func:`verify_guess` tests a guess M for the number of colourful edges.
* :func:`coarse_large_core` and :func:`coarse_small_core` are the two
  coarse counters; :func:`colour_coarse` runs both over every root set.
* :func:`colourful_enumerate` lists colourful edges by halving classes.
* :func:`fine_count` turns a coarse bound into an eps-approximation by
  class-wise subsampling.

All routines take the nominal vertex count ``n`` (a power of two) as an
argument, since a sub-instance may live on a small part of the graph.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .bits import to_list, to_mask
from .boosting import boost_repetitions, lower_median
from .errors import BudgetExceeded, PreconditionError
from .estimate import RTE, Estimate
from .hypergraph import PartitionedHypergraph
from .mathkit import is_power_of_two, log2_exact, next_power_of_two
from .oracle import CINDORA, OracleSession
from .profiles import get_profile
from .sampling import RngStream, balanced_split, uniform_k_partition_mask
from .uncol import QueryBudget, ln_inverse

log = logging.getLogger(__name__)

YES = "Yes"
NO = "No"
TOO_DENSE = "TooDense"
GUARD = 2.0 ** -40


# cores

@dataclass(frozen=True)
class Core:
    I: frozenset
    Y: Tuple[int, ...]   # class masks
    zeta: Fraction

    @property
    def sets(self) -> Tuple[frozenset, ...]:
        from .bits import to_set
        return tuple(to_set(m) for m in self.Y)


def _colourful_degrees(edges: Sequence[int], classes: Sequence[int]):
    """e(H[Y]) and the degree of every vertex in it, for edge masks."""
    union = 0
    for c in classes:
        union |= c
    deg: Dict[int, int] = {}
    kept = 0
    for em in edges:
        if em & union != em:
            continue
        if not all(em & c for c in classes):
            continue
        kept += 1
        m = em
        while m:
            low = m & -m
            v = low.bit_length() - 1
            deg[v] = deg.get(v, 0) + 1
            m ^= low
    return kept, deg


def core_violations(h: PartitionedHypergraph, core: Core) -> List[str]:
    """Clauses of the core definition that ``core`` breaks (empty if valid)."""
    k = h.k
    out = []
    edges = h.base.edge_masks
    e_h, _ = _colourful_degrees(edges, h.class_masks)
    e_y, deg = _colourful_degrees(edges, core.Y)
    for i in range(k):
        if core.Y[i] & ~h.class_masks[i]:
            out.append(f"Y_{i + 1} is not inside X_{i + 1}")
    if e_y * (2 * k) ** k < e_h:
        out.append(f"(i) e(H[Y])={e_y} < e(H)/(2k)^k with e(H)={e_h}")
    for i in core.I:
        if core.Y[i].bit_count() * core.zeta > 2:
            out.append(f"(ii) |Y_{i + 1}|={core.Y[i].bit_count()} > 2/zeta")
    for i in range(k):
        if i in core.I:
            continue
        m = core.Y[i]
        while m:
            low = m & -m
            v = low.bit_length() - 1
            if deg.get(v, 0) >= core.zeta * e_y:
                out.append(f"(iii) vertex {v} of Y_{i + 1} is a zeta-root")
                break
            m ^= low
    return out


def find_core(h: PartitionedHypergraph, zeta) -> Core:
    """An (I, zeta)-core, built by the two-case shrinking argument."""
    z = Fraction(zeta)
    if not 0 < z <= 1:
        raise PreconditionError("need 0 < zeta <= 1")
    k = h.k
    edges = h.base.edge_masks
    Y = list(h.class_masks)
    I = set()
    while True:
        e_j, deg = _colourful_degrees(edges, Y)
        half = z / 2 * e_j
        roots = []
        for i in range(k):
            r = 0
            for v in to_list(Y[i]):
                if deg.get(v, 0) >= half:
                    r |= 1 << v
            roots.append(r)
        grown = False
        for l in range(k):
            if l in I:
                continue
            mass = sum(deg.get(v, 0) for v in to_list(roots[l]))
            if mass * 2 * k > e_j:
                Y[l] = roots[l]
                I.add(l)
                grown = True
                break
        if not grown:
            for i in range(k):
                if i not in I:
                    Y[i] &= ~roots[i]
            break
    core = Core(frozenset(I), tuple(Y), z)
    bad = core_violations(h, core)
    assert not bad, bad
    return core


# guess verification

@dataclass
class GuessVerdict:
    answer: str
    tuples_tried: int

    @property
    def yes(self) -> bool:
        return self.answer == YES


def _log2(x: Fraction) -> float:
    x = Fraction(x)
    return math.log2(x.numerator) - math.log2(x.denominator)


def _check_zeta(zeta) -> Fraction:
    z = Fraction(zeta)
    if not 0 < z < Fraction(1, 32):
        raise PreconditionError("need 0 < zeta < 1/32")
    return z


def tuple_bounds(n: int, k: int, M: int, I, zeta) -> Tuple[List[int], int]:
    """Per-coordinate upper bounds and the lower bound on the sum for A."""
    ell = log2_exact(n)
    cap_i = math.floor(2 * _log2(1 / Fraction(zeta)) + 1 + GUARD)
    ub = [min(2 * ell, cap_i) if i in I else 2 * ell for i in range(k)]
    lo = math.ceil(log2_exact(M) - k * math.log2(2 * k) - GUARD)
    return ub, max(lo, 0)


def tuple_set(n: int, k: int, M: int, I, zeta) -> List[Tuple[int, ...]]:
    ub, lo = tuple_bounds(n, k, M, I, zeta)
    return [a for a in product(*(range(u + 1) for u in ub)) if sum(a) >= lo]


def p_out(n: int, k: int, I, zeta) -> float:
    lz = _log2(1 / Fraction(zeta))
    ell = log2_exact(n)
    return 1.0 / (2 ** (5 * k) * lz ** len(I) * ell ** (k - len(I)))


def soundness_threshold(n: int, k: int, M: int, I, zeta) -> float:
    """Edge counts below this make a Yes unlikely."""
    lz = _log2(1 / Fraction(zeta))
    ell = log2_exact(n)
    return M * p_out(n, k, I, zeta) / ((8 * k) ** k * lz ** len(I) * ell ** (k - len(I)))


def _check_classes(sess: OracleSession, classes: Sequence[int]) -> Tuple[int, ...]:
    if sess.mode != CINDORA:
        raise PreconditionError("the colourful routines need a cindora session")
    masks = tuple(c if isinstance(c, int) else to_mask(c) for c in classes)
    if len(masks) != sess.k:
        raise PreconditionError(f"need {sess.k} classes, got {len(masks)}")
    seen = 0
    for m in masks:
        if m & seen:
            raise PreconditionError("classes must be pairwise disjoint")
        seen |= m
    return masks


def verify_guess(sess: OracleSession, M: int, classes, I, zeta, rng: RngStream,
                 n: Optional[int] = None) -> GuessVerdict:
    """Yes if some sampled tuple of class subsets still holds a colourful edge."""
    X = _check_classes(sess, classes)
    n = next_power_of_two(sess.n) if n is None else n
    if n < 32 or not is_power_of_two(n) or not is_power_of_two(M):
        raise PreconditionError("need n >= 32 and n, M powers of two")
    z = _check_zeta(zeta)
    k = sess.k
    I = frozenset(I)
    verts = [to_list(x) for x in X]
    ub, lo = tuple_bounds(n, k, M, I, z)
    # Z_{i,j} keeps each vertex of X_i with probability 2^-j, drawn on first use
    Z: List[Dict[int, int]] = [{0: x} for x in X]
    tried = 0
    cindora = sess.cindora
    for a in product(*(range(u + 1) for u in ub)):
        if sum(a) < lo:
            continue
        tried += 1
        sets = []
        for i, j in enumerate(a):
            s = Z[i].get(j)
            if s is None:
                s = rng.bernoulli_mask(verts[i], 2.0 ** -j)
                Z[i][j] = s
            if not s:
                break
            sets.append(s)
        else:
            if cindora(sets) == 0:
                return GuessVerdict(YES, tried)
    return GuessVerdict(NO, tried)


# coarse counters

def large_core_b(n: int, k: int, I, zeta) -> float:
    lz = _log2(1 / Fraction(zeta))
    return float((2 * k) ** (5 * k)) * log2_exact(n) ** (k - len(I)) * lz ** len(I)


def large_core_reps(n: int, k: int, I, zeta, profile) -> int:
    prof = get_profile(profile)
    p = min(1.0, p_out(n, k, I, zeta) * prof.large_p_scale)
    reps = math.ceil(24 * math.log(12 * k * log2_exact(n)) / p)
    if prof.large_n_max is not None:
        reps = min(reps, prof.large_n_max)
    return reps


def _large_core_once(sess, X, I, z, n, rng, prof) -> float:
    k = sess.k
    if sess.cindora(X) == 1:
        return 0.0
    po = p_out(n, k, I, z)
    reps = large_core_reps(n, k, I, z, prof)
    need = 3 * po * reps / 4
    m = None
    M = 1
    top = n ** k
    while M <= top:
        s = 0
        for _ in range(reps):
            if verify_guess(sess, M, X, I, z, rng, n).yes:
                s += 1
        if s >= need:
            m = M
        M *= 2
    if m is None:
        m = top
    return 2 * m / large_core_b(n, k, I, z)


def coarse_large_core(sess: OracleSession, classes, I, zeta, delta, rng: RngStream,
                      n: Optional[int] = None, profile="theory") -> float:
    """Coarse count for instances whose core has large classes outside I."""
    prof = get_profile(profile)
    X = _check_classes(sess, classes)
    n = next_power_of_two(sess.n) if n is None else n
    if n < 32 or not is_power_of_two(n):
        raise PreconditionError("need n >= 32, a power of two")
    z = _check_zeta(zeta)
    if not 0 < delta < Fraction(1, 32):
        raise PreconditionError("need 0 < delta < 1/32")
    I = frozenset(I)
    if not prof.coarse_boost:
        return _large_core_once(sess, X, I, z, n, rng, prof)
    reps = boost_repetitions(delta)
    return lower_median([_large_core_once(sess, X, I, z, n, rng.split(), prof) for _ in range(reps)])


def _blocks(mask: int, size: int) -> List[int]:
    vs = to_list(mask)
    return [to_mask(vs[j:j + size]) for j in range(0, len(vs), size)] or [0]


def _small_core_once(sess, X, I, t, n, rng, prof) -> float:
    k = sess.k
    parts = []
    for i in range(k):
        if i in I:
            parts.append(_blocks(X[i], t))
        else:
            kept = rng.bernoulli_mask(to_list(X[i]), t / n)
            if kept.bit_count() > 2 * t:
                return 0.0
            parts.append([kept])
    inner_delta = Fraction(1, 12 * n ** k) if prof.small_delta is None else prof.small_delta
    total = Fraction(0)
    for pick in product(*parts):
        if not all(pick):
            continue
        union = 0
        for x in pick:
            union |= x
        sub_n = next_power_of_two(union.bit_count())
        if sub_n >= n:
            # the sub-instance did not shrink, so recursing would not terminate
            total += len(colourful_enumerate(sess, pick, float("inf"), rng))
            continue
        est = _fine_on_classes(sess, pick, Fraction(1, 2), inner_delta, rng.split(), prof, sub_n)
        if not est.ok:
            return 0.0
        total += Fraction(est.value)
    return float(Fraction(n, t) ** (k - len(I)) * total)


def coarse_small_core(sess: OracleSession, classes, I, t: int, delta, rng: RngStream,
                      n: Optional[int] = None, profile="theory") -> float:
    """Coarse count by splitting the classes in I into blocks and thinning the rest."""
    prof = get_profile(profile)
    X = _check_classes(sess, classes)
    k = sess.k
    n = next_power_of_two(sess.n) if n is None else n
    I = frozenset(I)
    if not is_power_of_two(n):
        raise PreconditionError("n must be a power of two")
    if not 12 * math.log2(k) <= t <= n:
        raise PreconditionError("need 12 log k <= t <= n")
    if len(I) >= k or any(not 0 <= i < k for i in I):
        raise PreconditionError("I must be a proper subset of the class indices")
    if not 0 < delta < 1:
        raise PreconditionError("need 0 < delta < 1")
    if not prof.coarse_boost:
        return _small_core_once(sess, X, I, t, n, rng, prof)
    reps = boost_repetitions(delta)
    return lower_median([_small_core_once(sess, X, I, t, n, rng.split(), prof) for _ in range(reps)])


def alpha_prime(alpha) -> int:
    return math.ceil(alpha) - 1


def coarse_parameters(n: int, k: int, alpha, profile="theory") -> Tuple[int, Fraction]:
    """(t, zeta) for the dispatcher."""
    prof = get_profile(profile)
    a1 = alpha_prime(alpha)
    expo = 20 * k / (alpha - a1) if prof.t_exponent is None else prof.t_exponent
    ell = log2_exact(n)
    t = math.floor(n / ell ** expo)
    zeta = Fraction(t, n) ** (2 * k * (k - a1)) / (8 * k)
    return t, zeta


def coarse_b(n: int, k: int, alpha, profile="theory") -> float:
    """The factor b of the dispatcher's guarantee m/b <= e <= m b."""
    prof = get_profile(profile)
    a1 = alpha_prime(alpha)
    expo = 20 * k / (alpha - a1) if prof.t_exponent is None else prof.t_exponent
    ell = log2_exact(n)
    inner = 8 * k * ell ** (2 * (k - a1) * expo)
    return float((2 * k) ** (5 * k)) * ell ** (k - a1 - 1) * math.log2(inner) ** k


def brute_colourful_count(sess: OracleSession, classes) -> int:
    """One cindora query per colourful k-tuple."""
    X = _check_classes(sess, classes)
    total = 0
    for pick in product(*(to_list(x) for x in X)):
        if sess.cindora([1 << v for v in pick]) == 0:
            total += 1
    return total


@dataclass
class CoarseResult:
    value: float
    exact: bool = False
    per_root_set: dict = field(default_factory=dict)


def colour_coarse_detail(sess: OracleSession, classes, rng: RngStream, n: Optional[int] = None,
                         profile="theory", alpha=None) -> CoarseResult:
    prof = get_profile(profile)
    X = _check_classes(sess, classes)
    k = sess.k
    n = next_power_of_two(sess.n) if n is None else n
    if not is_power_of_two(n):
        raise PreconditionError("n must be a power of two")
    alpha = sess.model.index(k) if alpha is None else alpha
    t, zeta = (0, Fraction(0)) if n < 2 else coarse_parameters(n, k, alpha, prof)
    if n < 32 or t < 12 * math.log2(k):
        return CoarseResult(float(brute_colourful_count(sess, X)), exact=True)
    a1 = alpha_prime(alpha)
    delta = Fraction(1, 2 ** (k + 5))
    best = 0.0
    per = {}
    for bits in product((0, 1), repeat=k):
        R = frozenset(i for i in range(k) if bits[i])
        if len(R) <= a1 and len(R) < k:
            z = coarse_small_core(sess, X, R, t, delta, rng.split(), n, prof)
        else:
            z = coarse_large_core(sess, X, R, zeta, delta, rng.split(), n, prof)
        per[tuple(sorted(R))] = z
        best = max(best, z)
    return CoarseResult(best, False, per)


def colour_coarse(sess: OracleSession, classes, rng: RngStream, n: Optional[int] = None,
                  profile="theory", alpha=None) -> float:
    """Coarse count m with m/b <= e(G[X_1..X_k]) <= m b (statistical)."""
    return colour_coarse_detail(sess, classes, rng, n, profile, alpha).value


# exact enumeration

def colourful_enumerate(sess: OracleSession, classes, M, rng: RngStream,
                        budget: Optional[QueryBudget] = None):
    """Colourful edges (as masks) if there are at most M, else TooDense.

    Raises BudgetExceeded when ``budget`` runs out.
    """
    X = _check_classes(sess, classes)
    if budget is None:
        budget = QueryBudget(float("inf"))
    if not all(X):
        return []
    cindora = sess.cindora
    k = len(X)
    budget.take()
    if cindora(X) == 1:
        return []
    found = []
    stack = [X]
    bitvecs = list(product((0, 1), repeat=k))
    while stack:
        tup = stack.pop()
        if all(p.bit_count() == 1 for p in tup):
            u = 0
            for p in tup:
                u |= p
            found.append(u)
            if len(found) > M:
                return TOO_DENSE
            continue
        halves = [balanced_split(p, rng) for p in tup]
        for bits in bitvecs:
            child = []
            for j, b in enumerate(bits):
                c = halves[j][b]
                if not c:
                    break
                child.append(c)
            else:
                budget.take()
                if cindora(child) == 0:
                    stack.append(child)
    return found


def enumerate_budget(classes: Sequence[int], k: int, M, profile) -> int:
    prof = get_profile(profile)
    depth = max(c.bit_count() for c in classes).bit_length() + 1
    return math.ceil(prof.c_rte * 2 ** k * depth * (M + 2))


# fine counting

def _is_dense_dispatch(n: int, k: int) -> bool:
    """True when k is small enough relative to log n for the root-set dispatcher."""
    ell = math.log2(n)
    return ell > 2 and k <= ell / math.log2(ell) ** 2


def _coarse_for_fine(sess, X, delta, rng, prof, n) -> Tuple[float, float, bool]:
    """(coarse value, its factor b, exact flag)."""
    k = sess.k
    if n < 32:
        return float(brute_colourful_count(sess, X)), 1.0, True
    if _is_dense_dispatch(n, k):
        res = colour_coarse_detail(sess, X, rng, n, prof)
        return res.value, coarse_b(n, k, sess.model.index(k), prof), res.exact
    zeta = Fraction(1, 33)
    d = min(Fraction(delta), Fraction(1, 33))
    v = coarse_large_core(sess, X, frozenset(), zeta, d, rng, n, prof)
    return v, large_core_b(n, k, frozenset(), zeta), False


def _fine_on_classes(sess, X, eps, delta, rng, prof, n, colour=False) -> Estimate:
    """Fine count of colourful edges of G[X_1..X_k].

    With ``colour`` every sample also gets a fresh random colouring of the
    union of X (used for uncoloured graphs, rescaled by k^k/k!).
    """
    k = sess.k
    before = sess.ledger.total()

    def done(value, status="ok", **extra):
        c, q = sess.ledger.total()
        est = Estimate(value, status, None, c - before[0], q - before[1], rng.seed, rng.stream_id)
        est.extra.update(extra)
        return est

    union = 0
    for x in X:
        union |= x
    e = Fraction(eps)
    s0 = prof.s0_mult / (e * e)
    M = 8 * s0
    if colour:
        coarse_classes = uniform_k_partition_mask(union, k, rng)
    else:
        if sess.cindora(X) == 1:
            return done(Fraction(0), exact=True)
        coarse_classes = X
    m_hat, b_coarse, exact = _coarse_for_fine(sess, coarse_classes, Fraction(delta) / 3, rng.split(), prof, n)
    if exact and not colour:
        return done(Fraction(int(m_hat)), exact=True, coarse=m_hat)
    b = b_coarse if prof.fine_b is None else prof.fine_b
    upper = m_hat * b_coarse
    # p = 2^-j with p^k * upper <= s0
    j = 0
    if upper > s0:
        j = math.ceil(math.log2(upper / float(s0)) / k - GUARD)
        while 2.0 ** (-j * k) * upper > s0:
            j += 1
    if j == 0 and not colour:
        try:
            out = colourful_enumerate(sess, X, M, rng, QueryBudget(enumerate_budget(X, k, M, prof)))
        except BudgetExceeded:
            return done(None, RTE)
        if out != TOO_DENSE:
            return done(Fraction(len(out)), exact=True, coarse=m_hat)
        j = 1
    T = math.ceil(prof.c_f * float(1 / (e * e)) * b * b * ln_inverse(Fraction(delta) / 3))
    scale = Fraction(k ** k, math.factorial(k)) if colour else Fraction(1)
    verts = [to_list(x) for x in X]
    uverts = to_list(union)
    restarts = 0
    while True:
        p = 2.0 ** -j
        total = 0
        dense = False
        for _ in range(T):
            if colour:
                kept = rng.bernoulli_mask(uverts, p) if j else union
                parts = uniform_k_partition_mask(kept, k, rng)
            else:
                parts = [rng.bernoulli_mask(v, p) if j else x for v, x in zip(verts, X)]
            try:
                out = colourful_enumerate(sess, parts, M, rng,
                                          QueryBudget(enumerate_budget(X, k, M, prof)))
            except BudgetExceeded:
                return done(None, RTE)
            if out == TOO_DENSE:
                dense = True
                break
            total += len(out)
        if not dense:
            break
        # the coarse bound was too low: thin harder and start over
        j += 1
        restarts += 1
        if j > 4 * log2_exact(next_power_of_two(max(2, union.bit_count()))):
            return done(None, RTE)
    value = Fraction(total * 2 ** (j * k), T) * scale
    return done(value, samples=T, rate_log2=-j, restarts=restarts, coarse=m_hat)


def fine_count(sess: OracleSession, eps, delta, rng: RngStream, profile="theory") -> Estimate:
    """eps-approximation of e(G) from cindora queries (statistical guarantee).

    Partitioned inputs count edges across their classes; for a plain
    hypergraph every sample is coloured at random and rescaled.
    """
    prof = get_profile(profile)
    if not 0 < eps < 1 or not 0 < delta < 1:
        raise PreconditionError("need 0 < eps, delta < 1")
    if sess.mode != CINDORA:
        raise PreconditionError("fine_count needs a cindora session")
    n = next_power_of_two(sess.n)
    if sess.classes is not None:
        return _fine_on_classes(sess, sess.classes, eps, delta, rng, prof, n)
    union = ((1 << sess.real_n) - 1) << 1
    X = uniform_k_partition_mask(union, sess.k, rng)
    return _fine_on_classes(sess, X, eps, delta, rng, prof, n, colour=True)
