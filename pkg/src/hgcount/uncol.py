"""Edge estimation with the uncoloured independence oracle.

* :func:`rec_enum` lists the colourful edges of one colouring by halving
  the colour classes and recursing where the oracle still sees an edge.
* :func:`sparse_count` enumerates all edges of G[U] using random
  colourings, giving up with TooDense once more than M distinct edges
  have been seen.
* :func:`uncol_approx` samples successively sparser vertex subsets until
  every sample is sparse enough to count exactly, then rescales.
* :func:`uncol` boosts capped runs of :func:`uncol_approx` by a median.
"""

import math
from fractions import Fraction
from itertools import combinations, product
from typing import Callable, List, Optional, Sequence

from .bits import full_mask, to_mask
from .boosting import RTE as RTE_TAG, boost_repetitions, capped_retry, lower_median
from .errors import BudgetExceeded, PreconditionError
from .estimate import RTE, RTE_OUT, TOO_DENSE, TOO_DENSE_OUT, Estimate, Outcome, count
from .mathkit import build_schedule, next_power_of_two
from .oracle import OracleSession
from .profiles import get_profile
from .sampling import (RngStream, StepBudget, balanced_split, sample_subset_mask,
                       uniform_k_partition_mask)


class QueryBudget:
    """Countdown of oracle queries a subroutine may still issue."""
    __slots__ = ("left",)

    def __init__(self, left):
        self.left = left

    def take(self):
        self.left -= 1
        if self.left < 0:
            raise BudgetExceeded("query budget exhausted")


def rec_enum(sess: OracleSession, parts: Sequence[int], emit: Callable[[int], bool],
             rng: RngStream, budget: Optional[QueryBudget] = None) -> bool:
    """Emit every edge with one vertex in each part (parts are masks).

    ``emit`` gets the edge as a mask and returns False to stop early; the
    function then returns False. Child tuples with an empty part are
    skipped without a query since they cannot hold a colourful edge.
    """
    k = len(parts)
    if budget is None:
        budget = QueryBudget(float("inf"))
    indora = sess.indora
    if k == 2:
        return _rec_enum_pairs(indora, parts[0], parts[1], emit, rng, budget)
    bitvecs = list(product((0, 1), repeat=k))
    stack = [tuple(parts)]
    while stack:
        tup = stack.pop()
        union = 0
        for p in tup:
            union |= p
        if union.bit_count() <= k:
            if all(p.bit_count() == 1 for p in tup):
                budget.take()
                if indora(union) == 0 and emit(union) is False:
                    return False
            continue
        halves = [balanced_split(p, rng) for p in tup]
        for bits in bitvecs:
            u = 0
            child = []
            for j, b in enumerate(bits):
                c = halves[j][b]
                if not c:
                    break
                child.append(c)
                u |= c
            else:
                budget.take()
                if indora(u) == 0:
                    stack.append(child)
    return True


def _rec_enum_pairs(indora, a0, b0, emit, rng, budget) -> bool:
    # the k = 2 case of rec_enum, unrolled
    stack = [(a0, b0)]
    while stack:
        a, b = stack.pop()
        ca, cb = a.bit_count(), b.bit_count()
        if ca + cb <= 2:
            if ca == 1 and cb == 1:
                budget.take()
                if indora(a | b) == 0 and emit(a | b) is False:
                    return False
            continue
        a1, a2 = balanced_split(a, rng)
        b1, b2 = balanced_split(b, rng)
        for x in (a1, a2):
            if not x:
                continue
            for y in (b1, b2):
                if y:
                    budget.take()
                    if indora(x | y) == 0:
                        stack.append((x, y))
    return True


def ln_inverse(delta) -> float:
    """ln(1/delta), safe for tiny rationals."""
    d = Fraction(delta)
    return math.log(d.denominator) - math.log(d.numerator)


def colouring_count(size: int, k: int, profile) -> int:
    prof = get_profile(profile)
    x = prof.c_cc * math.exp(2 * k)
    if prof.cc_log:
        x *= math.log(size + 2)
    return max(1, math.ceil(x))


def sparse_count(sess: OracleSession, u, k: int, M: int, delta: float, rng: RngStream,
                 profile="theory") -> Outcome:
    """Exact e(G[U]) if it is at most M, TooDense if it is larger, or RTE."""
    if M < 0 or not 0 < delta < 1:
        raise PreconditionError("need M >= 0 and 0 < delta < 1")
    prof = get_profile(profile)
    u = u if isinstance(u, int) else to_mask(u)
    # one query settles the edgeless case
    if sess.indora(u) == 1:
        return count(0)
    size = u.bit_count()
    t = colouring_count(size, k, prof)
    cap = math.ceil(prof.c_rte * max(1.0, ln_inverse(delta)) * t * 2 ** k
                    * (math.log2(size + 1) + 1) * (M + 1))
    budget = QueryBudget(cap)
    seen = set()

    def emit(m):
        if m not in seen:
            seen.add(m)
            if len(seen) > M:
                return False
        return True

    for _ in range(t):
        parts = uniform_k_partition_mask(u, k, rng)
        try:
            finished = rec_enum(sess, parts, emit, rng, budget)
        except BudgetExceeded:
            return RTE_OUT
        if not finished:
            return TOO_DENSE_OUT
    return count(len(seen))


def brute_force_count(sess: OracleSession, vertices=None) -> int:
    """e(G[S]) with one indora query per k-subset."""
    n, k = sess.n, sess.k
    verts = range(1, n + 1) if vertices is None else sorted(vertices)
    total = 0
    for c in combinations(verts, k):
        m = 0
        for v in c:
            m |= 1 << v
        if sess.indora(m) == 0:
            total += 1
    return total


def _ledger_delta(sess, before):
    cost, q = sess.ledger.total()
    return cost - before[0], q - before[1]


def uncol_approx(sess: OracleSession, eps, rng: RngStream, profile="theory") -> Estimate:
    """One run of the sampling-schedule estimator (success probability >= 2/3)."""
    prof = get_profile(profile)
    e = Fraction(eps)
    if not 0 < e < 1:
        raise PreconditionError("need 0 < eps < 1")
    n, k = sess.n, sess.k
    before = sess.ledger.total()

    def done(value, status="ok", halted=None):
        c, q = _ledger_delta(sess, before)
        return Estimate(value, status, halted, c, q, rng.seed, rng.stream_id)

    if Fraction(n) ** k <= 1 / (e * e) or n <= k ** 5:
        return done(Fraction(brute_force_count(sess)))

    N = next_power_of_two(n)
    psess = sess.with_padding(sess.padding + N - n) if N != n else sess
    sched = build_schedule(N, k, e, prof.c_t)
    steps = StepBudget(20 * sum(s.t * (s.i + -(-N // (1 << s.i))) for s in sched))
    if prof.sparse_delta is None:
        sc_delta = Fraction(1, 120 * N ** (5 * k))
    else:
        sc_delta = prof.sparse_delta
    ln_n = math.log(N)
    for s in sched:
        M = s.M
        size_cap = max(7 * N / (1 << s.i), 7 * k * ln_n)
        total = 0
        dense = False
        for _ in range(s.t):
            try:
                u = sample_subset_mask(N, s.i, rng, steps)
            except BudgetExceeded:
                return done(None, RTE, s.i)
            if u.bit_count() > size_cap:
                return done(None, RTE, s.i)
            out = sparse_count(psess, u, k, M, sc_delta, rng, prof)
            if out.tag == TOO_DENSE:
                dense = True
                break
            if out.tag == RTE:
                return done(None, RTE, s.i)
            M -= out.value
            total += out.value
        if not dense:
            return done(Fraction(total * 2 ** (s.i * k), s.t), "ok", s.i)
    return done(None, RTE, len(sched) - 1)


def uncol_cost_bound(n: int, k: int, eps, model, profile="theory") -> float:
    """A generous a-priori oracle-cost ceiling for one uncol_approx run.

    Used as the per-run cap when converting expected cost into a hard cap.
    """
    prof = get_profile(profile)
    e = Fraction(eps)
    if Fraction(n) ** k <= 1 / (e * e) or n <= k ** 5:
        return math.comb(n, k) * float(model.cost(k, k))
    N = next_power_of_two(n)
    sched = build_schedule(N, k, e, prof.c_t)
    ln_n = math.log(N)
    total = 0.0
    for s in sched:
        size = min(n, int(max(7 * N / (1 << s.i), 7 * k * ln_n)))
        t_col = colouring_count(size, k, prof)
        depth = math.ceil(math.log2(size + 1)) + 1
        per_call = 1 + t_col * 2 ** k * (1 + depth)
        found = (s.M + s.t) * t_col * 2 ** k * depth
        total += (s.t * per_call + found) * float(model.cost(size, k))
    return 4 * total


def uncol(sess: OracleSession, eps, delta, rng: RngStream, profile="theory",
          cap_runs: bool = True) -> Estimate:
    """Median of capped uncol_approx runs; fails with probability at most delta."""
    prof = get_profile(profile)
    if not 0 < delta < 1:
        raise PreconditionError("need 0 < delta < 1")
    before = sess.ledger.total()
    reps = boost_repetitions(delta, prof.delta0)
    cap = uncol_cost_bound(sess.n, sess.k, eps, sess.model, prof) if cap_runs else None
    outs = []
    for _ in range(reps):
        child = rng.split()
        res = capped_retry(lambda r: uncol_approx(sess, eps, r, prof), sess.ledger, cap,
                           prof.retry_gamma, prof.delta0, child)
        outs.append(res.as_number() if isinstance(res, Estimate) else -1)
    med = lower_median(outs)
    c, q = _ledger_delta(sess, before)
    est = Estimate(Fraction(med) if med >= 0 else None, "ok" if med >= 0 else RTE,
                   None, c, q, rng.seed, rng.stream_id)
    est.extra["runs"] = reps
    est.extra["failed_runs"] = sum(1 for o in outs if o == -1)
    return est
