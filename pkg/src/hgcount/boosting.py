"""Generic wrappers: median boosting and resource-capped retries."""

import math
from fractions import Fraction
from numbers import Real
from typing import Callable, List, Sequence

from .errors import BudgetExceeded, PreconditionError


def boost_repetitions(gamma, delta0=Fraction(1, 3)) -> int:
    """N = ceil(6 ln(2/gamma) / xi^2) with xi = 1 - 1/(2(1 - delta0))."""
    d = Fraction(delta0)
    if not 0 <= d < Fraction(1, 2):
        raise PreconditionError("base failure probability must lie in [0, 1/2)")
    if not 0 < gamma < 1:
        raise PreconditionError("target failure probability must lie in (0, 1)")
    xi = 1 - 1 / (2 * (1 - d))
    return math.ceil(6 * math.log(2 / float(gamma)) / float(xi * xi))


def numeric_or_minus_one(x):
    """Non-numeric outputs (RTE, TooDense, None) count as -1."""
    if isinstance(x, bool) or not isinstance(x, Real):
        return -1
    return x


def lower_median(values: Sequence):
    vals = sorted(numeric_or_minus_one(v) for v in values)
    if not vals:
        raise PreconditionError("median of nothing")
    return vals[(len(vals) - 1) // 2]


def median_boost(run: Callable, gamma, rng, delta0=Fraction(1, 3)):
    """Median of N independent runs; ``run`` takes a child RngStream.

    Returns (median, outputs).
    """
    n = boost_repetitions(gamma, delta0)
    outs = [run(rng.split()) for _ in range(n)]
    return lower_median(outs), outs


def retry_count(gamma, delta) -> int:
    """ceil(log_delta gamma) attempts, at least one."""
    if not 0 < delta < 1 or not 0 < gamma < 1:
        raise PreconditionError("need gamma, delta in (0, 1)")
    return max(1, math.ceil(math.log(float(gamma)) / math.log(float(delta))))


RTE = "RTE"


def capped_retry(run: Callable, ledger, cost_cap, gamma, delta, rng):
    """Run until one attempt stays within ``cost_cap``; otherwise RTE.

    An attempt is aborted just before the query that would push its own
    oracle cost past the cap.
    """
    for _ in range(retry_count(gamma, delta)):
        old = ledger.cap
        if cost_cap is not None:
            cap = ledger.running + cost_cap
            ledger.cap = cap if old is None else min(cap, old)
        try:
            return run(rng.split())
        except BudgetExceeded:
            continue
        finally:
            ledger.cap = old
    return RTE
