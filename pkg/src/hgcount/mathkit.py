"""Exact algebra behind the sampling schedule and the overhead exponent."""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from .errors import PreconditionError

Rational = Union[int, Fraction]


def round_half(x) -> int:
    """Nearest integer with ties rounded up: floor(x + 1/2)."""
    return math.floor(Fraction(x) + Fraction(1, 2))


def g(k: int, beta) -> Fraction:
    """Overhead exponent g(k, beta) = (1/k) r (k - beta - r), r = round_half((k - beta)/2)."""
    b = Fraction(beta)
    if k < 2:
        raise PreconditionError("k must be at least 2")
    if not 0 <= b <= k:
        raise PreconditionError(f"beta={beta} outside [0, {k}]")
    r = round_half((k - b) / 2)
    return Fraction(r) * (k - b - r) / k


def is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def log2_exact(n: int) -> int:
    if not is_power_of_two(n):
        raise PreconditionError(f"{n} is not a power of two")
    return n.bit_length() - 1


def next_power_of_two(n: int) -> int:
    return 1 if n <= 1 else 1 << (n - 1).bit_length()


@dataclass(frozen=True)
class Step:
    i: int
    p: Fraction          # 2^-i
    L: int               # integer part of ik / log n
    gamma: Fraction      # fractional part, denominator log n
    log2_F: int          # F_i = 2 ** log2_F
    t: int
    M: int

    @property
    def F(self) -> int:
        return 1 << self.log2_F


@dataclass(frozen=True)
class Schedule:
    n: int
    k: int
    eps: Fraction
    steps: tuple

    @property
    def log_n(self) -> int:
        return self.n.bit_length() - 1

    def __iter__(self):
        return iter(self.steps)

    def __len__(self):
        return len(self.steps)

    def __getitem__(self, i):
        return self.steps[i]


def schedule_exponents(log_n: int, k: int, i: int):
    """(L, r, log2 F) for level i, where n = 2**log_n and ik = L log_n + r.

    n^(L+gamma) = 2^(ik) with gamma = r/log_n, and
    F = n^((L+gamma)(k-L)/k) * max(2^-i, n^-gamma) = 2^(i(k-L) - min(i, r)).
    """
    L, r = divmod(i * k, log_n)
    return L, r, i * (k - L) - min(i, r)


def theory_multiplier(n: int, k: int, eps) -> Fraction:
    """eps^-2 * 10 k^2 2^k log n."""
    e = Fraction(eps)
    return 10 * k * k * 2 ** k * log2_exact(n) / (e * e)


def build_schedule(n: int, k: int, eps, c_t: Optional[Rational] = None) -> Schedule:
    """Per-level sample counts t_i and thresholds M_i = 2^(k+1) t_i.

    ``c_t`` replaces the multiplier eps^-2 10 k^2 2^k log n; ``None`` keeps it.
    """
    ell = log2_exact(n)
    if ell < 1:
        raise PreconditionError("need n >= 2")
    e = Fraction(eps)
    if not 0 < e < 1:
        raise PreconditionError("need 0 < eps < 1")
    mult = theory_multiplier(n, k, e) if c_t is None else Fraction(c_t)
    steps = []
    for i in range(ell):
        L, r, lf = schedule_exponents(ell, k, i)
        t = math.ceil(mult * (1 << lf))
        steps.append(Step(i, Fraction(1, 1 << i), L, Fraction(r, ell), lf, t, 2 ** (k + 1) * t))
    return Schedule(n, k, e, tuple(steps))


@dataclass(frozen=True)
class OverheadCheck:
    """max_i F_i 2^(-i beta) against n^g(k,beta), as base-2 exponents."""
    n: int
    k: int
    beta: Fraction
    max_exponent: Fraction
    g_exponent: Fraction
    argmax: int

    @property
    def equal(self) -> bool:
        return self.max_exponent == self.g_exponent

    @property
    def integral(self) -> bool:
        ell = self.n.bit_length() - 1
        return (self.beta * ell).denominator == 1 and self.g_exponent.denominator == 1


def max_overhead(n: int, k: int, beta) -> OverheadCheck:
    ell = log2_exact(n)
    b = Fraction(beta)
    best, arg = None, 0
    # levels past log n have L >= k and only shrink, so 0..log n covers all i >= 0
    for i in range(ell + 1):
        _, _, lf = schedule_exponents(ell, k, i)
        x = lf - i * b
        if best is None or x > best:
            best, arg = x, i
    return OverheadCheck(n, k, b, best, ell * g(k, b), arg)


def karamata_check(s: Sequence, alpha, r, c, W) -> int:
    """1 iff sum s_i^r <= W c^(r - alpha).

    Exact when every input is rational and both exponents are integers,
    otherwise floating point with a 1e-12 relative slack.
    """
    if r < alpha or alpha < 0 or c <= 0:
        raise PreconditionError("need r >= alpha >= 0 and c > 0")
    exact = all(isinstance(x, (int, Fraction)) for x in list(s) + [alpha, r, c, W]) \
        and Fraction(alpha).denominator == 1 and Fraction(r).denominator == 1
    if exact:
        lhs = sum(Fraction(x) ** int(r) for x in s)
        rhs = Fraction(W) * Fraction(c) ** int(r - alpha)
        return int(lhs <= rhs)
    lhs = math.fsum(float(x) ** float(r) for x in s)
    rhs = float(W) * float(c) ** float(r - alpha)
    return int(lhs <= rhs * (1 + 1e-12))


def karamata_premise(s: Sequence, alpha, c, W) -> bool:
    if any(x < 0 or x > c for x in s):
        return False
    if all(isinstance(x, (int, Fraction)) for x in list(s) + [alpha, W]) and Fraction(alpha).denominator == 1:
        return sum(Fraction(x) ** int(alpha) for x in s) <= W
    return math.fsum(float(x) ** float(alpha) for x in s) <= float(W)
