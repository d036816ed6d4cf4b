"""Seedable, splittable randomness and the subset samplers.

Streams are Philox counters keyed by (seed, path); a child stream at
path + (i,) never overlaps its parent or siblings.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .bits import iter_bits, to_list, to_mask, to_set
from .errors import BudgetExceeded, PreconditionError

_BUF = 2048


class RngStream:
    def __init__(self, seed: int = 0, path: Tuple[int, ...] = ()):
        if not 0 <= seed < 2 ** 64:
            raise PreconditionError("seed must fit in 64 bits")
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self.gen = np.random.Generator(np.random.Philox(ss))
        self._children = 0
        self._buf: List[float] = []

    def __repr__(self):
        return f"RngStream(seed={self.seed}, path={self.path})"

    @property
    def stream_id(self) -> str:
        return "/".join(str(p) for p in self.path) or "root"

    def child(self, i: int) -> "RngStream":
        return RngStream(self.seed, self.path + (i,))

    def split(self) -> "RngStream":
        """Next child stream, numbered in call order."""
        c = self.child(self._children)
        self._children += 1
        return c

    def spawn(self, count: int) -> List["RngStream"]:
        return [self.split() for _ in range(count)]

    # scalar draws, buffered for hot loops

    def random(self) -> float:
        if not self._buf:
            self._buf = self.gen.random(_BUF).tolist()
        return self._buf.pop()

    def below(self, m: int) -> int:
        """Uniform integer in [0, m)."""
        if m <= 1:
            return 0
        if m < 2 ** 40:
            return min(int(self.random() * m), m - 1)
        return int(self.gen.integers(0, m))

    def binomial(self, n: int, p: float) -> int:
        if n <= 0 or p <= 0:
            return 0
        if p >= 1:
            return n
        return int(self.gen.binomial(n, p))

    def bernoulli_mask(self, vertices: Sequence[int], p: float) -> int:
        """Mask keeping each listed vertex independently with probability p."""
        if not len(vertices):
            return 0
        keep = self.gen.random(len(vertices)) < p
        m = 0
        for v, b in zip(vertices, keep.tolist()):
            if b:
                m |= 1 << v
        return m


class StepBudget:
    """Counter of elementary sampling steps with an optional ceiling."""

    def __init__(self, limit: Optional[int] = None):
        self.limit = limit
        self.used = 0

    def spend(self, steps: int) -> None:
        self.used += steps
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceeded("sampling step budget exhausted")


def sample_binomial(n: int, i: int, rng: RngStream) -> int:
    """Bin(n, 2^-i) as i rounds of fair-coin thinning."""
    if n < 0 or i < 0:
        raise PreconditionError("need n >= 0 and i >= 0")
    for _ in range(i):
        if n == 0:
            break
        n = int(rng.gen.binomial(n, 0.5))
    return n


def _uniform_subset_of_range(n: int, s: int, rng: RngStream, steps: Optional[StepBudget]) -> int:
    """Uniform size-s subset of 1..n as a mask (hash-set rejection)."""
    if s == 0:
        return 0
    cap = int(64 * s * math.log(n + 2)) + 1
    chosen = set()
    draws = 0
    while len(chosen) < s and draws < cap:
        batch = min(max(2 * (s - len(chosen)), 8), cap - draws)
        for x in rng.gen.integers(1, n + 1, size=batch).tolist():
            draws += 1
            chosen.add(x)
            if len(chosen) == s:
                break
    if steps is not None:
        steps.spend(draws)
    if len(chosen) < s:
        # fall back to a shuffle prefix; same distribution, bounded time
        chosen = set((rng.gen.permutation(n)[:s] + 1).tolist())
        if steps is not None:
            steps.spend(n)
    return to_mask(chosen)


def sample_subset_mask(n: int, i: int, rng: RngStream, steps: Optional[StepBudget] = None) -> int:
    """Each of 1..n kept independently with probability 2^-i."""
    if i < 0 or n < 0:
        raise PreconditionError("need n >= 0 and i >= 0")
    if i == 0:
        if steps is not None:
            steps.spend(n)
        return ((1 << n) - 1) << 1
    if i <= 2:
        if steps is not None:
            steps.spend(n)
        keep = rng.gen.random(n) < 2.0 ** -i
        packed = np.packbits(keep, bitorder="little").tobytes()
        return int.from_bytes(packed, "little") << 1
    s = sample_binomial(n, i, rng)
    if steps is not None:
        steps.spend(i)
    return _uniform_subset_of_range(n, s, rng, steps)


def sample_subset(n: int, i: int, rng: RngStream, steps: Optional[StepBudget] = None) -> frozenset:
    return to_set(sample_subset_mask(n, i, rng, steps))


def naive_subset_mask(n: int, i: int, rng: RngStream) -> int:
    """Per-vertex coin flips at any i (reference path for tests)."""
    keep = rng.gen.random(n) < 2.0 ** -i
    packed = np.packbits(keep, bitorder="little").tobytes()
    return int.from_bytes(packed, "little") << 1


def uniform_k_partition_mask(u: int, k: int, rng: RngStream) -> List[int]:
    """Independent uniform colour in [k] for every vertex of the mask."""
    if k < 1:
        raise PreconditionError("k must be at least 1")
    parts = [0] * k
    if k == 1:
        parts[0] = u
        return parts
    verts = to_list(u)
    if not verts:
        return parts
    colours = rng.gen.integers(0, k, size=len(verts)).tolist()
    for v, c in zip(verts, colours):
        parts[c] |= 1 << v
    return parts


def uniform_k_partition(vertices, k: int, rng: RngStream) -> List[frozenset]:
    u = vertices if isinstance(vertices, int) else to_mask(vertices)
    return [to_set(m) for m in uniform_k_partition_mask(u, k, rng)]


def uniform_k_subset(items, s: int, rng: RngStream) -> frozenset:
    pool = sorted(items)
    if not 0 <= s <= len(pool):
        raise PreconditionError(f"cannot pick {s} elements from a set of {len(pool)}")
    if s == 0:
        return frozenset()
    idx = rng.gen.choice(len(pool), size=s, replace=False)
    return frozenset(pool[j] for j in idx.tolist())


def balanced_split(m: int, rng: RngStream) -> Tuple[int, int]:
    """Uniformly random split of a mask into halves differing by at most one.

    The first half gets the extra vertex when the size is odd.
    """
    c = m.bit_count()
    if c <= 1:
        return m, 0
    rand = rng.random
    if c == 2:
        low = m & -m
        a = low if rand() < 0.5 else m ^ low
        return m ^ a, a
    bits = []
    x = m
    while x:
        low = x & -x
        bits.append(low)
        x ^= low
    half = c >> 1
    # partial Fisher-Yates: the first `half` positions form a uniform subset
    a = 0
    for j in range(half):
        r = j + int(rand() * (c - j))
        bits[j], bits[r] = bits[r], bits[j]
        a |= bits[j]
    return m ^ a, a
