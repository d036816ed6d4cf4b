"""Random and structured hypergraph families."""

import math
from itertools import combinations
from typing import List, Sequence

import numpy as np

from .errors import PreconditionError
from .hypergraph import Hypergraph, PartitionedHypergraph, contiguous_classes
from .sampling import RngStream

# below this many candidate edges, flip one coin per candidate
_ENUM_LIMIT = 200_000


def _check_p(p) -> float:
    p = float(p)
    if not 0 <= p <= 1:
        raise PreconditionError(f"edge probability {p} outside [0, 1]")
    return p


def _distinct_random_sets(n: int, k: int, m: int, rng: RngStream) -> set:
    """m distinct uniform k-subsets of 1..n, by rejection."""
    out = set()
    while len(out) < m:
        rows = np.sort(rng.gen.integers(1, n + 1, size=(2 * (m - len(out)) + 8, k)), axis=1)
        ok = np.all(rows[:, 1:] != rows[:, :-1], axis=1) if k > 1 else np.ones(len(rows), bool)
        for row in rows[ok].tolist():
            out.add(tuple(row))
            if len(out) == m:
                break
    return out


def er(n: int, k: int, p, rng: RngStream) -> Hypergraph:
    """Each k-subset of 1..n is an edge independently with probability p."""
    p = _check_p(p)
    if k < 2 or k > n:
        raise PreconditionError(f"need 2 <= k <= n, got k={k}, n={n}")
    total = math.comb(n, k)
    if k == 2 and total <= 50_000_000 // 8:
        iu = np.triu_indices(n, 1)
        keep = rng.gen.random(len(iu[0])) < p
        edges = zip((iu[0][keep] + 1).tolist(), (iu[1][keep] + 1).tolist())
        return Hypergraph(n, k, edges, trusted=True)
    if total <= _ENUM_LIMIT:
        keep = (rng.gen.random(total) < p).tolist()
        edges = [c for c, b in zip(combinations(range(1, n + 1), k), keep) if b]
        return Hypergraph(n, k, edges, trusted=True)
    m = int(rng.gen.binomial(total, p))
    if m > total // 2:
        raise PreconditionError("dense ER with more than 2e5 candidate edges is not supported")
    return Hypergraph(n, k, _distinct_random_sets(n, k, m, rng), trusted=True)


def er_partite(t: int, k: int, p, rng: RngStream, sizes: Sequence[int] = None) -> PartitionedHypergraph:
    """k-partite ER graph on contiguous classes (of size t unless ``sizes``)."""
    p = _check_p(p)
    sizes = [t] * k if sizes is None else list(sizes)
    if len(sizes) != k or min(sizes) < 1:
        raise PreconditionError("need k non-empty classes")
    starts = np.cumsum([1] + sizes[:-1])
    total = math.prod(sizes)
    if total > 50_000_000:
        raise PreconditionError("partite ER too large to enumerate")
    keep = np.flatnonzero(rng.gen.random(total) < p)
    idx = np.unravel_index(keep, sizes)
    cols = [(idx[i] + starts[i]).tolist() for i in range(k)]
    edges = list(zip(*cols)) if len(keep) else []
    g = Hypergraph(sum(sizes), k, edges, trusted=True)
    return PartitionedHypergraph(g, contiguous_classes(sizes), strict=False)


def star(n: int, k: int, r: int = None) -> Hypergraph:
    """Every k-set containing the root {1..r}; r defaults to k - 1."""
    r = k - 1 if r is None else r
    if not 1 <= r < k <= n:
        raise PreconditionError("need 1 <= r < k <= n")
    root = tuple(range(1, r + 1))
    edges = [root + rest for rest in combinations(range(r + 1, n + 1), k - r)]
    return Hypergraph(n, k, edges, trusted=True)


def multistar(n: int, s: int) -> Hypergraph:
    """s disjoint stars (k = 2): centre c in 1..s, leaves v > s with v = c mod s."""
    if not 1 <= s < n:
        raise PreconditionError("need 1 <= s < n")
    edges = [(1 + (v - s - 1) % s, v) for v in range(s + 1, n + 1)]
    return Hypergraph(n, 2, edges, trusted=True)


def sparse(n: int, k: int, m: int, rng: RngStream) -> Hypergraph:
    """m distinct uniformly random edges."""
    if m > math.comb(n, k):
        raise PreconditionError("more edges requested than k-subsets exist")
    return Hypergraph(n, k, _distinct_random_sets(n, k, m, rng), trusted=True)


def complete_partite(sizes: Sequence[int]) -> PartitionedHypergraph:
    from itertools import product
    k = len(sizes)
    masks = contiguous_classes(sizes)
    starts = np.cumsum([1] + list(sizes[:-1])).tolist()
    lists = [range(s, s + t) for s, t in zip(starts, sizes)]
    g = Hypergraph(sum(sizes), k, list(product(*lists)), trusted=True)
    return PartitionedHypergraph(g, masks, strict=False)


def planted_small_core(t: int, k: int, roots: int, p, rng: RngStream) -> PartitionedHypergraph:
    """k-partite graph whose edges all pass through a few root vertices of class 1."""
    p = _check_p(p)
    if not 1 <= roots <= t:
        raise PreconditionError("need 1 <= roots <= t")
    from itertools import product
    starts = [1 + i * t for i in range(k)]
    lists = [range(starts[0], starts[0] + roots)] + [range(s, s + t) for s in starts[1:]]
    cand = list(product(*lists))
    keep = (rng.gen.random(len(cand)) < p).tolist()
    edges = [c for c, b in zip(cand, keep) if b]
    g = Hypergraph(k * t, k, edges, trusted=True)
    return PartitionedHypergraph(g, contiguous_classes([t] * k), strict=False)


def planted_large_core(t: int, k: int, side: int, rng: RngStream, noise=0.0) -> PartitionedHypergraph:
    """Complete k-partite block on ``side`` random vertices per class, plus ER noise."""
    from itertools import product
    if not 1 <= side <= t:
        raise PreconditionError("need 1 <= side <= t")
    starts = [1 + i * t for i in range(k)]
    picks = [sorted((rng.gen.choice(t, size=side, replace=False) + s).tolist()) for s in starts]
    edges = set(product(*picks))
    if noise:
        extra = er_partite(t, k, noise, rng)
        edges |= set(extra.edges)
    g = Hypergraph(k * t, k, edges, trusted=True)
    return PartitionedHypergraph(g, contiguous_classes([t] * k), strict=False)
