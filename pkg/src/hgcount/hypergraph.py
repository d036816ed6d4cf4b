"""k-uniform hypergraphs on vertex set 1..n.

Edges are stored as sorted tuples. Query-heavy code works on int masks
(see :mod:`hgcount.bits`); the per-vertex indexes behind the fast
membership tests are built lazily on first use.
"""

from itertools import combinations
from math import comb
from typing import Iterable, List, Optional, Sequence, Tuple

from .bits import as_mask, iter_bits, to_mask, to_set
from .errors import PreconditionError

Edge = Tuple[int, ...]


class Hypergraph:
    __slots__ = ("n", "k", "edges", "_masks", "_adj", "_low", "_inc")

    def __init__(self, n: int, k: int, edges: Iterable[Sequence[int]] = (), *, trusted: bool = False):
        if trusted:
            self.n, self.k = n, k
            self.edges = frozenset(edges)
        else:
            g = build_hypergraph(n, k, edges)
            self.n, self.k, self.edges = g.n, g.k, g.edges
        self._masks = None
        self._adj = None
        self._low = None
        self._inc = None

    def __repr__(self):
        return f"Hypergraph(n={self.n}, k={self.k}, e={len(self.edges)})"

    def __len__(self):
        return len(self.edges)

    def __eq__(self, other):
        return (isinstance(other, Hypergraph) and self.n == other.n
                and self.k == other.k and self.edges == other.edges)

    def __hash__(self):
        return hash((self.n, self.k, self.edges))

    @property
    def e(self) -> int:
        return len(self.edges)

    def sorted_edges(self) -> List[Edge]:
        return sorted(self.edges)

    # lazily built indexes

    @property
    def edge_masks(self) -> List[int]:
        if self._masks is None:
            self._masks = [to_mask(e) for e in sorted(self.edges)]
        return self._masks

    def _adjacency(self):
        if self._adj is None:
            adj = [0] * (self.n + 1)
            for a, b in self.edges:
                adj[a] |= 1 << b
                adj[b] |= 1 << a
            self._adj = adj
        return self._adj

    def _lowest(self):
        # edges grouped by their smallest vertex
        if self._low is None:
            low = [[] for _ in range(self.n + 1)]
            for e, m in zip(sorted(self.edges), self.edge_masks):
                low[e[0]].append(m)
            self._low = low
        return self._low

    def _incidence(self):
        if self._inc is None:
            inc = [[] for _ in range(self.n + 1)]
            for e, m in zip(sorted(self.edges), self.edge_masks):
                for v in e:
                    inc[v].append(m)
            self._inc = inc
        return self._inc

    # queries on masks

    def has_edge_within(self, mask: int) -> bool:
        """True iff some edge lies inside the vertex set."""
        if not self.edges or mask.bit_count() < self.k:
            return False
        if self.k == 2:
            adj = self._adj or self._adjacency()
            m = mask
            while m:
                low = m & -m
                if adj[low.bit_length() - 1] & mask:
                    return True
                m ^= low
            return False
        if len(self.edges) <= mask.bit_count():
            for em in self.edge_masks:
                if em & mask == em:
                    return True
            return False
        lowest = self._lowest()
        m = mask
        while m:
            low = m & -m
            for em in lowest[low.bit_length() - 1]:
                if em & mask == em:
                    return True
            m ^= low
        return False

    def count_within(self, mask: int) -> int:
        if self.k == 2 and len(self.edges) > mask.bit_count():
            adj = self._adjacency()
            total = 0
            for v in iter_bits(mask):
                total += (adj[v] & mask).bit_count()
            return total // 2
        return sum(1 for em in self.edge_masks if em & mask == em)

    def edges_within(self, mask: int) -> List[Edge]:
        return [e for e, em in zip(sorted(self.edges), self.edge_masks) if em & mask == em]

    def has_colourful(self, classes: Sequence[int]) -> bool:
        """True iff some edge has exactly one vertex in each class.

        Classes must be pairwise disjoint masks, one per colour.
        """
        if not self.edges or len(classes) != self.k:
            return False
        for c in classes:
            if not c:
                return False
        if self.k == 2:
            a, b = classes
            if a.bit_count() > b.bit_count():
                a, b = b, a
            adj = self._adjacency()
            while a:
                low = a & -a
                if adj[low.bit_length() - 1] & b:
                    return True
                a ^= low
            return False
        small = min(classes, key=int.bit_count)
        union = 0
        for c in classes:
            union |= c
        inc = self._incidence()
        m = small
        while m:
            low = m & -m
            for em in inc[low.bit_length() - 1]:
                if em & union == em and all(em & c for c in classes):
                    return True
            m ^= low
        return False

    def colourful_edges(self, classes: Sequence[int]) -> List[Edge]:
        union = 0
        for c in classes:
            union |= c
        out = []
        for e, em in zip(sorted(self.edges), self.edge_masks):
            if em & union == em and all(em & c for c in classes):
                out.append(e)
        return out

    def count_colourful(self, classes: Sequence[int]) -> int:
        return len(self.colourful_edges(classes))

    def degree(self, v: int) -> int:
        return len(self._incidence()[v])

    def induced(self, vertices) -> "Hypergraph":
        mask = as_mask(vertices)
        return Hypergraph(self.n, self.k, self.edges_within(mask), trusted=True)


class PartitionedHypergraph:
    """A hypergraph together with k disjoint vertex classes.

    With ``strict`` every edge must meet every class in exactly one vertex.
    The relaxed form only uses the classes as query arguments.
    """

    __slots__ = ("base", "class_masks", "strict")

    def __init__(self, base: Hypergraph, classes: Sequence, strict: bool = True):
        masks = [as_mask(c) for c in classes]
        if len(masks) != base.k:
            raise PreconditionError(f"need {base.k} classes, got {len(masks)}")
        seen = 0
        for i, m in enumerate(masks):
            if m & seen:
                raise PreconditionError(f"class {i + 1} overlaps an earlier class")
            if m >> (base.n + 1) or m & 1:
                raise PreconditionError(f"class {i + 1} has vertices outside 1..{base.n}")
            seen |= m
        if strict:
            for e in base.edges:
                em = to_mask(e)
                if not all((em & c).bit_count() == 1 for c in masks):
                    raise PreconditionError(f"edge {e} is not colourful for the classes")
        self.base = base
        self.class_masks = tuple(masks)
        self.strict = strict

    @property
    def n(self):
        return self.base.n

    @property
    def k(self):
        return self.base.k

    @property
    def edges(self):
        return self.base.edges

    @property
    def e(self):
        return self.base.e

    @property
    def classes(self) -> Tuple[frozenset, ...]:
        return tuple(to_set(m) for m in self.class_masks)

    def colourful_count(self) -> int:
        return self.base.count_colourful(self.class_masks)

    def __repr__(self):
        sizes = [m.bit_count() for m in self.class_masks]
        return f"PartitionedHypergraph(n={self.n}, k={self.k}, e={self.e}, classes={sizes})"


def build_hypergraph(n: int, k: int, edges: Iterable[Sequence[int]]) -> Hypergraph:
    """Validate and canonicalise an edge list."""
    if k < 2 or k > n:
        raise PreconditionError(f"need 2 <= k <= n, got k={k}, n={n}")
    canon = set()
    for raw in edges:
        e = tuple(sorted(raw))
        if len(e) != k:
            raise PreconditionError(f"edge {tuple(raw)} has {len(e)} vertices, expected {k}")
        if len(set(e)) != k:
            raise PreconditionError(f"edge {tuple(raw)} repeats a vertex")
        if e[0] < 1 or e[-1] > n:
            raise PreconditionError(f"edge {tuple(raw)} has a vertex outside 1..{n}")
        canon.add(e)
    return Hypergraph(n, k, canon, trusted=True)


def exact_edge_count(g, vertices=None) -> int:
    """e(G[S]) by direct inspection of every edge."""
    base = g.base if isinstance(g, PartitionedHypergraph) else g
    if vertices is None:
        return base.e
    s = set(vertices) if not isinstance(vertices, int) else set(iter_bits(vertices))
    return sum(1 for e in base.edges if s.issuperset(e))


def enumerate_edge_count(g: Hypergraph, vertices) -> int:
    """e(G[S]) by walking all size-k subsets of S. Slow, independent check."""
    s = sorted(set(vertices) if not isinstance(vertices, int) else iter_bits(vertices))
    return sum(1 for c in combinations(s, g.k) if c in g.edges)


def brute_colourful_edges(g: Hypergraph, classes: Sequence[Iterable[int]]) -> List[Edge]:
    """All edges with one vertex per class, by walking the class product."""
    from itertools import product
    lists = [sorted(c) for c in classes]
    out = []
    for pick in product(*lists):
        e = tuple(sorted(pick))
        if e in g.edges:
            out.append(e)
    return sorted(out)


def max_edges(n: int, k: int) -> int:
    return comb(n, k)


def contiguous_classes(sizes: Sequence[int]) -> List[int]:
    """Masks for V1={1..t1}, V2={t1+1..t1+t2}, ..."""
    out, start = [], 1
    for t in sizes:
        out.append(((1 << t) - 1) << start)
        start += t
    return out


def as_partitioned(g: Hypergraph, sizes: Optional[Sequence[int]] = None, strict=True) -> PartitionedHypergraph:
    if sizes is None:
        raise PreconditionError("partition sizes required")
    return PartitionedHypergraph(g, contiguous_classes(sizes), strict=strict)
