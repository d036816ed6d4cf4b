"""Independence oracles with cost accounting.

An :class:`OracleSession` is the only handle estimators get on a graph.
Every answered query is appended to a shared :class:`Ledger`; padding
vertices and vertices outside an induced view are removed before the
query is answered and charged.
"""

import math
from array import array
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple, Union

from .bits import as_mask, full_mask
from .cost import UNIT, CostModel
from .errors import BudgetExceeded, PreconditionError
from .hypergraph import Hypergraph, PartitionedHypergraph

INDORA = "indora"
CINDORA = "cindora"
_KIND_CODE = {INDORA: 0, CINDORA: 1}
_KIND_NAME = (INDORA, CINDORA)


@dataclass(frozen=True)
class QueryRecord:
    kind: str
    size: int
    charge: Union[int, float]
    answer: int


class Ledger:
    """Append-only query log.

    Sizes are kept in a compact array; charges are recomputed from the
    model so that ``charge == model.cost(size)`` holds by construction.
    """

    def __init__(self, model: CostModel, k: int):
        self.model = model
        self.k = k
        self._kinds = bytearray()
        self._sizes = array("q")
        self._answers = bytearray()
        self._hist = [0]
        self._table = [0]
        self._exact = model.is_exact(k)
        self._running = 0  # running total, used for caps only
        self.cap = None  # optional cost cap; exceeding it raises BudgetExceeded

    def _grow(self, size: int) -> None:
        for x in range(len(self._table), size + 1):
            self._table.append(self.model.cost(x, self.k))
            self._hist.append(0)

    def append(self, kind: int, size: int, answer: int) -> None:
        try:
            c = self._table[size]
        except IndexError:
            self._grow(size)
            c = self._table[size]
        if self.cap is not None and self._running + c > self.cap:
            raise BudgetExceeded("oracle cost cap reached")
        self._running += c
        self._kinds.append(kind)
        self._sizes.append(size)
        self._answers.append(answer)
        self._hist[size] += 1

    def __len__(self):
        return len(self._sizes)

    def records(self) -> Iterator[QueryRecord]:
        for kd, s, a in zip(self._kinds, self._sizes, self._answers):
            yield QueryRecord(_KIND_NAME[kd], s, self.model.cost(s, self.k), a)

    def sizes(self) -> List[int]:
        return list(self._sizes)

    def total(self) -> Tuple[Union[int, float], int]:
        """(total cost, number of queries)."""
        terms = [self._table[s] * c for s, c in enumerate(self._hist) if c]
        cost = sum(terms) if self._exact else math.fsum(terms)
        return cost, len(self._sizes)

    @property
    def running(self):
        return self._running


class OracleSession:
    """Oracle access to a hypergraph.

    ``padding`` extra isolated vertices n+1..n+padding may appear in
    queries; they are stripped before answering and charging. ``view``
    restricts every query to a vertex set, as for G[X].
    """

    def __init__(self, graph, model: CostModel = UNIT, mode: str = INDORA, padding: int = 0,
                 ledger: Optional[Ledger] = None, view: Optional[int] = None):
        if mode not in _KIND_CODE:
            raise PreconditionError(f"unknown oracle mode {mode!r}")
        if isinstance(graph, PartitionedHypergraph):
            self.partition = graph
            base = graph.base
        else:
            self.partition = None
            base = graph
        self.graph = base
        self.model = model
        self.mode = mode
        self.padding = padding
        self.k = base.k
        self.ledger = ledger if ledger is not None else Ledger(model, base.k)
        self._real = full_mask(base.n)
        self._keep = self._real if view is None else self._real & view
        self._hi = base.n + padding + 1
        self._within = base.has_edge_within
        model.check_range(max(base.n + padding, 1), base.k)

    @property
    def n(self) -> int:
        """Vertex count visible to the algorithm, padding included."""
        return self.graph.n + self.padding

    @property
    def real_n(self) -> int:
        return self.graph.n

    @property
    def classes(self) -> Optional[Tuple[int, ...]]:
        return None if self.partition is None else self.partition.class_masks

    def view(self, vertices) -> "OracleSession":
        """Session answering as if the graph were G[X]. Shares the ledger."""
        x = as_mask(vertices)
        return OracleSession(self.partition or self.graph, self.model, self.mode, self.padding,
                             ledger=self.ledger, view=self._keep & x)

    def with_padding(self, padding: int) -> "OracleSession":
        return OracleSession(self.partition or self.graph, self.model, self.mode, padding,
                             ledger=self.ledger, view=self._keep)

    def as_mode(self, mode: str) -> "OracleSession":
        return OracleSession(self.partition or self.graph, self.model, mode, self.padding,
                             ledger=self.ledger, view=self._keep)

    def _check_range(self, m: int) -> None:
        if m & 1 or m >> (self.n + 1):
            raise PreconditionError(f"query uses vertices outside 1..{self.n}")

    def indora(self, s) -> int:
        """1 iff G[S] has no edge."""
        if self.mode != INDORA:
            raise PreconditionError("indora query on a cindora session")
        m = s if s.__class__ is int else as_mask(s)
        if m >> self._hi or m & 1:
            self._check_range(m)
        m &= self._keep
        ans = 0 if self._within(m) else 1
        self.ledger.append(0, m.bit_count(), ans)
        return ans

    def cindora(self, sets: Sequence) -> int:
        """1 iff no edge has exactly one vertex in each of the k sets."""
        if self.mode != CINDORA:
            raise PreconditionError("cindora query on an indora session")
        if len(sets) != self.k:
            raise PreconditionError(f"cindora needs {self.k} sets, got {len(sets)}")
        masks = []
        seen = 0
        keep = self._keep
        for s in sets:
            m = as_mask(s)
            if m & seen:
                raise PreconditionError("cindora sets must be pairwise disjoint")
            seen |= m
            masks.append(m & keep)
        if seen >> (self.n + 1) or seen & 1:
            self._check_range(seen)
        size = (seen & keep).bit_count()
        ans = 0 if self.graph.has_colourful(masks) else 1
        self.ledger.append(1, size, ans)
        return ans

    def query_count(self) -> int:
        return len(self.ledger)


def ledger_total(sess: OracleSession):
    return sess.ledger.total()


def indora_query(sess: OracleSession, s) -> int:
    return sess.indora(s)


def cindora_query(sess: OracleSession, *sets) -> int:
    if len(sets) == 1 and not isinstance(sets[0], (int, set, frozenset)):
        sets = tuple(sets[0])
    return sess.cindora(sets)


def induced_view(sess: OracleSession, vertices) -> OracleSession:
    return sess.view(vertices)


def simulate_indora_via_cindora(sess: OracleSession, s, trials: int, rng) -> int:
    """Answer an indora query using random k-colourings and cindora.

    Returns 0 as soon as one colouring exposes a colourful edge, so a 0 is
    always correct and a 1 may be wrong with probability at most
    (1 - k!/k^k)**trials per edge.
    """
    from .sampling import uniform_k_partition_mask
    if trials < 1:
        raise PreconditionError("trials must be at least 1")
    m = as_mask(s)
    for _ in range(trials):
        parts = uniform_k_partition_mask(m, sess.k, rng)
        if sess.cindora(parts) == 0:
            return 0
    return 1
