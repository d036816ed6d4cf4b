"""Reading and writing the ``.hg`` text format.

::

    # comment lines start with '#'
    k n m
    P t1 ... tk        (optional: classes 1..t1, t1+1..t1+t2, ...)
    v1 v2 ... vk       (m lines, strictly increasing 1-based ids)
"""

import os
from typing import List, Optional, TextIO, Union

from .errors import HgFormatError, PreconditionError
from .hypergraph import Hypergraph, PartitionedHypergraph, contiguous_classes

Graph = Union[Hypergraph, PartitionedHypergraph]


def _ints(tokens, path, lineno) -> List[int]:
    try:
        return [int(x) for x in tokens]
    except ValueError:
        raise HgFormatError(path, lineno, "expected integers") from None


def parse_hg(lines, path: str = "<string>") -> Graph:
    header = None
    sizes: Optional[List[int]] = None
    edges = []
    seen = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        toks = line.split()
        if header is None:
            vals = _ints(toks, path, lineno)
            if len(vals) != 3:
                raise HgFormatError(path, lineno, "header must be 'k n m'")
            k, n, m = vals
            if k < 2 or n < k or m < 0:
                raise HgFormatError(path, lineno, f"bad header values k={k} n={n} m={m}")
            header = (k, n, m)
            continue
        k, n, m = header
        if toks[0] == "P":
            if sizes is not None or edges:
                raise HgFormatError(path, lineno, "partition line must follow the header directly")
            sizes = _ints(toks[1:], path, lineno)
            if len(sizes) != k or min(sizes) < 1:
                raise HgFormatError(path, lineno, f"partition needs {k} positive sizes")
            if sum(sizes) > n:
                raise HgFormatError(path, lineno, f"partition covers {sum(sizes)} > n={n} vertices")
            continue
        e = _ints(toks, path, lineno)
        if len(e) != k:
            raise HgFormatError(path, lineno, f"edge has {len(e)} vertices, expected {k}")
        if any(a >= b for a, b in zip(e, e[1:])):
            raise HgFormatError(path, lineno, "edge vertices must be strictly increasing")
        if e[0] < 1 or e[-1] > n:
            raise HgFormatError(path, lineno, f"vertex outside 1..{n}")
        t = tuple(e)
        if t in seen:
            raise HgFormatError(path, lineno, f"duplicate edge {t}")
        seen.add(t)
        edges.append(t)
    if header is None:
        raise HgFormatError(path, 0, "missing header")
    k, n, m = header
    if len(edges) != m:
        raise HgFormatError(path, 0, f"header promises {m} edges, found {len(edges)}")
    g = Hypergraph(n, k, edges, trusted=True)
    if sizes is None:
        return g
    try:
        return PartitionedHypergraph(g, contiguous_classes(sizes), strict=False)
    except PreconditionError as exc:
        raise HgFormatError(path, 0, str(exc)) from None


def read_hg(path: str) -> Graph:
    try:
        with open(path) as fh:
            return parse_hg(fh, path)
    except OSError as exc:
        raise HgFormatError(path, 0, exc.strerror or str(exc)) from None


def format_hg(g: Graph, comments: Optional[List[str]] = None) -> str:
    base = g.base if isinstance(g, PartitionedHypergraph) else g
    out = [f"# {c}" for c in comments or []]
    out.append(f"{base.k} {base.n} {base.e}")
    if isinstance(g, PartitionedHypergraph):
        sizes = _contiguous_sizes(g)
        out.append("P " + " ".join(map(str, sizes)))
    out.extend(" ".join(map(str, e)) for e in base.sorted_edges())
    return "\n".join(out) + "\n"


def _contiguous_sizes(g: PartitionedHypergraph) -> List[int]:
    sizes = [m.bit_count() for m in g.class_masks]
    if list(g.class_masks) != contiguous_classes(sizes):
        raise PreconditionError("only contiguous classes can be written")
    return sizes


def write_hg(g: Graph, path: str, comments: Optional[List[str]] = None) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(format_hg(g, comments))
    os.replace(tmp, path)
