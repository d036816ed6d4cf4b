"""Vertex sets as Python ints.

Vertex v (1-based) lives at bit v, so bit 0 is always clear.
"""

from typing import Iterable, Iterator, List


def to_mask(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def as_mask(s) -> int:
    """Accept either a mask or an iterable of vertices."""
    if isinstance(s, int):
        return s
    return to_mask(s)


def iter_bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


def to_list(m: int) -> List[int]:
    return list(iter_bits(m))


def to_set(m: int) -> frozenset:
    return frozenset(iter_bits(m))


def popcount(m: int) -> int:
    return m.bit_count()


def full_mask(n: int) -> int:
    """Mask of vertices 1..n."""
    return ((1 << n) - 1) << 1


def range_mask(lo: int, hi: int) -> int:
    """Mask of vertices lo..hi inclusive."""
    if hi < lo:
        return 0
    return ((1 << (hi - lo + 1)) - 1) << lo
