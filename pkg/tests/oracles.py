"""Independent brute-force references, written on plain Python sets.

Nothing here imports the package's bitset code, so a shared bug cannot
make the implementation and its oracle agree by accident.
"""

import math
from itertools import combinations, product


def independent(edges, S) -> int:
    s = set(S)
    return int(not any(set(e) <= s for e in edges))


def colourful_free(edges, sets) -> int:
    sets = [set(x) for x in sets]
    for e in edges:
        if all(sum(1 for v in e if v in x) == 1 for x in sets):
            return 0
    return 1


def count_within(edges, S) -> int:
    s = set(S)
    return sum(1 for e in edges if set(e) <= s)


def colourful_edges(edges, sets):
    sets = [set(x) for x in sets]
    return sorted(tuple(sorted(e)) for e in edges
                  if all(sum(1 for v in e if v in x) == 1 for x in sets))


def count_all_ksets(n, k, edges) -> int:
    """e(G) by walking every k-subset of [n]."""
    es = {tuple(sorted(e)) for e in edges}
    return sum(1 for c in combinations(range(1, n + 1), k) if c in es)


def binom_pmf(n, p):
    return [math.comb(n, j) * p ** j * (1 - p) ** (n - j) for j in range(n + 1)]


def g_direct(k, beta):
    """(1/k) r (k - beta - r) with r = floor((k - beta)/2 + 1/2), in floats."""
    r = math.floor((k - beta) / 2 + 0.5)
    return r * (k - beta - r) / k


def core_ok(edges, classes, I, Y, zeta) -> bool:
    """The three core clauses, checked directly on sets."""
    k = len(classes)
    Y = [set(y) for y in Y]
    if any(not y <= set(c) for y, c in zip(Y, classes)):
        return False
    col = [e for e in edges if all(sum(1 for v in e if v in c) == 1 for c in classes)]
    coly = [e for e in col if all(sum(1 for v in e if v in y) == 1 for y in Y)]
    if len(coly) * (2 * k) ** k < len(col):
        return False
    for i in I:
        if len(Y[i]) * zeta > 2:
            return False
    for i in range(k):
        if i in I:
            continue
        for v in Y[i]:
            d = sum(1 for e in coly if v in e)
            if d >= zeta * len(coly):
                return False
    return True


def ledger_sum(sizes, alpha):
    return sum(s ** alpha for s in sizes if s > 0)
