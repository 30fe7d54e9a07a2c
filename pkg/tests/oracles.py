"""Slow, obviously-correct reference implementations used only by the tests."""

from __future__ import annotations

import itertools
from fractions import Fraction


def brute_avail(edges, n, k, coloring):
    """A(v) for every uncolored v, straight from the definition."""
    nbrs = {v: set() for v in range(n)}
    for u, v in edges:
        nbrs[u].add(v)
        nbrs[v].add(u)
    out = {}
    for v in range(n):
        if coloring.get(v):
            continue
        used = {coloring[u] for u in nbrs[v] if coloring.get(u)}
        out[v] = frozenset(range(1, k + 1)) - used
    return out


def brute_level(n, k, coloring, avail):
    active = {c for a in avail.values() for c in a}
    if not active:
        return None
    sizes = {c: sum(1 for v in coloring if coloring[v] == c) for c in active}
    return min(sizes.values())


def subsets_criterion(sizes, q, d, z):
    """All-subsets form of the box-game criterion."""
    base = Fraction(z * q + d)
    for m in range(1, len(sizes) + 1):
        h = sum((Fraction(1, i) for i in range(1, m)), Fraction(0))
        f = base if m == 1 else base * m * (1 + h)
        for idx in itertools.combinations(range(len(sizes)), m):
            if not sum(sizes[i] for i in idx) > f:
                return False
    return True


def brute_arrange(U, avail, q):
    """ColorArranging written out with plain lists and a full sort each round."""
    S = {v: [] for v in U}
    colors = sorted(set().union(*avail.values())) if avail else []
    for i in colors:
        Ui = [v for v in U if i in avail[v]]
        if len(Ui) > q:
            ranked = sorted(Ui, key=lambda v: (-len(S[v]), v))
            for v in ranked[q:]:
                S[v].append(i)
    return {v: frozenset(s) for v, s in S.items()}
