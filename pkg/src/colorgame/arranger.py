"""ColorArranging: exception sets S(v) that thin out frequent colors.

Given vertices U with color sets A(v) and a threshold q, colors are visited
one at a time.  When color i is available at more than q vertices of U, the
q vertices with the currently largest |S(v)| keep it and every other vertex
puts i into its exception set.  Afterwards every color survives in at most
q of the restricted sets A(v) minus S(v).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass
class ArrangementInput:
    U: list[int]
    avail: dict[int, frozenset[int]]
    q: int
    color_order: list[int] | None = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be at least 1")
        self.avail = {v: frozenset(self.avail[v]) for v in self.U}
        if len(set(self.U)) != len(self.U):
            raise ValueError("U has repeated vertices")

    def colors(self) -> list[int]:
        if self.color_order is not None:
            return list(self.color_order)
        return sorted(set().union(*self.avail.values())) if self.avail else []


@dataclass
class ArrangementResult:
    S: dict[int, frozenset[int]]
    residual: dict[int, int]
    max_s: int


def color_arranging(inp: ArrangementInput, rng: np.random.Generator | None = None) -> ArrangementResult:
    """Run ColorArranging.

    Colors are processed in ``inp.color_order`` (default ascending); passing
    ``rng`` shuffles that order.  Among vertices tied on |S(v)| the smaller
    vertex index keeps the color.
    """
    order = inp.colors()
    if rng is not None:
        order = [order[i] for i in rng.permutation(len(order))]
    S: dict[int, set[int]] = {v: set() for v in inp.U}
    q = inp.q
    for i in order:
        Ui = [v for v in inp.U if i in inp.avail[v]]
        if len(Ui) > q:
            Ui.sort(key=lambda v: (-len(S[v]), v))
            for v in Ui[q:]:
                S[v].add(i)
    frozen = {v: frozenset(s) for v, s in S.items()}
    residual = _residual(inp, frozen)
    return ArrangementResult(frozen, residual, max((len(s) for s in frozen.values()), default=0))


def _residual(inp: ArrangementInput, S: dict[int, frozenset[int]]) -> dict[int, int]:
    counts: dict[int, int] = {}
    for v in inp.U:
        for i in inp.avail[v] - S[v]:
            counts[i] = counts.get(i, 0) + 1
    return counts


@dataclass
class ArrangementReport:
    residual_ok: bool
    size_ok: bool
    subset_ok: bool
    over_residual: list[int]
    over_size: list[int]


def verify_arrangement(inp: ArrangementInput, result: ArrangementResult) -> ArrangementReport:
    """Check residual multiplicities <= q and |S(v)| <= q.

    The first property is guaranteed by construction; the second can fail
    on adversarial inputs and is only reported.
    """
    subset_ok = all(result.S[v] <= inp.avail[v] for v in inp.U)
    residual = _residual(inp, result.S)
    over_residual = sorted(i for i, c in residual.items() if c > inp.q)
    over_size = sorted(v for v in inp.U if len(result.S[v]) > inp.q)
    return ArrangementReport(not over_residual, not over_size, subset_ok, over_residual, over_size)


def cascade_constants(h: float, xi: float) -> tuple[float, float]:
    """L = (h + 2 xi) / (2 xi) and c = 1 / (L + 1)."""
    if not (0 < h < 1 and 0 < xi < 1):
        raise ValueError("h and xi must lie in (0, 1)")
    L = (h + 2 * xi) / (2 * xi)
    return L, 1 / (L + 1)


@dataclass
class Cascade:
    L: float
    c: float
    K_floor: int
    K_ceil: int
    sizes: list[tuple[int, int]]


def wk_cascade(inp: ArrangementInput, result: ArrangementResult, h: float, xi: float,
               q: float | None = None) -> Cascade:
    """Sizes of W_K = {v in U : |S(v)| > (1 - K c) q} for K = 0..ceil(L).

    ``q`` defaults to the arrangement threshold; pass the real-valued q(h)
    to use the unrounded one.
    """
    L, c = cascade_constants(h, xi)
    qq = inp.q if q is None else q
    s = [len(result.S[v]) for v in inp.U]
    top = math.ceil(L - 1e-12)
    sizes = [(K, sum(1 for x in s if x > (1 - K * c) * qq)) for K in range(top + 1)]
    return Cascade(L, c, math.floor(L + 1e-12), top, sizes)


def wk_sets(inp: ArrangementInput, result: ArrangementResult, h: float, xi: float,
            q: float | None = None) -> list[frozenset[int]]:
    L, c = cascade_constants(h, xi)
    qq = inp.q if q is None else q
    top = math.ceil(L - 1e-12)
    return [frozenset(v for v in inp.U if len(result.S[v]) > (1 - K * c) * qq) for K in range(top + 1)]
