"""Exact minimax for the coloring game on tiny graphs.

A position is the set of color classes, each a vertex bitmask.  Colors are
interchangeable, so the sorted tuple of class masks is a canonical key for
the whole color-permutation orbit, and among the unused colors only one
needs to be tried.
"""

from __future__ import annotations

from colorgame.game import Outcome
from colorgame.graph import Graph

DEFAULT_VERTEX_BUDGET = 12


class BudgetExceededError(ValueError):
    pass


def _popcount(x: int) -> int:
    return bin(x).count("1")


class ExactSolver:
    def __init__(self, graph: Graph, k: int, prune_safe: bool = True):
        if k < 1:
            raise ValueError("k must be at least 1")
        self.n = graph.n
        self.k = k
        self.full = (1 << self.n) - 1
        self.nbr = [sum(1 << int(u) for u in graph.neighbors(v)) for v in range(self.n)]
        self.prune_safe = prune_safe
        self.memo: dict[tuple[int, ...], bool] = {}

    def maker_wins(self, classes: tuple[int, ...] = ()) -> bool:
        """Whether Maker wins from ``classes`` with optimal play on both sides."""
        key = tuple(sorted(classes))
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        result = self._evaluate(key)
        self.memo[key] = result
        return result

    def _evaluate(self, classes: tuple[int, ...]) -> bool:
        colored = 0
        for cls in classes:
            colored |= cls
        if colored == self.full:
            return True
        unused = self.k - len(classes)
        uncolored = self.full & ~colored
        moves = []
        safe = True
        v = 0
        rest = uncolored
        while rest:
            if rest & 1:
                nb = self.nbr[v]
                usable = [j for j, cls in enumerate(classes) if not cls & nb]
                a = unused + len(usable)
                if a == 0:
                    return False
                if a <= _popcount(nb & uncolored):
                    safe = False
                moves.append((v, usable))
            rest >>= 1
            v += 1
        # no uncolored vertex can lose more colors than it has uncolored neighbors
        if safe and self.prune_safe:
            return True
        maker_to_move = _popcount(colored) % 2 == 0
        for v, usable in moves:
            bit = 1 << v
            children = [classes[:j] + (classes[j] | bit,) + classes[j + 1:] for j in usable]
            if unused:
                children.append(classes + (bit,))
            for child in children:
                win = self.maker_wins(child)
                if maker_to_move and win:
                    return True
                if not maker_to_move and not win:
                    return False
        return not maker_to_move


def solve_exact(graph: Graph, k: int, vertex_budget: int = DEFAULT_VERTEX_BUDGET,
                prune_safe: bool = True) -> Outcome:
    """Winner of the coloring game on ``graph`` with ``k`` colors under optimal play.

    ``prune_safe=False`` disables the shortcut that declares Maker the winner
    once every uncolored vertex has more colors than uncolored neighbors.
    """
    if graph.n > vertex_budget:
        raise BudgetExceededError(f"graph has {graph.n} vertices, budget is {vertex_budget}")
    win = ExactSolver(graph, k, prune_safe).maker_wins()
    return Outcome.MAKER_WON if win else Outcome.BREAKER_WON
