"""Monte-Carlo estimate of the game chromatic number of G(n, p), plus a greedy baseline."""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from statistics import NormalDist

import numba
import numpy as np

from colorgame.analysis.formulas import theory_anchors
from colorgame.game import Outcome, play_game
from colorgame.graph import Graph, gen_gnp
from colorgame.seeding import derive_seed, make_rng
from colorgame.strategies import parse_strategy

GRAPH_STREAM = 0
GAME_STREAM = 1


def name_key(name: str) -> int:
    """Stable integer key for a strategy name, used in seed derivation."""
    return zlib.crc32(name.encode())


def graph_seed(master: int, i: int) -> int:
    return derive_seed(master, GRAPH_STREAM, i)


def game_seed(master: int, k: int, breaker: str, i: int) -> int:
    return derive_seed(master, GAME_STREAM, k, name_key(breaker), i)


@lru_cache(maxsize=4)
def _cached_gnp(n: int, p: float, seed: int) -> Graph:
    return gen_gnp(n, p, seed)


@dataclass(frozen=True)
class PlayoutTask:
    n: int
    p: float
    k: int
    maker: str
    breaker: str
    graph_seed: int
    seed: int
    index: int = 0


@dataclass(frozen=True)
class PlayoutResult:
    task: PlayoutTask
    outcome: str
    moves: int


def run_playout(task: PlayoutTask, keep_trace: bool = False):
    graph = _cached_gnp(task.n, task.p, task.graph_seed)
    trace = play_game(graph, task.k, parse_strategy(task.maker), parse_strategy(task.breaker), task.seed,
                      params={"gnp": [task.n, task.p, task.graph_seed]})
    result = PlayoutResult(task, trace.outcome.value, len(trace.moves))
    return (result, trace) if keep_trace else result


def run_tasks(tasks: list[PlayoutTask], workers: int = 1) -> list[PlayoutResult]:
    """Run playouts, in parallel when ``workers`` > 1; results keep task order."""
    if workers <= 1 or len(tasks) <= 1:
        return [run_playout(t) for t in tasks]
    chunk = max(1, len(tasks) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_playout, tasks, chunksize=chunk))


def wilson_interval(wins: int, total: int, confidence: float = 0.95) -> tuple[float, float]:
    if total == 0:
        return 0.0, 1.0
    z = NormalDist().inv_cdf(0.5 + confidence / 2)
    phat = wins / total
    denom = 1 + z * z / total
    centre = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    lo = 0.0 if wins == 0 else max(0.0, centre - half)
    hi = 1.0 if wins == total else min(1.0, centre + half)
    return lo, hi


@dataclass(frozen=True)
class RateRow:
    k: int
    breaker: str
    wins: int
    losses: int
    rate: float
    ci_lo: float
    ci_hi: float

    def csv_fields(self) -> list:
        return [self.k, self.breaker, self.wins, self.losses, f"{self.rate:.6f}", f"{self.ci_lo:.6f}", f"{self.ci_hi:.6f}"]


RATE_COLUMNS = ["k", "breaker", "wins", "losses", "rate", "ci_lo", "ci_hi"]


def tasks_for(n: int, p: float, k: int, maker: str, breakers, playouts: int, seed: int) -> list[PlayoutTask]:
    # grouped by graph so a worker's graph cache gets reused across breakers
    return [PlayoutTask(n, p, k, maker, b, graph_seed(seed, i), game_seed(seed, k, b, i), i)
            for i in range(playouts) for b in breakers]


def tally(results: list[PlayoutResult], breakers) -> list[RateRow]:
    rows = []
    for b in breakers:
        outs = [r.outcome for r in results if r.task.breaker == b]
        wins = outs.count(Outcome.MAKER_WON.value)
        losses = outs.count(Outcome.BREAKER_WON.value)
        lo, hi = wilson_interval(wins, wins + losses)
        rows.append(RateRow(results[0].task.k if results else 0, b, wins, losses,
                            wins / (wins + losses) if wins + losses else 0.0, lo, hi))
    return rows


def win_rates(n: int, p: float, k: int, maker: str, breakers, playouts: int, seed: int,
              workers: int = 1) -> list[RateRow]:
    """Maker's win rate at ``k`` colors against each breaker, one fresh graph per playout."""
    if playouts < 1:
        raise ValueError("playouts must be at least 1")
    breakers = list(breakers)
    return tally(run_tasks(tasks_for(n, p, k, maker, breakers, playouts, seed), workers), breakers)


def win_table(n: int, p: float, ks, maker: str, breakers, playouts: int, seed: int,
              workers: int = 1) -> list[RateRow]:
    breakers = list(breakers)
    ks = list(ks)
    tasks = [t for k in ks for t in tasks_for(n, p, k, maker, breakers, playouts, seed)]
    # graphs depend on the playout index only, so run index-major to reuse them across k
    order = sorted(range(len(tasks)), key=lambda j: (tasks[j].index, j))
    done = run_tasks([tasks[j] for j in order], workers)
    results = [None] * len(tasks)
    for j, r in zip(order, done):
        results[j] = r
    rows = []
    per_k = len(breakers) * playouts
    for j in range(len(ks)):
        rows.extend(tally(results[j * per_k:(j + 1) * per_k], breakers))
    return rows


def significant_decreases(rows: list[RateRow]) -> list[tuple[RateRow, RateRow]]:
    """Pairs k < k' (same breaker) whose Wilson intervals show a drop in win rate."""
    out = []
    by_breaker: dict[str, list[RateRow]] = {}
    for r in rows:
        by_breaker.setdefault(r.breaker, []).append(r)
    for rs in by_breaker.values():
        rs = sorted(rs, key=lambda r: r.k)
        for i, lo in enumerate(rs):
            for hi in rs[i + 1:]:
                if hi.ci_hi < lo.ci_lo:
                    out.append((lo, hi))
    return out


@dataclass
class Estimate:
    k_star: int
    rows: list[RateRow]
    anchors: dict[str, float]
    threshold: float


def estimate_chi_g(n: int, p: float, maker: str, breaker_pool, playouts: int, seed: int,
                   threshold: float = 0.95, workers: int = 1) -> Estimate:
    """Smallest k at which Maker's win rate reaches ``threshold`` against every breaker.

    Win rate is taken to be non-decreasing in k, so k is found by binary
    search over [1, n]; every evaluated k is reported with its raw rates.
    """
    if playouts < 1:
        raise ValueError("playouts must be at least 1")
    breakers = list(breaker_pool)
    evaluated: dict[int, list[RateRow]] = {}

    def passes(k: int) -> bool:
        if k not in evaluated:
            evaluated[k] = win_rates(n, p, k, maker, breakers, playouts, seed, workers)
        return all(r.rate >= threshold for r in evaluated[k])

    lo, hi = 1, max(1, n)
    if not passes(hi):
        k_star = hi
    else:
        while lo < hi:
            mid = (lo + hi) // 2
            if passes(mid):
                hi = mid
            else:
                lo = mid + 1
        k_star = lo
    rows = [r for k in sorted(evaluated) for r in evaluated[k]]
    anchors = {}
    if 0 < p < 1 and n * p > 1:
        anchors = theory_anchors(n, p)
    return Estimate(k_star, rows, anchors, threshold)


@numba.njit(cache=True)
def _greedy_kernel(indptr, indices, order):
    n = order.size
    color = np.zeros(n, dtype=np.int64)
    mark = np.zeros(n + 2, dtype=np.int64)
    used = 0
    for step in range(n):
        v = order[step]
        for e in range(indptr[v], indptr[v + 1]):
            c = color[indices[e]]
            if c > 0:
                mark[c] = step + 1
        c = 1
        while mark[c] == step + 1:
            c += 1
        color[v] = c
        if c > used:
            used = c
    return used


def greedy_chromatic(graph: Graph, seed: int) -> int:
    """Colors used by first-fit greedy coloring in a random vertex order."""
    order = make_rng(seed).permutation(graph.n).astype(np.int64)
    return int(_greedy_kernel(graph.indptr, graph.indices, order))
