"""Balls-and-bins game between a greedy player M and an adversary B.

Balls alternate M, B, M, B, ...  M always throws into a minimum-load
non-removed bin (ties: smallest index), except that B plays every N-th of
M's balls himself.  Before any ball B may remove bins; removed bins take no
further balls.

Time t is the number of balls thrown.  The level l(t) is the minimum load
over non-removed bins after ball t, and t(l) is the first time with
l(t) >= l.  A ball is "thrown at load l'" when the bin it lands in reaches
load l' with that ball.
"""

from __future__ import annotations

import csv
import heapq
import importlib.util
import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from colorgame.seeding import make_rng


class AdversaryError(RuntimeError):
    pass


class Ball(NamedTuple):
    t: int
    player: str
    bin: int
    load_after: int
    stolen: bool
    removed: tuple[int, ...]


class BinsState:
    """Live view handed to adversaries.  Adversaries must not mutate it."""

    def __init__(self, k: int, N: int):
        self.k = k
        self.N = N
        self.loads = [0] * k
        self.removed = [False] * k
        self.t = 0
        self.m_turns = 0
        self.level = 0
        self.n_live = k
        self.thrown_at: list[int] = [0]
        self._heap = [(0, i) for i in range(k)]
        self._live = list(range(k))

    def live_bins(self) -> list[int]:
        return self._live

    def min_bin(self) -> int:
        heap = self._heap
        while heap:
            load, i = heap[0]
            if self.removed[i] or self.loads[i] != load:
                heapq.heappop(heap)
                continue
            return i
        return -1

    def _remove(self, i: int) -> None:
        if not 0 <= i < self.k or self.removed[i]:
            raise AdversaryError(f"cannot remove bin {i}")
        self.removed[i] = True
        self.n_live -= 1
        self._live = [j for j in self._live if j != i]

    def _throw(self, i: int) -> int:
        if not 0 <= i < self.k or self.removed[i]:
            raise AdversaryError(f"ball into removed or unknown bin {i}")
        self.loads[i] += 1
        load = self.loads[i]
        heapq.heappush(self._heap, (load, i))
        if load == len(self.thrown_at):
            self.thrown_at.append(0)
        self.thrown_at[load] += 1
        return load


class Adversary:
    """Adversary interface; the default never removes bins and always steals."""

    name = "base"

    def remove(self, state: BinsState, rng: np.random.Generator) -> list[int]:
        return []

    def place(self, state: BinsState, stolen: bool, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def wants_steal(self, state: BinsState, rng: np.random.Generator) -> bool:
        return True


def _uniform_live(state: BinsState, rng: np.random.Generator) -> int:
    live = state.live_bins()
    return live[int(rng.integers(len(live)))]


class RandomAdversary(Adversary):
    name = "random"

    def __init__(self, p_remove: float = 0.0, max_removals: int | None = None):
        self.p_remove = p_remove
        self.max_removals = max_removals
        self.removals = 0

    def remove(self, state, rng):
        if self.p_remove and rng.random() < self.p_remove and state.n_live > 1:
            if self.max_removals is None or self.removals < self.max_removals:
                live = state.live_bins()
                self.removals += 1
                return [live[int(rng.integers(len(live)))]]
        return []

    def place(self, state, stolen, rng):
        return _uniform_live(state, rng)

    def wants_steal(self, state, rng):
        return bool(rng.integers(2))


class MinAdversary(Adversary):
    """Never throws above the current minimum load."""

    name = "min"

    def place(self, state, stolen, rng):
        return state.min_bin()


class StackerAdversary(Adversary):
    """Stack one bin up to ``height``, then switch to the next lowest bin.

    With ``remove_budget`` > 0 it also removes minimum-load bins (at most
    that many, every ``remove_every`` balls).
    """

    name = "stacker"

    def __init__(self, height: int, remove_budget: int = 0, remove_every: int = 1):
        self.height = height
        self.remove_budget = remove_budget
        self.remove_every = max(1, remove_every)
        self.target = -1
        self.done = False  # every live bin has reached the height; loads never drop

    def remove(self, state, rng):
        if self.remove_budget > 0 and state.t % self.remove_every == 0 and state.n_live > 1:
            i = state.min_bin()
            if i != self.target:
                self.remove_budget -= 1
                return [i]
        return []

    def place(self, state, stolen, rng):
        if self.done:
            return state.min_bin()
        if self.target < 0 or state.removed[self.target] or state.loads[self.target] >= self.height:
            candidates = [i for i in state.live_bins() if state.loads[i] < self.height]
            if not candidates:
                self.done = True
                return state.min_bin()
            # the fullest bin still below the stacking height
            self.target = max(candidates, key=lambda i: (state.loads[i], -i))
        return self.target


class RemovalHeavyAdversary(Adversary):
    """Removes a minimum-load bin every ``period`` balls and throws randomly."""

    name = "remover"

    def __init__(self, period: int = 3, keep: int = 1):
        self.period = max(1, period)
        self.keep = keep

    def remove(self, state, rng):
        if state.t % self.period == 0 and state.n_live > self.keep:
            return [state.min_bin()]
        return []

    def place(self, state, stolen, rng):
        return _uniform_live(state, rng)


class SwitchAdversary(Adversary):
    """Stack-then-switch: pile onto one bin to ``height`` and move on; M's
    stolen balls go onto the minimum so that the level keeps pace."""

    name = "switch"

    def __init__(self, height: int):
        self.stack = StackerAdversary(height)

    def place(self, state, stolen, rng):
        if stolen:
            return state.min_bin()
        return self.stack.place(state, stolen, rng)


def load_adversary_script(path: str, **kwargs) -> Adversary:
    """Import ``make_adversary(**kwargs)`` from a user script."""
    spec = importlib.util.spec_from_file_location("colorgame_user_adversary", path)
    if spec is None or spec.loader is None:
        raise ValueError(f"cannot import adversary script {path}")
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module.make_adversary(**kwargs)


@dataclass
class BinsTrace:
    k: int
    N: int
    balls: list[Ball] = field(default_factory=list)
    levels: list[int] = field(default_factory=list)
    level_times: list[int] = field(default_factory=lambda: [0])
    level_counts: list[list[int]] = field(default_factory=lambda: [[0]])
    removal_loads: list[tuple[int, int, int]] = field(default_factory=list)
    halted: bool = False

    @property
    def max_level(self) -> int:
        return len(self.level_times) - 1

    def t_of_level(self, level: int) -> int:
        if level > self.max_level:
            raise ValueError(f"level {level} never reached (max {self.max_level})")
        return self.level_times[level]

    def c_incremental(self, level: int, a: int) -> int:
        """C(level) read off the counters snapshotted when the level was first reached."""
        self.t_of_level(level)
        return sum(self.level_counts[level][level + 1:a + 1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "player", "bin", "load_after", "stolen", "removed_bins"])
        for b in self.balls:
            w.writerow([b.t, b.player, b.bin, b.load_after, int(b.stolen), ";".join(map(str, b.removed))])
        return buf.getvalue()


def play_ballsbins(k: int, N: int, adversary: Adversary, horizon: int, seed: int,
                   steal_schedule: str = "fixed") -> BinsTrace:
    """Throw up to ``horizon`` balls.

    With ``steal_schedule="fixed"`` M's j-th ball is stolen iff N divides j.
    With ``"adaptive"`` the adversary picks at most one of every block of N
    consecutive M turns (by ``wants_steal``), taking the last one of the
    block if it has not stolen yet.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if N < 2:
        raise ValueError("N must be at least 2")
    if steal_schedule not in ("fixed", "adaptive"):
        raise ValueError(f"unknown steal schedule {steal_schedule!r}")
    rng = make_rng(seed)
    state = BinsState(k, N)
    trace = BinsTrace(k, N)
    stolen_in_block = False
    for t in range(1, horizon + 1):
        removed = tuple(int(i) for i in adversary.remove(state, rng))
        for i in removed:
            trace.removal_loads.append((t, i, state.loads[i]))
            state._remove(i)
        if state.n_live == 0:
            trace.halted = True
            break
        if t % 2 == 1:
            state.m_turns += 1
            j = state.m_turns
            if steal_schedule == "fixed":
                stolen = j % N == 0
            else:
                if (j - 1) % N == 0:
                    stolen_in_block = False
                stolen = not stolen_in_block and (j % N == 0 or adversary.wants_steal(state, rng))
                stolen_in_block = stolen_in_block or stolen
            if stolen:
                i = int(adversary.place(state, True, rng))
                player = "B"
            else:
                i = state.min_bin()
                player = "M"
        else:
            stolen = False
            i = int(adversary.place(state, False, rng))
            player = "B"
        load = state._throw(i)
        state.t = t
        trace.balls.append(Ball(t, player, i, load, stolen, removed))
        level = state.loads[state.min_bin()]
        state.level = level
        trace.levels.append(level)
        while trace.max_level < level:
            trace.level_times.append(t)
            trace.level_counts.append(list(state.thrown_at))
    return trace


def c_of_level(trace: BinsTrace, level: int, a: int) -> int:
    """Number of balls thrown at loads in (level, a] up to time t(level), from the raw records."""
    if level >= a:
        raise ValueError("need level < a")
    t_l = trace.t_of_level(level)
    return sum(1 for b in trace.balls[:t_l] if level < b.load_after <= a)


def load_bound(k: int, N: int, level: int, a: int) -> Fraction:
    """Upper bound k*l*(N+1)*(a-l) / ((N-1)*(a-1)) on C(l)."""
    return Fraction(k * level * (N + 1) * (a - level), (N - 1) * (a - 1))


class BoundViolation(NamedTuple):
    level: int
    count: int
    bound: Fraction


def check_load_bound(trace: BinsTrace, a: int) -> list[BoundViolation]:
    if a < 2:
        raise ValueError("need a >= 2")
    out = []
    for level in range(min(trace.max_level, a - 1) + 1):
        count = c_of_level(trace, level, a)
        bound = load_bound(trace.k, trace.N, level, a)
        if count > bound:
            out.append(BoundViolation(level, count, bound))
    return out


def loads_at(trace: BinsTrace, t: int) -> tuple[list[int], list[bool]]:
    loads = [0] * trace.k
    removed = [False] * trace.k
    for b in trace.balls[:t]:
        for i in b.removed:
            removed[i] = True
        loads[b.bin] = b.load_after
    return loads, removed


@dataclass
class LowLoadResult:
    applicable: bool
    reasons: list[str]
    count: int | None = None
    threshold: float = 0.0
    holds: bool | None = None


def check_low_load_bins(trace: BinsTrace, xi: float, a: int, N: int, t: int) -> LowLoadResult:
    """Count non-removed bins with load <= a at time t against xi*k/8.

    The conclusion is only judged when every precondition holds; otherwise
    the result is "not applicable" with the failed preconditions listed.
    """
    k = trace.k
    reasons = []
    if N * xi < 8:
        reasons.append(f"N={N} < 8/xi")
    if (1 - xi) * a + 1 > (1 - xi / 2) * (a - 1):
        reasons.append(f"a={a} too small for xi={xi}")
    early_removals = sum(1 for (tr, _, load) in trace.removal_loads if tr <= t and load < a)
    if early_removals > xi * k / 8:
        reasons.append(f"{early_removals} bins removed below load a, budget {xi * k / 8:g}")
    if not 1 <= t <= len(trace.balls):
        reasons.append(f"time {t} outside the trace")
    elif trace.levels[t - 1] > a * (1 - xi):
        reasons.append(f"level {trace.levels[t - 1]} exceeds a(1-xi)")
    threshold = xi * k / 8
    if reasons:
        return LowLoadResult(False, reasons, threshold=threshold)
    loads, removed = loads_at(trace, t)
    count = sum(1 for i in range(k) if not removed[i] and loads[i] <= a)
    return LowLoadResult(True, [], count, threshold, count >= threshold)
