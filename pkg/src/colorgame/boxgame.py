"""The generalized box game B(A_1, ..., A_k; q, z).

Elements are anonymous, so a position is just the multiset of live set
sizes, kept as a sorted list.  Each round is one Maker turn followed by one
Breaker turn:

* Maker's turn is either real (Maker claims an element of a set within d of
  the smallest live set) or stolen (Breaker claims an element of any live
  set on Maker's behalf).  Either way the claimed set leaves the game.  The
  first Maker turn is always real and at most z - 1 consecutive turns may be
  stolen.
* Breaker then eliminates up to q elements, spread over live sets as he
  likes.

Breaker wins as soon as a live set is empty; Maker wins when no live set
remains.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np

from colorgame.seeding import make_rng

MAKER_WON = "maker_won"
BREAKER_WON = "breaker_won"
EXACT_ELEMENT_BUDGET = 18


class PolicyError(RuntimeError):
    """A Breaker policy asked for an illegal elimination or steal."""


@dataclass(frozen=True)
class BoxInstance:
    sizes: tuple[int, ...]
    q: int
    z: int = 1
    d: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if not self.sizes:
            raise ValueError("a box game needs at least one set")
        if min(self.sizes) < 0:
            raise ValueError("set sizes must be non-negative")
        if self.q < 0 or self.d < 0:
            raise ValueError("q and d must be non-negative")
        if self.z < 1:
            raise ValueError("z must be at least 1")

    @property
    def k(self) -> int:
        return len(self.sizes)

    @property
    def total(self) -> int:
        return sum(self.sizes)


def harmonic(m: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, m + 1)), Fraction(0))


def f_bound(m: int, q: int, d: int, z: int) -> Fraction:
    """Maker's sufficiency threshold for a family of m sets.

    f(1) = zq + d and f(m) = (zq + d) * m * (1 + H_{m-1}) for m > 1.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    base = Fraction(z * q + d)
    if m == 1:
        return base
    return base * m * (1 + harmonic(m - 1))


class CriterionResult(NamedTuple):
    holds: bool
    witness: int | None = None


def criterion_holds(sizes, q: int, d: int, z: int) -> CriterionResult:
    """Check that every non-empty subfamily I has total size > f(|I|).

    f depends on |I| only, so for each m the binding subfamily is the m
    smallest sets; on failure the violating m is returned as the witness.
    """
    total = 0
    base = Fraction(z * q + d)
    h = Fraction(0)
    for m, s in enumerate(sorted(sizes), start=1):
        total += s
        f = base if m == 1 else base * m * (1 + h)
        if not total > f:
            return CriterionResult(False, m)
        h += Fraction(1, m)
    return CriterionResult(True)


# --- live-set bookkeeping ------------------------------------------------------

def _decrement(live: list[int], i: int) -> int:
    """Remove one element from live[i], keep ``live`` sorted, return the new size."""
    s = live.pop(i) - 1
    bisect.insort(live, s)
    return s


class BoxPolicy:
    """How Breaker eliminates elements and which set a stolen move claims.

    Indices refer to the sorted list of live sizes.
    """

    name = ""

    def eliminate(self, live: list[int], rng: np.random.Generator) -> int:
        raise NotImplementedError

    def steal(self, live: list[int], rng: np.random.Generator) -> int:
        return len(live) - 1


class SmallestPolicy(BoxPolicy):
    name = "smallest"

    def eliminate(self, live, rng):
        return 0


class SecondSmallestPolicy(BoxPolicy):
    # Maker will take the smallest set next; hit the one behind it
    name = "second"

    def eliminate(self, live, rng):
        return 1 if len(live) > 1 else 0


class SpreadPolicy(BoxPolicy):
    name = "spread"

    def __init__(self):
        self._turn = 0

    def eliminate(self, live, rng):
        i = self._turn % len(live)
        self._turn += 1
        return i


class RandomPolicy(BoxPolicy):
    name = "random"

    def eliminate(self, live, rng):
        return int(rng.integers(len(live)))

    def steal(self, live, rng):
        return int(rng.integers(len(live)))


class StealSmallestPolicy(SmallestPolicy):
    name = "smallest-stealsmall"

    def steal(self, live, rng):
        return 0


BOX_POLICIES = {
    "smallest": SmallestPolicy,
    "second": SecondSmallestPolicy,
    "spread": SpreadPolicy,
    "random": RandomPolicy,
    "smallest-stealsmall": StealSmallestPolicy,
}

STEAL_SCHEDULES = ("none", "max", "random")


def _wants_steal(schedule: str, rng: np.random.Generator) -> bool:
    if schedule == "none":
        return False
    if schedule == "max":
        return True
    if schedule == "random":
        return bool(rng.integers(2))
    raise ValueError(f"unknown steal schedule {schedule!r}")


@dataclass
class BoxResult:
    winner: str
    rounds: int
    trace: list[tuple[str, int]] = field(default_factory=list)


def _maker_pick(live: list[int], d: int, maker: str) -> int:
    if maker == "smallest":
        return 0
    if maker == "slack":
        # the largest set a d-greedy Maker may still take
        return bisect.bisect_right(live, live[0] + d) - 1
    raise ValueError(f"unknown maker rule {maker!r}")


def play_boxgame(instance: BoxInstance, breaker_policy: str | BoxPolicy = "smallest",
                 steal_policy: str = "max", seed: int = 0, maker: str = "smallest",
                 record: bool = False) -> BoxResult:
    """Play d-greedy Maker against a Breaker policy.

    ``maker`` is "smallest" (always the smallest set) or "slack" (the largest
    set within d of the smallest, the least favorable d-greedy choice).  The
    trace, when recorded, lists ("real" | "steal", size claimed) and
    ("elim", size after) events.
    """
    policy = BOX_POLICIES[breaker_policy]() if isinstance(breaker_policy, str) else breaker_policy
    rng = make_rng(seed)
    live = sorted(instance.sizes)
    trace: list[tuple[str, int]] = []
    rounds = 0
    run = 0
    first = True
    while True:
        if live and live[0] == 0:
            return BoxResult(BREAKER_WON, rounds, trace)
        if not live:
            return BoxResult(MAKER_WON, rounds, trace)
        rounds += 1
        if not first and run < instance.z - 1 and _wants_steal(steal_policy, rng):
            j = policy.steal(live, rng)
            if not 0 <= j < len(live):
                raise PolicyError(f"steal of set {j} with {len(live)} live sets")
            run += 1
            kind = "steal"
        else:
            j = _maker_pick(live, instance.d, maker)
            run = 0
            kind = "real"
        first = False
        claimed = live.pop(j)
        if record:
            trace.append((kind, claimed))
        for _ in range(instance.q):
            if not live or live[0] == 0:
                break
            i = policy.eliminate(live, rng)
            if not 0 <= i < len(live) or live[i] == 0:
                raise PolicyError(f"elimination on set {i} of {live}")
            s = _decrement(live, i)
            if record:
                trace.append(("elim", s))


# --- exhaustive Breaker --------------------------------------------------------

def _eliminations(sizes: tuple[int, ...], q: int) -> set[tuple[int, ...]]:
    """All sorted size tuples reachable by removing at most q elements."""
    out = {sizes}
    frontier = {sizes}
    for _ in range(q):
        nxt = set()
        for s in frontier:
            for i, x in enumerate(s):
                if x > 0 and (i == 0 or s[i - 1] != x):
                    t = list(s)
                    t[i] -= 1
                    nxt.add(tuple(sorted(t)))
        nxt -= out
        out |= nxt
        frontier = nxt
    return out


class ExactBoxSolver:
    """Game-tree search over every Breaker decision against d-greedy Maker.

    Breaker chooses whether to steal (subject to the schedule constraint),
    which set a stolen move claims, how to spread his eliminations, and also
    which set within d of the minimum a real Maker move takes, so a Maker win
    holds for every d-greedy Maker.
    """

    def __init__(self, q: int, z: int, d: int):
        self.q, self.z, self.d = q, z, d
        self.memo: dict[tuple, bool] = {}

    def maker_wins(self, sizes: tuple[int, ...], run: int = 0, first: bool = True) -> bool:
        key = (sizes, run, first)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._evaluate(sizes, run, first)
            self.memo[key] = hit
        return hit

    def _after_claim(self, rest: tuple[int, ...], run: int) -> bool:
        if not rest:
            return True
        for after in _eliminations(rest, self.q):
            if after[0] == 0:
                return False
            if not self.maker_wins(after, run, False):
                return False
        return True

    def _evaluate(self, sizes: tuple[int, ...], run: int, first: bool) -> bool:
        if not sizes:
            return True
        if sizes[0] == 0:
            return False
        claims = []
        top = sizes[0] + self.d
        for j, s in enumerate(sizes):
            if s > top:
                break
            if j == 0 or sizes[j - 1] != s:
                claims.append((j, 0))
        if not first and run < self.z - 1:
            for j, s in enumerate(sizes):
                if j == 0 or sizes[j - 1] != s:
                    claims.append((j, run + 1))
        for j, next_run in claims:
            if not self._after_claim(sizes[:j] + sizes[j + 1:], next_run):
                return False
        return True


def solve_boxgame_exact(instance: BoxInstance, budget: int = EXACT_ELEMENT_BUDGET) -> str:
    if instance.total > budget:
        raise ValueError(f"instance has {instance.total} elements, budget is {budget}")
    solver = ExactBoxSolver(instance.q, instance.z, instance.d)
    return MAKER_WON if solver.maker_wins(tuple(sorted(instance.sizes))) else BREAKER_WON


def from_coloring_endgame(coloring, U, S, q: int, z: int, d: int = 0) -> BoxInstance:
    """Box game induced by an endgame of the coloring game.

    ``coloring`` is the game state C' at the start of the endgame; the set
    of vertex v in U is A(v, C') minus its exception set S(v).
    """
    sizes = []
    for v in U:
        if not coloring.uncolored[v]:
            raise ValueError(f"vertex {v} is already colored at the start of the endgame")
        A = coloring.available_colors(v)
        Sv = frozenset(S.get(v, ())) if isinstance(S, dict) else frozenset(S[v])
        if not Sv <= A:
            raise ValueError(f"S({v}) is not contained in A({v}, C')")
        sizes.append(len(A - Sv))
    return BoxInstance(tuple(sizes), q=q, z=z, d=d)
