"""Maker and Breaker decision procedures.

Every strategy is a callable ``strategy(state, rng) -> MoveChoice`` and a
deterministic function of (state, rng, config).  Ties are always broken
toward the smallest vertex index, then the smallest color.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from colorgame.game import BREAKER, MAKER, GameState, MoveChoice
from colorgame.seeding import make_rng

INF = np.iinfo(np.int64).max


class NoLegalMoveError(RuntimeError):
    pass


@njit(cache=True)
def _min_avail_vertex(acount, uncolored):
    best = -1
    for w in range(acount.size):
        if uncolored[w] and (best == -1 or acount[w] < acount[best]):
            best = w
    return best


@njit(cache=True)
def _smallest_class_color(avail_row, class_size):
    best = -1
    for c in range(1, avail_row.size):
        if avail_row[c] and (best == -1 or class_size[c] < class_size[best]):
            best = c
    return best


@njit(cache=True)
def _first_available_color(avail_row):
    for c in range(1, avail_row.size):
        if avail_row[c]:
            return c
    return -1


@njit(cache=True)
def _smallest_active_color(class_size, color_live):
    best = -1
    for c in range(1, class_size.size):
        if color_live[c] > 0 and (best == -1 or class_size[c] < class_size[best]):
            best = c
    return best


@njit(cache=True)
def _min_avail_vertex_with(avail, acount, uncolored, c):
    best = -1
    for w in range(acount.size):
        if uncolored[w] and avail[w, c] and (best == -1 or acount[w] < acount[best]):
            best = w
    return best


@njit(cache=True)
def _first_vertex_with(avail, uncolored, c):
    for w in range(uncolored.size):
        if uncolored[w] and avail[w, c]:
            return w
    return -1


@njit(cache=True)
def _pick_legal(avail, acount, uncolored, r):
    # the r-th legal (vertex, color) pair in row-major order
    for w in range(acount.size):
        if not uncolored[w]:
            continue
        if r < acount[w]:
            for c in range(1, avail.shape[1]):
                if avail[w, c]:
                    if r == 0:
                        return w, c
                    r -= 1
        else:
            r -= acount[w]
    return -1, -1


@njit(cache=True)
def _colorhog_kernel(avail, uncolored, unc_deg, class_size, color_live):
    best_c = -1
    for c in range(1, class_size.size):
        if color_live[c] > 0 and (best_c == -1 or class_size[c] > class_size[best_c]):
            best_c = c
    if best_c == -1:
        return -1, -1
    best_w = -1
    for w in range(uncolored.size):
        if uncolored[w] and avail[w, best_c] and (best_w == -1 or unc_deg[w] > unc_deg[best_w]):
            best_w = w
    return best_w, best_c


@njit(cache=True)
def _score_candidates(adj, avail, acount, uncolored, cand_x, cand_c):
    # post-move minimum of a(w) over uncolored w != x, and the number of
    # vertices attaining it.  Only vertices with a(w) <= s + 1 can attain the
    # post-move minimum, where s is the second smallest current value.
    n = acount.size
    m1 = INF
    m2 = INF
    for w in range(n):
        if uncolored[w]:
            a = acount[w]
            if a < m1:
                m2 = m1
                m1 = a
            elif a < m2:
                m2 = a
    bound = m2 + 1 if m2 < INF else m1 + 1
    low = np.empty(n, dtype=np.int64)
    nlow = 0
    for w in range(n):
        if uncolored[w] and acount[w] <= bound:
            low[nlow] = w
            nlow += 1
    best = -1
    best_min = INF
    best_cnt = -1
    for j in range(cand_x.size):
        x = cand_x[j]
        c = cand_c[j]
        mn = INF
        cnt = 0
        for idx in range(nlow):
            w = low[idx]
            if w == x:
                continue
            val = acount[w]
            if adj[x, w] and avail[w, c]:
                val -= 1
            if val < mn:
                mn = val
                cnt = 1
            elif val == mn:
                cnt += 1
        if (mn < best_min or (mn == best_min and cnt > best_cnt)
                or (mn == best_min and cnt == best_cnt
                    and (x < cand_x[best] or (x == cand_x[best] and c < cand_c[best])))):
            best = j
            best_min = mn
            best_cnt = cnt
    return best


@njit(cache=True)
def _pick_legal_many(avail, acount, uncolored, ranks):
    # legal pairs at the given sorted ranks of the row-major enumeration
    xs = np.empty(ranks.size, dtype=np.int64)
    cs = np.empty(ranks.size, dtype=np.int64)
    j = 0
    base = 0
    for w in range(acount.size):
        if j == ranks.size:
            break
        if not uncolored[w]:
            continue
        top = base + acount[w]
        if ranks[j] < top:
            pos = base
            for c in range(1, avail.shape[1]):
                if avail[w, c]:
                    while j < ranks.size and ranks[j] == pos:
                        xs[j] = w
                        cs[j] = c
                        j += 1
                    pos += 1
        base = top
    return xs[:j], cs[:j]


def _legal_total(state: GameState) -> int:
    return int(state.acount[state.uncolored].sum())


def _no_move(state: GameState) -> NoLegalMoveError:
    return NoLegalMoveError(f"no legal move at t={state.t}")


@dataclass(frozen=True)
class PhasedMakerConfig:
    """Parameters of Maker's two-type strategy.

    ``N`` is the first-type period: Maker's m-th move is of the first type
    iff m is divisible by N.  ``first_color`` picks the color of a
    first-type move ("smallest_class" or "smallest_index"), and
    ``second_vertex`` the vertex of a second-type move ("min_avail" or
    "smallest_index").
    """

    N: int = 1
    first_color: str = "smallest_class"
    second_vertex: str = "min_avail"

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if self.first_color not in ("smallest_class", "smallest_index"):
            raise ValueError(f"unknown first_color rule {self.first_color!r}")
        if self.second_vertex not in ("min_avail", "smallest_index"):
            raise ValueError(f"unknown second_vertex rule {self.second_vertex!r}")


def first_type_move(state: GameState, config: PhasedMakerConfig) -> MoveChoice:
    v = _min_avail_vertex(state.acount, state.uncolored)
    if v < 0 or state.acount[v] == 0:
        raise _no_move(state)
    if config.first_color == "smallest_class":
        c = _smallest_class_color(state.avail[v], state.class_size)
    else:
        c = _first_available_color(state.avail[v])
    return MoveChoice(int(v), int(c), 1)


def second_type_move(state: GameState, config: PhasedMakerConfig) -> MoveChoice:
    c = _smallest_active_color(state.class_size, state.color_live)
    if c < 0:
        raise _no_move(state)
    if config.second_vertex == "min_avail":
        v = _min_avail_vertex_with(state.avail, state.acount, state.uncolored, c)
    else:
        v = _first_vertex_with(state.avail, state.uncolored, c)
    return MoveChoice(int(v), int(c), 2)


def maker_phased(state: GameState, config: PhasedMakerConfig) -> MoveChoice:
    m = state.maker_moves + 1
    if m % config.N == 0:
        return first_type_move(state, config)
    return second_type_move(state, config)


def maker_greedy(state: GameState) -> MoveChoice:
    return first_type_move(state, PhasedMakerConfig(N=1))


def breaker_random(state: GameState, rng: np.random.Generator) -> MoveChoice:
    total = _legal_total(state)
    if total == 0:
        raise _no_move(state)
    r = int(rng.integers(total))
    v, c = _pick_legal(state.avail, state.acount, state.uncolored, r)
    return MoveChoice(int(v), int(c))


def breaker_colorhog(state: GameState) -> MoveChoice:
    v, c = _colorhog_kernel(state.avail, state.uncolored, state.unc_deg, state.class_size, state.color_live)
    if v < 0:
        raise _no_move(state)
    return MoveChoice(int(v), int(c))


MINAVAIL_CAP = 256


def breaker_minavail(state: GameState, rng: np.random.Generator, cap: int = MINAVAIL_CAP) -> MoveChoice:
    """One-ply lookahead that drives the minimum availability down.

    Candidates are all legal moves when there are at most ``cap`` of them,
    otherwise ``cap`` ranks drawn uniformly (duplicates collapsed).  Each
    candidate is scored by the post-move minimum of a(w) over the remaining
    uncolored vertices; lower is better, ties go to the move that leaves
    more vertices at that minimum.
    """
    total = _legal_total(state)
    if total == 0:
        raise _no_move(state)
    if total <= cap:
        ranks = np.arange(total, dtype=np.int64)
    else:
        ranks = np.unique(rng.integers(total, size=cap))
    xs, cs = _pick_legal_many(state.avail, state.acount, state.uncolored, ranks)
    j = _score_candidates(state.graph.adj, state.avail, state.acount, state.uncolored, xs, cs)
    return MoveChoice(int(xs[j]), int(cs[j]))


def breaker_matching(state: GameState, rng: np.random.Generator, matching: dict[int, int] | None) -> MoveChoice:
    """Answer Maker's (v, i) with (partner of v, i) whenever that is legal."""
    if matching is None:
        raise ValueError("matching breaker needs a matching table")
    if state.last_move is not None and state.last_move[0] == MAKER:
        _, v, c = state.last_move
        w = matching.get(v)
        if w is not None and state.uncolored[w] and state.avail[w, c]:
            return MoveChoice(int(w), int(c))
    return breaker_minavail(state, rng)


class _Named:
    name = ""

    def __repr__(self) -> str:
        return self.name


class PhasedMaker(_Named):
    def __init__(self, config: PhasedMakerConfig):
        self.config = config
        extras = []
        if config.first_color != "smallest_class":
            extras.append(f"first_color={config.first_color}")
        if config.second_vertex != "min_avail":
            extras.append(f"second_vertex={config.second_vertex}")
        self.name = ",".join([f"paper:N={config.N}", *extras])

    def __call__(self, state, rng):
        return maker_phased(state, self.config)


class GreedyMaker(_Named):
    name = "greedy"

    def __call__(self, state, rng):
        return maker_greedy(state)


class RandomBreaker(_Named):
    name = "random"

    def __call__(self, state, rng):
        return breaker_random(state, rng)


class ColorHogBreaker(_Named):
    name = "colorhog"

    def __call__(self, state, rng):
        return breaker_colorhog(state)


class MinAvailBreaker(_Named):
    name = "minavail"

    def __call__(self, state, rng):
        return breaker_minavail(state, rng)


class MatchingBreaker(_Named):
    name = "matching"

    def __init__(self, matching: dict[int, int] | None):
        self.matching = matching

    def __call__(self, state, rng):
        return breaker_matching(state, rng, self.matching)


BREAKER_KINDS = ("random", "colorhog", "minavail", "matching")
MAKER_KINDS = ("paper", "greedy")


def breaker_move(kind: str, state: GameState, seed_or_rng) -> MoveChoice:
    rng = seed_or_rng if isinstance(seed_or_rng, np.random.Generator) else make_rng(seed_or_rng)
    if state.whose_turn != BREAKER:
        raise ValueError("it is not Breaker's turn")
    return parse_strategy(kind)(state, rng)


def parse_strategy(desc: str, matching: dict[int, int] | None = None):
    """Build a strategy from a descriptor such as ``paper:N=160`` or ``colorhog``."""
    name, _, arg = desc.strip().partition(":")
    name = name.lower()
    if name == "paper":
        kwargs = {}
        for item in filter(None, arg.split(",")):
            key, _, value = item.partition("=")
            key = key.strip()
            if key == "N":
                kwargs["N"] = int(value)
            elif key in ("first_color", "second_vertex"):
                kwargs[key] = value.strip()
            else:
                raise ValueError(f"unknown option for the phased Maker {key!r}")
        return PhasedMaker(PhasedMakerConfig(**kwargs))
    if arg:
        raise ValueError(f"strategy {name!r} takes no options")
    if name == "greedy":
        return GreedyMaker()
    if name == "random":
        return RandomBreaker()
    if name == "colorhog":
        return ColorHogBreaker()
    if name == "minavail":
        return MinAvailBreaker()
    if name == "matching":
        return MatchingBreaker(matching)
    raise ValueError(f"unknown strategy {desc!r}")
