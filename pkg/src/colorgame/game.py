"""The coloring game: state machine, playout loop and traces.

Colors are the integers 1..k.  Per-color arrays are sized k + 1 and leave
slot 0 unused so that a color can index them directly.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np
from numba import njit

from colorgame.graph import Graph
from colorgame.seeding import make_rng

MAKER = "M"
BREAKER = "B"


class IllegalMoveError(RuntimeError):
    """A strategy proposed a move that is not legal in the current state."""

    def __init__(self, message: str, trace: GameTrace | None = None):
        super().__init__(message)
        self.trace = trace


class Outcome(str, enum.Enum):
    ONGOING = "ongoing"
    MAKER_WON = "maker_won"
    BREAKER_WON = "breaker_won"
    TRUNCATED = "truncated"


class Status(NamedTuple):
    outcome: Outcome
    witness: int | None = None


class MoveChoice(NamedTuple):
    vertex: int
    color: int
    # 1 or 2 for Maker's first/second type moves, 0 otherwise
    kind: int = 0


@njit(cache=True)
def _apply_kernel(indptr, indices, avail, acount, class_size, color_live, uncolored, unc_deg, v, c):
    witness = -1
    for p in range(indptr[v], indptr[v + 1]):
        w = indices[p]
        unc_deg[w] -= 1
        if uncolored[w] and avail[w, c]:
            avail[w, c] = False
            acount[w] -= 1
            color_live[c] -= 1
            if acount[w] == 0 and (witness == -1 or w < witness):
                witness = w
    uncolored[v] = False
    for j in range(avail.shape[1]):
        if avail[v, j]:
            color_live[j] -= 1
    class_size[c] += 1
    return witness


@njit(cache=True)
def _snapshot_kernel(class_size, color_live, acount, uncolored):
    level = -1
    for c in range(1, class_size.size):
        if color_live[c] > 0 and (level == -1 or class_size[c] < level):
            level = class_size[c]
    min_a = -1
    for w in range(acount.size):
        if uncolored[w] and (min_a == -1 or acount[w] < min_a):
            min_a = acount[w]
    return level, min_a


class GameState:
    """A graph with a partial proper coloring and incremental availability.

    ``avail[v]`` holds A(v, C) as a boolean row for every uncolored v, and
    ``acount[v]`` its size a(v, C).  ``color_live[i]`` counts uncolored
    vertices where color i is still available; color i is active iff that
    count is positive.  Rows of ``avail`` for colored vertices are frozen at
    the moment the vertex was colored and carry no meaning afterwards.
    """

    def __init__(self, graph: Graph, k: int):
        if k < 1:
            raise ValueError("k must be at least 1")
        n = graph.n
        self.graph = graph
        self.k = k
        self.color_of = np.zeros(n, dtype=np.int32)
        self.avail = np.ones((n, k + 1), dtype=np.bool_)
        self.avail[:, 0] = False
        self.acount = np.full(n, k, dtype=np.int32)
        self.class_size = np.zeros(k + 1, dtype=np.int64)
        self.color_live = np.full(k + 1, n, dtype=np.int64)
        self.color_live[0] = 0
        self.uncolored = np.ones(n, dtype=np.bool_)
        self.unc_deg = graph.degrees.astype(np.int32)
        self.n_uncolored = n
        self.t = 1
        self.maker_moves = 0
        self.last_move: tuple[str, int, int] | None = None
        self.witness: int | None = None

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def whose_turn(self) -> str:
        return MAKER if self.t % 2 == 1 else BREAKER

    def copy(self) -> GameState:
        other = object.__new__(GameState)
        other.__dict__.update(self.__dict__)
        for name in ("color_of", "avail", "acount", "class_size", "color_live", "uncolored", "unc_deg"):
            setattr(other, name, getattr(self, name).copy())
        return other

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise IndexError(f"vertex {v} out of range [0, {self.n})")
        if not self.uncolored[v]:
            raise ValueError(f"vertex {v} is already colored")

    def available_colors(self, v: int) -> frozenset[int]:
        self._check_vertex(v)
        return frozenset(np.flatnonzero(self.avail[v]).tolist())

    def a(self, v: int) -> int:
        self._check_vertex(v)
        return int(self.acount[v])

    def is_legal(self, v: int, c: int) -> bool:
        return 0 <= v < self.n and bool(self.uncolored[v]) and 1 <= c <= self.k and bool(self.avail[v, c])

    def apply_move(self, v: int, c: int) -> GameState:
        """Color ``v`` with ``c`` in place and return the state.

        Raises :class:`IllegalMoveError` when c is not in A(v, C).
        """
        if not self.is_legal(v, c):
            raise IllegalMoveError(f"illegal move: color {c} on vertex {v} at t={self.t}")
        player = self.whose_turn
        g = self.graph
        w = _apply_kernel(g.indptr, g.indices, self.avail, self.acount, self.class_size,
                          self.color_live, self.uncolored, self.unc_deg, v, c)
        self.color_of[v] = c
        self.n_uncolored -= 1
        if player == MAKER:
            self.maker_moves += 1
        self.t += 1
        self.last_move = (player, v, c)
        if w >= 0 and (self.witness is None or w < self.witness):
            self.witness = int(w)
        return self

    def active_colors(self) -> frozenset[int]:
        return frozenset(np.flatnonzero(self.color_live > 0).tolist())

    def level(self) -> int | None:
        """Minimum class size over active colors; None when no color is active."""
        level, _ = _snapshot_kernel(self.class_size, self.color_live, self.acount, self.uncolored)
        return None if level < 0 else int(level)

    def min_avail(self) -> int | None:
        _, min_a = _snapshot_kernel(self.class_size, self.color_live, self.acount, self.uncolored)
        return None if min_a < 0 else int(min_a)

    def status(self) -> Status:
        if self.n_uncolored == 0:
            return Status(Outcome.MAKER_WON)
        # an uncolored vertex can only reach a = 0 through a move, and apply_move
        # records the smallest such vertex; a fresh scan keeps this honest for
        # states assembled by hand
        dead = np.flatnonzero(self.uncolored & (self.acount == 0))
        if dead.size:
            return Status(Outcome.BREAKER_WON, int(dead[0]))
        return Status(Outcome.ONGOING)

    def classes(self) -> list[frozenset[int]]:
        return [frozenset(np.flatnonzero(self.color_of == c).tolist()) for c in range(1, self.k + 1)]


def available_colors(state: GameState, v: int) -> frozenset[int]:
    return state.available_colors(v)


def apply_move(state: GameState, v: int, c: int) -> GameState:
    return state.apply_move(v, c)


def level(state: GameState) -> int | None:
    return state.level()


def active_colors(state: GameState) -> frozenset[int]:
    return state.active_colors()


def game_status(state: GameState) -> Status:
    return state.status()


def state_from_coloring(graph: Graph, k: int, moves) -> GameState:
    """Replay ``moves`` (pairs or triples ending in vertex, color) from the empty coloring."""
    state = GameState(graph, k)
    for mv in moves:
        v, c = (mv.v, mv.c) if isinstance(mv, Move) else mv
        state.apply_move(v, c)
    return state


class Move(NamedTuple):
    t: int
    player: str
    v: int
    c: int
    kind: int = 0


Strategy = Callable[[GameState, np.random.Generator], MoveChoice]


@dataclass
class GameTrace:
    params: dict
    moves: list[Move] = field(default_factory=list)
    levels: list[int | None] = field(default_factory=list)
    min_avails: list[int | None] = field(default_factory=list)
    outcome: Outcome = Outcome.ONGOING
    witness: int | None = None

    @property
    def k(self) -> int:
        return self.params["k"]

    def replay(self, graph: Graph) -> tuple[GameState, list[int | None], list[int | None]]:
        state = GameState(graph, self.k)
        levels, mins = [], []
        for mv in self.moves:
            state.apply_move(mv.v, mv.c)
            levels.append(state.level())
            mins.append(state.min_avail())
        return state, levels, mins

    def to_jsonl(self) -> str:
        lines = [json.dumps({"type": "header", **self.params}, sort_keys=True)]
        for mv, lv, ma in zip(self.moves, self.levels, self.min_avails):
            lines.append(json.dumps({"t": mv.t, "player": mv.player, "v": mv.v, "c": mv.c,
                                     "kind": mv.kind, "level": lv, "min_a": ma}))
        lines.append(json.dumps({"type": "footer", "outcome": self.outcome.value, "witness": self.witness,
                                 "moves": len(self.moves)}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> GameTrace:
        rows = [json.loads(line) for line in text.splitlines() if line.strip()]
        if not rows or rows[0].get("type") != "header" or rows[-1].get("type") != "footer":
            raise ValueError("trace must start with a header and end with a footer")
        params = {k: v for k, v in rows[0].items() if k != "type"}
        trace = cls(params)
        for row in rows[1:-1]:
            trace.moves.append(Move(row["t"], row["player"], row["v"], row["c"], row.get("kind", 0)))
            trace.levels.append(row.get("level"))
            trace.min_avails.append(row.get("min_a"))
        trace.outcome = Outcome(rows[-1]["outcome"])
        trace.witness = rows[-1]["witness"]
        return trace


def play_game(graph: Graph, k: int, maker: Strategy, breaker: Strategy, seed: int,
              max_moves: int | None = None, params: dict | None = None) -> GameTrace:
    """Play one game, Maker first, and return its trace.

    The game ends as soon as every vertex is colored (Maker wins) or some
    uncolored vertex has no available color (Breaker wins).  With
    ``max_moves`` the playout stops early with outcome TRUNCATED.
    """
    state = GameState(graph, k)
    rng = make_rng(seed)
    header = {"n": graph.n, "k": k, "seed": int(seed),
              "maker": getattr(maker, "name", repr(maker)),
              "breaker": getattr(breaker, "name", repr(breaker))}
    if params:
        header.update(params)
    trace = GameTrace(header)
    status = state.status()
    while status.outcome is Outcome.ONGOING:
        if max_moves is not None and len(trace.moves) >= max_moves:
            trace.outcome = Outcome.TRUNCATED
            return trace
        player = state.whose_turn
        choice = (maker if player == MAKER else breaker)(state, rng)
        t = state.t
        try:
            state.apply_move(int(choice.vertex), int(choice.color))
        except IllegalMoveError as exc:
            raise IllegalMoveError(f"{player} strategy {header[('maker' if player == MAKER else 'breaker')]}: {exc}",
                                   trace) from None
        trace.moves.append(Move(t, player, int(choice.vertex), int(choice.color), int(choice.kind)))
        lv, ma = _snapshot_kernel(state.class_size, state.color_live, state.acount, state.uncolored)
        trace.levels.append(None if lv < 0 else int(lv))
        trace.min_avails.append(None if ma < 0 else int(ma))
        if state.witness is not None:
            status = Status(Outcome.BREAKER_WON, state.witness)
        elif state.n_uncolored == 0:
            status = Status(Outcome.MAKER_WON)
    trace.outcome = status.outcome
    trace.witness = status.witness
    return trace
