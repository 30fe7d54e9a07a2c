"""Decompose a lost game into the endgame box game that should have saved Maker.

Given a trace in which Breaker wins at time t (t - 1 vertices colored, v0
stuck), pick the phase h(C), go back to the last first-type Maker move t'
made on a vertex with at least beta(h)/2 colors, and check whether the
endgame on U = {vertices colored in [t', t-1]} + {v0} is a box game that a
greedy Maker wins.
"""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field

from colorgame.analysis.formulas import constants, logb_np, rate_functions
from colorgame.analysis.monitors import trace_graph
from colorgame.arranger import ArrangementInput, color_arranging, verify_arrangement
from colorgame.boxgame import criterion_holds, f_bound, from_coloring_endgame, harmonic
from colorgame.game import MAKER, GameState, GameTrace, Outcome
from colorgame.graph import Graph

FIRST_TYPE = 1


@dataclass
class DecompositionReport:
    t: int
    v0: int | None
    padded: bool = False
    level: int | None = None
    h: float | None = None
    j: int | None = None
    beta: float | None = None
    gamma: float | None = None
    q_real: float | None = None
    q: int | None = None
    q_below_one: bool | None = None
    t_prime: int | None = None
    U: list[int] = field(default_factory=list)
    U_bound: float | None = None
    cond_i: bool | None = None
    cond_ii: bool | None = None
    min_a_U: int | None = None
    U_size_ok: bool | None = None
    level_at_t_prime: int | None = None
    level_target: float | None = None
    final_step_ok: bool | None = None
    direct_ok: bool | None = None
    cond_iii: bool | None = None
    max_s: int | None = None
    box_sizes: list[int] = field(default_factory=list)
    box_z: int | None = None
    box_d: int | None = None
    margin_ok: bool | None = None
    criterion: bool | None = None
    criterion_witness: int | None = None
    t_hat: int | None = None
    t_star: int | None = None
    first_failure: str | None = None
    notes: list[str] = field(default_factory=list)

    def fail(self, name: str) -> None:
        if self.first_failure is None:
            self.first_failure = name

    def to_dict(self) -> dict:
        return asdict(self)


def maker_period(trace: GameTrace, default: int) -> int:
    """First-type period N of the trace's Maker, read from its descriptor."""
    desc = str(trace.params.get("maker", ""))
    if desc == "greedy":
        return 1
    m = re.search(r"\bN=(\d+)", desc)
    return int(m.group(1)) if m else default


def _state_after(graph: Graph, trace: GameTrace, moves: int) -> GameState:
    state = GameState(graph, trace.k)
    for mv in trace.moves[:moves]:
        state.apply_move(mv.v, mv.c)
    return state


def endgame_decomposition(trace: GameTrace, alpha, cut: int | None = None,
                          graph: Graph | None = None) -> DecompositionReport:
    """Build the endgame decomposition of ``trace``.

    ``cut`` designates the time t (so t - 1 moves are taken into account);
    without it the trace must end in a Breaker win.  Conditions are checked
    in order and the first one that fails is named in ``first_failure``.
    """
    if cut is None:
        if trace.outcome is not Outcome.BREAKER_WON:
            raise ValueError("trace does not end in a Breaker win and no cut time was given")
        t = len(trace.moves) + 1
    else:
        if not 1 <= cut <= len(trace.moves) + 1:
            raise ValueError(f"cut time {cut} outside 1..{len(trace.moves) + 1}")
        t = cut
    if graph is None:
        graph, n, p = trace_graph(trace)
    else:
        n, p = graph.n, float(trace.params["gnp"][1])
    c = constants(alpha)
    xi = float(c.xi)
    lb = logb_np(n, p)
    N = maker_period(trace, c.N)
    D = math.ceil((n * p) ** (1 - 4 * xi))

    # replay to time t, remembering a(v) for each move and the level after each step
    a_before: list[int] = []
    levels: list[int | None] = []
    state = GameState(graph, trace.k)
    for mv in trace.moves[:t - 1]:
        a_before.append(state.a(mv.v))
        state.apply_move(mv.v, mv.c)
        levels.append(state.level())
    C = state

    if cut is None:
        v0 = trace.witness
    else:
        unc = [v for v in range(n) if C.uncolored[v]]
        v0 = min(unc, key=lambda v: (C.a(v), v)) if unc else None
    report = DecompositionReport(t=t, v0=v0)
    if v0 is None:
        report.fail("no uncolored vertex at the cut time")
        return report

    if C.n_uncolored >= D:
        lv = C.level()
    else:
        report.padded = True
        lv = levels[n - D - 1] if n - D >= 1 else 0
    report.level = lv
    if lv is None:
        report.fail("level undefined: no active color")
        return report
    hs = [h for h in c.H if float(h) * lb > lv + xi * lb]
    if not hs:
        report.fail("h(C) undefined: level exceeds every phase")
        return report
    h = hs[0]
    report.h = float(h)
    report.j = c.H.index(h) + 1
    rates = rate_functions(n, p, alpha, float(h))
    report.beta, report.gamma, report.q_real = rates.beta, rates.gamma, rates.q
    q = max(1, math.floor(rates.q))
    report.q = q
    report.q_below_one = rates.q < 1
    if report.q_below_one:
        report.notes.append(f"q(h)={rates.q:.3g} < 1; Breaker power rounded up to 1")

    D_hat = n - D
    report.t_hat = min(t, D_hat)
    target = (float(h) - 4 * xi) * lb
    report.level_target = target
    report.t_star = next((s + 1 for s, x in enumerate(levels) if x is not None and x >= target), None)
    if report.t_star is None and target <= 0:
        report.t_star = 0

    half = rates.beta / 2
    t_prime = None
    for s in range(t - 1, 0, -1):
        mv = trace.moves[s - 1]
        if mv.player == MAKER and mv.kind == FIRST_TYPE and a_before[s - 1] >= half:
            t_prime = s
            break
    report.t_prime = t_prime
    report.cond_i = t_prime is not None
    if t_prime is None:
        report.fail("(i) no first-type Maker move with a(v) >= beta/2 before t")
        return report

    U = [trace.moves[s - 1].v for s in range(t_prime, t)] + [v0]
    report.U = U
    report.U_bound = 2 * N * rates.gamma + 1
    Cp = _state_after(graph, trace, t_prime - 1)
    a_U = [Cp.a(v) for v in U]
    report.min_a_U = min(a_U)
    report.cond_ii = report.min_a_U >= half
    if not report.cond_ii:
        report.fail("(ii) some vertex of U has a(v, C') < beta/2")
    report.U_size_ok = len(U) <= report.U_bound
    if not report.U_size_ok:
        report.fail("|U| <= 2N gamma(h) + 1")
    report.level_at_t_prime = Cp.level()
    if report.j == 1:
        # first phase: no vertex can lose beta(h_1)/2 colors within the endgame
        report.direct_ok = half > t - t_prime + 1
        if not report.direct_ok:
            report.fail("first phase: beta(h_1)/2 <= t - t' + 1")
    else:
        report.final_step_ok = report.level_at_t_prime is not None and report.level_at_t_prime >= target
        if not report.final_step_ok:
            report.fail("active classes at t' smaller than (h - 4 xi) log_b np")

    inp = ArrangementInput(U=U, avail={v: Cp.available_colors(v) for v in U}, q=q)
    arr = color_arranging(inp)
    check = verify_arrangement(inp, arr)
    report.max_s = arr.max_s
    report.cond_iii = check.residual_ok and check.size_ok and check.subset_ok
    if not report.cond_iii:
        report.fail("(iii) ColorArranging left some |S(v)| > q")

    z = 2 * N
    box = from_coloring_endgame(Cp, U, arr.S, q=q, z=z, d=q)
    report.box_sizes = list(box.sizes)
    report.box_z, report.box_d = z, q
    # the per-set margin that makes the criterion automatic
    report.margin_ok = half - q > (2 * N + 1) * q * float(1 + harmonic(len(U) - 1))
    res = criterion_holds(box.sizes, q, q, z)
    report.criterion = res.holds
    report.criterion_witness = res.witness
    if not res.holds:
        report.notes.append(f"criterion fails at m={res.witness}: f={float(f_bound(res.witness, q, q, z)):.1f}")
        report.fail("box-game criterion")
    return report
