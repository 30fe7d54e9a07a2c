"""Per-step monitors for the high-probability statements, run over a game trace.

Each monitor records frequencies and violation contexts.  Nothing here
raises on a violation: at desk scale these are observations, not bugs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from colorgame.analysis.formulas import constants, logb_np, rate_functions
from colorgame.game import GameState, GameTrace
from colorgame.graph import Graph, gen_gnp


class MissingMetadataError(ValueError):
    pass


def trace_graph(trace: GameTrace) -> tuple[Graph, int, float]:
    """Regenerate the G(n, p) graph a trace was played on from its header."""
    gnp = trace.params.get("gnp")
    if not gnp or len(gnp) != 3:
        raise MissingMetadataError("trace header lacks 'gnp': [n, p, graph_seed]")
    n, p, gseed = int(gnp[0]), float(gnp[1]), int(gnp[2])
    return gen_gnp(n, p, gseed), n, p


@dataclass
class Violation:
    monitor: str
    t: int
    context: dict


@dataclass
class MonitorReport:
    alpha: float
    n: int
    p: float
    k: int
    gate: float
    level_threshold: float
    near_margin: float
    near_threshold_8: float
    near_threshold_10: float
    elim_size_threshold: float
    elim_budget: int
    H: list[float]
    gamma: list[float]
    half_beta: list[float]
    times: list[int] = field(default_factory=list)
    levels: list[int] = field(default_factory=list)
    near_counts: list[int] = field(default_factory=list)
    eliminated: list[int] = field(default_factory=list)
    dangerous: list[list[int | None]] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)

    def flagged(self, monitor: str) -> list[Violation]:
        return [v for v in self.violations if v.monitor == monitor]

    def summary(self) -> dict:
        steps = len(self.times)
        below8 = sum(1 for c in self.near_counts if c < self.near_threshold_8)
        below10 = sum(1 for c in self.near_counts if c < self.near_threshold_10)
        return {
            "steps": steps,
            "max_level": max(self.levels, default=0),
            "level_threshold": self.level_threshold,
            "level_violations": len(self.flagged("level")),
            "min_near_count": min(self.near_counts, default=0),
            "near_below_xi8": below8,
            "near_below_xi10": below10,
            # xi*k/8 is the larger threshold, so it binds whenever anything fails
            "near_binding": "xi*k/8" if below8 else "none",
            "eliminated_final": self.eliminated[-1] if self.eliminated else 0,
            "elim_budget": self.elim_budget,
            "elim_violations": len(self.flagged("eliminated")),
            "dangerous_checked": sum(1 for row in self.dangerous for x in row if x is not None),
            "dangerous_violations": len(self.flagged("dangerous")),
        }

    def to_dict(self) -> dict:
        d = asdict(self)
        d["summary"] = self.summary()
        return d


def trace_monitors(trace: GameTrace, alpha, graph: Graph | None = None) -> MonitorReport:
    """Replay ``trace`` and evaluate the four monitors at every gated step.

    A step t (t = 0 is the empty coloring) is monitored while at least
    (np)^(1 - 4 xi) vertices are uncolored.  The graph is regenerated from
    the trace header unless passed in.
    """
    if graph is None:
        graph, n, p = trace_graph(trace)
    else:
        gnp = trace.params.get("gnp")
        if not gnp:
            raise MissingMetadataError("trace header lacks 'gnp': [n, p, graph_seed]")
        n, p = graph.n, float(gnp[1])
    c = constants(alpha)
    xi = float(c.xi)
    lb = logb_np(n, p)
    k = trace.k
    gate = (n * p) ** (1 - 4 * xi)
    rates = [rate_functions(n, p, alpha, float(h)) for h in c.H]
    report = MonitorReport(
        alpha=float(alpha), n=n, p=p, k=k, gate=gate,
        level_threshold=(1 / float(c.alpha) + xi) * lb,
        near_margin=xi * lb,
        near_threshold_8=xi * k / 8,
        near_threshold_10=xi * k / 10,
        elim_size_threshold=(1 / float(c.alpha) + xi) * lb,
        elim_budget=math.ceil(gate),
        H=[float(h) for h in c.H],
        gamma=[r.gamma for r in rates],
        half_beta=[r.beta / 2 for r in rates],
    )
    half_beta = np.array(report.half_beta)
    level_cap = np.array([(float(h) - xi) * lb for h in c.H])

    state = GameState(graph, k)
    active = state.color_live > 0
    eliminated = 0
    for step in range(len(trace.moves) + 1):
        if step:
            mv = trace.moves[step - 1]
            state.apply_move(mv.v, mv.c)
            now = state.color_live > 0
            gone = np.flatnonzero(active & ~now)
            if gone.size:
                small = state.class_size[gone] <= report.elim_size_threshold
                eliminated += int(small.sum())
            active = now
        if state.n_uncolored < gate:
            break
        lv = state.level()
        if lv is None:
            break
        near = int(np.count_nonzero(active & (state.class_size <= lv + report.near_margin)))
        acounts = np.sort(state.acount[state.uncolored])
        below = np.searchsorted(acounts, half_beta, side="left")
        pre = (lv <= level_cap) & (near >= report.near_threshold_10)
        danger = [int(b) if ok else None for b, ok in zip(below, pre)]

        report.times.append(step)
        report.levels.append(lv)
        report.near_counts.append(near)
        report.eliminated.append(eliminated)
        report.dangerous.append(danger)

        if lv >= report.level_threshold:
            report.violations.append(Violation("level", step, {
                "level": lv, "threshold": report.level_threshold, "uncolored": state.n_uncolored}))
        if eliminated > report.elim_budget:
            report.violations.append(Violation("eliminated", step, {
                "eliminated": eliminated, "budget": report.elim_budget, "uncolored": state.n_uncolored}))
        for j, d in enumerate(danger):
            if d is not None and d >= report.gamma[j]:
                report.violations.append(Violation("dangerous", step, {
                    "h": report.H[j], "count": d, "gamma": report.gamma[j], "level": lv, "near": near}))
    return report
