import math

import pytest

from colorgame.analysis.endgame import FIRST_TYPE, endgame_decomposition, maker_period
from colorgame.analysis.formulas import rate_functions
from colorgame.analysis.monitors import trace_graph
from colorgame.game import MAKER, GameState, GameTrace
from test_monitors import playout

ALPHA = 3


@pytest.fixture(scope="module")
def lost():
    return [playout(300, 0.5, k, "paper:N=4", "minavail", i=i) for k in (30, 60) for i in range(3)]


def a_before_moves(trace):
    g, _, _ = trace_graph(trace)
    st = GameState(g, trace.k)
    out = []
    for mv in trace.moves:
        out.append(st.a(mv.v))
        st.apply_move(mv.v, mv.c)
    return out


def test_t_prime_is_last_qualifying_move(lost):
    for tr in lost:
        rep = endgame_decomposition(tr, ALPHA)
        assert rep.t == len(tr.moves) + 1 and rep.v0 == tr.witness
        half = rep.beta / 2
        a = a_before_moves(tr)
        ok = [s for s in range(1, rep.t)
              if tr.moves[s - 1].player == MAKER and tr.moves[s - 1].kind == FIRST_TYPE and a[s - 1] >= half]
        assert rep.t_prime == max(ok)
        assert rep.U == [mv.v for mv in tr.moves[rep.t_prime - 1:]] + [rep.v0]
        assert rep.U_bound == pytest.approx(2 * 4 * rep.gamma + 1)
        assert rep.U_size_ok == (len(rep.U) <= rep.U_bound)


def test_phase_choice(lost):
    for tr in lost:
        rep = endgame_decomposition(tr, ALPHA)
        r = rate_functions(300, 0.5, ALPHA, rep.h)
        lb = r.logb_np
        xi = (1 - 1 / ALPHA) / 10
        assert rep.h * lb > rep.level + xi * lb - 1e-9
        if rep.j > 1:
            assert (rep.h - xi) * lb <= rep.level + xi * lb + 1e-9
        assert rep.q == max(1, math.floor(r.q))
        assert rep.box_z == 8 and rep.box_d == rep.q


def test_failures_are_named(lost):
    names = {endgame_decomposition(tr, ALPHA).first_failure for tr in lost}
    assert None not in names
    assert all(isinstance(n, str) and n for n in names)


def test_higher_phase_reaches_arrangement(lost):
    reps = [endgame_decomposition(tr, ALPHA) for tr in lost]
    later = [r for r in reps if r.j > 1]
    assert later
    for r in later:
        assert r.final_step_ok is not None and r.direct_ok is None
        assert r.cond_iii is not None and r.box_sizes


def test_margin_implies_criterion(lost):
    for tr in lost:
        rep = endgame_decomposition(tr, ALPHA)
        if rep.margin_ok:
            assert rep.criterion


def test_pure(lost):
    tr = lost[0]
    assert endgame_decomposition(tr, ALPHA).to_dict() == endgame_decomposition(tr, ALPHA).to_dict()


def test_requires_breaker_win_or_cut():
    tr = playout(300, 0.5, 80, "paper:N=160", "colorhog")
    assert tr.outcome.value == "maker_won"
    with pytest.raises(ValueError):
        endgame_decomposition(tr, ALPHA)
    with pytest.raises(ValueError):
        endgame_decomposition(tr, ALPHA, cut=len(tr.moves) + 5)


def test_cut_and_padding():
    tr = playout(300, 0.5, 80, "paper:N=160", "colorhog")
    early = endgame_decomposition(tr, ALPHA, cut=50)
    assert early.t == 50 and not early.padded and early.v0 is not None
    late = endgame_decomposition(tr, ALPHA, cut=295)
    assert late.padded
    D = math.ceil(150 ** (1 - 4 * (1 - 1 / ALPHA) / 10))
    assert late.t_hat == 300 - D
    assert late.level == tr.levels[300 - D - 1]


def test_maker_period():
    assert maker_period(GameTrace(params={"k": 1, "maker": "paper:N=240"}), 7) == 240
    assert maker_period(GameTrace(params={"k": 1, "maker": "greedy"}), 7) == 1
    assert maker_period(GameTrace(params={"k": 1}), 7) == 7
