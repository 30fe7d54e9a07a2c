import pytest

from colorgame.analysis.estimate import (PlayoutTask, RateRow, estimate_chi_g, game_seed, graph_seed,
                                         greedy_chromatic, run_tasks, significant_decreases, tasks_for,
                                         wilson_interval, win_rates, win_table)
from colorgame.graph import gen_gnp

POOL = ["random", "colorhog", "minavail"]


def test_empty_graph_needs_one_color():
    est = estimate_chi_g(12, 0.0, "paper:N=4", POOL, playouts=3, seed=0)
    assert est.k_star == 1 and est.anchors == {}


def test_complete_graph_needs_n_colors():
    est = estimate_chi_g(8, 1.0, "paper:N=4", POOL, playouts=3, seed=0)
    assert est.k_star == 8
    assert all(r.rate == 0.0 for r in est.rows if r.k < 8)


def test_estimate_deterministic_and_bracketed():
    a = estimate_chi_g(60, 0.3, "paper:N=8", ["random", "colorhog"], playouts=4, seed=5)
    b = estimate_chi_g(60, 0.3, "paper:N=8", ["random", "colorhog"], playouts=4, seed=5)
    assert a.k_star == b.k_star and a.rows == b.rows
    at = [r for r in a.rows if r.k == a.k_star]
    assert at and all(r.rate >= 0.95 for r in at)
    below = [r for r in a.rows if r.k == a.k_star - 1]
    if below:
        assert any(r.rate < 0.95 for r in below)
    assert set(a.anchors) == {"game", "chromatic"}


def test_playouts_must_be_positive():
    with pytest.raises(ValueError):
        estimate_chi_g(10, 0.5, "greedy", POOL, playouts=0, seed=0)
    with pytest.raises(ValueError):
        win_rates(10, 0.5, 3, "greedy", POOL, playouts=0, seed=0)


def test_wilson_reference_values():
    lo, hi = wilson_interval(95, 100)
    assert lo == pytest.approx(0.888249530768, abs=1e-9)
    assert hi == pytest.approx(0.978456320846, abs=1e-9)
    lo, hi = wilson_interval(0, 10)
    assert lo == 0.0 and hi == pytest.approx(0.277532799863, abs=1e-9)
    assert wilson_interval(10, 10)[1] == 1.0
    assert wilson_interval(0, 0) == (0.0, 1.0)


def test_seeds_independent_of_grid():
    t1 = tasks_for(50, 0.5, 10, "greedy", POOL, 3, seed=9)
    t2 = tasks_for(50, 0.5, 10, "greedy", ["colorhog"], 3, seed=9)
    hog1 = [t for t in t1 if t.breaker == "colorhog"]
    assert hog1 == t2
    assert len({t.graph_seed for t in t1}) == 3
    assert t1[0].graph_seed == graph_seed(9, 0) and t1[0].seed == game_seed(9, 10, "random", 0)


def test_parallel_matches_serial():
    tasks = [t for k in (8, 12) for t in tasks_for(80, 0.4, k, "paper:N=8", POOL, 3, seed=2)]
    assert run_tasks(tasks, 1) == run_tasks(tasks, 2)


def test_win_table_layout():
    rows = win_table(60, 0.3, [6, 10], "paper:N=8", POOL, 2, seed=1)
    assert [(r.k, r.breaker) for r in rows] == [(k, b) for k in (6, 10) for b in POOL]
    assert all(r.wins + r.losses == 2 for r in rows)


def test_significant_decreases():
    mk = lambda k, lo, hi: RateRow(k, "x", 0, 0, 0.0, lo, hi)
    rows = [mk(1, 0.5, 0.7), mk(2, 0.6, 0.9), mk(3, 0.1, 0.4)]
    pairs = significant_decreases(rows)
    assert [(a.k, b.k) for a, b in pairs] == [(1, 3), (2, 3)]


def test_greedy_small():
    assert greedy_chromatic(gen_gnp(10, 0.0, 0), 0) == 1
    assert greedy_chromatic(gen_gnp(5, 1.0, 0), 3) == 5


def test_greedy_reference_values():
    # first-fit counts cross-checked against networkx.greedy_color with the same order
    g = gen_gnp(2000, 0.5, graph_seed(7, 0))
    assert [greedy_chromatic(g, s) for s in range(5)] == [223, 225, 225, 226, 226]
