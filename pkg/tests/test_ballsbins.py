from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colorgame import ballsbins as bb


class Fixed(bb.Adversary):
    """Every adversary ball goes to ``target`` (or the minimum once it is full)."""

    def __init__(self, target, height=None, removals=()):
        self.target, self.height, self.removals = target, height, dict(removals)

    def remove(self, state, rng):
        return self.removals.get(state.t + 1, [])

    def place(self, state, stolen, rng):
        if self.height is not None and state.loads[self.target] >= self.height:
            return state.min_bin()
        return self.target


def test_hand_trace_k2_n2():
    tr = bb.play_ballsbins(2, 2, Fixed(0), 6, seed=0)
    assert [(b.player, b.bin, b.load_after, b.stolen) for b in tr.balls] == [
        ("M", 0, 1, False), ("B", 0, 2, False), ("B", 0, 3, True),
        ("B", 0, 4, False), ("M", 1, 1, False), ("B", 0, 5, False)]
    assert tr.levels[-1] == 1
    assert tr.t_of_level(1) == 5


def test_all_bins_removed_halts():
    tr = bb.play_ballsbins(2, 3, Fixed(0, removals={3: [0, 1]}), 10, seed=0)
    assert tr.halted and len(tr.balls) == 2


def test_deterministic():
    a = bb.play_ballsbins(20, 4, bb.RandomAdversary(p_remove=0.05), 500, seed=11)
    b = bb.play_ballsbins(20, 4, bb.RandomAdversary(p_remove=0.05), 500, seed=11)
    assert a.to_csv() == b.to_csv()


def test_c_zero_and_min_adversary():
    tr = bb.play_ballsbins(10, 3, bb.MinAdversary(), 400, seed=0)
    assert bb.c_of_level(tr, 0, 5) == 0
    for level in range(0, min(tr.max_level, 19) + 1):
        assert bb.c_of_level(tr, level, 20) == 0


def test_stacking_hand_trace():
    # k=3, N=2, a=4: B piles onto bin 2 while M fills bins 0 and 1
    tr = bb.play_ballsbins(3, 2, Fixed(2, height=4), 20, seed=0)
    assert [b.bin for b in tr.balls[:5]] == [0, 2, 2, 2, 1]
    assert tr.t_of_level(1) == 5
    # balls at t = 3, 4 landed at loads 2, 3
    assert bb.c_of_level(tr, 1, 4) == 2


def test_level_not_reached():
    tr = bb.play_ballsbins(5, 3, bb.MinAdversary(), 3, seed=0)
    with pytest.raises(ValueError):
        bb.c_of_level(tr, 2, 5)
    with pytest.raises(ValueError):
        bb.c_of_level(tr, 0, 0)


def test_bound_formula():
    assert bb.load_bound(10, 4, 0, 8) == 0
    assert bb.load_bound(10, 4, 2, 8) == Fraction(10 * 2 * 5 * 6, 3 * 7)


ADVERSARIES = [
    lambda a: bb.RandomAdversary(p_remove=0.02),
    lambda a: bb.RandomAdversary(),
    lambda a: bb.StackerAdversary(a),
    lambda a: bb.StackerAdversary(a, remove_budget=3, remove_every=7),
    lambda a: bb.RemovalHeavyAdversary(period=5, keep=2),
    lambda a: bb.SwitchAdversary(a),
    lambda a: bb.MinAdversary(),
]


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 30), st.integers(2, 10), st.integers(2, 20), st.integers(0, len(ADVERSARIES) - 1),
       st.integers(0, 2**32))
def test_load_bound_property(k, N, a, which, seed):
    tr = bb.play_ballsbins(k, N, ADVERSARIES[which](a), horizon=k * (a + 2) * 2, seed=seed)
    assert bb.check_load_bound(tr, a) == []


def test_stack_then_switch_within_bound():
    for k, N, a in [(10, 2, 8), (30, 3, 12), (50, 10, 20)]:
        tr = bb.play_ballsbins(k, N, bb.SwitchAdversary(a), k * a * 3, seed=1)
        assert bb.check_load_bound(tr, a) == []
        assert any(bb.c_of_level(tr, lv, a) > 0 for lv in range(1, min(tr.max_level, a - 1) + 1))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.integers(2, 8), st.integers(0, len(ADVERSARIES) - 1), st.integers(0, 2**32))
def test_incremental_counter_matches_raw(k, N, which, seed):
    a = 10
    tr = bb.play_ballsbins(k, N, ADVERSARIES[which](a), horizon=k * 25, seed=seed)
    for level in range(min(tr.max_level, a - 1) + 1):
        assert tr.c_incremental(level, a) == bb.c_of_level(tr, level, a)
    assert all(x <= y for x, y in zip(tr.levels, tr.levels[1:]))
    # a removal can lift the minimum by several levels at once
    assert all(x <= y for x, y in zip(tr.level_times, tr.level_times[1:]))
    if not any(b.removed for b in tr.balls):
        assert all(x < y for x, y in zip(tr.level_times[1:], tr.level_times[2:]))


def test_adaptive_schedule_one_steal_per_block():
    N = 4
    tr = bb.play_ballsbins(10, N, bb.RandomAdversary(), 400, seed=3, steal_schedule="adaptive")
    m_balls = [b for b in tr.balls if b.t % 2 == 1]
    for start in range(0, len(m_balls) - N + 1, N):
        assert sum(b.stolen for b in m_balls[start:start + N]) == 1


def test_fixed_schedule():
    tr = bb.play_ballsbins(5, 3, bb.MinAdversary(), 60, seed=0)
    m_balls = [b for b in tr.balls if b.t % 2 == 1]
    assert [b.stolen for b in m_balls] == [(j + 1) % 3 == 0 for j in range(len(m_balls))]


def test_removed_bin_error():
    class Bad(bb.Adversary):
        def remove(self, state, rng):
            return [0] if state.t == 0 else []

        def place(self, state, stolen, rng):
            return 0

    with pytest.raises(bb.AdversaryError):
        bb.play_ballsbins(3, 2, Bad(), 5, seed=0)


def test_bad_parameters():
    with pytest.raises(ValueError):
        bb.play_ballsbins(0, 2, bb.MinAdversary(), 5, 0)
    with pytest.raises(ValueError):
        bb.play_ballsbins(3, 1, bb.MinAdversary(), 5, 0)
    with pytest.raises(ValueError):
        bb.play_ballsbins(3, 2, bb.MinAdversary(), 5, 0, steal_schedule="sometimes")


def test_low_load_not_applicable_on_removal_budget():
    tr = bb.play_ballsbins(40, 160, bb.RemovalHeavyAdversary(period=2, keep=1), 200, seed=0)
    res = bb.check_low_load_bins(tr, 0.05, 80, 160, 100)
    assert not res.applicable and res.holds is None
    assert any("removed" in r for r in res.reasons)


def test_low_load_compliant_run():
    k, xi, N, a = 1000, 0.05, 160, 80
    tr = bb.play_ballsbins(k, N, bb.StackerAdversary(a), 140_000, seed=2)
    t = max(i + 1 for i, lv in enumerate(tr.levels) if lv <= a * (1 - xi))
    res = bb.check_low_load_bins(tr, xi, a, N, t)
    assert res.applicable and res.holds and res.count >= 7


def test_low_load_quiet_adversary_all_bins_qualify():
    tr = bb.play_ballsbins(200, 80, bb.MinAdversary(), 2000, seed=0)
    res = bb.check_low_load_bins(tr, 0.1, 40, 80, 2000)
    assert res.applicable and res.count == 200


def test_csv_format():
    tr = bb.play_ballsbins(3, 2, Fixed(0, removals={4: [2]}), 6, seed=0)
    lines = tr.to_csv().splitlines()
    assert lines[0] == "t,player,bin,load_after,stolen,removed_bins"
    assert lines[4].endswith(",2")


def test_script_adversary(tmp_path):
    script = tmp_path / "adv.py"
    script.write_text(
        "from colorgame.ballsbins import MinAdversary\n"
        "def make_adversary(**kw):\n"
        "    return MinAdversary()\n")
    adv = bb.load_adversary_script(str(script), k=3)
    assert isinstance(adv, bb.MinAdversary)
