import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from colorgame.arranger import (ArrangementInput, cascade_constants, color_arranging, verify_arrangement,
                                wk_cascade, wk_sets)
from oracles import brute_arrange


def arrange(U, avail, q, **kw):
    inp = ArrangementInput(U=U, avail=avail, q=q, **kw)
    return inp, color_arranging(inp)


def test_hand_example():
    inp, res = arrange([1, 2, 3], {1: {1, 2}, 2: {1, 2}, 3: {1, 2}}, 2)
    # color 1: all tied, the largest index is dropped; color 2: v3 already holds one exception
    assert res.S == {1: frozenset(), 2: frozenset({2}), 3: frozenset({1})}
    assert res.residual == {1: 2, 2: 2}
    rep = verify_arrangement(inp, res)
    assert rep.residual_ok and rep.size_ok and rep.subset_ok


def test_rare_colors_untouched():
    inp, res = arrange([0, 1, 2, 3], {0: {1, 2}, 1: {2, 3}, 2: {3, 4}, 3: {4, 1}}, 2)
    assert all(not s for s in res.S.values())
    assert res.max_s == 0


def test_single_color_at_q_plus_one():
    q = 3
    inp, res = arrange(list(range(q + 1)), {v: {7} for v in range(q + 1)}, q)
    assert sum(len(s) for s in res.S.values()) == 1
    assert res.S[q] == frozenset({7})
    assert res.residual == {7: q}


def test_adversarial_q1():
    inp, res = arrange([0, 1], {0: {1, 2, 3}, 1: {1, 2, 3}}, 1)
    rep = verify_arrangement(inp, res)
    assert rep.residual_ok and not rep.size_ok
    assert rep.over_size == [1]


@pytest.mark.parametrize("q", [1, 2, 3, 5])
def test_adversarial_general_q(q):
    U = list(range(q + 1))
    colors = set(range(q * (q + 1) + 1))
    inp, res = arrange(U, {v: colors for v in U}, q)
    assert res.max_s == q + 1
    assert not verify_arrangement(inp, res).size_ok
    # one fewer color keeps every exception set at q
    inp, res = arrange(U, {v: set(range(q * (q + 1))) for v in U}, q)
    assert res.max_s == q and verify_arrangement(inp, res).size_ok


def test_validation():
    with pytest.raises(ValueError):
        ArrangementInput(U=[0], avail={0: {1}}, q=0)
    with pytest.raises(ValueError):
        ArrangementInput(U=[0, 0], avail={0: {1}}, q=1)


instances = st.integers(1, 9).flatmap(lambda m: st.tuples(
    st.just(list(range(m))),
    st.lists(st.frozensets(st.integers(0, 11)), min_size=m, max_size=m),
    st.integers(1, 4)))


@settings(max_examples=300, deadline=None)
@given(instances)
def test_matches_oracle_and_residual(inst):
    U, sets, q = inst
    avail = dict(zip(U, sets))
    inp, res = arrange(U, avail, q)
    assert res.S == brute_arrange(U, avail, q)
    rep = verify_arrangement(inp, res)
    assert rep.residual_ok and rep.subset_ok


@settings(max_examples=100, deadline=None)
@given(instances, st.integers(0, 2**32))
def test_residual_holds_for_any_order(inst, seed):
    U, sets, q = inst
    inp = ArrangementInput(U=U, avail=dict(zip(U, sets)), q=q)
    res = color_arranging(inp, rng=np.random.default_rng(seed))
    assert verify_arrangement(inp, res).residual_ok


def test_cascade_constants():
    L, c = cascade_constants(0.5, 0.02)
    assert L == pytest.approx(13.5, abs=1e-12)
    assert c == pytest.approx(1 / 14.5, abs=1e-12)
    with pytest.raises(ValueError):
        cascade_constants(0.5, 0)


def test_wk_nested():
    U = list(range(6))
    inp, res = arrange(U, {v: set(range(40)) for v in U}, 5)
    sets = wk_sets(inp, res, 0.5, 0.02)
    assert len(sets) == 15
    assert all(a <= b for a, b in zip(sets, sets[1:]))
    casc = wk_cascade(inp, res, 0.5, 0.02)
    assert (casc.K_floor, casc.K_ceil) == (13, 14)
    assert [s for _, s in casc.sizes] == [len(w) for w in sets]
    # at K = ceil(L) the threshold drops below 1 and every vertex here has an exception
    assert casc.sizes[-1][1] == len(U)
