"""Run classification predicates against brute-force oracles."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adgame.classify import (blameable_run, clean_rows, find_walk,
                             intersect_securely, is_bad, is_clean, is_i_good,
                             is_i_safe, is_securely_reachable, is_step_clean,
                             is_unimodal, obstacle)
from adgame.grid import Rect, Run
from adgame.measure import Measure
from adgame.params import solve_params
from adgame.rat import rat

PS = solve_params(rat(3, 4), 12)


def vrun(anchor, b, n):
    return Run(anchor, b, n, horizontal=False)


def measure_on_run(run, weights):
    cells = {}
    for i, w in enumerate(weights, start=1):
        if w:
            cells[run.colony(i)] = rat(w)
    return Measure(cells)


def test_zero_measure_good_and_safe():
    m = Measure()
    run = vrun((0, 0), 5, 3)
    for i in (-3, -1, 0, 1, 2):
        assert is_i_good(m, run, i, PS)
        assert is_i_safe(m, run, i, PS)


def test_bad_equality_case():
    # B=10, n=1, mu(U)=10 is bad: the threshold is |U_1| = B, reached exactly
    run = vrun((0, 0), 10, 1)
    m = Measure({(3, 4): 10})
    assert is_bad(m, run)
    m2 = Measure({(3, 4): rat(9999, 1000)})
    assert not is_bad(m2, run)


def test_safe_threshold_exact():
    import adgame.params as params_mod
    ps = params_mod.ParamSet(q=97, kappa=12, nu=1649, theta=51234,
                             xi=rat(3, 4), delta=rat(1, 100), sigma=rat(1, 10**9),
                             rho1=rat(8537), rho2=rat(8), valid=False)
    run = vrun((0, 0), 100, 1)
    m = Measure({(0, 0): 74})
    # 1-safe iff 74 < (3/4 - 1/100)*100 = 74: false
    assert not is_i_safe(m, run, 1, ps)
    assert is_i_safe(Measure({(0, 0): rat(7399, 100)}), run, 1, ps)


def test_obstacle_ties_go_first():
    run = vrun((0, 0), 1, 3)
    assert obstacle(Measure(), run) == 1
    assert obstacle(measure_on_run(run, [1, 3, 2]), run) == 2
    assert obstacle(measure_on_run(run, [2, 2, 1]), run) == 1


def test_step_clean_vacuous_and_pairs():
    m = Measure()
    assert is_step_clean(m, vrun((0, 0), 2, 1), 0, PS)
    run = vrun((0, 0), 2, 4)
    # one heavy pair breaks it: threshold (xi - i*delta)*B
    w = rat(3, 4) * 2
    m2 = measure_on_run(run, [0, w / 2, w / 2, 0])
    assert not is_step_clean(m2, run, 0, PS)


def test_step_clean_matches_bruteforce():
    rng = random.Random(5)
    for _ in range(300):
        n = rng.randint(1, 7)
        b = rng.choice([1, 2, 4])
        run = vrun((0, 0), b, n)
        weights = [rat(rng.randint(0, 12), 8) * b for _ in range(n)]
        m = measure_on_run(run, weights)
        i = rng.choice([-1, 0, 1])
        expect = all(is_i_safe(m, run.sub(k, k + 1), i, PS) for k in range(1, n))
        assert is_step_clean(m, run, i, PS) == expect


def test_unimodal_and_clean_bruteforce():
    rng = random.Random(9)
    for _ in range(300):
        n = rng.randint(1, 8)
        run = vrun((0, 0), 2, n)
        weights = [rat(rng.randint(0, 10), 6) * 2 for _ in range(n)]
        m = measure_on_run(run, weights)
        i = rng.choice([0, 1])
        ob = obstacle(m, run)
        sides_ok = True
        for lo, hi in ((1, ob - 1), (ob + 1, n)):
            if hi > lo:
                sides_ok = sides_ok and is_step_clean(m, run.sub(lo, hi), i, PS)
        assert is_unimodal(m, run, i, PS) == sides_ok
        windows_ok = all(is_i_good(m, run.sub(k, k + 2), i + 1, PS)
                         for k in range(1, n - 1))
        assert is_clean(m, run, i, PS) == (sides_ok and windows_ok)


def test_clean_zero_measure():
    assert is_clean(Measure(), vrun((0, 0), 3, 9), 0, PS)
    assert is_clean(Measure(), vrun((0, 0), 3, 9), 1, PS)


def test_good_implies_clean_example():
    # a run failing one 3-window goodness is not clean
    run = vrun((0, 0), 2, 5)
    thr = (1 - PS.delta) * 2
    m = measure_on_run(run, [0, thr / 3, thr / 3, thr / 2, 0])
    assert not is_clean(m, run, 0, PS)


def test_walk_zero_measure_identity():
    run = vrun((0, 0), 2, 6)
    assert find_walk(Measure(), run, 1, 6, PS) == [1, 2, 3, 4, 5, 6]


def test_walk_over_obstacle():
    run = vrun((0, 0), 2, 5)
    heavy = rat(3, 4) * 2  # unsafe colony in the middle
    m = measure_on_run(run, [0, 0, heavy, 0, 0])
    walk = find_walk(m, run, 1, 5, PS)
    assert walk == [1, 2, 4, 5]


def test_walk_blocked_by_adjacent_unsafe():
    run = vrun((0, 0), 2, 6)
    heavy = rat(3, 4) * 2
    m = measure_on_run(run, [0, 0, heavy, heavy, 0, 0])
    assert find_walk(m, run, 1, 6, PS) is None


def test_walk_exists_in_clean_run_between_safe_points():
    # Walk existence in a clean run between safe endpoints.  When the
    # endpoints are adjacent the walk additionally needs their pair safe
    # (there is no room to jump); see the decisions ledger.
    rng = random.Random(13)
    found = 0
    for _ in range(800):
        n = rng.randint(2, 8)
        run = vrun((0, 0), 4, n)
        weights = [rat(rng.randint(0, 16), 4) for _ in range(n)]
        m = measure_on_run(run, weights)
        if not is_clean(m, run, 0, PS):
            continue
        if not (is_i_safe(m, run.sub(1, 1), 0, PS)
                and is_i_safe(m, run.sub(n, n), 0, PS)):
            continue
        if n == 2 and not is_i_safe(m, run, 0, PS):
            assert find_walk(m, run, 1, n, PS) is None
            continue
        found += 1
        assert find_walk(m, run, 1, n, PS) is not None
    assert found > 50


def test_secure_intersection_zero_measure():
    row = Run((0, 0), 2, 6, horizontal=True)
    col = Run((4, -6), 2, 8, horizontal=False)
    assert intersect_securely(Measure(), row, col, PS)


def test_secure_intersection_disjunction():
    row = Run((0, 0), 1, 5, horizontal=True)
    col = Run((2, -3), 1, 7, horizontal=False)
    heavy = rat(3, 4)
    # heavy row neighbours both sides of the crossing, but the column is clear
    m = Measure({(1, 0): heavy, (3, 0): heavy})
    assert intersect_securely(m, row, col, PS)
    # now poison the column neighbours too
    m2 = m.deposit((2, -1), heavy).deposit((2, 1), heavy)
    assert not intersect_securely(m2, row, col, PS)


def test_secure_intersection_requires_crossing():
    row = Run((0, 0), 1, 3, horizontal=True)
    col = Run((5, 1), 1, 3, horizontal=False)
    with pytest.raises(ValueError):
        intersect_securely(Measure(), row, col, PS)


def test_blameable_run_geometry():
    row = Run((0, 8), 2, 4, horizontal=True)
    u = (2, 0)
    v = blameable_run(u, row)
    assert v.anchor == (2, 2) and v.length == 4  # rows between (3) + 1
    assert not v.horizontal
    with pytest.raises(ValueError):
        blameable_run((2, 10), row)


def test_securely_reachable_zero_measure():
    row = Run((0, 6), 2, 4, horizontal=True)
    assert is_securely_reachable(Measure(), (2, 0), row, PS)


def test_clean_rows_zero_measure_and_recheck():
    rect = Rect((0, 0), 1, 8, 8)
    assert clean_rows(Measure(), rect, 0, PS) == list(range(1, 9))
    rng = random.Random(17)
    for _ in range(50):
        cells = {(rng.randint(0, 7), rng.randint(0, 7)): rat(rng.randint(1, 6), 4)
                 for _ in range(rng.randint(0, 12))}
        m = Measure(cells)
        got = clean_rows(m, rect, 1, PS)
        expect = [i for i in range(1, 9) if is_clean(m, rect.row(i), 1, PS)]
        assert got == expect


def test_monotone_upward_badness():
    # pointwise-larger measures can only lose goodness/safety/cleanness
    rng = random.Random(21)
    for _ in range(200):
        n = rng.randint(1, 6)
        run = vrun((0, 0), 2, n)
        weights = [rat(rng.randint(0, 8), 5) for _ in range(n)]
        m = measure_on_run(run, weights)
        extra = [w + rat(rng.randint(0, 3), 7) for w in weights]
        m2 = measure_on_run(run, extra)
        for i in (0, 1):
            if is_i_good(m2, run, i, PS):
                assert is_i_good(m, run, i, PS)
            if is_i_safe(m2, run, i, PS):
                assert is_i_safe(m, run, i, PS)
            if is_clean(m2, run, i, PS):
                assert is_clean(m, run, i, PS)


@given(st.lists(st.fractions(min_value=0, max_value=3), min_size=1, max_size=6),
       st.integers(1, 7))
@settings(max_examples=80, deadline=None)
def test_rescaling_invariance(weights, scale):
    # predicates are invariant under scaling weights and colony size together
    n = len(weights)
    run1 = vrun((0, 0), 1, n)
    m1 = measure_on_run(run1, [rat(w) for w in weights])
    runs_ = vrun((0, 0), scale, n)
    ms = measure_on_run(runs_, [rat(w) * scale for w in weights])
    for i in (0, 1):
        assert is_i_good(m1, run1, i, PS) == is_i_good(ms, runs_, i, PS)
        assert is_i_safe(m1, run1, i, PS) == is_i_safe(ms, runs_, i, PS)
        assert is_clean(m1, run1, i, PS) == is_clean(ms, runs_, i, PS)
