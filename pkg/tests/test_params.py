"""Parameter solver: derived values and exact re-verification."""

import math

import pytest

from adgame.params import constraint_violations, solve_params, toy_params
from adgame.rat import rat


def test_solved_set_for_xi_three_quarters():
    ps = solve_params(rat(3, 4), 12)
    # Independent evaluation of the chain: Q is the smallest integer
    # exceeding 2*12/(1/4) = 96, rho1 the smallest exceeding 22*97*4.
    assert ps.q == 97
    assert ps.nu == 17 * 97 == 1649
    assert ps.rho1 == math.floor(rat(22 * 97) / rat(1, 4)) + 1 == 8537
    assert ps.theta == 2 * (6 + 3 * 8537) == 51234
    assert ps.delta == rat(1, 2) * min(rat(1, 4) / 6, rat(1, 12) / 97) == rat(1, 2328)
    expect_sigma = rat(1, 2) * min(ps.delta / (3 * 1649 * 51234), rat(1, 2 * 8537))
    assert ps.sigma == expect_sigma
    assert ps.rho2 == 8
    assert ps.valid


def test_every_solved_set_passes_reverification():
    for xi, kappa in [(rat(3, 4), 12), (rat(7, 10), 13), (rat(9, 10), 12),
                      (rat(17, 24), 20), (rat(99, 100), 15)]:
        ps = solve_params(xi, kappa)
        assert constraint_violations(ps) == []


def test_q_for_xi_nine_tenths():
    # 2*12/0.1 = 240, so the smallest integer strictly above is 241
    assert solve_params(rat(9, 10), 12).q == 241


def test_out_of_range_inputs_rejected():
    with pytest.raises(ValueError):
        solve_params(rat(1, 2), 12)
    with pytest.raises(ValueError):
        solve_params(rat(3, 4), 11)
    with pytest.raises(ValueError):
        solve_params(rat(5, 4), 12)


def test_toy_params_are_flagged():
    tp = toy_params()
    assert not tp.valid
    assert constraint_violations(tp)  # genuinely outside the system


def test_solver_runtime_under_a_second():
    import time
    t0 = time.perf_counter()
    solve_params(rat(3, 4), 12)
    assert time.perf_counter() - t0 < 1.0
