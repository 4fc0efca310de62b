import math
from types import SimpleNamespace

import numpy as np
import pytest

from fronttrack.errors import ValidationError
from fronttrack.fronts import (
    Front,
    FrontSolution,
    PiecewiseConstant,
    approximate_initial_data,
    l1_distance,
    total_variation,
    window_integral,
)
from fronttrack.gas import GasState

CFG = SimpleNamespace(tv_limit=0.5)


def make_profile(breaks, states):
    return PiecewiseConstant(np.array(breaks), np.array(states, dtype=float))


BG = (1.0, 0.0, 2.5, 0.01)


def test_constant_profile_no_fronts():
    prof = make_profile([], [BG])
    sol = approximate_initial_data(prof, 0.05, CFG)
    assert sol.fronts == []
    assert sol.left_background.as_tuple() == sol.right_background.as_tuple() == BG


def test_single_jump_reproduced_exactly():
    other = (1.1, 0.0, 2.4, 0.0)
    prof = make_profile([0.0], [BG, other])
    sol = approximate_initial_data(prof, 0.05, CFG)
    assert len(sol.fronts) == 1
    f = sol.fronts[0]
    assert f.position == 0.0 and f.family == "J"
    assert f.left_state.as_tuple() == BG
    assert f.right_state.as_tuple() == other
    assert l1_distance(sol, prof) == 0.0


def _bump_profile(n=400, width=12.0, amp=0.02, y_amp=0.01):
    xs = np.linspace(-width / 2, width / 2, n)
    states = np.zeros((n + 1, 4))
    states[:] = (1.0, 0.0, 2.5, 0.0)
    centers = np.concatenate([[xs[0] - 1.0], 0.5 * (xs[:-1] + xs[1:]), [xs[-1] + 1.0]])
    states[:, 1] += amp * np.exp(-(centers**2))
    states[:, 3] += y_amp * np.exp(-((centers - 0.5) ** 2))
    return PiecewiseConstant(xs, states)


def _quadrature_l1(pc_a, pc_b, lo, hi, n=400001):
    """Independent midpoint-rule L1 distance on [lo, hi]."""
    xs = np.linspace(lo, hi, n)
    mids = 0.5 * (xs[:-1] + xs[1:])
    dx = xs[1] - xs[0]
    ja = np.searchsorted(pc_a.breaks, mids, side="right")
    jb = np.searchsorted(pc_b.breaks, mids, side="right")
    diff = pc_a.values[ja] - pc_b.values[jb]
    return float(np.linalg.norm(diff, axis=1).sum() * dx)


def test_bump_satisfies_all_three_bullets():
    eps = 0.05
    prof = _bump_profile()
    sol = approximate_initial_data(prof, eps, CFG)
    out = sol.to_piecewise()
    # jumps inside [-1/eps, 1/eps]
    assert all(abs(x) <= 1.0 / eps for x in sol.breakpoints())
    # variation does not increase
    assert total_variation(out) <= prof.total_variation() + 1e-12
    # L1 error below eps, measured by an independent quadrature
    err = _quadrature_l1(out, prof, -1.0 / eps, 1.0 / eps)
    assert err < eps
    # the approximation genuinely coarsened the 400-point sampling
    assert 0 < len(sol.fronts) < 400


def test_exterior_jumps_move_to_boundary():
    eps = 0.5  # window [-2, 2]
    prof = make_profile([-3.0, 0.0, 3.5], [BG, (1.05, 0.0, 2.5, 0.01), (1.1, 0.0, 2.5, 0.01), (1.2, 0.0, 2.5, 0.01)])
    sol = approximate_initial_data(prof, eps, SimpleNamespace(tv_limit=5.0))
    assert all(abs(x) <= 2.0 for x in sol.breakpoints())
    assert sol.left_background.as_tuple() == BG
    assert sol.right_background.v == 1.2
    assert total_variation(sol) <= prof.total_variation() + 1e-12
    assert _quadrature_l1(sol.to_piecewise(), prof, -2.0, 2.0, n=40001) < eps


def test_tv_limit_rejected():
    prof = make_profile([0.0], [BG, (3.0, 0.0, 2.5, 0.0)])
    with pytest.raises(ValidationError):
        approximate_initial_data(prof, 0.05, CFG)


def test_l1_distance_hand_value():
    a = make_profile([0.0, 1.0], [(0.0,), (2.0,), (0.0,)])
    b = make_profile([0.5], [(0.0,), (1.0,)])
    # |a-b|: 2 on (0, 0.5), 1 on (0.5, 1), 1 beyond 1... a=0,b=1 after 1
    assert l1_distance(a, b) == math.inf
    c = make_profile([0.5, 1.0], [(0.0,), (1.0,), (0.0,)])
    assert l1_distance(a, c) == pytest.approx(2 * 0.5 + 1 * 0.5, abs=1e-14)


def test_window_integral():
    sol = FrontSolution(0.0, [], GasState(*BG), GasState(*BG))
    got = window_integral(sol, -2.0, 3.0)
    assert got[0] == pytest.approx(5.0)
    assert got[2] == pytest.approx(12.5)


def test_validate_catches_broken_chain():
    a = GasState(*BG)
    b = GasState(1.1, 0.0, 2.5, 0.01)
    f1 = Front(0, "J", 0.0, 0.0, a, b, 0.1)
    f2 = Front(1, "J", 1.0, 0.0, a, a, 0.0)  # left state should be b
    sol = FrontSolution(0.0, [f1, f2], a, a)
    with pytest.raises(ValidationError):
        sol.validate()


def test_validate_ordering():
    a = GasState(*BG)
    b = GasState(1.1, 0.0, 2.5, 0.01)
    f1 = Front(0, "J", 1.0, 0.0, a, b, 0.1)
    f2 = Front(1, "J", 0.0, 0.0, b, a, 0.1)
    with pytest.raises(ValidationError):
        FrontSolution(0.0, [f1, f2], a, a).validate()


def test_state_at_sides():
    a = GasState(*BG)
    b = GasState(1.1, 0.0, 2.5, 0.01)
    f = Front(0, "J", 0.0, 0.0, a, b, 0.1)
    sol = FrontSolution(0.0, [f], a, b)
    assert sol.state_at(0.0, side=+1) is b
    assert sol.state_at(0.0, side=-1) is a
    assert sol.state_at(-1.0) is a
    assert sol.state_at(1.0) is b
