import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maxop.fields import BallIndicator, Bump, Constant, FieldTuple, Gaussian
from maxop.operators import (
    QuadConfig,
    RingProfile,
    TGrid,
    alpha_average,
    hl_average,
    maximal,
    ring_profile,
    spherical_average,
    weighted_average,
)
from maxop.quadrature import jacobi_rule, sphere_rule, sphere_rule_qmc

BALL = BallIndicator(dim=2)
GAUSS = Gaussian(dim=2)


def tuples():
    return [
        FieldTuple((BALL,)),
        FieldTuple((GAUSS,)),
        FieldTuple((Bump(dim=2, radius=1.5, center=(0.4, 0.0)),)),
        FieldTuple((GAUSS, Gaussian(dim=2, scale=0.7, center=(0.5, 0.0)))),
        FieldTuple((BALL, BallIndicator(dim=2, center=(0.5, 0.0)))),
        FieldTuple((GAUSS, BALL, Bump(dim=2, radius=1.5))),
    ]


def test_constant_profiles_are_one():
    prof = ring_profile(FieldTuple((Constant(dim=2), Constant(dim=2))), [0.3, 0.0])
    for t in (0.1, 1.0, 10.0):
        assert spherical_average(prof, t) == 1.0
        assert alpha_average(prof, 0.4, t) == pytest.approx(1.0, abs=1e-14)
        assert hl_average(prof, t) == pytest.approx(1.0, abs=1e-14)
    assert maximal(prof, 0.5).value == 1.0


def test_ball_closed_forms_at_origin():
    prof = ring_profile(FieldTuple((BALL,)), [0.0, 0.0])
    assert spherical_average(prof, 0.5) == 1.0
    for a in (0.0, 0.3, 0.9):
        assert alpha_average(prof, a, 0.8) == pytest.approx(1.0, rel=1e-13)
    assert alpha_average(prof, 0.5, math.sqrt(2)) == pytest.approx(1 - math.sqrt(0.5), rel=1e-12)
    for t in (1.0, 1.7, 4.0):
        assert hl_average(prof, t) == pytest.approx(1 / t ** 2, rel=1e-12)


def test_ball_pair_profile_at_unit_radius():
    prof = ring_profile(FieldTuple((BALL, BALL)), [0.0, 0.0])
    assert float(prof(1.0)) == pytest.approx(1.0, abs=1e-12)
    assert hl_average(prof, 0.9) == pytest.approx(1.0, abs=1e-12)
    # cross-check by a QMC rule on S^3
    rule = sphere_rule_qmc(4, 4096, seed=2)
    assert float(RingProfile(FieldTuple((BALL, BALL)), [0.0, 0.0], rule=rule)(1.0)) == pytest.approx(1.0)


def test_gaussian_circle_mean():
    prof = ring_profile(FieldTuple((GAUSS,)), [0.0, 0.0])
    for t in (0.3, 1.0, 2.2):
        assert spherical_average(prof, t) == pytest.approx(math.exp(-t * t), rel=1e-11)


@pytest.mark.parametrize("index", range(6))
def test_alpha_zero_collapses_to_ball_average(index):
    tup = tuples()[index]
    rng = np.random.default_rng(index)
    for x in rng.uniform(-1.5, 1.5, size=(3, 2)):
        prof = ring_profile(tup, x)
        for t in (0.3, 1.1, 2.5):
            a0, hl = alpha_average(prof, 0.0, t), hl_average(prof, t)
            assert abs(a0 - hl) <= 1e-10 * max(abs(hl), 1e-300) + 1e-15


def test_blocks_route_matches_sphere_rule():
    tup = FieldTuple((GAUSS, Gaussian(dim=2, scale=0.7, center=(0.5, 0.0))))
    x = np.array([0.3, -0.2])
    blocks = RingProfile(tup, x, memo=False)
    sphere = RingProfile(tup, x, rule=sphere_rule(4, 120))
    s = np.array([0.2, 0.7, 1.3, 2.0])
    assert np.allclose(blocks(s), sphere(s), rtol=1e-10, atol=1e-14)


def test_three_fields_against_qmc():
    tup = FieldTuple((GAUSS, Gaussian(dim=2, scale=1.3), Gaussian(dim=2, center=(0.3, 0.0))))
    x = np.array([0.2, 0.1])
    blocks = RingProfile(tup, x, memo=False)
    qmc = RingProfile(tup, x, rule=sphere_rule_qmc(6, 2 ** 15, seed=5))
    for s in (0.5, 1.0, 2.0):
        assert float(qmc(s)) == pytest.approx(float(blocks(s)), rel=5e-3)


def test_memo_matches_direct_evaluation():
    tup = tuples()[3]
    memo = RingProfile(tup, [0.4, 0.4])
    direct = RingProfile(tup, [0.4, 0.4], memo=False)
    s = np.linspace(0.01, 4.0, 97)
    assert np.max(np.abs(memo(s) - direct(s))) < 1e-10


def test_profile_vanishes_beyond_reach():
    tup = FieldTuple((BALL, BallIndicator(dim=2, radius=0.5)))
    x = np.array([1.0, 0.5])
    prof = ring_profile(tup, x)
    limit = (np.linalg.norm(x) + 1.0) * math.sqrt(2)
    assert float(prof(limit * 1.001)) == 0.0
    assert prof.reach <= limit + 1e-12


@given(st.floats(min_value=-2, max_value=2), st.floats(min_value=-2, max_value=2),
       st.floats(min_value=0.01, max_value=5.0))
def test_profile_bounded_by_product_of_sups(x0, x1, s):
    tup = FieldTuple((Gaussian(dim=2, scale=0.8), Bump(dim=2, radius=2.0)))
    v = float(ring_profile(tup, [x0, x1])(s))
    assert -1e-15 <= v <= 1.0 + 1e-12


@given(st.floats(min_value=0.3, max_value=3.0), st.floats(min_value=0.2, max_value=3.0),
       st.floats(min_value=0.0, max_value=0.95))
def test_dilation_covariance(lam, t, alpha):
    x = np.array([0.6, -0.3])
    tup = FieldTuple((Gaussian(dim=2, scale=1.0), Gaussian(dim=2, scale=0.8, center=(0.5, 0.0))))
    scaled = FieldTuple((Gaussian(dim=2, scale=1.0 / lam),
                         Gaussian(dim=2, scale=0.8 / lam, center=(0.5 / lam, 0.0))))
    a = alpha_average(ring_profile(tup, x), alpha, t)
    b = alpha_average(ring_profile(scaled, x / lam), alpha, t / lam)
    assert b == pytest.approx(a, rel=1e-8, abs=1e-14)


def test_alpha_average_rule_validation():
    prof = ring_profile(FieldTuple((GAUSS,)), [0.0, 0.0])
    good = jacobi_rule(40, -0.5, 0.0)
    assert alpha_average(prof, 0.5, 1.0, radial_rule=good) == pytest.approx(alpha_average(prof, 0.5, 1.0), rel=1e-10)
    with pytest.raises(ValueError):
        alpha_average(prof, 0.5, 1.0, radial_rule=jacobi_rule(40, -0.3, 0.0))
    with pytest.raises(ValueError):
        alpha_average(prof, 1.0, 1.0)
    with pytest.raises(ValueError):
        spherical_average(prof, 0.0)
    with pytest.raises(ValueError):
        hl_average(prof, -1.0)


def test_weighted_average_power_matches_alpha_average():
    prof = ring_profile(tuples()[3], [0.3, 0.3])
    for a in (0.0, 0.4, 0.8):
        assert weighted_average(prof, -a, 1.2) == pytest.approx(alpha_average(prof, a, 1.2), rel=1e-12)


def test_continuity_in_t():
    prof = ring_profile(tuples()[3], [0.3, 0.0])
    ts = np.linspace(0.5, 2.0, 201)
    vals = np.array([alpha_average(prof, 0.5, t) for t in ts])
    slopes = np.abs(np.diff(vals) / np.diff(ts))
    fine = np.linspace(0.5, 2.0, 801)
    fvals = np.array([alpha_average(prof, 0.5, t) for t in fine])
    fslopes = np.abs(np.diff(fvals) / np.diff(fine))
    assert fslopes.max() <= 1.05 * slopes.max() + 1e-9


def test_maximal_ball_at_origin():
    prof = ring_profile(FieldTuple((BALL,)), [0.0, 0.0])
    for a in (0.0, 0.5, 1.0):
        res = maximal(prof, a)
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.arg_t <= 1.0 + 1e-9


def test_maximal_is_attained_value():
    prof = ring_profile(tuples()[4], [1.0, 0.5])
    res = maximal(prof, 0.5)
    assert res.value == pytest.approx(alpha_average(prof, 0.5, res.arg_t), rel=1e-12)
    assert res.quad_error_estimate >= 0.0
    grid = res.t_grid.points()
    assert all(alpha_average(prof, 0.5, t) <= res.value + 1e-15 for t in grid[::7])


def test_maximal_probe_lower_bound_for_ball_pair():
    x = np.array([4.0, 0.0])
    prof = ring_profile(FieldTuple((BALL, BALL)), x)
    probe = alpha_average(prof, 0.5, math.sqrt(2) * 4.0)
    res = maximal(prof, 0.5)
    assert probe > 0 and res.value >= probe


def test_maximal_grid_errors():
    prof = ring_profile(FieldTuple((GAUSS,)), [0.0, 0.0])
    with pytest.raises(ValueError):
        maximal(prof, 0.5, t_min=2.0, t_max=1.0)
    with pytest.raises(ValueError):
        maximal(prof, 1.5)
    with pytest.raises(ValueError):
        TGrid(t_min=-1.0).resolve(prof)


def test_zero_tuple_short_circuits():
    prof = ring_profile(FieldTuple((Constant(dim=2, value=0.0), GAUSS)), [0.0, 0.0])
    assert maximal(prof, 0.5).value == 0.0


def test_refined_profile_agrees():
    prof = ring_profile(tuples()[5], [0.2, 0.3], config=QuadConfig())
    fine = prof.refined()
    for t in (0.5, 1.5):
        assert alpha_average(fine, 0.5, t) == pytest.approx(alpha_average(prof, 0.5, t), rel=1e-9)
