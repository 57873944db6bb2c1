import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maxop.fields import BallIndicator, Constant, FieldTuple, Gaussian, GridField
from maxop.lplab import ExponentTuple, decay_fit, exact_region, grid_lp_norm, ratio_probe, region_classify


def test_region_examples():
    assert region_classify(2, 2, 0.0, ExponentTuple((2, 2))).classification == "bounded_interior"
    v = region_classify(2, 2, 1.0, ExponentTuple((4 / 3, 4 / 3)))
    assert v.classification == "boundary_H_face" and v.reciprocal_sum == pytest.approx(1.5)
    v = region_classify(1, 2, 0.5, ExponentTuple((1.2,)))
    assert v.classification == "unbounded" and v.distance_to_h < 0
    assert region_classify(2, 2, 0.5, ExponentTuple((1, 4))).classification == "boundary_other_face"
    assert region_classify(2, 2, 0.5, ExponentTuple(("inf", math.inf))).classification == "bounded_interior"


def test_exponent_tuple():
    e = ExponentTuple((2, "inf", 4))
    assert e.reciprocal_sum == pytest.approx(0.75)
    assert e.p_out == pytest.approx(4 / 3)
    assert ExponentTuple(("inf",)).p_out == math.inf
    with pytest.raises(ValueError):
        ExponentTuple((0.5,))
    with pytest.raises(ValueError):
        region_classify(2, 2, 0.5, ExponentTuple((2,)))


recip = st.fractions(min_value=0, max_value=1, max_denominator=50)


@given(st.integers(1, 4), st.integers(1, 4), st.fractions(min_value=0, max_value=1, max_denominator=12),
       st.lists(recip, min_size=1, max_size=4))
def test_region_matches_exact_arithmetic_and_is_symmetric(m, n, alpha, recips):
    recips = (recips * m)[:m]
    exps = tuple(math.inf if r == 0 else float(1 / r) for r in recips)
    got = region_classify(m, n, float(alpha), ExponentTuple(exps)).classification
    assert got == exact_region(m, n, alpha, recips)
    flipped = region_classify(m, n, float(alpha), ExponentTuple(exps[::-1])).classification
    assert flipped == got


@given(st.integers(1, 3), st.integers(2, 4), st.fractions(min_value=0, max_value=1, max_denominator=12),
       st.lists(recip, min_size=3, max_size=3))
def test_h_face_constructions(m, n, alpha, recips):
    recips = recips[:m]
    threshold = (m * n - alpha) / n
    last = threshold - sum(recips[:-1])
    if not 0 <= last <= 1:
        return
    recips[-1] = last
    exps = tuple(math.inf if r == 0 else float(1 / r) for r in recips)
    assert region_classify(m, n, float(alpha), ExponentTuple(exps)).classification == "boundary_H_face"


def test_grid_norm_examples():
    cube = np.ones((4, 4))
    assert grid_lp_norm(cube, 2, 0.5) == pytest.approx((0.25 * 16) ** 0.5)
    assert grid_lp_norm(np.full((10, 10), 3.0), 3, 0.1) == pytest.approx(3.0 * 1.0 ** (1 / 3))
    assert grid_lp_norm(np.array([[1.0, -5.0]]), "inf", 1.0) == 5.0
    with pytest.raises(ValueError):
        grid_lp_norm(cube, 0.0, 1.0)
    with pytest.raises(ValueError):
        grid_lp_norm(np.array([np.nan]), 2, 1.0)


def test_grid_norm_gaussian():
    axis = np.arange(-300, 301) * 0.02
    x, y = np.meshgrid(axis, axis, indexing="ij")
    vals = np.exp(-math.pi * (x ** 2 + y ** 2))
    assert grid_lp_norm(vals, 2, 0.02) == pytest.approx(2 ** -0.5, abs=1e-4)


@given(st.floats(min_value=0.5, max_value=8.0), st.floats(min_value=0.1, max_value=3.0))
def test_grid_norm_homogeneity(p, c):
    vals = np.random.default_rng(0).random((6, 6))
    assert grid_lp_norm(c * vals, p, 0.3) == pytest.approx(c * grid_lp_norm(vals, p, 0.3), rel=1e-12)


def test_ratio_constants_smoke():
    r = ratio_probe(FieldTuple((Constant(dim=2, value=2.0),)), 0.5, ExponentTuple((4,)), 2.0, 0.25)
    assert math.isfinite(r.ratio) and r.ratio > 0


def test_ratio_zero_denominator():
    with pytest.raises(ValueError):
        ratio_probe(FieldTuple((Constant(dim=2, value=0.0),)), 0.5, ExponentTuple((4,)), 2.0, 0.25)


def test_ratio_radial_path_matches_pointwise_path():
    g = Gaussian(dim=2)
    radial = ratio_probe(FieldTuple((g,)), 0.5, ExponentTuple((2,)), 1.0, 0.5, radial_oversample=8)
    gridded = FieldTuple((GridField.sample(g, 0.05, 7.0),))
    pointwise = ratio_probe(gridded, 0.5, ExponentTuple((2,)), 1.0, 0.5)
    assert pointwise.output_norm == pytest.approx(radial.output_norm, rel=1e-3)


def test_decay_examples():
    hl = decay_fit(1, 2, 0.0, (4, 8, 16, 32))
    assert hl.slope == pytest.approx(-2.0, abs=0.04)
    probe = decay_fit(1, 2, 0.5, (4, 8, 16, 32))
    assert probe.slope == pytest.approx(-1.5, abs=0.03)
    assert probe.target == -1.5


def test_decay_full_sup_dominates_probe():
    probe = decay_fit(1, 2, 0.5, (4, 8, 16))
    sup = decay_fit(1, 2, 0.5, (4, 8, 16), t_strategy="full_sup")
    assert all(s >= p for s, p in zip(sup.values, probe.values))
    assert sup.slope >= probe.slope - 0.02


def test_decay_validation():
    with pytest.raises(ValueError):
        decay_fit(1, 2, 0.5, (1.0, 4.0))
    with pytest.raises(ValueError):
        decay_fit(1, 2, 0.5, (4.0, 8.0), t_strategy="other")
