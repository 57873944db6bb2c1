import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maxop.fields import BallIndicator, Bump, Constant, FieldTuple, Gaussian
from maxop.fourier import (
    SpectralGrid,
    multiplier,
    multiplier_envelope,
    multiplier_prefactor,
    radial_fourier,
    s_alpha_fourier,
)
from maxop.operators import alpha_average, ring_profile
from maxop.special import bessel_j

SELF_DUAL = 1.0 / math.sqrt(math.pi)  # e^{-π|x|^2}


@pytest.mark.parametrize("n", [2, 3])
def test_gaussian_transform_is_self_dual(n):
    spec = radial_fourier(Gaussian(dim=n, scale=SELF_DUAL))
    assert np.max(np.abs(spec.values - np.exp(-math.pi * spec.rho ** 2))) < 1e-12


def test_disc_transform():
    spec = radial_fourier(BallIndicator(dim=2))
    rho = spec.rho[spec.rho > 0]
    ref = bessel_j(1.0, 2 * math.pi * rho) / rho
    assert np.max(np.abs(spec.values[spec.rho > 0] - ref)) < 1e-12


def test_transform_requires_origin_centred_radial_field():
    with pytest.raises(ValueError):
        radial_fourier(Gaussian(dim=2, center=(1.0, 0.0)))
    with pytest.raises(ValueError):
        radial_fourier(Constant(dim=2))


@given(st.floats(min_value=0.0, max_value=0.99), st.integers(1, 4))
def test_multiplier_is_continuous_at_zero(alpha, n):
    if 0.5 * n - alpha < 0:
        return
    near = multiplier(alpha, n, np.array([0.0, 1e-3, 2e-3]))
    assert abs(near[1] - near[0]) < 1e-4 * max(1.0, abs(near[0]))
    series_side = multiplier(alpha, n, 0.99e-2 / (2 * math.pi))
    bessel_side = multiplier(alpha, n, 1.01e-2 / (2 * math.pi))
    assert series_side == pytest.approx(bessel_side, rel=1e-4)


def test_prefactor_normalises_the_multiplier():
    # S_{α,t} maps the constant 1 to 1: P(n, α) m_α(0) = 1
    for n in (2, 3, 4):
        for alpha in (0.0, 0.3, 0.7):
            assert multiplier_prefactor(alpha, n) * multiplier(alpha, n, 0.0) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("field", ["gauss", "bump"])
def test_dual_path_agreement(n, field):
    f = Gaussian(dim=n, scale=SELF_DUAL) if field == "gauss" else Bump(dim=n, radius=3.0)
    spec = radial_fourier(f)
    tup = FieldTuple((f,))
    worst = 0.0
    for r in (0.0, 1.0, 2.0):
        x = np.zeros(n)
        x[0] = r
        prof = ring_profile(tup, x)
        for alpha in (0.0, 0.3, 0.7):
            for t in (0.5, 1.0, 2.0):
                direct = alpha_average(prof, alpha, t)
                dual = s_alpha_fourier(spec, alpha, t, x)
                worst = max(worst, abs(dual - direct) / direct)
    assert worst < 1e-8


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.9])
def test_envelope_slope(n, alpha):
    fit = multiplier_envelope(alpha, n)
    assert fit.slope == pytest.approx(fit.target, abs=0.05)


def test_zero_field_spectrum():
    spec = radial_fourier(Constant(dim=2, value=0.0))
    assert np.all(spec.values == 0.0)
    assert s_alpha_fourier(spec, 0.5, 1.0, [0.0, 0.0]) == 0.0


def test_grid_settings_are_respected():
    coarse = radial_fourier(Gaussian(dim=2, scale=SELF_DUAL), grid=SpectralGrid(panel_width=0.25, order=16))
    assert coarse.cutoff <= SpectralGrid().rho_limit
    assert s_alpha_fourier(coarse, 0.3, 1.0, [0.5, 0.0]) > 0
