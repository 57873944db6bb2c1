import math

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given
from hypothesis import strategies as st

from maxop.special import (
    beta,
    bessel_j,
    gamma_ln,
    log_beta,
    measure_constants,
    norm_constant,
    phi_l1_norm,
    slicing_identity_check,
)


@given(st.floats(min_value=1e-3, max_value=170.0))
def test_gamma_ln_matches_lgamma(x):
    assert gamma_ln(x) == pytest.approx(math.lgamma(x), rel=1e-13, abs=1e-13)


@given(st.floats(min_value=0.05, max_value=60), st.floats(min_value=0.05, max_value=60))
def test_beta_is_symmetric_and_matches_gamma_form(a, b):
    assert log_beta(a, b) == pytest.approx(log_beta(b, a), abs=1e-12)
    ref = math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)
    assert log_beta(a, b) == pytest.approx(ref, rel=1e-12, abs=1e-12)


def test_beta_small_values():
    assert beta(1.0, 1.0) == pytest.approx(1.0, rel=1e-14)
    assert beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)


@given(st.floats(min_value=0.0, max_value=40.0), st.floats(min_value=0.0, max_value=1e4))
def test_bessel_matches_reference(nu, z):
    got = float(bessel_j(nu, z))
    ref = float(sc.jv(nu, z))
    if 0.0 < z < 1e-150:
        # the reference underflows to 0 near the smallest normal double; the
        # leading term is exact to double precision here
        ref = math.exp(nu * math.log(0.5 * z) - math.lgamma(nu + 1.0))
    # absolute scale: |J| <= 1 and decays like z^{-1/2}
    assert abs(got - ref) <= 1e-10 * max(1.0, abs(ref)) + 1e-12


def test_bessel_half_integer_closed_forms():
    z = np.linspace(0.1, 50, 400)
    j_half = np.sqrt(2 / (math.pi * z)) * np.sin(z)
    j_3half = np.sqrt(2 / (math.pi * z)) * (np.sin(z) / z - np.cos(z))
    assert np.max(np.abs(bessel_j(0.5, z) - j_half)) < 1e-12
    assert np.max(np.abs(bessel_j(1.5, z) - j_3half)) < 1e-12


def test_bessel_at_zero():
    assert float(bessel_j(0.0, 0.0)) == 1.0
    assert float(bessel_j(2.5, 0.0)) == 0.0


@given(st.floats(min_value=0.0, max_value=38.0), st.floats(min_value=1.0, max_value=200.0))
def test_bessel_three_term_recurrence(nu, z):
    lhs = bessel_j(nu, z) + bessel_j(nu + 2, z)
    rhs = 2 * (nu + 1) / z * bessel_j(nu + 1, z)
    assert abs(lhs - rhs) < 1e-9 * (1 + 2 * (nu + 1) / z)


def test_bessel_domain_errors():
    with pytest.raises(ValueError):
        bessel_j(-0.5, 1.0)
    with pytest.raises(ValueError):
        bessel_j(1.0, -1.0)
    with pytest.raises(ValueError):
        bessel_j(41.0, 1.0)


def test_measure_constants_known_values():
    assert measure_constants(2).omega == pytest.approx(2 * math.pi, rel=1e-14)
    assert measure_constants(3).omega == pytest.approx(4 * math.pi, rel=1e-14)
    assert measure_constants(2).vol == pytest.approx(math.pi, rel=1e-14)
    assert measure_constants(4).vol == pytest.approx(math.pi ** 2 / 2, rel=1e-14)
    with pytest.raises(ValueError):
        measure_constants(0)


@given(st.integers(1, 30))
def test_volume_is_area_over_dimension(k):
    c = measure_constants(k)
    assert c.vol == pytest.approx(c.omega / k, rel=1e-13)


def test_norm_constant_alpha_zero_is_inverse_ball_volume():
    for m, n in [(1, 2), (2, 2), (2, 3), (3, 4)]:
        c = norm_constant(m, n, 0.0).value
        assert c == pytest.approx(1.0 / measure_constants(m * n).vol, rel=1e-13)


def test_norm_constant_rejects_pole():
    with pytest.raises(ValueError, match="pole"):
        norm_constant(2, 2, 1.0)
    with pytest.raises(ValueError, match="pole"):
        norm_constant(2, 2, 1.5)


@given(st.integers(2, 4), st.integers(2, 5), st.floats(min_value=0.0, max_value=0.99))
def test_slicing_identity_holds(m, n, alpha):
    assert slicing_identity_check(m, n, alpha) <= 1e-12


def test_phi_l1_norm_against_direct_quadrature():
    from scipy.integrate import quad

    for m, n, alpha in [(2, 2, 0.5), (2, 3, 0.25), (3, 2, 0.9)]:
        k = (m - 1) * n
        omega = measure_constants(k).omega
        q = 0.5 * n - alpha
        # (1-r^2)^q = (1-r)^q (1+r)^q, endpoint factor handled by the algebraic weight
        direct = omega * quad(lambda r: r ** (k - 1) * (1 + r) ** q, 0, 1, weight="alg", wvar=(0, q))[0]
        assert phi_l1_norm(m, n, alpha) == pytest.approx(direct, rel=1e-10)


@pytest.mark.parametrize("nu", [1e-117, 1e-20, 1e-10])
def test_bessel_tiny_fractional_order_tends_to_order_zero(nu):
    for z in (5.0, 13.0, 20.0, 40.0):
        assert bessel_j(nu, z) == pytest.approx(bessel_j(0.0, z), abs=1e-9)
