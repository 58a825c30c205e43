import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardyz.smoothing import make_kernel, rho, rho_deriv, rho_of_t_derivs


@pytest.fixture(scope="module")
def kernel():
    return make_kernel()


def test_plateau_and_tail(kernel):
    assert rho(kernel, 0.0) == 1.0
    assert rho(kernel, 0.5) == 1.0
    assert rho(kernel, 2.0) == 0.0
    assert rho(kernel, 2.5) == 0.0


def test_value_at_one_is_exactly_half(kernel):
    assert rho(kernel, 1.0) == 0.5


def test_slope_at_one(kernel):
    # h(y) = -4Ly/(L^2 - y^2) has h'(0) = -4/L, and expit'(0) = 1/4
    assert rho_deriv(kernel, 1.0, 1) == pytest.approx(-1.0 / math.log(2.0), rel=1e-14)


@given(st.floats(1e-3, 1e3))
@settings(max_examples=500)
def test_partition_identity(x):
    k = make_kernel()
    assert abs(k(x) + k(1.0 / x) - 1.0) <= 1e-15


@given(st.floats(1.05, 2.0), st.floats(0.0, 3.0), st.floats(0.0, 3.0))
@settings(max_examples=200)
def test_monotone_and_bounded(b, x, y):
    k = make_kernel(b)
    lo, hi = min(x, y), max(x, y)
    assert 0.0 <= k(hi) <= k(lo) <= 1.0


@pytest.mark.parametrize("x", [0.6, 0.9, 1.0, 1.3, 1.8])
@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_derivatives_against_finite_differences(kernel, x, order):
    h = 1e-4
    grid = x + h * np.array([-2.0, -1.0, 1.0, 2.0])
    vals = rho_deriv(kernel, grid, order - 1) if order > 1 else kernel(grid)
    fd = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    assert rho_deriv(kernel, x, order) == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_derivatives_vanish_off_transition(kernel):
    x = np.array([0.1, 0.5, 2.0, 7.0])
    for k in range(1, 5):
        assert np.all(rho_deriv(kernel, x, k) == 0.0)


def test_derivatives_finite_near_edges(kernel):
    x = np.array([0.5 + 1e-12, 0.5 + 1e-6, 2.0 - 1e-9])
    for k in range(1, 5):
        assert np.all(np.isfinite(rho_deriv(kernel, x, k)))


def test_t_derivatives_scale(kernel):
    # each t-derivative of rho(n / tau(t)) is smaller by roughly a factor t
    n, t = 20, 2 * math.pi * 400.0
    d = rho_of_t_derivs(kernel, n, t, 4)[:, 0]
    for k in range(1, 4):
        assert abs(d[k + 1]) * t < 50 * max(abs(d[k]), 1e-300) + 1e-12


def test_t_derivative_chain_rule(kernel):
    n, t, h = 20, 2600.0, 1e-2
    d = rho_of_t_derivs(kernel, n, t, 2)[:, 0]
    f = lambda s: kernel(n / math.sqrt(s / (2 * math.pi)))
    assert d[1] == pytest.approx((f(t + h) - f(t - h)) / (2 * h), rel=1e-6)


def test_parameter_validation(kernel):
    with pytest.raises(ValueError):
        make_kernel(1.0)
    with pytest.raises(ValueError):
        make_kernel(2.5)
    with pytest.raises(ValueError):
        rho(kernel, -0.1)
    with pytest.raises(ValueError):
        rho_deriv(kernel, 1.0, 5)


def test_smaller_plateau_parameter():
    k = make_kernel(1.5)
    assert k(1 / 1.5) == 1.0 and k(1.5) == 0.0 and k(1.0) == 0.5
