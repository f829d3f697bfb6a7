import math

import numpy as np
import pytest
import scipy.integrate as si
import scipy.special as sc
from hypothesis import assume, given
from hypothesis import strategies as st

from maxbound.errors import DomainError
from maxbound.fourier import ProductGeometry, product_multiplier, unit_measure_sphere_radius
from maxbound.frac_calculus import (
    FracOrder,
    _exponents,
    frac_directional_derivative,
    gaussian_profile,
    interpolation_exponents,
    m_eps_symbol,
    multiplier_m_z,
    polynomial_profile,
    product_profile,
    riesz_derivative,
    riesz_derivative_direct,
    sphere_profile,
    stein_interp_bound,
)
from maxbound.radial_deriv import product_radial_derivative_leibniz
from maxbound.specfun import cgamma, gamma


def power_profile(m):
    # (2 - u)^m as a polynomial
    return polynomial_profile([math.comb(m, i) * 2 ** (m - i) * (-1) ** i for i in range(m + 1)], name=f"(2-u)^{m}")


def power_oracle(m, z, t):
    return cgamma(m + 1) / cgamma(m + 1 - z) * (2 - t) ** (m - z)


re_z = st.floats(-0.9, 2.9)
im_z = st.floats(-2.0, 2.0)
times = st.floats(0.05, 1.95)


@given(st.integers(3, 6), re_z, im_z, times)
def test_power_profile_closed_form(m, x, y, t):
    z = complex(x, y)
    assume(abs(m + 1 - z - round((m + 1 - z).real)) > 1e-3 or (m + 1 - z).real > 0)
    f = power_profile(m)
    got = riesz_derivative(f, FracOrder.minimal(z), t)
    assert abs(got - power_oracle(m, z, t)) <= 1e-9 * max(1.0, abs(power_oracle(m, z, t)))


@given(st.floats(-0.9, -0.05), times)
def test_gaussian_against_scipy_quad(z, t):
    f = gaussian_profile(1.0)
    ref = si.quad(lambda u: math.exp(-u * u), t, 2.0, weight="alg", wvar=(-z - 1, 0))[0] / sc.gamma(-z)
    assert riesz_derivative(f, FracOrder(z, 0), t).real == pytest.approx(ref, rel=1e-9, abs=1e-12)


def _profiles():
    R = unit_measure_sphere_radius(3)
    return [
        polynomial_profile([1.0, -2.0, 0.5, 0.3]),
        gaussian_profile(1.0),
        sphere_profile(3, R, 2.0),
        product_profile(ProductGeometry.unit_spheres((3, 3)), np.array([1, 2, 0, 3, -1, 0.5])),
    ]


@pytest.mark.parametrize("f", _profiles(), ids=lambda f: f.name)
@pytest.mark.parametrize("z", [0.5, -0.3, 0.7 + 2j, 1.4 - 1j])
def test_continuation_order_independent(f, z):
    k0 = FracOrder.minimal(z).k
    vals = [riesz_derivative(f, FracOrder(z, k0 + i), 1.1) for i in range(3)]
    assert max(abs(v - vals[0]) for v in vals) <= 1e-8 * max(1.0, abs(vals[0]))


@pytest.mark.parametrize("f", _profiles(), ids=lambda f: f.name)
@pytest.mark.parametrize("m", [1, 2, 3])
def test_integer_order_collapse(f, m):
    for t in (0.3, 1.0, 1.7):
        ex = (-1) ** m * f.d(t, m)
        assert abs(riesz_derivative(f, FracOrder(m, m + 1), t) - ex) <= 1e-6 * max(1.0, abs(ex))


@pytest.mark.parametrize("f", _profiles()[:3], ids=lambda f: f.name)
@pytest.mark.parametrize("z", [-0.3, -0.8 + 1j])
def test_direct_form_is_negated_continuation(f, z):
    assert abs(riesz_derivative_direct(f, z, 1.0) + riesz_derivative(f, FracOrder(z, 1), 1.0)) < 1e-9


def test_zero_order_is_identity():
    f = gaussian_profile(2.0)
    assert riesz_derivative(f, FracOrder(0, 1), 0.7) == pytest.approx(f(0.7), rel=1e-12)


def test_frac_order_validation():
    with pytest.raises(DomainError):
        FracOrder(1.5, 1)
    with pytest.raises(DomainError):
        FracOrder(0.2, -1)
    assert FracOrder.minimal(2.3).k == 3
    assert FracOrder.minimal(-0.5).k == 1


@pytest.mark.parametrize("xi", [np.array([0.5, 1, 2.0, 0, 0, 0]), np.array([1, 0.3, 0, -2, 1, 0.5])])
def test_m_z_integer_orders(xi):
    geom = ProductGeometry.unit_spheres((3, 3))
    assert multiplier_m_z(geom, xi, 0).real == pytest.approx(float(product_multiplier(geom, xi)), abs=1e-10)
    for j in (1, 2):
        lb = product_radial_derivative_leibniz(geom, xi, j, 1.0)
        assert multiplier_m_z(geom, xi, j).real == pytest.approx((-1) ** j * lb, abs=1e-8)


@pytest.mark.parametrize("xi", [np.array([0.5, 1, 2.0]), np.array([1, 0.3, 0, -2, 1, 0.5])])
def test_directional_derivative_integer_orders(xi):
    geom = ProductGeometry.unit_spheres((3,) * (xi.size // 3))
    assert frac_directional_derivative(geom, xi, 0).real == pytest.approx(float(product_multiplier(geom, xi)), abs=1e-10)
    for j in (1, 2):
        lb = product_radial_derivative_leibniz(geom, xi, j, 1.0)
        assert frac_directional_derivative(geom, xi, j) == pytest.approx(lb, abs=1e-9)
        assert frac_directional_derivative(geom, xi, j, sign=-1) == pytest.approx((-1) ** j * lb, abs=1e-9)


@given(st.floats(0.1, 0.9), st.integers(0, 2**32 - 1))
def test_directional_difference_bound(alpha, seed):
    geom = ProductGeometry.unit_spheres((3,))
    rng = np.random.default_rng(seed)
    xi = rng.standard_normal(3)
    xi *= 10 ** rng.uniform(-1, 1.5) / np.linalg.norm(xi)
    diff = abs(multiplier_m_z(geom, xi, alpha) - frac_directional_derivative(geom, xi, alpha, sign=-1))
    assert diff <= 1 / gamma(1 - alpha) + 1e-6


def test_m_eps_symbol_at_origin():
    geom = ProductGeometry.unit_spheres((3,))
    assert m_eps_symbol(geom, np.zeros(3), 0, 0.25) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("a,b,t", [(math.e, math.e, 0.5), (1.0, 10.0, 0.3), (2.0, 5.0, 0.8)])
def test_stein_constants(a, b, t):
    got = stein_interp_bound(lambda y: np.full(np.shape(y), a), lambda y: np.full(np.shape(y), b), t)
    assert got.value == pytest.approx(a ** (1 - t) * b**t, rel=1e-6)


@given(st.floats(0.05, 0.95), st.floats(-2.5, 2.5))
def test_stein_reproduces_harmonic_function(t, a):
    # exp(a y) cos(a s) is harmonic on the strip; its boundary data interpolate to cos(a t) at y = 0
    got = stein_interp_bound(lambda y: np.exp(a * y), lambda y: math.cos(a) * np.exp(a * y), t, log_input=True)
    # the truncation tail is an estimate of the missing part of the exponent
    assert abs(math.log(got.value) - math.cos(a * t)) <= 1.01 * got.tail + 1e-10


@given(st.floats(0.5, 20.0), st.floats(0.5, 20.0), st.floats(0.05, 0.95))
def test_stein_log_convex_in_endpoints(a, b, t):
    lo = stein_interp_bound(lambda y: np.full(np.shape(y), a), lambda y: np.full(np.shape(y), b), t).value
    hi = stein_interp_bound(lambda y: np.full(np.shape(y), 2 * a), lambda y: np.full(np.shape(y), b), t).value
    assert hi >= lo


def test_stein_rejects_fast_growth():
    with pytest.raises(DomainError):
        stein_interp_bound(lambda y: 4.0 * np.cosh(np.pi * y), lambda y: np.zeros(np.shape(y)), 0.5, log_input=True)


def test_interpolation_exponents_example():
    e = interpolation_exponents(1.6, 3)
    assert (e.theta, e.eps, e.alpha) == pytest.approx((0.75, 0.0625, 0.6875), abs=1e-15)
    assert e.alpha > 1 / 1.6


@pytest.mark.parametrize("p,N", [(1.5, 3), (2.0, 3), (4 / 3, 4), (1.5, 4), (1.0, 5)])
def test_interpolation_exponents_rejects_boundary(p, N):
    with pytest.raises(DomainError):
        interpolation_exponents(p, N)


def test_exponent_formulas_on_boundary_example():
    # p = 1.5, N = 4 sits on the excluded upper end; the formulas alone still evaluate
    e = _exponents(1.5, 4)
    assert (e.theta, e.eps, e.alpha) == pytest.approx((2 / 3, 1 / 6, 5 / 6), abs=1e-15)


@given(st.integers(3, 12), st.floats(0.001, 0.999))
def test_exponents_admissible_inside_interval(N, s):
    lo, hi = N / (N - 1), (N - 1) / (N - 2)
    p = lo + s * (hi - lo)
    assume(lo < p < hi)
    e = interpolation_exponents(p, N)
    assert 0 < e.eps < 0.5 * N * e.theta - 1
    assert e.alpha > 1 / p
