import math

import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given
from hypothesis import strategies as st

from maxbound.errors import DomainError, ResourceError
from maxbound.fourier import ProductGeometry, product_multiplier, sphere_ft_radial, unit_measure_sphere_radius
from maxbound.radial_deriv import (
    DERIV_SWITCH,
    finite_difference,
    fornberg_weights,
    multi_indices,
    product_radial_derivative_batch,
    product_radial_derivative_enumerated,
    product_radial_derivative_leibniz,
    sphere_radial_derivative_explicit,
    sphere_radial_derivative_quadrature,
    sphere_radial_derivative_series,
)

dims = st.integers(3, 8)
orders = st.integers(0, 4)
freqs = st.floats(0.01, 50.0)
radii = st.floats(1.0, 2.0)


def _scale(N, u, alpha):
    k = 2 * math.pi * unit_measure_sphere_radius(N) * u
    return max(1.0, k**alpha)


@given(dims, orders, freqs, radii)
def test_explicit_matches_quadrature(N, alpha, u, r):
    R = unit_measure_sphere_radius(N)
    e = sphere_radial_derivative_explicit(N, R, u, alpha, r)
    q = sphere_radial_derivative_quadrature(N, R, u, alpha, r)
    assert abs(e - q) / _scale(N, u, alpha) < 1e-8


@given(dims, orders, freqs, radii)
def test_explicit_matches_finite_differences(N, alpha, u, r):
    R = unit_measure_sphere_radius(N)
    k = 2 * math.pi * R * u
    fd = finite_difference(lambda s: sphere_ft_radial(N, R, s * u), r, alpha, 0.02 / max(k, 1.0))
    e = sphere_radial_derivative_explicit(N, R, u, alpha, r)
    assert abs(e - fd.value) / _scale(N, u, alpha) < 1e-5


@pytest.mark.parametrize("N", [3, 4, 7])
@pytest.mark.parametrize("u", [0.3, 2.0, 11.0])
def test_first_derivative_scipy_oracle(N, u):
    # d/dr [r^-nu J_nu(k r)] = -k r^-nu J_(nu+1)(k r)
    R = unit_measure_sphere_radius(N)
    nu = (N - 2) / 2
    k = 2 * math.pi * R * u
    r = 1.3
    expected = 2 * math.pi * R ** (N / 2) * u**-nu * (-k) * r**-nu * sc.jv(nu + 1, k * r)
    assert sphere_radial_derivative_explicit(N, R, u, 1, r) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("alpha", range(5))
@pytest.mark.parametrize("N", [3, 5, 8])
def test_series_branch_continuous_at_switch(N, alpha):
    R = unit_measure_sphere_radius(N)
    u = DERIV_SWITCH / (2 * math.pi * R)
    a = sphere_radial_derivative_series(N, R, u, alpha, 1.5)
    b = sphere_radial_derivative_explicit(N, R, u * (1 + 1e-12), alpha, 1.5)
    assert a == pytest.approx(b, rel=1e-9, abs=1e-12)


def test_zeroth_derivative_is_transform():
    R = unit_measure_sphere_radius(4)
    u = np.linspace(0.0, 9.0, 40)
    np.testing.assert_allclose(sphere_radial_derivative_explicit(4, R, u, 0, 1.7), sphere_ft_radial(4, R, 1.7 * u), rtol=1e-12, atol=1e-14)


@given(st.integers(2, 3), st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_leibniz_equals_enumeration(ell, j, seed):
    rng = np.random.default_rng(seed)
    geom = ProductGeometry.unit_spheres(tuple(int(d) for d in rng.integers(2, 6, size=ell)))
    xi = rng.standard_normal(geom.n) * 5
    r = float(rng.uniform(1, 2))
    a = product_radial_derivative_leibniz(geom, xi, j, r)
    b = product_radial_derivative_enumerated(geom, xi, j, r)
    assert a == pytest.approx(b, rel=1e-10, abs=1e-300)


@given(st.integers(0, 3), st.integers(0, 2**32 - 1))
def test_batch_matches_scalar(j, seed):
    rng = np.random.default_rng(seed)
    geom = ProductGeometry.unit_spheres((3, 2))
    xis = rng.standard_normal((6, geom.n)) * 3
    rs = rng.uniform(1, 2, size=6)
    batch = product_radial_derivative_batch(geom, geom.block_norms(xis), j, rs)
    single = [product_radial_derivative_leibniz(geom, x, j, r) for x, r in zip(xis, rs)]
    np.testing.assert_allclose(batch, single, rtol=1e-13, atol=1e-15)


@pytest.mark.parametrize("j", [1, 2, 3])
def test_product_derivative_finite_difference(j):
    geom = ProductGeometry.unit_spheres((3, 3))
    xi = np.array([0.4, -0.2, 0.9, 0.1, 0.3, -0.5])
    fd = finite_difference(lambda s: float(product_multiplier(geom, s * xi)), 1.4, j, 0.01)
    assert product_radial_derivative_leibniz(geom, xi, j, 1.4) == pytest.approx(fd.value, abs=1e-7)


@given(st.integers(1, 4), st.integers(0, 6))
def test_multi_indices_are_compositions(ell, j):
    idx = list(multi_indices(ell, j))
    assert len(idx) == math.comb(j + ell - 1, ell - 1)
    assert len(set(idx)) == len(idx)
    assert all(sum(a) == j and min(a) >= 0 for a in idx)


@pytest.mark.parametrize(
    "offsets,order,expected",
    [([-1, 0, 1], 1, [-0.5, 0.0, 0.5]), ([-1, 0, 1], 2, [1.0, -2.0, 1.0]), ([0, 1], 1, [-1.0, 1.0])],
)
def test_fornberg_weights_frozen(offsets, order, expected):
    np.testing.assert_allclose(fornberg_weights(np.array(offsets, float), order), expected, atol=1e-14)


@pytest.mark.parametrize("alpha", range(1, 5))
def test_finite_difference_on_sine(alpha):
    fd = finite_difference(np.sin, 1.0, alpha, 0.05)
    assert fd.value == pytest.approx(math.sin(1.0 + alpha * math.pi / 2), abs=1e-8)
    assert fd.error < 1e-6


def test_errors():
    R = unit_measure_sphere_radius(3)
    with pytest.raises(DomainError):
        sphere_radial_derivative_explicit(3, R, 1.0, 9, 1.0)
    with pytest.raises(DomainError):
        sphere_radial_derivative_explicit(3, R, 1.0, 1, 0.0)
    with pytest.raises(DomainError):
        sphere_radial_derivative_explicit(1, R, 1.0, 1, 1.0)
    with pytest.raises(DomainError):
        product_radial_derivative_leibniz(ProductGeometry.unit_balls((3,)), np.ones(3), 1, 1.0)
    with pytest.raises(ResourceError):
        product_radial_derivative_enumerated(ProductGeometry.unit_spheres((2,) * 20), np.ones(40), 8, 1.0)
