import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maxbound import kernels, maximal_grid
from maxbound.errors import DomainError, ResourceError, ShapeError
from maxbound.fourier import ProductGeometry, sphere_measure
from maxbound.maximal_grid import (
    GridFunction,
    ScaleGrid,
    average,
    ball_rule,
    compare_mb_ms,
    dimension_sweep,
    factor_stencil,
    lp_norm,
    maximal_ball,
    maximal_sphere,
    radius_change_check,
    rotation_identity_check,
    sphere_rule,
)

BALL1 = ProductGeometry.radius_one("ball", (1,))
BALL2 = ProductGeometry.radius_one("ball", (2,))
SPH2 = ProductGeometry.radius_one("sphere", (2,))


def gaussian(x):
    return np.exp(-np.sum(x * x, axis=-1))


small_grids = arrays(np.float64, st.integers(5, 12).map(lambda n: (n, n)), elements=st.floats(-3, 3))


@pytest.mark.parametrize("x", [2.0, 3.0, 5.0])
def test_interval_indicator_far_field(x):
    # for the indicator of [-1, 1] the best centered interval reaches back to -1:
    # t = |x| + 1 and the average is 2 / (2t) = 1 / (|x| + 1)
    f = GridFunction.sample(lambda p: (np.abs(p[..., 0]) <= 1.0).astype(float), 1, 8.0, 0.02)
    m = maximal_ball(f, BALL1, ScaleGrid(1.0, 12.0, 512))
    i = int(round((x - f.origin[0]) / f.h))
    assert m.values[i] == pytest.approx(1 / (abs(x) + 1), abs=0.01)


@pytest.mark.parametrize("geom", [BALL2, SPH2, ProductGeometry.radius_one("sphere", (2, 2))], ids=str)
def test_constant_function(geom):
    f = GridFunction.constant(2.5, geom.n, 1.6 if geom.n == 4 else 3.0, 0.4)
    op = maximal_ball if geom.kind == "ball" else maximal_sphere
    m = op(f, geom, ScaleGrid.for_grid(f, 8))
    np.testing.assert_array_equal(m.values, 2.5)


def test_constant_ratio_is_one():
    f = GridFunction.constant(1.0, 2, 3.0, 0.25)
    cmp = compare_mb_ms(f, BALL2, SPH2, (1.5, 2.0, 3.0), ScaleGrid.for_grid(f, 16))
    assert cmp.ratio == (1.0, 1.0, 1.0)


@given(small_grids, small_grids)
@settings(max_examples=20)
def test_sublinear(a, b):
    n = min(a.shape[0], b.shape[0])
    f, g = GridFunction(a[:n, :n], 0.5), GridFunction(b[:n, :n], 0.5)
    scales = ScaleGrid(0.5, 3.0, 6)
    lhs = maximal_ball(f.with_values(f.values + g.values), BALL2, scales).values
    rhs = maximal_ball(f, BALL2, scales).values + maximal_ball(g, BALL2, scales).values
    assert np.all(lhs <= rhs + 1e-12)


@given(small_grids, st.floats(-4, 4))
@settings(max_examples=20)
def test_absolute_homogeneity(a, c):
    f = GridFunction(a, 0.5)
    scales = ScaleGrid(0.5, 3.0, 6)
    np.testing.assert_allclose(
        maximal_sphere(f.with_values(c * a), SPH2, scales).values,
        abs(c) * maximal_sphere(f, SPH2, scales).values,
        rtol=1e-12,
        atol=1e-300,
    )


@given(small_grids)
@settings(max_examples=20)
def test_bounds_and_refinement_monotone(a):
    f = GridFunction(a, 0.5)
    coarse = ScaleGrid(0.5, 3.0, 5)
    m1 = maximal_ball(f, BALL2, coarse).values
    m2 = maximal_ball(f, BALL2, coarse.refined()).values
    assert np.all(m1 >= np.abs(a)) and np.all(m1 <= np.abs(a).max())
    assert np.all(m2 >= m1)


@given(st.integers(-3, 3), st.integers(-3, 3))
@settings(max_examples=15)
def test_translation_covariance(dx, dy):
    f = GridFunction.sample(lambda p: np.exp(-4 * np.sum(p * p, axis=-1)), 2, 6.0, 0.5)
    scales = ScaleGrid(0.5, 2.0, 5)
    m = maximal_sphere(f, SPH2, scales)
    ms = maximal_sphere(f.shifted((dx, dy)), SPH2, scales)
    inner = (slice(6, -6), slice(6, -6))
    np.testing.assert_allclose(ms.values[inner], m.shifted((dx, dy)).values[inner], rtol=1e-13, atol=1e-15)


@given(arrays(np.float64, st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 4)), elements=st.floats(-1e6, 1e6)),
       st.floats(0.01, 10), st.integers(0, 10))
@settings(max_examples=20)
def test_save_load_round_trip(tmp_path_factory, a, h, shift):
    f = GridFunction(a, h, tuple(float(shift) * h * k for k in range(a.ndim)))
    stem = tmp_path_factory.mktemp("grid") / "f"
    f.save(stem)
    g = GridFunction.load(stem)
    np.testing.assert_array_equal(g.values, f.values)
    assert (g.h, g.origin) == (f.h, f.origin)


def test_binary_layout(tmp_path):
    f = GridFunction(np.arange(6.0).reshape(2, 3), 0.5)
    f.save(tmp_path / "g")
    raw = (tmp_path / "g.bin").read_bytes()
    assert raw == np.arange(6.0).astype("<f8").tobytes()
    assert (tmp_path / "g.hdr").read_text().splitlines()[:2] == ["maxbound-grid 1", "shape 2 3"]


def test_load_rejects_bad_header(tmp_path):
    GridFunction(np.zeros((2, 2)), 1.0).save(tmp_path / "g")
    (tmp_path / "g.hdr").write_text("something else\n")
    with pytest.raises(ShapeError):
        GridFunction.load(tmp_path / "g")


@given(arrays(np.float64, st.tuples(st.integers(3, 9), st.integers(3, 9), st.integers(1, 5), st.integers(1, 3)), elements=st.floats(-10, 10)),
       st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_backends_agree(a, seed):
    rng = np.random.default_rng(seed)
    offsets = rng.integers(-3, 4, size=(7, 4)).astype(np.int64)
    weights = rng.random(7)
    a = np.ascontiguousarray(a)
    np.testing.assert_allclose(kernels.stencil_apply(a, offsets, weights), kernels.python_stencil_apply(a, offsets, weights, 1),
                               rtol=1e-13, atol=1e-12)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("d", [2, 3, 4])
def test_sphere_rule_moments(d):
    pts, w = sphere_rule(d, 12)
    assert w.sum() == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-14)
    assert float(w @ pts[:, 0] ** 2) == pytest.approx(1 / d, abs=1e-13)
    assert float(w @ pts[:, -1] ** 4) == pytest.approx(3 / (d * (d + 2)), abs=1e-13)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_ball_rule_second_moment(d):
    pts, w = ball_rule(d, 2.5)
    assert float(w @ pts[:, 0] ** 2) == pytest.approx(2.5**2 / (d + 2), rel=1e-10)


def test_stencil_weights_positive_and_normalised():
    for kind, d in [("ball", 1), ("ball", 2), ("sphere", 2), ("sphere", 3)]:
        _, w = factor_stencil(kind, d, 3.7)
        assert np.all(w > 0) and w.sum() == pytest.approx(1.0, abs=1e-13)


def test_average_of_linear_function_is_exact():
    # multilinear interpolation reproduces affine functions, so their averages are exact
    f = GridFunction.sample(lambda p: 3.0 + p[..., 0] - 2 * p[..., 1], 2, 4.0, 0.25)
    avg = average(f, SPH2, 1.0, f.values)
    inner = (slice(8, -8), slice(8, -8))
    np.testing.assert_allclose(avg[inner], f.values[inner], atol=1e-12)


def test_lp_norm_of_gaussian():
    f = GridFunction.sample(gaussian, 2, 6.0, 0.05)
    assert lp_norm(f, 2) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-10)
    assert lp_norm(f, math.inf) == 1.0


def test_rotation_identity():
    rep = rotation_identity_check(2, 4, seed=1)
    assert rep.deviation <= 1e-6


@pytest.mark.parametrize("n", [2, 3, 4])
def test_radius_change(n):
    dev = radius_change_check(n, 1.3, 0.7, lambda x: np.exp(-np.sum(x * x, axis=-1)) * (1 + x[..., 0] ** 2), m=48)
    assert dev < 1e-10


def test_sweep_skips_zero():
    assert dimension_sweep(2, [(2, 1)], family="zero").skipped


def test_sweep_bounded():
    rep = dimension_sweep(2.0, [(1, 1), (2, 1), (1, 2)], h=0.4, half_width=2.4, scale_count=12)
    assert rep.passed and all(r >= 1.0 for r in rep.ratios)


def test_errors(monkeypatch):
    f = GridFunction.sample(gaussian, 2, 2.0, 0.5)
    with pytest.raises(ShapeError):
        maximal_ball(f, ProductGeometry.radius_one("ball", (3,)), ScaleGrid(0.5, 2))
    with pytest.raises(DomainError):
        maximal_sphere(f, BALL2, ScaleGrid(0.5, 2))
    with pytest.raises(DomainError):
        compare_mb_ms(f, ProductGeometry.unit_balls((2,)), SPH2, 2, ScaleGrid(0.5, 2))
    with pytest.raises(DomainError):
        ScaleGrid(2.0, 1.0)
    with pytest.raises(DomainError):
        GridFunction(np.array([np.nan]), 1.0)
    monkeypatch.setattr(maximal_grid, "WORK_BUDGET", 10)
    with pytest.raises(ResourceError):
        maximal_ball(f, BALL2, ScaleGrid(0.5, 2))
    assert sphere_measure(2) == pytest.approx(2 * math.pi)
