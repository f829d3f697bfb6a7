import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxbound.certify import (
    Check,
    certify_decay_large,
    certify_gamma_decay,
    certify_gamma_ratio,
    certify_gaussian_small,
    certify_k_derivative_bound,
    certify_poisson_difference,
    certify_product_majorant,
    certify_small_freq_deriv,
    decade_growth,
    gamma_functional,
    gamma_ratio,
    grid_hash,
    negative_controls,
)
from maxbound.errors import DomainError, RangeError
from maxbound.fourier import sphere_ft_radial, unit_measure_sphere_radius

SMALL_K_GRID = {"xi_count": 120, "theta_count": 6, "r_count": 5}


@pytest.mark.parametrize("N,alpha", [(3, 0), (4, 1), (8, 4)])
def test_decay_large_stabilizes(N, alpha):
    rep = certify_decay_large(N, alpha, {"w_count": 600})
    assert rep.passed and math.isfinite(rep.constant)


def test_decay_large_closed_form_n3():
    # N = 3, alpha = 0: |sin w / w| * w is bounded by 1 and approaches 1
    rep = certify_decay_large(3, 0)
    assert rep.constant <= 1 + 1e-12 and rep.constant > 0.999


def test_decay_large_control():
    assert not certify_decay_large(3, 2, {"w_count": 600}, exponent_shift=0.5).passed


@given(st.integers(3, 8), st.integers(0, 4), st.integers(20, 80))
@settings(max_examples=15)
def test_decay_sup_monotone_under_nested_refinement(N, alpha, n):
    coarse = certify_decay_large(N, alpha, {"w_count": n + 1, "r_count": 3})
    fine = certify_decay_large(N, alpha, {"w_count": 2 * n + 1, "r_count": 5})
    assert fine.constant >= coarse.constant


@pytest.mark.parametrize("N", [3, 4, 5])
def test_gaussian_small(N):
    rep = certify_gaussian_small(N)
    assert rep.passed and rep.constant > 0
    # -log m~ ~ w^2 / (2N) as w -> 0
    assert rep.extras["small_w_ratio_measured"] == pytest.approx(1 / (2 * N), rel=1e-4)


def test_gaussian_small_control():
    rep = certify_gaussian_small(3, unit_multiplier=True)
    assert rep.constant == 0 and not rep.passed


def test_gamma_ratio_spots():
    assert gamma_ratio(1, 3) == pytest.approx(0.5, abs=1e-12)
    assert gamma_ratio(2, 3) == pytest.approx(1 / 3, abs=1e-12)
    rep = certify_gamma_ratio(40, 40)
    assert rep.passed
    assert rep.extras["spot_values"]["alpha=1,N=3"] == pytest.approx(0.5, abs=1e-12)


def test_gamma_ratio_control():
    assert not certify_gamma_ratio(threshold=0.49).passed


@given(st.integers(1, 40), st.integers(3, 40))
def test_gamma_ratio_below_stated_constant(alpha, N):
    assert gamma_ratio(alpha, N) < math.exp(-1 / 3) / math.sqrt(2)


@pytest.mark.parametrize("N,alpha,bound", [(3, 1, 2 / 3), (3, 2, 5 / 9), (10, 1, 0.2)])
def test_small_freq_examples(N, alpha, bound):
    rep = certify_small_freq_deriv(N, alpha)
    assert rep.passed and rep.constant <= bound + 1e-9


def test_small_freq_control():
    assert not certify_small_freq_deriv(3, 1, power=3).passed


@pytest.mark.parametrize("R,delta", [(2.0, 0.05), (4.0, 0.1), (16.0, 0.2)])
def test_product_majorant(R, delta):
    rep = certify_product_majorant(3, 2, R, delta, {"random": 800})
    assert rep.passed
    assert rep.extras["m_at_origin"] == pytest.approx(1.0, abs=1e-14)
    assert rep.extras["excluded_block_abs_m"] < 1.0
    assert rep.extras["single_block_half_c"] >= rep.constant


def test_product_majorant_control():
    assert not certify_product_majorant(2, 2, power=1).passed


@pytest.mark.parametrize("N,ell", [(3, 1), (4, 2)])
def test_k_derivative_bound(N, ell):
    rep = certify_k_derivative_bound(N, ell, SMALL_K_GRID)
    assert rep.passed and math.isfinite(rep.constant)
    assert rep.grid["K"] == math.ceil((N - 1) / 2)


def test_k_derivative_control():
    assert not certify_k_derivative_bound(3, 1, SMALL_K_GRID, exponent_shift=0.5).passed


@pytest.mark.parametrize("N,ell", [(3, 1), (5, 3)])
def test_poisson_difference(N, ell):
    rep = certify_poisson_difference(N, ell, theta_count=6)
    assert rep.passed and math.isfinite(rep.extras["C2"])


def test_poisson_difference_closed_form_point():
    N = 3
    R = unit_measure_sphere_radius(N)
    rep = certify_poisson_difference(N, 1, theta_count=2)
    direct = abs(float(sphere_ft_radial(N, R, 10.0)) - math.exp(-10.0)) * 10.0
    assert rep.extras["C1"] >= direct


def test_poisson_difference_control():
    assert not certify_poisson_difference(3, 1, subtract=False).passed


def test_gamma_functional_finite():
    g = gamma_functional(0)
    assert math.isfinite(g.value) and g.tail <= 0.1 * g.value


def test_gamma_functional_control_raises():
    with pytest.raises(RangeError):
        gamma_functional(0, kernel="poisson", subtract_poisson=False)


def test_gamma_decay_slope():
    rep = certify_gamma_decay()
    assert rep.passed and rep.constant <= -0.4


def test_all_controls_fail():
    assert [r.passed for r in negative_controls()] == [False] * 8


def test_reports_reproducible():
    a = certify_product_majorant(3, 2, seed=11, grid={"random": 300}).to_dict()
    b = certify_product_majorant(3, 2, seed=11, grid={"random": 300}).to_dict()
    c = certify_product_majorant(3, 2, seed=12, grid={"random": 300}).to_dict()
    assert a == b
    assert a["grid_hash"] != c["grid_hash"]


def test_report_key_order():
    keys = list(certify_gamma_ratio(5, 5).to_dict())
    assert keys == ["id", "pass", "max_ratio", "threshold", "constant", "extremum", "checks", "grid", "grid_hash", "seed", "evidence", "extras"]


@given(st.floats(-10, 10, allow_nan=False), st.floats(-10, 10, allow_nan=False), st.booleans())
def test_check_pass_iff_below_threshold(v, t, strict):
    c = Check("x", v, t, strict)
    assert c.passed == (v < t if strict else v <= t)


def test_nan_check_fails():
    assert not Check("x", math.nan, math.inf).passed


def test_grid_hash_depends_on_values():
    assert grid_hash(a=[1.0, 2.0]) != grid_hash(a=[1.0, 2.0000001])
    assert grid_hash(a=np.arange(3.0)) == grid_hash(a=np.arange(3.0))


def test_decade_growth_flat_and_growing():
    x = np.geomspace(1, 1000, 31)
    assert decade_growth(x, np.ones(31)) == pytest.approx(1.0)
    assert decade_growth(x, x) > 5


@pytest.mark.parametrize(
    "call",
    [
        lambda: certify_decay_large(2, 1),
        lambda: certify_decay_large(3, 5),
        lambda: certify_gaussian_small(3, C_upper=1.0),
        lambda: certify_gamma_ratio(101, 3),
        lambda: certify_product_majorant(3, 2, R_param=1.0),
        lambda: certify_k_derivative_bound(6, 1),
        lambda: certify_poisson_difference(3, 4),
        lambda: gamma_functional(7),
    ],
)
def test_preconditions(call):
    with pytest.raises(DomainError):
        call()
