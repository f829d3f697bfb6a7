"""Every acceptance criterion at its stated size and tolerance.

Each test records one PASS/FAIL line, printed at the end of the run (and to
stdout with ``-s``). Criterion 7 is expected to fail: the stated closed form
for Q is ``r_N`` times the shadow volume the body actually has.
"""

import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from maxbound import certify, suites
from maxbound.errors import DomainError
from maxbound.frac_calculus import interpolation_exponents

pytestmark = pytest.mark.slow


def _record(n, ok, detail, start):
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  ({time.perf_counter() - start:.1f} s)"
    ACCEPTANCE_LINES[n] = line
    print(line)
    return ok


def _failed(reports):
    return [f"{r.id}/{c.name}={c.value:.3g}" for r in reports for c in r.checks if not c.passed]


def _summary(reports):
    bad = _failed(reports)
    return not bad, "; ".join(bad[:4]) if bad else f"{len(reports)} report(s) pass"


def test_criterion_01_bessel_routes():
    start = time.perf_counter()
    rep = suites.bessel_crossval(count=1000, x_max=50.0, tol=1e-10)
    elapsed = time.perf_counter() - start
    ok = rep.passed and elapsed < 60
    assert _record(1, ok, f"max rel diff {rep.constant:.2e} (tol 1e-10)", start)


def test_criterion_02_radial_derivative():
    start = time.perf_counter()
    rep = suites.radial_crossval(count=5000, seed=0, tol_quad=1e-8, tol_fd=1e-5)
    elapsed = time.perf_counter() - start
    ok = rep.passed and rep.grid["count"] >= 5000 and elapsed < 300
    detail = ", ".join(f"{c.name}={c.value:.2e}" for c in rep.checks)
    assert _record(2, ok, detail, start)


def test_criterion_03_leibniz():
    start = time.perf_counter()
    rep = suites.leibniz_vs_enumerated(count=200, seed=0, tol=1e-10)
    assert _record(3, rep.passed, f"max rel diff {rep.constant:.2e} (tol 1e-10)", start)


def test_criterion_04_riesz():
    start = time.perf_counter()
    rep = suites.riesz_consistency(tol_k=1e-8, tol_int=1e-6)
    detail = ", ".join(f"{c.name}={c.value:.1e}" for c in rep.checks[:6])
    assert _record(4, rep.passed, detail, start)


def test_criterion_05_gamma_ratio():
    start = time.perf_counter()
    rep = certify.certify_gamma_ratio(40, 40)
    spot = rep.extras["spot_values"]
    spots_ok = abs(spot["alpha=1,N=3"] - 0.5) <= 1e-12 and abs(spot["alpha=2,N=3"] - 1.0 / 3.0) <= 1e-12
    bound = math.exp(-1.0 / 3.0) / math.sqrt(2.0)
    ok = rep.passed and spots_ok and rep.constant < bound
    assert _record(5, ok, f"max ratio {rep.constant:.6f} < {bound:.5f}, spots {spots_ok}", start)


def test_criterion_06_small_frequency():
    start = time.perf_counter()
    reports = [certify.certify_small_freq_deriv(N, a) for N in (3, 4, 5) for a in range(1, 5)]
    ok, detail = _summary(reports)
    worst = max(r.checks[0].value / r.checks[0].threshold for r in reports)
    assert _record(6, ok, f"{detail}; max sup/bound {worst:.4f}", start)


def test_criterion_07_q_invariant():
    start = time.perf_counter()
    rep = suites.q_invariant_check(((2, 2), (3, 2), (2, 3)), samples=1_000_000, seed=0)
    detail = "; ".join(f"{c.name}={c.value:.3g}" for c in rep.checks)
    # expected to fail: the stated value is r_N times the Monte Carlo shadow volume
    assert _record(7, rep.passed, detail, start), detail


def test_criterion_08_maximal_comparison():
    start = time.perf_counter()
    reports = [suites.maximal_compare(dims, fam, (1.5, 2.0, 3.0)) for dims in ((2,), (2, 2)) for fam in ("gaussian", "bump")]
    elapsed = time.perf_counter() - start
    ok, detail = _summary(reports)
    eps = max(r.extras["eps_grid"] for r in reports)
    ratio = max(r.constant for r in reports)
    assert _record(8, ok and elapsed < 600, f"{detail}; max ratio {ratio:.4f}, max eps_grid {eps:.4f}", start)


def test_criterion_09_poisson_difference():
    start = time.perf_counter()
    reports = [certify.certify_poisson_difference(N, ell) for N in (3, 4, 5) for ell in (1, 2, 3)]
    ok, detail = _summary(reports)
    assert _record(9, ok, detail, start)


def test_criterion_10_gamma_decay():
    start = time.perf_counter()
    rep = certify.certify_gamma_decay(3, 1, range(-6, 7))
    detail = ", ".join(f"{c.name}={c.value:.3f}" for c in rep.checks)
    assert _record(10, rep.passed, detail, start)


def test_criterion_11_stein_constant_inputs():
    start = time.perf_counter()
    rep = suites.stein_constant_inputs(((math.e, math.e, 0.5), (1.0, 10.0, 0.3), (2.0, 5.0, 0.8)), tol=1e-6)
    assert _record(11, rep.passed, f"max rel err {rep.constant:.2e} (tol 1e-6)", start)


def test_criterion_12_exponents():
    start = time.perf_counter()
    e = interpolation_exponents(1.6, 3)
    values_ok = np.allclose([e.theta, e.eps, e.alpha], [0.75, 0.0625, 0.6875], rtol=0, atol=1e-15) and e.alpha > 1 / 1.6
    try:
        interpolation_exponents(1.5, 3)
        rejected = False
    except DomainError:
        rejected = True
    ok = values_ok and rejected
    assert _record(12, ok, f"alpha={e.alpha} > 1/p={1 / 1.6}, boundary rejected={rejected}", start)


def test_criterion_13_negative_controls():
    start = time.perf_counter()
    controls = certify.negative_controls(seed=0)
    survivors = [r.id for r in controls if r.passed]
    ok = not survivors and len(controls) >= 8
    assert _record(13, ok, f"{len(controls)} controls, unexpectedly passing: {survivors or 'none'}", start)
