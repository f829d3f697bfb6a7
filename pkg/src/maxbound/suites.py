"""Named verification suites: each returns a list of certification reports.

The functions take explicit sizes so the same code serves quick CLI runs
and the full-size acceptance runs.
"""

import math
import time

import numpy as np

from .body_geometry import (
    McConfig,
    analytic_maximizer,
    cross_term_mc,
    isotropic_constant,
    projection_volume,
    q_invariant,
    q_invariant_cauchy,
    second_moment_mc,
    shadow_volume_mc,
    smoothed_moment,
)
from .certify import Check, certify_all, make_report, negative_controls
from .errors import DomainError
from .fourier import (
    SWITCH_RADIUS,
    ProductGeometry,
    ball_ft_radial,
    sphere_ft_integral,
    sphere_ft_radial,
    unit_measure_sphere_radius,
)
from .frac_calculus import (
    FracOrder,
    frac_directional_derivative,
    gaussian_profile,
    interpolation_exponents,
    multiplier_m_z,
    polynomial_profile,
    riesz_derivative,
    riesz_derivative_direct,
    sphere_profile,
    stein_interp_bound,
)
from .maximal_grid import GridFunction, ScaleGrid, compare_mb_ms
from .radial_deriv import (
    finite_difference,
    product_radial_derivative_enumerated,
    product_radial_derivative_leibniz,
    sphere_radial_derivative_explicit,
    sphere_radial_derivative_quadrature,
)
from .specfun import bessel_j_closed, bessel_j_integral, bessel_j_series, gamma

__all__ = [
    "SUITES",
    "bessel_crossval",
    "gamma_spot_values",
    "fourier_identities",
    "radial_crossval",
    "leibniz_vs_enumerated",
    "riesz_consistency",
    "stein_constant_inputs",
    "mueller_difference",
    "geometry_invariants",
    "q_invariant_check",
    "maximal_compare",
    "exponent_report",
]


def _rng(seed, stream):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream])))


def _relerr(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def bessel_crossval(count=1000, x_max=50.0, tol=1e-10):
    """Series, Poisson-integral and closed half-integer routes on ``nu in {0, 1/2, ..., 9/2}``."""
    start = time.perf_counter()
    xs = np.linspace(0.0, x_max, count)
    nus = np.arange(10) / 2.0
    worst = {"series-integral": (0.0, None), "series-closed": (0.0, None), "integral-closed": (0.0, None)}

    def note(key, err, nu, x):
        if err > worst[key][0]:
            worst[key] = (err, {"nu": float(nu), "x": float(x)})

    for nu in nus:
        for x in xs:
            s = bessel_j_series(nu, x)
            i = bessel_j_integral(nu, x)
            note("series-integral", _relerr(i, s), nu, x)
            if nu != int(nu):
                c = float(bessel_j_closed(nu, x)) if x > 0 else s
                note("series-closed", _relerr(c, s), nu, x)
                note("integral-closed", _relerr(c, i), nu, x)
    checks = [Check(f"max relative {k}", v[0], tol) for k, v in worst.items()]
    key = max(worst, key=lambda k: worst[k][0])
    return make_report(
        "specfun.bessel_crossval",
        checks,
        worst[key][0],
        worst[key][1] or {},
        {"count": count, "x_max": x_max},
        {"x": xs, "nu": nus},
        start,
    )


def gamma_spot_values():
    """Gamma at integers and half-integers against exact values."""
    start = time.perf_counter()
    cases = [(n, float(math.factorial(n - 1))) for n in range(1, 21)]
    cases += [(k + 0.5, math.factorial(2 * k) * math.sqrt(math.pi) / (4**k * math.factorial(k))) for k in range(0, 20)]
    errs = [_relerr(gamma(x), v) for x, v in cases]
    i = int(np.argmax(errs))
    return make_report(
        "specfun.gamma_spot_values",
        [Check("max relative error", max(errs), 1e-13)],
        max(errs),
        {"x": cases[i][0]},
        {"count": len(cases)},
        {"x": [c[0] for c in cases]},
        start,
    )


def fourier_identities():
    """Branch agreement at the switch, sphere quadrature vs Bessel form, and closed forms."""
    start = time.perf_counter()
    errs = {}
    eps = 1e-12
    branch = 0.0
    for N in range(1, 9):
        t = SWITCH_RADIUS / (2.0 * math.pi)
        lo, hi = ball_ft_radial(N, 1.0, t * (1 - eps)), ball_ft_radial(N, 1.0, t * (1 + eps))
        branch = max(branch, abs(lo - hi))
        if N >= 2:
            lo, hi = sphere_ft_radial(N, 1.0, t * (1 - eps)), sphere_ft_radial(N, 1.0, t * (1 + eps))
            branch = max(branch, abs(lo - hi) / (2 * math.pi))
    errs["branch jump at switch"] = branch
    quad = 0.0
    for N in range(2, 9):
        R = unit_measure_sphere_radius(N)
        for u in (0.01, 0.3, 1.0, 4.0, 17.0):
            quad = max(quad, abs(sphere_ft_integral(N, R, u) - sphere_ft_radial(N, R, u)))
    errs["sphere quadrature vs Bessel form"] = quad
    R3 = unit_measure_sphere_radius(3)
    u = np.linspace(0.0, 10.0, 201)
    x = 2.0 * math.pi * R3 * u
    errs["N=3 sinc form"] = float(np.max(np.abs(sphere_ft_radial(3, R3, u) - np.sinc(x / math.pi))))
    errs["N=1 ball sin form"] = float(np.max(np.abs(ball_ft_radial(1, 0.5, u) - np.sinc(u))))
    checks = [Check(k, v, 1e-10) for k, v in errs.items()]
    return make_report("fourier.identities", checks, max(errs.values()), {}, {}, {"u": u}, start, extras=errs)


def radial_crossval(count=5000, seed=0, tol_quad=1e-8, tol_fd=1e-5):
    """Explicit radial derivative vs oscillatory quadrature and finite differences on random tuples.

    Errors are scaled by ``max(1, (2 pi R |zeta|)^alpha)``.
    """
    start = time.perf_counter()
    rng = _rng(seed, 11)
    wq = wf = 0.0
    at_q = at_f = {}
    tuples = []
    for _ in range(count):
        N = int(rng.integers(3, 9))
        a = int(rng.integers(0, 5))
        u = float(10 ** rng.uniform(-2.0, math.log10(50.0)))
        r = float(rng.uniform(1.0, 2.0))
        tuples.append((N, a, u, r))
        R = unit_measure_sphere_radius(N)
        k = 2.0 * math.pi * R * u
        scale = max(1.0, k**a)
        e = sphere_radial_derivative_explicit(N, R, u, a, r)
        q = sphere_radial_derivative_quadrature(N, R, u, a, r)
        fd = finite_difference(lambda s, N=N, R=R, u=u: sphere_ft_radial(N, R, s * u), r, a, 0.02 / max(k, 1.0)).value
        point = {"N": N, "alpha": a, "u": u, "r": r}
        if abs(e - q) / scale > wq:
            wq, at_q = abs(e - q) / scale, point
        if abs(e - fd) / scale > wf:
            wf, at_f = abs(e - fd) / scale, point
    return make_report(
        "radial_deriv.crossval",
        [Check("explicit vs quadrature (scaled)", wq, tol_quad), Check("explicit vs finite difference (scaled)", wf, tol_fd)],
        max(wq, wf),
        at_q if wq / tol_quad >= wf / tol_fd else at_f,
        {"count": count},
        {"tuples": np.array(tuples, dtype=float)},
        start,
        seed=seed,
    )


def leibniz_vs_enumerated(count=200, seed=0, tol=1e-10):
    """Leibniz multi-index form against the sequence enumeration for ``ell in {2, 3}``, ``j <= 3``."""
    start = time.perf_counter()
    rng = _rng(seed, 12)
    worst, at = 0.0, {}
    for ell in (2, 3):
        dims = tuple(int(d) for d in rng.integers(2, 6, size=ell))
        geom = ProductGeometry.unit_spheres(dims)
        for _ in range(count):
            xi = rng.standard_normal(geom.n) * 10 ** rng.uniform(-1, 1.3)
            r = float(rng.uniform(1.0, 2.0))
            for j in range(4):
                a = product_radial_derivative_leibniz(geom, xi, j, r)
                b = product_radial_derivative_enumerated(geom, xi, j, r)
                err = abs(a - b) / max(abs(a), 1e-300)
                if err > worst:
                    worst, at = err, {"ell": ell, "j": j, "r": r}
    return make_report(
        "radial_deriv.leibniz_vs_enumerated",
        [Check("max relative difference", worst, tol)],
        worst,
        at,
        {"count": count},
        {"count": [count]},
        start,
        seed=seed,
    )


def _profiles():
    R = unit_measure_sphere_radius(3)
    return [polynomial_profile([1.0, -2.0, 0.5, 0.3]), gaussian_profile(1.0), sphere_profile(3, R, 2.0)]


def riesz_consistency(tol_k=1e-8, tol_int=1e-6):
    """``k``-independence, integer collapse ``I^(-m) f = (-1)^m f^(m)`` and the direct-form relation."""
    start = time.perf_counter()
    kdep = collapse = direct = 0.0
    ts = (0.3, 1.0, 1.7)
    for f in _profiles():
        for z in (0.5, -0.3, 0.7 + 2j, 1.4 - 1j):
            for t in ts:
                k0 = FracOrder.minimal(z).k
                v = [riesz_derivative(f, FracOrder(z, k0 + i), t) for i in range(3)]
                kdep = max(kdep, max(abs(x - v[0]) for x in v) / max(1.0, abs(v[0])))
        for m in (1, 2, 3):
            for t in ts:
                v = riesz_derivative(f, FracOrder(m, m + 1), t)
                ex = (-1) ** m * f.d(t, m)
                collapse = max(collapse, abs(v - ex) / max(1.0, abs(ex)))
        for z in (-0.3, -0.8 + 1j):
            a = riesz_derivative_direct(f, z, 1.0)
            b = riesz_derivative(f, FracOrder(z, 1), 1.0)
            direct = max(direct, abs(a + b) / max(1.0, abs(b)))
    return make_report(
        "frac_calculus.riesz_consistency",
        [
            Check("k-independence", kdep, tol_k),
            Check("integer collapse", collapse, tol_int),
            Check("direct form equals minus continuation", direct, 1e-8),
        ],
        max(kdep, collapse),
        {},
        {"profiles": [f.name for f in _profiles()]},
        {"t": ts},
        start,
    )


def stein_constant_inputs(cases=((math.e, math.e, 0.5), (1.0, 10.0, 0.3), (2.0, 5.0, 0.8)), tol=1e-6):
    """Constant endpoint bounds ``a``, ``b`` must interpolate to ``a^(1-t) b^t``."""
    start = time.perf_counter()
    errs = []
    for a, b, t in cases:
        got = float(stein_interp_bound(lambda y, a=a: np.full(np.shape(y), a), lambda y, b=b: np.full(np.shape(y), b), t))
        errs.append(_relerr(got, a ** (1 - t) * b**t))
    i = int(np.argmax(errs))
    return make_report(
        "frac_calculus.stein_constant_inputs",
        [Check("max relative error", max(errs), tol)],
        max(errs),
        {"a": cases[i][0], "b": cases[i][1], "t": cases[i][2]},
        {"cases": [list(c) for c in cases]},
        {"cases": np.array(cases)},
        start,
    )


def mueller_difference(points=(200, 64), alphas=(0.25, 0.5, 0.75), N=3, seed=0, sign=-1):
    """Sup of ``|m_alpha - <xi, grad>^alpha m|`` against ``1/Gamma(1 - alpha)``."""
    start = time.perf_counter()
    rng = _rng(seed, 13)
    checks, worst = [], {}
    for ell, count in zip((1, 2), points):
        geom = ProductGeometry.unit_spheres((N,) * ell)
        xis = rng.standard_normal((count, geom.n))
        xis *= (10 ** rng.uniform(-1.0, 1.5, size=count) / np.linalg.norm(xis, axis=1))[:, None]
        for a in alphas:
            sup = max(abs(multiplier_m_z(geom, xi, a) - frac_directional_derivative(geom, xi, a, sign=sign)) for xi in xis)
            worst[f"ell={ell},alpha={a}"] = sup
            checks.append(Check(f"ell={ell} alpha={a}", sup, 1.0 / gamma(1.0 - a) + 1e-6, provenance="stated"))
    return make_report(
        "frac_calculus.mueller_difference",
        checks,
        max(c.value / c.threshold for c in checks),
        {},
        {"points": list(points), "alphas": list(alphas), "N": N, "sign": sign},
        {"alphas": alphas, "points": points},
        start,
        seed=seed,
        extras=worst,
    )


def geometry_invariants(samples=200_000, seed=0):
    """Isotropy, cross terms, projection volumes and smoothed moments against Monte Carlo."""
    start = time.perf_counter()
    mc = McConfig(samples, seed)
    checks, extras = [], {}
    g = ProductGeometry.unit_balls((2, 2))
    L2 = isotropic_constant(g) ** 2
    rng = _rng(seed, 14)
    worst = 0.0
    for _ in range(5):
        xi = rng.standard_normal(g.n)
        xi /= np.linalg.norm(xi)
        est = second_moment_mc(g, xi, mc)
        worst = max(worst, abs(est.value - L2) / est.stderr)
    checks.append(Check("second moment vs L^2 (sigmas)", worst, mc.sigma))
    est = cross_term_mc(g, analytic_maximizer(g), mc)
    checks.append(Check("cross term vs 0 (sigmas)", abs(est.value) / est.stderr, mc.sigma))
    for N, ell in ((2, 2), (3, 2), (2, 3)):
        geom = ProductGeometry.unit_balls((N,) * ell)
        xi = rng.standard_normal(geom.n)
        xi /= np.linalg.norm(xi)
        est = shadow_volume_mc(geom, xi, mc)
        dev = abs(est.value - projection_volume(geom, xi)) / est.stderr
        checks.append(Check(f"projection volume ({N},{ell}) vs MC (sigmas)", dev, mc.sigma))
        extras[f"shadow_{N}_{ell}"] = [est.value, est.stderr, projection_volume(geom, xi)]
    g1 = ProductGeometry.unit_balls((1,))
    est = smoothed_moment(g1, np.array([1.0]), 1, 20, mc)
    checks.append(Check("smoothed |x| moment vs 1/4 (sigmas)", abs(est.value - 0.25) / est.stderr, mc.sigma))
    moments = [smoothed_moment(ProductGeometry.unit_balls((2,) * ell), analytic_maximizer(ProductGeometry.unit_balls((2,) * ell)), 4, 3, mc).value for ell in (1, 2, 4)]
    extras["k4_moments_ell_1_2_4"] = moments
    checks.append(Check("q_invariant(3, 4) == 3/2", abs(q_invariant(3, 4) - 1.5), 1e-12))
    return make_report(
        "body_geometry.invariants",
        checks,
        max(c.value for c in checks[:-1]),
        {},
        {"samples": samples},
        {"samples": [samples]},
        start,
        seed=seed,
        extras=extras,
    )


def q_invariant_check(configs=((2, 2), (3, 2), (2, 3)), samples=1_000_000, seed=0):
    """Stated closed form for Q against the Monte Carlo shadow volume at the maximizing direction."""
    start = time.perf_counter()
    mc = McConfig(samples, seed)
    checks, extras = [], {}
    for N, ell in configs:
        geom = ProductGeometry.unit_balls((N,) * ell)
        est = shadow_volume_mc(geom, analytic_maximizer(geom), mc)
        q = q_invariant(N, ell)
        checks.append(Check(f"Q({N},{ell}) closed form vs MC (sigmas)", abs(est.value - q) / est.stderr, mc.sigma, provenance="stated"))
        extras[f"{N},{ell}"] = {"mc": est.value, "stderr": est.stderr, "closed_form": q, "cauchy": q_invariant_cauchy(N, ell)}
    checks.append(Check("Q(3,4) = 3/2", abs(q_invariant(3, 4) - 1.5), 1e-12))
    return make_report(
        "body_geometry.q_invariant",
        checks,
        max(c.value for c in checks),
        {},
        {"configs": [list(c) for c in configs], "samples": samples},
        {"configs": np.array(configs, dtype=float)},
        start,
        seed=seed,
        extras=extras,
    )


_FAMILIES = {
    "gaussian": lambda x: np.exp(-np.sum(x * x, axis=-1)),
    "bump": lambda x: np.where(
        np.sum(x * x, axis=-1) < 4.0, np.exp(1.0 - 1.0 / np.clip(1.0 - np.sum(x * x, axis=-1) / 4.0, 1e-300, None)), 0.0
    ),
    "const": lambda x: np.ones(x.shape[:-1]),
}


def maximal_compare(dims=(2,), family="gaussian", ps=(1.5, 2.0, 3.0), h=None, half_width=None, scale_count=32, eps_max=0.05):
    """``||M_B f||_p <= (1 + eps_grid) ||M_S f||_p`` with measured ``eps_grid <= eps_max``."""
    start = time.perf_counter()
    if family not in _FAMILIES:
        raise DomainError(f"unknown family {family!r}")
    n = sum(dims)
    h = h if h is not None else (0.2 if n <= 2 else 0.4)
    half_width = half_width if half_width is not None else (4.0 if n <= 2 else 3.2)
    f = GridFunction.sample(_FAMILIES[family], n, half_width, h)
    ball = ProductGeometry.radius_one("ball", dims)
    sphere = ProductGeometry.radius_one("sphere", dims)
    scales = ScaleGrid.for_grid(f, scale_count)
    fine = GridFunction.sample(_FAMILIES[family], n, half_width, 0.75 * h)
    cmp = compare_mb_ms(f, ball, sphere, ps, scales, refine_f=fine)
    checks = [Check(f"ratio p={p:g}", r, 1.0 + cmp.eps_grid, provenance="stated") for p, r in zip(cmp.p, cmp.ratio)]
    checks.append(Check("eps_grid", cmp.eps_grid, eps_max))
    label = "+".join(str(d) for d in dims)
    return make_report(
        f"maximal.compare[{label},{family}]",
        checks,
        max(cmp.ratio),
        {"p": float(cmp.p[int(np.argmax(cmp.ratio))])},
        {"dims": list(dims), "family": family, "h": h, "half_width": half_width, "scale_count": scale_count},
        {"values": f.values, "p": ps},
        start,
        extras={"ball_norm": list(cmp.ball_norm), "sphere_norm": list(cmp.sphere_norm), "ratio": list(cmp.ratio), "eps_grid": cmp.eps_grid},
    )


def exponent_report(p, N):
    """Interpolation exponents with the check ``alpha > 1/p``."""
    start = time.perf_counter()
    e = interpolation_exponents(p, N)
    return make_report(
        f"frac_calculus.interpolation_exponents[p={p:g},N={N}]",
        [Check("1/(p alpha)", 1.0 / (p * e.alpha), 1.0, strict=True)],
        e.alpha,
        {"p": p, "N": N},
        {"p": p, "N": N},
        {"p": [p], "N": [N]},
        start,
        extras={"theta": e.theta, "eps": e.eps, "alpha": e.alpha},
    )


def _scaled(n, scale, floor=8):
    return max(floor, int(round(n * scale)))


def _specfun(cfg):
    return [bessel_crossval(_scaled(200, cfg.grid_scale)), gamma_spot_values()]


def _fourier(cfg):
    return [fourier_identities()]


def _radial(cfg):
    return [radial_crossval(_scaled(300, cfg.grid_scale), cfg.seed), leibniz_vs_enumerated(_scaled(50, cfg.grid_scale), cfg.seed)]


def _frac(cfg):
    return [riesz_consistency(), stein_constant_inputs(), mueller_difference((_scaled(20, cfg.grid_scale), _scaled(4, cfg.grid_scale, 2)), seed=cfg.seed)]


def _geometry(cfg):
    n = _scaled(100_000, cfg.grid_scale, 10_000)
    return [geometry_invariants(n, cfg.seed), q_invariant_check(samples=n, seed=cfg.seed)]


def _maximal(cfg):
    dims = tuple(int(d) for d in cfg.config.split("+"))
    h = (0.2 if sum(dims) <= 2 else 0.4) / cfg.grid_scale
    return [maximal_compare(dims, cfg.family, (cfg.p,) if cfg.p else (1.5, 2.0, 3.0), h=h)]


def _certify(cfg):
    reports = certify_all(cfg.N, cfg.ell, cfg.seed)
    for ctl in negative_controls(cfg.seed):
        reports.append(
            make_report(
                f"control.{ctl.id}",
                [Check("control report fails", float(ctl.passed), 0.0)],
                ctl.constant,
                ctl.extremum,
                ctl.grid,
                {"hash": [int(ctl.grid_hash, 16) % (2**52)]},
                time.perf_counter(),
                seed=cfg.seed,
            )
        )
    return reports


def _exponents(cfg):
    return [exponent_report(cfg.p if cfg.p else 1.6, cfg.N)]


SUITES = {
    "specfun-xval": (_specfun, "Gamma and Bessel J by series, Poisson integral and closed half-integer form must agree."),
    "fourier-identities": (_fourier, "Ball and sphere transforms: series/Bessel branch agreement, angular quadrature, closed forms in low dimension."),
    "radial-deriv-xval": (_radial, "Radial derivatives of the sphere transform by explicit Bessel sum, oscillatory quadrature and finite differences; Leibniz vs sequence enumeration for products."),
    "frac-calculus": (_frac, "Riesz fractional derivative: independence of the continuation order, integer collapse, the direct form; Stein interpolation with constant inputs; fractional vs directional derivative of the multiplier."),
    "geometry-invariants": (_geometry, "Isotropic constant, cross terms, shadow volumes and smoothed moments of ball products against Monte Carlo; stated Q closed form against Monte Carlo."),
    "maximal-compare": (_maximal, "Ball vs sphere product maximal functions on a grid: norm ratio bounded by 1 plus the measured discretization error."),
    "certify-all": (_certify, "Pointwise decay, Gaussian majorant, Gamma-ratio, small-frequency, derivative and Poisson-difference inequalities, the dyadic functional decay, and a failing negative control for each."),
    "interpolation-exponents": (_exponents, "Exponents theta, eps, alpha for a given p and N, and the check alpha > 1/p."),
}
