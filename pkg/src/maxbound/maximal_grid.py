"""Discrete centered maximal operators over products of balls and spheres.

A grid function is read as its multilinear interpolant, extended by zero.
For every scale ``t`` the average over ``t K_1 x ... x t K_ell`` factorizes
into one average per factor; each factor average is a sparse stencil on the
integer grid built from a quadrature rule whose nodes are spread onto their
``2^d`` neighbouring cells with the interpolation weights. The operator value
is the maximum over the scale grid, started from ``|f(x)|`` (the ``t -> 0``
limit for a continuous interpolant).

Serialization: ``<stem>.bin`` holds the values as little-endian float64 in
row-major order; ``<stem>.hdr`` is a text sidecar with lines
``maxbound-grid 1``, ``shape d1 ... dn``, ``spacing h`` and
``origin o1 ... on`` (coordinate of index zero).
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Tuple

import numpy as np

from .errors import DomainError, ResourceError, ShapeError
from .fourier import ProductGeometry, sphere_measure
from .kernels import stencil_apply
from .specfun import gauss_legendre

__all__ = [
    "GridFunction",
    "ScaleGrid",
    "MaximalComparison",
    "SweepReport",
    "RotationReport",
    "sphere_rule",
    "ball_rule",
    "factor_stencil",
    "average",
    "maximal_ball",
    "maximal_sphere",
    "lp_norm",
    "compare_mb_ms",
    "measured_grid_error",
    "rotation_identity_check",
    "radius_change_check",
    "dimension_sweep",
    "MAX_POINTS",
    "WORK_BUDGET",
]

MAX_POINTS = 10**7
WORK_BUDGET = 2 * 10**11
_HEADER_TAG = "maxbound-grid 1"


@dataclass(frozen=True)
class GridFunction:
    """Samples of a real function on a regular box grid in dimension ``n <= 4``."""

    values: np.ndarray
    h: float
    origin: Tuple[float, ...] = field(default=None)

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=float)
        if not 1 <= v.ndim <= 4:
            raise ShapeError(f"grid dimension must be 1..4, got {v.ndim}")
        if not np.all(np.isfinite(v)):
            raise DomainError("grid values must be finite")
        if not self.h > 0:
            raise DomainError("spacing must be positive")
        origin = self.origin
        if origin is None:
            origin = tuple(-0.5 * (s - 1) * self.h for s in v.shape)
        origin = tuple(float(o) for o in origin)
        if len(origin) != v.ndim:
            raise ShapeError("origin needs one entry per axis")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "origin", origin)

    @classmethod
    def sample(cls, func, n, half_width, h):
        """Sample ``func`` (acting on an ``(..., n)`` array) on ``[-L, L]^n``, ``L`` a multiple of ``h``."""
        m = int(round(half_width / h))
        axis = np.arange(-m, m + 1) * h
        pts = np.stack(np.meshgrid(*([axis] * n), indexing="ij"), axis=-1)
        return cls(np.asarray(func(pts), dtype=float), h, (-m * h,) * n)

    @classmethod
    def constant(cls, c, n, half_width, h):
        return cls.sample(lambda x: np.full(x.shape[:-1], float(c)), n, half_width, h)

    @property
    def ndim(self):
        return self.values.ndim

    @property
    def shape(self):
        return self.values.shape

    @property
    def extent(self):
        """Side lengths ``(shape - 1) * h``."""
        return tuple((s - 1) * self.h for s in self.shape)

    def coords(self, axis):
        return self.origin[axis] + self.h * np.arange(self.shape[axis])

    def with_values(self, values):
        return GridFunction(values, self.h, self.origin)

    def shifted(self, cells):
        """Values moved by whole cells (zero fill), same grid."""
        out = np.zeros(self.shape)
        dst, src = [], []
        for c, n in zip(cells, self.shape):
            if c >= 0:
                dst.append(slice(c, n))
                src.append(slice(0, max(n - c, 0)))
            else:
                dst.append(slice(0, max(n + c, 0)))
                src.append(slice(-c, n))
        out[tuple(dst)] = self.values[tuple(src)]
        return self.with_values(out)

    def save(self, stem):
        stem = Path(stem)
        self.values.astype("<f8").tofile(stem.with_suffix(".bin"))
        lines = [
            _HEADER_TAG,
            "shape " + " ".join(str(s) for s in self.shape),
            f"spacing {self.h!r}",
            "origin " + " ".join(repr(o) for o in self.origin),
        ]
        stem.with_suffix(".hdr").write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, stem):
        stem = Path(stem)
        header = stem.with_suffix(".hdr").read_text().split("\n")
        if header[0].strip() != _HEADER_TAG:
            raise ShapeError(f"not a grid header: {header[0]!r}")
        fields = dict(line.split(" ", 1) for line in header[1:] if line.strip())
        shape = tuple(int(s) for s in fields["shape"].split())
        origin = tuple(float(s) for s in fields["origin"].split())
        values = np.fromfile(stem.with_suffix(".bin"), dtype="<f8")
        if values.size != math.prod(shape):
            raise ShapeError("binary size does not match header shape")
        return cls(values.reshape(shape), float(fields["spacing"]), origin)


@dataclass(frozen=True)
class ScaleGrid:
    """Log-spaced dilation scales ``t_min = t_0 < ... < t_(count-1) = t_max``."""

    t_min: float
    t_max: float
    count: int = 32

    def __post_init__(self):
        if not 0 < self.t_min < self.t_max:
            raise DomainError("need 0 < t_min < t_max")
        if self.count < 2:
            raise DomainError("count must be at least 2")

    @property
    def values(self):
        return np.geomspace(self.t_min, self.t_max, self.count)

    def refined(self):
        """Grid with every gap halved; contains this grid."""
        return ScaleGrid(self.t_min, self.t_max, 2 * self.count - 1)

    @classmethod
    def for_grid(cls, f, count=32):
        """Scales ``[h/2, extent]`` for a grid function."""
        return cls(0.5 * f.h, max(f.extent), count)


@lru_cache(maxsize=64)
def _gauss_gegenbauer(n, a):
    # Golub-Welsch for the weight (1 - x^2)^a on [-1, 1]; weights sum to 1
    k = np.arange(1, n)
    beta = k * (k + 2 * a) / ((2 * k + 2 * a - 1) * (2 * k + 2 * a + 1))
    vals, vecs = np.linalg.eigh(np.diag(np.sqrt(beta), 1) + np.diag(np.sqrt(beta), -1))
    w = vecs[0] ** 2
    return vals, w / w.sum()


def sphere_rule(d, m):
    """Nodes on ``S^(d-1)`` (rows) and weights summing to 1.

    ``d = 2``: ``m`` equispaced angles. ``d >= 3``: Gauss rule in the polar
    cosine for the weight ``(1 - x^2)^((d-3)/2)`` (Legendre for ``d = 3``),
    times a rule on ``S^(d-2)``; exact for polynomials of degree below ``m``.
    """
    if d < 2:
        raise DomainError("sphere rules need d >= 2")
    if d == 2:
        phi = 2.0 * math.pi * np.arange(m) / m
        return np.column_stack([np.cos(phi), np.sin(phi)]), np.full(m, 1.0 / m)
    n = max(2, (m + 1) // 2)
    if d == 3:
        x, w = gauss_legendre(n)
        cos_t, wt = x, 0.5 * w
    else:
        cos_t, wt = _gauss_gegenbauer(n, 0.5 * (d - 3))
    sin_t = np.sqrt(1.0 - cos_t * cos_t)
    sub, sw = sphere_rule(d - 1, m)
    k = len(sw)
    pts = np.concatenate([np.repeat(cos_t[:, None, None], k, 1), sin_t[:, None, None] * sub[None]], axis=2)
    return pts.reshape(-1, d), np.outer(wt, sw).ravel()


def _composite(a, b, panels, k=3):
    # Gauss-Legendre with k nodes on each of ``panels`` equal panels of [a, b]
    x, w = gauss_legendre(k)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * x).ravel(), (half[:, None] * w).ravel()


def ball_rule(d, radius_cells):
    """Nodes in the ``d``-ball of radius ``radius_cells`` (grid units) and weights summing to 1.

    Polar form per factor: composite Gauss-Legendre in the radius (one
    panel per cell) times a sphere rule sized to the circumference.
    """
    R = float(radius_cells)
    if d == 1:
        x, w = _composite(-R, R, max(1, math.ceil(2 * R)))
        return x[:, None], w / w.sum()
    rho, w = _composite(0.0, R, max(1, math.ceil(R)))
    wr = w * rho ** (d - 1)
    wr = wr / wr.sum()
    pts, wts = [], []
    for r_i, w_i in zip(rho, wr):
        sp, sw = sphere_rule(d, max(8, math.ceil(2 * math.pi * r_i) + 4))
        pts.append(r_i * sp)
        wts.append(w_i * sw)
    return np.concatenate(pts), np.concatenate(wts)


def _spread(points, weights):
    # multilinear spreading of off-grid nodes onto integer offsets, merged
    base = np.floor(points)
    frac = points - base
    base = base.astype(np.int64)
    d = points.shape[1]
    offs, wts = [], []
    for corner in np.ndindex(*(2,) * d):
        c = np.array(corner)
        offs.append(base + c)
        wts.append(weights * np.prod(np.where(c == 1, frac, 1.0 - frac), axis=1))
    offs = np.concatenate(offs)
    wts = np.concatenate(wts)
    keep = wts > 0.0
    uniq, inv = np.unique(offs[keep], axis=0, return_inverse=True)
    merged = np.bincount(inv.ravel(), weights=wts[keep], minlength=len(uniq))
    return uniq, merged


@lru_cache(maxsize=512)
def factor_stencil(kind, d, radius_cells):
    """Integer offsets ``(S, d)`` and weights of one factor average at radius ``radius_cells``."""
    if kind == "ball":
        pts, w = ball_rule(d, radius_cells)
    elif kind == "sphere":
        pts, w = sphere_rule(d, max(8, math.ceil(2 * math.pi * radius_cells) + 4))
        pts = radius_cells * pts
    else:
        raise DomainError(f"unknown kind {kind!r}")
    offs, wts = _spread(pts, w)
    offs.setflags(write=False)
    wts.setflags(write=False)
    return offs, wts


def _as4(a):
    return np.ascontiguousarray(a.reshape(a.shape + (1,) * (4 - a.ndim)))


def _check_geometry(f, geom, kind):
    if geom.kind != kind:
        raise DomainError(f"needs a {kind} product")
    if geom.n != f.ndim:
        raise ShapeError(f"geometry has n = {geom.n}, grid has dimension {f.ndim}")
    if f.values.size > MAX_POINTS:
        raise ResourceError(f"grid has {f.values.size} points, limit {MAX_POINTS}")


def _stencils(f, geom, t):
    out = []
    for g, d, r in zip(geom.groups, geom.factor_dims, geom.radii):
        offs, w = factor_stencil(geom.kind, d, round(t * r / f.h, 12))
        full = np.zeros((len(w), 4), dtype=np.int64)
        full[:, g] = offs
        out.append((full, w))
    return out


def _work_estimate(f, geom, scales):
    total = 0
    for t in scales.values:
        total += sum(len(w) for _, w in _stencils(f, geom, t))
    return total * f.values.size


def average(f, geom, t, values=None):
    """Quadrature average of the interpolant of ``values`` (default ``|f|``) over ``x + t K``."""
    a = _as4(np.abs(f.values) if values is None else values)
    for offs, w in _stencils(f, geom, t):
        a = stencil_apply(a, offs, w)
    return a.reshape(f.shape)


def _maximal(f, geom, scales, kind):
    _check_geometry(f, geom, kind)
    work = _work_estimate(f, geom, scales)
    if work > WORK_BUDGET:
        raise ResourceError(f"estimated work {work:.3g} exceeds budget {WORK_BUDGET:.3g}")
    absf = np.abs(f.values)
    top = float(absf.max()) if absf.size else 0.0
    out = absf.copy()
    for t in scales.values:
        np.maximum(out, average(f, geom, t, absf), out=out)
    # an average never exceeds sup |f|; this only removes rounding excess
    np.minimum(out, top, out=out)
    return f.with_values(out)


def maximal_ball(f, geom, scales):
    """``max_t`` of ball-product averages of ``|f|`` at each grid point."""
    return _maximal(f, geom, scales, "ball")


def maximal_sphere(f, geom, scales):
    """``max_t`` of sphere-product averages of ``|f|`` at each grid point."""
    for d in geom.factor_dims:
        if d < 2:
            raise DomainError("sphere factors need dimension >= 2")
    return _maximal(f, geom, scales, "sphere")


def lp_norm(f, p):
    """Riemann-sum ``L^p`` norm ``(h^n sum |f|^p)^(1/p)``; ``p = inf`` gives ``max |f|``."""
    a = np.abs(f.values)
    if p == math.inf:
        return float(a.max())
    if not p >= 1:
        raise DomainError("p must be at least 1")
    top = a.max()
    if top == 0:
        return 0.0
    s = math.fsum(((a / top) ** p).ravel())
    return float(top * (f.h**f.ndim * s) ** (1.0 / p))


@dataclass(frozen=True)
class MaximalComparison:
    """Norms of the ball and sphere maximal functions at one or more exponents."""

    p: Tuple[float, ...]
    ball_norm: Tuple[float, ...]
    sphere_norm: Tuple[float, ...]
    eps_grid: float

    @property
    def ratio(self):
        return tuple(b / s if s > 0 else math.nan for b, s in zip(self.ball_norm, self.sphere_norm))

    @property
    def passed(self):
        return all(r <= 1.0 + self.eps_grid for r in self.ratio)


def _norm_ratios(f, ball_geom, sphere_geom, ps, scales):
    mb = maximal_ball(f, ball_geom, scales)
    ms = maximal_sphere(f, sphere_geom, scales)
    nb = tuple(lp_norm(mb, p) for p in ps)
    ns = tuple(lp_norm(ms, p) for p in ps)
    return nb, ns


def measured_grid_error(f, ball_geom, sphere_geom, ps, scales, refine_f=None):
    """Largest relative change of the ratio under scale refinement and, if given, spatial refinement.

    ``refine_f`` is the same function sampled with a smaller spacing.
    """
    nb, ns = _norm_ratios(f, ball_geom, sphere_geom, ps, scales)
    base = np.array(nb) / np.array(ns)
    nb2, ns2 = _norm_ratios(f, ball_geom, sphere_geom, ps, scales.refined())
    err = np.abs(np.array(nb2) / np.array(ns2) / base - 1.0)
    if refine_f is not None:
        nb3, ns3 = _norm_ratios(refine_f, ball_geom, sphere_geom, ps, ScaleGrid.for_grid(refine_f, scales.count))
        err = np.maximum(err, np.abs(np.array(nb3) / np.array(ns3) / base - 1.0))
    return nb, ns, float(err.max())


def compare_mb_ms(f, ball_geom, sphere_geom, p, scales, eps_grid=None, refine_f=None):
    """Compare ``||M_B f||_p`` with ``||M_S f||_p`` for radius-one factors.

    ``p`` may be a single exponent or a sequence. When ``eps_grid`` is not
    supplied it is measured by :func:`measured_grid_error`.
    """
    if tuple(ball_geom.factor_dims) != tuple(sphere_geom.factor_dims):
        raise ShapeError("ball and sphere products need matching factor dimensions")
    for r in ball_geom.radii + sphere_geom.radii:
        if abs(r - 1.0) > 1e-12:
            raise DomainError("compare_mb_ms assumes radius-one factors")
    ps = tuple(p) if np.ndim(p) else (p,)
    if eps_grid is None:
        nb, ns, eps_grid = measured_grid_error(f, ball_geom, sphere_geom, ps, scales, refine_f)
    else:
        nb, ns = _norm_ratios(f, ball_geom, sphere_geom, ps, scales)
    return MaximalComparison(ps, nb, ns, float(eps_grid))


@dataclass(frozen=True)
class RotationReport:
    lhs: Tuple[float, ...]
    rhs: Tuple[float, ...]

    @property
    def deviation(self):
        return max(abs(a - b) / max(abs(b), 1e-300) for a, b in zip(self.lhs, self.rhs))


def _random_poly(rng, degree):
    # coefficients for monomials x^a y^b z^c with a + b + c <= degree
    exps = [(a, b, c) for a in range(degree + 1) for b in range(degree + 1 - a) for c in range(degree + 1 - a - b)]
    return np.array(exps), rng.standard_normal(len(exps))


def _poly_eval(poly, pts):
    exps, coef = poly
    return (np.prod(pts[..., None, :] ** exps, axis=-1) * coef).sum(axis=-1)


def rotation_identity_check(n1=2, degree=4, polys=None, seed=0, count=5):
    """Compare ``int_{S^2} int_{S^1_u} q dsigma^u dsigma(u)`` with ``|S^1| int_{S^2} q dsigma``.

    ``S^1_u`` is the great circle orthogonal to ``u``. ``polys`` is a list of
    callables on ``(..., 3)`` arrays; by default ``count`` random polynomials
    of the given degree. Both sides use rules exact for the degree.
    """
    if n1 != 2:
        raise DomainError("only n1 = 2 (great circles of S^2) is implemented")
    if polys is None:
        rng = np.random.default_rng(seed)
        polys = [lambda x, q=_random_poly(rng, degree): _poly_eval(q, x) for _ in range(count)]
    m = 2 * degree + 4
    u, wu = sphere_rule(3, m)
    wu = wu * sphere_measure(3)
    # orthonormal frame (a, b) of u^perp
    helper = np.where(np.abs(u[:, :1]) < 0.9, np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0]))
    a = np.cross(u, helper)
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    b = np.cross(u, a)
    phi = 2.0 * math.pi * np.arange(m) / m
    circ = np.cos(phi)[None, :, None] * a[:, None, :] + np.sin(phi)[None, :, None] * b[:, None, :]
    lhs, rhs = [], []
    for q in polys:
        inner = 2.0 * math.pi * q(circ).mean(axis=1)
        lhs.append(float(inner @ wu))
        rhs.append(sphere_measure(2) * float(q(u) @ wu))
    return RotationReport(tuple(lhs), tuple(rhs))


def radius_change_check(n, r, s, func, m=64, seed=0):
    """Relative deviation in ``int_{S_r} f(s w) dsigma(w) = s^(-(n-1)) int_{S_(sr)} f dsigma``.

    The right side uses an independently rotated rule of a different size,
    so agreement is a genuine quadrature check.
    """
    pts, w = sphere_rule(n, m)
    lhs = sphere_measure(n, r) * float(func(s * (r * pts)) @ w)
    q, _ = np.linalg.qr(np.random.default_rng(seed).standard_normal((n, n)))
    pts2, w2 = sphere_rule(n, m + 7)
    rhs = s ** (-(n - 1)) * sphere_measure(n, s * r) * float(func((s * r) * pts2 @ q.T) @ w2)
    return abs(lhs - rhs) / max(abs(rhs), 1e-300)


@dataclass(frozen=True)
class SweepReport:
    configs: Tuple[Tuple[int, int], ...]
    ratios: Tuple[float, ...]
    envelope: float
    skipped: bool = False

    @property
    def spread(self):
        return max(self.ratios) / min(self.ratios) if self.ratios else math.nan

    @property
    def passed(self):
        return self.skipped or (all(math.isfinite(r) for r in self.ratios) and self.spread <= self.envelope)


def _family(name, n):
    if name == "gaussian":
        return lambda x: np.exp(-np.sum(x * x, axis=-1))
    if name == "bump":
        def bump(x):
            s = np.sum(x * x, axis=-1)
            out = np.zeros(s.shape)
            inside = s < 1.0
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside]))
            return out
        return bump
    if name == "zero":
        return lambda x: np.zeros(x.shape[:-1])
    raise DomainError(f"unknown family {name!r}")


def dimension_sweep(p, configs, family="gaussian", h=0.4, half_width=3.2, scale_count=32, envelope=3.0):
    """``||M_B f||_p / ||f||_p`` for unit-volume ball products ``(B^N)^ell`` per ``(N, ell)``."""
    ratios = []
    for N, ell in configs:
        n = N * ell
        if n > 4:
            raise DomainError(f"config {(N, ell)} has n = {n} > 4")
        f = GridFunction.sample(_family(family, n), n, half_width, h)
        base = lp_norm(f, p)
        if base == 0.0:
            return SweepReport(tuple(configs), (), envelope, skipped=True)
        geom = ProductGeometry.unit_balls((N,) * ell)
        mb = maximal_ball(f, geom, ScaleGrid.for_grid(f, scale_count))
        ratios.append(lp_norm(mb, p) / base)
    return SweepReport(tuple(tuple(c) for c in configs), tuple(ratios), envelope)
