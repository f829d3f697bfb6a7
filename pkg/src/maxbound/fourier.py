"""Fourier transforms of ball and sphere measures and of their products.

Convention: ``f^(xi) = int exp(-2 pi i <x, xi>) f(x) dx``. All transforms here
are radial, so each has a ``*_radial`` form acting on ``u = |zeta|`` (any
array shape) and a vector form acting on ``zeta`` with the last axis as the
coordinate axis.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import DomainError, ShapeError
from .specfun import bessel_j, gamma, gauss_legendre

__all__ = [
    "ProductGeometry",
    "unit_volume_radius",
    "unit_measure_sphere_radius",
    "ball_volume",
    "sphere_measure",
    "radial_series_coefficients",
    "ball_ft_radial",
    "ball_ft",
    "sphere_ft_radial",
    "sphere_ft",
    "sphere_ft_integral",
    "product_multiplier",
    "ball_product_multiplier",
    "reference_kernel_ft",
    "SWITCH_RADIUS",
]

# below 2 pi r |zeta| = SWITCH_RADIUS the Bessel prefactor |zeta|^(-N/2) is
# a removable singularity; the power series is used instead
SWITCH_RADIUS = 0.5
_SERIES_TERMS = 24


def unit_volume_radius(N):
    """Radius ``r_N = pi^(-1/2) Gamma(N/2 + 1)^(1/N)`` of the unit-volume ball."""
    N = _check_dim(N, 1)
    return gamma(0.5 * N + 1.0) ** (1.0 / N) / math.sqrt(math.pi)


def unit_measure_sphere_radius(N):
    """Radius ``R`` of ``S^(N-1)`` with unit surface measure, ``R^(N-1) = Gamma(N/2)/(2 pi^(N/2))``."""
    N = _check_dim(N, 2)
    return (gamma(0.5 * N) / (2.0 * math.pi ** (0.5 * N))) ** (1.0 / (N - 1))


def ball_volume(N, r=1.0):
    """Lebesgue measure of the N-ball of radius ``r``."""
    N = _check_dim(N, 1)
    return math.pi ** (0.5 * N) * r**N / gamma(0.5 * N + 1.0)


def sphere_measure(N, R=1.0):
    """Surface measure of the sphere ``S^(N-1)`` of radius ``R``."""
    N = _check_dim(N, 1)
    return 2.0 * math.pi ** (0.5 * N) * R ** (N - 1) / gamma(0.5 * N)


def _check_dim(N, minimum):
    if int(N) != N or N < minimum:
        raise DomainError(f"dimension must be an integer >= {minimum}, got {N}")
    return int(N)


@dataclass(frozen=True)
class ProductGeometry:
    """A product of balls or spheres ``K_1 x ... x K_ell``.

    ``factor_dims[k]`` is the ambient dimension ``n_k`` of factor ``k`` and
    ``radii[k]`` its radius. Sphere factors need ``n_k >= 2``.
    """

    kind: str
    factor_dims: Tuple[int, ...]
    radii: Tuple[float, ...]

    def __post_init__(self):
        if self.kind not in ("ball", "sphere"):
            raise DomainError(f"kind must be 'ball' or 'sphere', got {self.kind!r}")
        dims = tuple(int(d) for d in self.factor_dims)
        radii = tuple(float(r) for r in self.radii)
        if not dims or len(dims) != len(radii):
            raise ShapeError("factor_dims and radii must be non-empty and of equal length")
        lowest = 2 if self.kind == "sphere" else 1
        if any(d < lowest for d in dims):
            raise DomainError(f"{self.kind} factors need dimension >= {lowest}")
        if any(not r > 0 for r in radii):
            raise DomainError("radii must be positive")
        object.__setattr__(self, "factor_dims", dims)
        object.__setattr__(self, "radii", radii)

    @classmethod
    def unit_balls(cls, dims):
        """Product of unit-volume balls with the given factor dimensions."""
        dims = tuple(dims)
        return cls("ball", dims, tuple(unit_volume_radius(d) for d in dims))

    @classmethod
    def unit_spheres(cls, dims):
        """Product of unit-measure spheres with the given factor dimensions."""
        dims = tuple(dims)
        return cls("sphere", dims, tuple(unit_measure_sphere_radius(d) for d in dims))

    @classmethod
    def radius_one(cls, kind, dims):
        """Product of radius-one balls or spheres."""
        dims = tuple(dims)
        return cls(kind, dims, (1.0,) * len(dims))

    @property
    def n(self):
        return sum(self.factor_dims)

    @property
    def ell(self):
        return len(self.factor_dims)

    @property
    def groups(self):
        """Index ranges ``V_k`` of the variable groups, as Python slices."""
        out, start = [], 0
        for d in self.factor_dims:
            out.append(slice(start, start + d))
            start += d
        return out

    def split(self, xi):
        """Block view ``(zeta_1, ..., zeta_ell)`` of ``xi`` along its last axis."""
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1:] != (self.n,):
            raise ShapeError(f"frequency needs last axis of length {self.n}, got {xi.shape}")
        return [xi[..., g] for g in self.groups]

    def block_norms(self, xi):
        """Array of shape ``(..., ell)`` with ``|zeta_k|``."""
        return np.stack([np.linalg.norm(z, axis=-1) for z in self.split(xi)], axis=-1)

    def factor_measure(self, k):
        d, r = self.factor_dims[k], self.radii[k]
        return ball_volume(d, r) if self.kind == "ball" else sphere_measure(d, r)


def radial_series_coefficients(N, terms=_SERIES_TERMS):
    """Coefficients ``c_k`` with ``F(t) = sum_k c_k t^(2k)`` for both radial transforms.

    ``c_k = (-1)^k / (2k)! * prod_{j<k} (j + 1/2)/(j + N/2)``. The sphere
    transform on ``S^(N-1)_R`` is ``|S_R| F_N(2 pi R |zeta|)``. The N-ball
    transform is ``|B_r| F_(N+2)(2 pi r |zeta|)``: its Gamma-ratio form
    ``Gamma(k+1/2)/Gamma(k+N/2+1)`` shifts the denominator by one.
    """
    c = np.empty(terms)
    c[0] = 1.0
    for k in range(1, terms):
        c[k] = -c[k - 1] * (k - 0.5) / (k - 1 + 0.5 * N) / ((2 * k - 1) * (2 * k))
    return c


def _series(N, t):
    c = radial_series_coefficients(N)
    t2 = t * t
    acc = np.full(t.shape, c[-1])
    for ck in c[-2::-1]:
        acc = acc * t2 + ck
    return acc


def _radial(N, scale, u, bessel_order, bessel_power, mass, lead, series_dim):
    u = np.abs(np.asarray(u, dtype=float))
    t = 2.0 * math.pi * scale * u
    out = np.empty(u.shape)
    small = t < SWITCH_RADIUS
    if np.any(small):
        out[small] = mass * _series(series_dim, t[small])
    big = ~small
    if np.any(big):
        ub = u[big]
        out[big] = lead * ub ** (-bessel_power) * bessel_j(bessel_order, t[big])
    return out if out.ndim else float(out)


def ball_ft_radial(N, r, u):
    """Transform of the indicator of the N-ball of radius ``r`` at ``|zeta| = u``.

    ``r^(N/2) u^(-N/2) J_(N/2)(2 pi r u)``, with the power series below the
    switch radius.
    """
    N = _check_dim(N, 1)
    return _radial(N, r, u, 0.5 * N, 0.5 * N, ball_volume(N, r), r ** (0.5 * N), N + 2)


def sphere_ft_radial(N, R, u):
    """Transform of surface measure on ``S^(N-1)_R`` at ``|zeta| = u``.

    ``2 pi R^(N/2) u^(-(N-2)/2) J_((N-2)/2)(2 pi R u)``, with the power series
    below the switch radius. Equals 1 at the origin when ``|S_R| = 1``.
    """
    N = _check_dim(N, 2)
    nu = 0.5 * (N - 2)
    return _radial(N, R, u, nu, nu, sphere_measure(N, R), 2.0 * math.pi * R ** (0.5 * N), N)


def _norm_last(zeta, N):
    zeta = np.asarray(zeta, dtype=float)
    if zeta.shape[-1:] != (N,):
        raise ShapeError(f"zeta needs last axis of length {N}, got shape {zeta.shape}")
    return np.linalg.norm(zeta, axis=-1)


def ball_ft(N, r, zeta):
    """Ball transform at the vector ``zeta`` (last axis of length ``N``)."""
    return ball_ft_radial(N, r, _norm_last(zeta, N))


def sphere_ft(N, R, zeta):
    """Sphere transform ``m~(zeta)`` at the vector ``zeta`` (last axis of length ``N``)."""
    return sphere_ft_radial(N, R, _norm_last(zeta, N))


def sphere_ft_integral(N, R, u, nodes=None):
    """Sphere transform by quadrature of its one-dimensional angular integral.

    ``|S_R| Gamma(N/2)/(Gamma((N-1)/2) sqrt(pi)) int_{-1}^{1} cos(2 pi R u t) (1-t^2)^((N-3)/2) dt``
    with ``t = sin(phi)``. Scalar ``u``; used as an oracle for the Bessel form.
    """
    N = _check_dim(N, 2)
    w = 2.0 * math.pi * R * abs(float(u))
    if nodes is None:
        nodes = 64 + 4 * int(w)
    x, wts = gauss_legendre(nodes)
    phi = 0.5 * math.pi * x
    vals = np.cos(w * np.sin(phi)) * np.cos(phi) ** (N - 2)
    integral = 0.5 * math.pi * float(wts @ vals)
    norm = gamma(0.5 * N) / (gamma(0.5 * (N - 1)) * math.sqrt(math.pi))
    return sphere_measure(N, R) * norm * integral


def product_multiplier(geom, xi):
    """``m(xi) = prod_k m~(zeta_k)`` for a sphere product."""
    if geom.kind != "sphere":
        raise DomainError("product_multiplier needs a sphere product")
    norms = geom.block_norms(xi)
    out = np.ones(norms.shape[:-1])
    for k, (d, R) in enumerate(zip(geom.factor_dims, geom.radii)):
        out = out * sphere_ft_radial(d, R, norms[..., k])
    return out if out.ndim else float(out)


def ball_product_multiplier(geom, xi):
    """Transform of the indicator of a ball product, ``prod_k chi^_(B_k)(zeta_k)``."""
    if geom.kind != "ball":
        raise DomainError("ball_product_multiplier needs a ball product")
    norms = geom.block_norms(xi)
    out = np.ones(norms.shape[:-1])
    for k, (d, r) in enumerate(zip(geom.factor_dims, geom.radii)):
        out = out * ball_ft_radial(d, r, norms[..., k])
    return out if out.ndim else float(out)


def reference_kernel_ft(kind, xi_norm):
    """Gaussian ``e^(-u^2)``, Poisson ``e^(-u)`` or band ``e^(-u) - e^(-2u)`` at ``u = |xi|``."""
    u = np.asarray(xi_norm, dtype=float)
    if np.any(u < 0):
        raise DomainError("xi_norm must be non-negative")
    if kind == "gaussian":
        out = np.exp(-u * u)
    elif kind == "poisson":
        out = np.exp(-u)
    elif kind == "poisson_band":
        out = np.exp(-u) - np.exp(-2.0 * u)
    else:
        raise DomainError(f"unknown kernel {kind!r}")
    return out if out.ndim else float(out)
