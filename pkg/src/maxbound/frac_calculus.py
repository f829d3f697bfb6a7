"""Riesz fractional derivatives, the multiplier family ``m_z`` and Stein interpolation.

The Riesz derivative of a profile ``f`` on ``(0, 2]`` is taken in its
continued form

    I^{-z} f(t) = E_k(z, t) + (-1)^k / Gamma(k - z) int_t^2 (u - t)^(k-z-1) f^(k)(u) du,
    E_k(z, t)   = sum_{j<k} (-1)^j (2 - t)^(j-z) f^(j)(2) / Gamma(j + 1 - z),

valid for ``Re z < k``. With this normalisation ``I^{-m} f = (-1)^m f^(m)``.
"""

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Tuple

import numpy as np

from .errors import DomainError, NumericError
from .fourier import sphere_measure
from .radial_deriv import multi_indices, sphere_radial_derivative
from .specfun import gamma, gauss_legendre, rgamma

__all__ = [
    "FracOrder",
    "RadialProfile",
    "polynomial_profile",
    "gaussian_profile",
    "sphere_profile",
    "product_profile",
    "riesz_derivative",
    "riesz_derivative_direct",
    "multiplier_m_z",
    "frac_directional_derivative",
    "SteinBound",
    "stein_interp_bound",
    "InterpolationExponents",
    "interpolation_exponents",
    "m_eps_symbol",
]


@dataclass(frozen=True)
class FracOrder:
    """A complex order ``z`` with the continuation order ``k`` (``Re z < k``)."""

    z: complex
    k: int

    def __post_init__(self):
        z = complex(self.z)
        if int(self.k) != self.k or self.k < 0:
            raise DomainError("continuation order k must be a non-negative integer")
        if not z.real < self.k:
            raise DomainError(f"need Re z < k, got z = {z}, k = {self.k}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "k", int(self.k))

    @classmethod
    def minimal(cls, z):
        """The smallest admissible ``k >= 1``."""
        z = complex(z)
        return cls(z, max(1, math.floor(z.real) + 1))


@dataclass(frozen=True)
class RadialProfile:
    """A function on ``domain`` with derivatives up to ``k_max``.

    ``derivative(t, j)`` must accept arrays of ``t``. The domain is open at
    the left end and closed at the right. ``freq`` is an upper bound for the
    angular frequency at which the profile oscillates; quadratures use it to
    size their panels.
    """

    f: Callable
    derivative: Callable
    k_max: int
    domain: Tuple[float, float] = (0.0, 2.0)
    name: str = field(default="profile", compare=False)
    freq: float = 1.0

    def __call__(self, t):
        return self.f(t)

    def d(self, t, j):
        if j > self.k_max:
            raise DomainError(f"profile {self.name} has derivatives only up to {self.k_max}")
        return self.f(t) if j == 0 else self.derivative(t, j)


def polynomial_profile(coeffs, name="polynomial"):
    """Profile ``sum_i coeffs[i] t^i``."""
    p = np.polynomial.Polynomial(coeffs)
    degree = max(p.degree(), 0)

    def deriv(t, j):
        return p.deriv(j)(np.asarray(t, dtype=float)) if j <= degree else np.zeros_like(np.asarray(t, float))

    return RadialProfile(lambda t: p(np.asarray(t, dtype=float)), deriv, 12, (0.0, 4.0), name)


def gaussian_profile(a=1.0, name="gaussian"):
    """Profile ``exp(-a t^2)``; derivatives through Hermite polynomials."""
    s = math.sqrt(a)

    def f(t):
        return np.exp(-a * np.asarray(t, dtype=float) ** 2)

    def deriv(t, j):
        x = s * np.asarray(t, dtype=float)
        coef = np.zeros(j + 1)
        coef[j] = 1.0
        # d^j/dx^j e^{-x^2} = (-1)^j H_j(x) e^{-x^2}
        return (-s) ** j * np.polynomial.hermite.hermval(x, coef) * np.exp(-x * x)

    return RadialProfile(f, deriv, 12, (0.0, 4.0), name, 2.0 * s + 1.0)


def sphere_profile(N, R, u, name="sphere"):
    """Profile ``r -> m~(r zeta)`` with ``|zeta| = u``, derivatives from the explicit formula."""

    def f(t):
        return sphere_radial_derivative(N, R, u, 0, np.asarray(t, dtype=float))

    def deriv(t, j):
        return sphere_radial_derivative(N, R, u, j, np.asarray(t, dtype=float))

    return RadialProfile(f, deriv, 8, (0.0, 4.0), name, 2.0 * math.pi * R * abs(u) + 1.0)


def product_profile(geom, xi, name="product"):
    """Profile ``r -> m(r xi)`` for a sphere product, derivatives by the Leibniz rule."""
    if geom.kind != "sphere":
        raise DomainError("product_profile needs a sphere product")
    norms = geom.block_norms(xi)
    factors = list(zip(geom.factor_dims, geom.radii, norms))

    def deriv(t, j):
        t = np.asarray(t, dtype=float)
        table = [[sphere_radial_derivative(d, R, u, a, t) for a in range(j + 1)] for d, R, u in factors]
        total = np.zeros(t.shape)
        for alpha in multi_indices(len(factors), j):
            term = float(math.factorial(j))
            for k, a in enumerate(alpha):
                term = term * table[k][a] / math.factorial(a)
            total = total + term
        return total

    freq = 2.0 * math.pi * sum(R * u for _, R, u in factors) + 1.0
    return RadialProfile(lambda t: deriv(t, 0), deriv, 8, (0.0, 4.0), name, freq)


# ---------------------------------------------------------------------------
# Riesz derivative
# ---------------------------------------------------------------------------

_GRADE_Q = 0.25
_GRADE_LEVELS = 26


def _weakly_singular_integral(g, t, b, upper=2.0, freq=1.0, nodes=16):
    """``int_t^upper (u - t)^(b-1) g(u) du`` for complex ``b`` with ``Re b > 0``.

    With ``u = t + L s^(1/beta)``, ``beta = Re b``, the weight becomes
    ``(L^b / beta) s^(i Im b / beta)``. The ``s`` interval is cut into panels
    graded geometrically towards 0, and every panel is split further until
    neither the log-oscillation ``s^(i gamma)`` nor ``g`` (oscillating at
    angular rate ``freq`` in ``u``) turns by more than about 2 radians on it.
    """
    b = complex(b)
    beta = b.real
    if beta <= 0:
        raise DomainError("weakly singular integral needs Re b > 0")
    L = upper - t
    gam = b.imag / beta
    x, w = gauss_legendre(nodes)
    # panels from q^levels up to 1; [0, q^levels] carries weight below 1e-15
    edges = _GRADE_Q ** np.arange(_GRADE_LEVELS, -1, -1)
    cuts = [edges[0]]
    for lo, hi in zip(edges[:-1], edges[1:]):
        du = L * (hi ** (1.0 / beta) - lo ** (1.0 / beta))
        turns = max(abs(gam) * math.log(hi / lo), freq * du)
        pieces = max(1, int(math.ceil(turns / 2.0)))
        cuts.extend(np.linspace(lo, hi, pieces + 1)[1:])
    cuts = np.asarray(cuts)
    lo, hi = cuts[:-1], cuts[1:]
    half = 0.5 * (hi - lo)
    s = (lo[:, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    u = t + L * s ** (1.0 / beta)
    weight = np.exp(1j * gam * np.log(s))
    vals = np.asarray(g(u))
    return complex(L**b / beta * np.sum(ws * weight * vals))


def _integral_with_error(g, t, b, freq):
    fine = _weakly_singular_integral(g, t, b, freq=freq, nodes=20)
    coarse = _weakly_singular_integral(g, t, b, freq=freq, nodes=14)
    return fine, abs(fine - coarse)


def riesz_derivative(f, order, t, return_error=False):
    """``I^{-z} f(t)`` by the continued formula with continuation order ``order.k``.

    ``order`` is a :class:`FracOrder` (or a bare complex ``z``, which takes the
    minimal ``k``). ``k = 0`` evaluates the convergent integral
    ``1/Gamma(-z) int_t^2 (u-t)^(-z-1) f(u) du`` for ``Re z < 0``.
    """
    if not isinstance(order, FracOrder):
        order = FracOrder.minimal(order)
    z, k = order.z, order.k
    t = float(t)
    lo, hi = 0.0, 2.0
    if not lo < t < hi:
        raise DomainError(f"t must lie in (0, 2), got {t}")
    if k > f.k_max:
        raise DomainError(f"continuation order {k} exceeds profile smoothness {f.k_max}")
    boundary = 0j
    for j in range(k):
        rg = rgamma(complex(j + 1) - z)
        if rg == 0:
            continue
        fj = complex(np.asarray(f.d(2.0, j)))
        boundary += (-1) ** j * (2.0 - t) ** (j - z) * fj * rg
    b = k - z
    rg = rgamma(b)
    if rg == 0:
        raise NumericError(f"Gamma pole at k - z = {b}")
    integral, err = _integral_with_error(lambda u: f.d(u, k), t, b, f.freq)
    value = boundary + (-1) ** k * rg * integral
    if return_error:
        return value, abs(rg) * err
    return value


def riesz_derivative_direct(f, z, t):
    """The direct definition as printed, ``-1/Gamma(-z) int_t^2 (u-t)^(-z-1) f(u) du``, ``Re z < 0``.

    Kept literally as a cross-check. It equals ``-riesz_derivative(f, FracOrder(z, 0), t)``;
    the continued formula is the one consistent with ``I^{-m} f = (-1)^m f^(m)``.
    """
    z = complex(z)
    if not z.real < 0:
        raise DomainError("the direct definition needs Re z < 0")
    t = float(t)
    if not 0.0 < t < 2.0:
        raise DomainError(f"t must lie in (0, 2), got {t}")
    integral, _ = _integral_with_error(f, t, -z, f.freq)
    return -rgamma(-z) * integral


def multiplier_m_z(geom, xi, z, k=None):
    """``m_z(xi) = I^{-z} m(t xi)`` at ``t = 1`` for a sphere product."""
    order = FracOrder(z, k) if k is not None else FracOrder.minimal(z)
    if order.k > 8:
        raise DomainError("continuation order above 8 is not supported")
    return riesz_derivative(product_profile(geom, xi), order, 1.0)


# ---------------------------------------------------------------------------
# fractional directional derivative of the sphere measure
# ---------------------------------------------------------------------------


def _graded_reference_rule(phase, nodes=12, levels=10, q=0.1):
    """Nodes and weights on ``[0, 1]``, graded geometrically towards both ends.

    Panels are split further so that a phase of ``phase`` radians over the
    whole interval turns by at most about 2 radians per panel.
    """
    x, w = gauss_legendre(nodes)
    left = [0.5 * q**i for i in range(levels, -1, -1)]
    cuts = np.asarray([0.0] + left + [1.0 - c for c in left[::-1]] + [1.0])
    cuts = np.unique(cuts)
    refined = [cuts[0]]
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        pieces = max(1, int(math.ceil(phase * (hi - lo) / 2.0)))
        refined.extend(np.linspace(lo, hi, pieces + 1)[1:])
    cuts = np.asarray(refined)
    lo, hi = cuts[:-1], cuts[1:]
    half = 0.5 * (hi - lo)
    return (lo[:, None] + half[:, None] * (x[None, :] + 1.0)).ravel(), (half[:, None] * w[None, :]).ravel()


def _split_rule(brk, rho, omega):
    """Rule on ``[-1, 1]`` from the reference rule, split at ``brk`` (array).

    Returns nodes and weights of shape ``brk.shape + (2 * rho.size,)``.
    ``brk`` outside ``(-1, 1)`` is replaced by 0, which is harmless.
    """
    brk = np.where((brk > -1.0) & (brk < 1.0), brk, 0.0)[..., None]
    left_len, right_len = brk + 1.0, 1.0 - brk
    pts = np.concatenate([-1.0 + left_len * rho, brk + right_len * rho], axis=-1)
    wts = np.concatenate([left_len * omega, right_len * omega], axis=-1)
    return pts, wts


def _angular_density(N, t):
    c = gamma(0.5 * N) / (gamma(0.5 * (N - 1)) * math.sqrt(math.pi))
    return c * np.clip(1.0 - t * t, 0.0, None) ** (0.5 * (N - 3))


def _cpow(w, z):
    # principal branch, 0^z = 0 for Re z > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.exp(z * np.log(w.astype(complex)))
    return np.where(w == 0, 1.0 + 0j if z == 0 else 0j, out)


def frac_directional_derivative(geom, xi, z, sign=1):
    """``int (sign * 2 pi i <x, xi>)^z exp(2 pi i <x, xi>) d sigma_S(x)`` for ``ell <= 2``.

    ``sign=1`` is the literal form; ``sign=-1`` is the right-sided convention
    matching the Riesz derivative (``I^{-1} = -d/dt``). Each sphere factor is
    reduced to its angular variable ``t_k = <omega_k, zeta_k>/|zeta_k|`` with
    density proportional to ``(1 - t^2)^((N-3)/2)``. The complex power has a
    kink where ``<x, xi> = 0``; every one-dimensional rule is split there and
    graded towards the split and the endpoints.
    """
    if geom.kind != "sphere":
        raise DomainError("needs a sphere product")
    if geom.ell > 2:
        raise DomainError("frac_directional_derivative supports ell <= 2")
    z = complex(z)
    if z.real < 0:
        raise DomainError("needs Re z >= 0")
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    norms = geom.block_norms(xi)
    if norms.ndim != 1:
        raise DomainError("pass a single frequency vector")
    mass = 1.0
    for d, R in zip(geom.factor_dims, geom.radii):
        mass *= sphere_measure(d, R)
    a = [R * u for R, u in zip(geom.radii, norms)]

    def integrand(s):
        return _cpow(sign * 2j * math.pi * s, z) * np.exp(2j * math.pi * s)

    phase0 = 2.0 * math.pi * 2.0 * a[0] * (1.0 + abs(z))
    rho, omega = _graded_reference_rule(phase0)
    if geom.ell == 1:
        t, w = _split_rule(np.array(0.0), rho, omega)
        vals = integrand(a[0] * t) * _angular_density(geom.factor_dims[0], t)
        return complex(mass * np.sum(w * vals))

    # outer variable t1: the inner integral is non-smooth where the inner
    # kink -a0 t1 / a1 reaches +-1, i.e. at t1 = -+a1/a0
    kinks = [c for c in ((a[1] / a[0], -a[1] / a[0]) if a[0] > 0 else ()) if -1.0 < c < 1.0]
    outer_cuts = sorted({-1.0, 1.0, *kinks})
    t1s, w1s = [], []
    for lo, hi in zip(outer_cuts[:-1], outer_cuts[1:]):
        t1s.append(lo + (hi - lo) * rho)
        w1s.append((hi - lo) * omega)
    t1, w1 = np.concatenate(t1s), np.concatenate(w1s)
    phase1 = 2.0 * math.pi * 2.0 * a[1] * (1.0 + abs(z))
    rho2, omega2 = _graded_reference_rule(phase1)
    brk = -a[0] * t1 / a[1] if a[1] > 0 else np.zeros_like(t1)
    total = 0j
    for block in range(0, t1.size, 256):
        sl = slice(block, block + 256)
        t2, w2 = _split_rule(brk[sl], rho2, omega2)
        vals = integrand(a[0] * t1[sl, None] + a[1] * t2) * _angular_density(geom.factor_dims[1], t2)
        inner = np.sum(w2 * vals, axis=-1)
        total += np.sum(w1[sl] * _angular_density(geom.factor_dims[0], t1[sl]) * inner)
    return complex(mass * total)


# ---------------------------------------------------------------------------
# Stein interpolation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SteinBound:
    """Interpolated bound ``M(t)`` and the estimated truncation tail of its exponent."""

    value: float
    tail: float

    def __float__(self):
        return self.value


def stein_interp_bound(M0, M1, t, y_max=12.0, log_input=False):
    """``M(t) = exp[(sin pi t)/2 int (log M0(y)/(cosh pi y - cos pi t) + log M1(y)/(cosh pi y + cos pi t)) dy]``.

    ``M0`` and ``M1`` are vectorised callables (returning ``log M`` instead
    when ``log_input`` is set, which avoids overflow for fast growth). The integral is taken over
    ``[-y_max, y_max]`` on panels graded towards 0 (the first kernel has width
    of order ``t`` there). The tail beyond ``y_max`` is estimated from the
    integrand on ``[y_max, 2 y_max]``; a tail that does not decay raises
    :class:`DomainError`.
    """
    t = float(t)
    if not 0.0 < t < 1.0:
        raise DomainError("t must lie in (0, 1)")
    c = math.cos(math.pi * t)

    def integrand(y):
        ch = np.cosh(math.pi * y)
        l0 = np.asarray(M0(y), dtype=float)
        l1 = np.asarray(M1(y), dtype=float)
        if not log_input:
            l0, l1 = np.log(l0), np.log(l1)
        return l0 / (ch - c) + l1 / (ch + c)

    width = max(min(t, 1.0 - t), 1e-6)
    x, w = gauss_legendre(24)
    cuts = [0.0]
    edge = width / 8.0
    while edge < 1.0:
        cuts.append(edge)
        edge *= 2.0
    cuts.extend(np.arange(1.0, 2.0 * y_max + 0.5, 0.5))
    cuts = np.asarray(cuts)
    lo, hi = cuts[:-1], cuts[1:]
    half = 0.5 * (hi - lo)
    ys = (lo[:, None] + half[:, None] * (x[None, :] + 1.0)).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    vals = integrand(ys) + integrand(-ys)
    inside = ys <= y_max
    core = float(np.sum(ws[inside] * vals[inside]))
    tail = float(np.sum(ws[~inside] * np.abs(vals[~inside])))
    near = float(np.max(np.abs(vals[(ys > y_max - 1.0) & inside]), initial=0.0))
    far = float(np.max(np.abs(vals[ys > 2.0 * y_max - 1.0]), initial=0.0))
    if not np.isfinite(core) or not np.isfinite(tail) or (near > 0 and far >= near):
        raise DomainError("interpolation integrand does not decay; growth assumption violated")
    exponent = 0.5 * math.sin(math.pi * t) * core
    return SteinBound(math.exp(exponent), 0.5 * math.sin(math.pi * t) * tail)


class InterpolationExponents(NamedTuple):
    theta: float
    eps: float
    alpha: float


def _exponents(p, N):
    # the formulas alone, without the admissibility check
    theta = 2.0 - 2.0 / p
    eps = 0.5 * (0.5 * N * theta - 1.0)
    return InterpolationExponents(theta, eps, 0.5 * (N - 1) * theta - eps)


def interpolation_exponents(p, N):
    """``theta = 2 - 2/p``, ``eps`` the midpoint of ``(0, N theta/2 - 1)``, ``alpha = (N-1) theta/2 - eps``.

    Needs ``N/(N-1) < p < (N-1)/(N-2)``; both ends are rejected.
    """
    N = int(N)
    if N < 3:
        raise DomainError("needs N >= 3")
    lo, hi = N / (N - 1), (N - 1) / (N - 2)
    p = float(p)
    if not lo < p < hi:
        raise DomainError(f"p must lie in the open interval ({lo}, {hi}), got {p}")
    return _exponents(p, N)


def m_eps_symbol(geom, xi, z, eps, k=None):
    """``(1 + |xi|)^((N-1)/2 - eps - z) m_z(xi)`` for a product of equal spheres ``S^(N-1)``."""
    dims = set(geom.factor_dims)
    if len(dims) != 1:
        raise DomainError("m_eps_symbol needs equal factor dimensions")
    N = dims.pop()
    z = complex(z)
    if not 0.0 < eps < 1.0:
        raise DomainError("eps must lie in (0, 1)")
    if not -eps <= z.real <= 0.5 * N:
        raise DomainError("needs -eps <= Re z <= N/2")
    xi = np.asarray(xi, dtype=float)
    power = 0.5 * (N - 1) - eps - z
    pref = cmath.exp(power * math.log1p(float(np.linalg.norm(xi))))
    return pref * multiplier_m_z(geom, xi, z, k)
