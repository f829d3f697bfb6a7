"""Radial derivatives ``(d/dr)^alpha m~(r zeta)`` and ``(d/dr)^j m(r xi)``.

Three routes for a single sphere factor:

* the explicit Bessel-sum formula (:func:`sphere_radial_derivative_explicit`),
  which switches to termwise differentiation of the power series near 0,
* quadrature of the oscillatory angular integral
  (:func:`sphere_radial_derivative_quadrature`),
* finite differences of ``m~`` itself (:func:`finite_difference`).

Products of spheres are handled by the Leibniz sum over multi-indices and by
the equivalent sum over index sequences ``a in {1..ell}^j``.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError, ResourceError, ShapeError
from .fourier import radial_series_coefficients, sphere_measure
from .specfun import bessel_j, gamma, gauss_legendre

__all__ = [
    "DERIV_SWITCH",
    "sphere_radial_derivative",
    "sphere_radial_derivative_explicit",
    "sphere_radial_derivative_series",
    "sphere_radial_derivative_quadrature",
    "factor_derivative_table",
    "product_radial_derivative_leibniz",
    "product_radial_derivative_enumerated",
    "product_radial_derivative_batch",
    "multi_indices",
    "FiniteDifference",
    "fornberg_weights",
    "finite_difference",
]

# below 2 pi R |zeta| = DERIV_SWITCH the |zeta|^(-k) factors of the explicit
# formula cancel badly and the differentiated power series is used
DERIV_SWITCH = 0.25
_MAX_ALPHA = 8
_ENUM_BUDGET = 10**6


def _check_alpha(alpha):
    if int(alpha) != alpha or not 0 <= alpha <= _MAX_ALPHA:
        raise DomainError(f"derivative order must be an integer in [0, {_MAX_ALPHA}]")
    return int(alpha)


def _pochhammer(a, k):
    out = 1.0
    for i in range(k):
        out *= a + i
    return out


def sphere_radial_derivative_series(N, R, u, alpha, r):
    """Termwise derivative of the power series of ``r -> m~(r zeta)``.

    ``|S_R| sum_{2k >= alpha} c_k (2 pi R u)^(2k) (2k)!/(2k-alpha)! r^(2k-alpha)``.
    Accurate while ``2 pi R u r`` is moderate (the terms alternate).
    """
    alpha = _check_alpha(alpha)
    u = np.asarray(u, dtype=float)
    r = np.asarray(r, dtype=float)
    w = 2.0 * math.pi * R * np.abs(u)
    terms = 40
    c = radial_series_coefficients(N, terms)
    acc = np.zeros(np.broadcast(w, r).shape)
    for k in range(terms - 1, -1, -1):
        if 2 * k < alpha:
            break
        fall = math.perm(2 * k, alpha)  # (2k)!/(2k-alpha)!
        acc = acc + c[k] * fall * w ** (2 * k) * r ** (2 * k - alpha)
    out = sphere_measure(N, R) * acc
    return out if out.ndim else float(out)


def _explicit_bessel(N, R, u, alpha, r):
    nu = 0.5 * (N - 2)
    t = 2.0 * math.pi * r * R * u
    total = np.zeros(t.shape)
    for k in range(alpha + 1):
        poch = _pochhammer(nu, k)
        if poch == 0.0:
            continue
        inner = np.zeros(t.shape)
        for j in range(alpha - k + 1):
            sign = -1.0 if (j + k) % 2 else 1.0
            inner += sign * math.comb(alpha - k, j) * bessel_j(nu - alpha + k + 2 * j, t)
        total += math.comb(alpha, k) * (math.pi * r * R * u) ** (-k) * poch * inner
    lead = 2.0 * math.pi ** (alpha + 1) * r ** (-nu) * R ** (0.5 * N + alpha)
    return lead * u ** (alpha - nu) * total


def sphere_radial_derivative_explicit(N, R, u, alpha, r):
    """``(d/dr)^alpha m~(r zeta)`` at ``|zeta| = u`` by the explicit Bessel-sum formula.

    ``2 pi^(alpha+1) r^(-(N-2)/2) R^(N/2+alpha) u^(alpha-(N-2)/2)
    sum_k C(alpha,k) (pi r R u)^(-k) B_(alpha,k)(2 pi r R u)`` with
    ``B_(alpha,k)(t) = (nu)_k sum_j (-1)^(j+k) C(alpha-k,j) J_(nu-alpha+k+2j)(t)``,
    ``nu = (N-2)/2``. Where ``2 pi R u < DERIV_SWITCH`` the series route is used.
    ``u`` and ``r`` broadcast.
    """
    if N < 2:
        raise DomainError("sphere factors need N >= 2")
    alpha = _check_alpha(alpha)
    u = np.abs(np.asarray(u, dtype=float))
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("r must be positive")
    u, r = np.broadcast_arrays(u, r)
    out = np.empty(u.shape)
    small = 2.0 * math.pi * R * u < DERIV_SWITCH
    if np.any(small):
        out[small] = sphere_radial_derivative_series(N, R, u[small], alpha, r[small])
    big = ~small
    if np.any(big):
        out[big] = _explicit_bessel(N, R, u[big], alpha, r[big])
    return out if out.ndim else float(out)


sphere_radial_derivative = sphere_radial_derivative_explicit


def sphere_radial_derivative_quadrature(N, R, u, alpha, r, tol=1e-12, return_residual=False):
    """``(d/dr)^alpha m~(r zeta)`` from the oscillatory angular integral.

    ``|S_R| Gamma(N/2)/(Gamma((N-1)/2) sqrt(pi)) (2 pi i R u)^alpha
    int_{-1}^{1} exp(2 pi i R r u t) t^alpha (1-t^2)^((N-3)/2) dt``, taken with
    ``t = sin(phi)`` and Gauss-Legendre, doubling nodes until the estimate
    settles. Scalar ``u`` and ``r``. The imaginary residual of the result is
    available with ``return_residual=True``.
    """
    if N < 3:
        raise DomainError("the quadrature route needs N >= 3")
    alpha = _check_alpha(alpha)
    u, r = abs(float(u)), float(r)
    if r <= 0:
        raise DomainError("r must be positive")
    k = 2.0 * math.pi * R * u
    omega = k * r
    norm = sphere_measure(N, R) * gamma(0.5 * N) / (gamma(0.5 * (N - 1)) * math.sqrt(math.pi))
    front = norm * (1j * k) ** alpha
    scale = norm * max(1.0, k) ** alpha
    n = 32 + 2 * int(omega)
    prev = None
    while n <= 8192:
        x, w = gauss_legendre(n)
        phi = 0.5 * math.pi * x
        s = np.sin(phi)
        vals = np.exp(1j * omega * s) * s**alpha * np.cos(phi) ** (N - 2)
        est = front * 0.5 * math.pi * complex(w @ vals)
        if prev is not None and abs(est - prev) <= tol * scale:
            if return_residual:
                return est.real, abs(est.imag)
            return est.real
        prev = est
        n *= 2
    err = abs(est - prev)
    if err > 1e-9 * scale:
        raise NumericError("angular quadrature did not converge", estimate=err)
    return (est.real, abs(est.imag)) if return_residual else est.real


def factor_derivative_table(geom, xi, j, r):
    """Array ``D[k, a] = (d/dr)^a m~_k(r zeta_k)`` for ``a <= j``, factors ``k``."""
    if geom.kind != "sphere":
        raise DomainError("radial derivatives are defined for sphere products")
    norms = geom.block_norms(xi)
    if norms.ndim != 1:
        raise DomainError("pass a single frequency vector")
    table = np.empty((geom.ell, j + 1))
    for k, (d, R) in enumerate(zip(geom.factor_dims, geom.radii)):
        for a in range(j + 1):
            table[k, a] = sphere_radial_derivative(d, R, norms[k], a, r)
    return table


def multi_indices(ell, j):
    """All ``alpha in N^ell`` with ``|alpha| = j`` (stars and bars order)."""
    for bars in itertools.combinations(range(j + ell - 1), ell - 1):
        prev, out = -1, []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(j + ell - 2 - prev)
        yield tuple(out)


def _multinomial(j, alpha):
    out = math.factorial(j)
    for a in alpha:
        out //= math.factorial(a)
    return out


def product_radial_derivative_leibniz(geom, xi, j, r, table=None):
    """``(d/dr)^j m(r xi)`` by the general Leibniz rule over multi-indices."""
    j = _check_alpha(j)
    if math.comb(j + geom.ell - 1, geom.ell - 1) > _ENUM_BUDGET:
        raise ResourceError("multi-index enumeration exceeds the term budget")
    if table is None:
        table = factor_derivative_table(geom, xi, j, r)
    total = 0.0
    for alpha in multi_indices(geom.ell, j):
        term = float(_multinomial(j, alpha))
        for k, a in enumerate(alpha):
            term *= table[k, a]
        total += term
    return total


def product_radial_derivative_batch(geom, block_norms, j, r):
    """Leibniz form vectorised over frequencies given by their block norms ``(..., ell)``.

    ``r`` broadcasts against the leading axes.
    """
    if geom.kind != "sphere":
        raise DomainError("radial derivatives are defined for sphere products")
    j = _check_alpha(j)
    norms = np.asarray(block_norms, dtype=float)
    if norms.shape[-1:] != (geom.ell,):
        raise ShapeError(f"block norms need last axis {geom.ell}, got {norms.shape}")
    r = np.broadcast_to(np.asarray(r, dtype=float), norms.shape[:-1])
    table = [
        [sphere_radial_derivative(d, R, norms[..., k], a, r) for a in range(j + 1)]
        for k, (d, R) in enumerate(zip(geom.factor_dims, geom.radii))
    ]
    total = np.zeros(norms.shape[:-1])
    for alpha in multi_indices(geom.ell, j):
        term = np.full(norms.shape[:-1], float(_multinomial(j, alpha)))
        for k, a in enumerate(alpha):
            term = term * table[k][a]
        total = total + term
    return total if total.ndim else float(total)


def product_radial_derivative_enumerated(geom, xi, j, r, table=None):
    """``(d/dr)^j m(r xi)`` as a sum over sequences ``a in {1..ell}^j``.

    Each sequence contributes ``prod_k (d/dr)^(alpha(a)_k) m~_k`` where
    ``alpha(a)_k`` counts the occurrences of ``k`` in ``a``.
    """
    j = _check_alpha(j)
    if geom.ell**j > _ENUM_BUDGET:
        raise ResourceError("sequence enumeration exceeds the term budget")
    if table is None:
        table = factor_derivative_table(geom, xi, j, r)
    total = 0.0
    counts = [0] * geom.ell
    for seq in itertools.product(range(geom.ell), repeat=j):
        counts[:] = [0] * geom.ell
        for a in seq:
            counts[a] += 1
        term = 1.0
        for k, c in enumerate(counts):
            term *= table[k, c]
        total += term
    return total


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------


def fornberg_weights(offsets, order):
    """Finite-difference weights for the ``order``-th derivative at 0 on the given offsets."""
    z = np.asarray(offsets, dtype=float)
    n = z.size
    if order >= n:
        raise DomainError("need more stencil points than the derivative order")
    c = np.zeros((n, order + 1))
    c1, c4 = 1.0, z[0]
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, order)
        c2, c5, c4 = 1.0, c4, z[i]
        for jj in range(i):
            c3 = z[i] - z[jj]
            c2 *= c3
            if jj == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[jj, k] = (c4 * c[jj, k] - k * c[jj, k - 1]) / c3
            c[jj, 0] = c4 * c[jj, 0] / c3
        c1 = c2
    return c[:, order]


@dataclass(frozen=True)
class FiniteDifference:
    """A finite-difference estimate with its Richardson error estimate."""

    value: float
    error: float

    def __float__(self):
        return self.value


def _central_offsets(alpha):
    m = (alpha + 1) // 2 + 1
    return np.arange(-m, m + 1, dtype=float)


def finite_difference(profile, r, alpha, h):
    """Fourth-order central estimate of ``profile^(alpha)(r)``.

    ``profile`` is a callable of one real variable; an optional ``domain``
    attribute ``(lo, hi)`` bounds the stencil (default ``(0, inf)``). The
    estimate at ``h`` is combined with the one at ``2h`` (Richardson), and the
    difference between them is reported as the error.
    """
    alpha = int(alpha)
    if alpha < 0:
        raise DomainError("derivative order must be non-negative")
    if alpha == 0:
        return FiniteDifference(float(profile(r)), 0.0)
    offsets = _central_offsets(alpha)
    lo, hi = getattr(profile, "domain", (0.0, math.inf))
    reach = 2.0 * h * offsets[-1]
    if r - reach <= lo or r + reach > hi:
        raise DomainError(f"stencil [{r - reach}, {r + reach}] leaves the domain ({lo}, {hi}]")
    w = fornberg_weights(offsets, alpha)

    def estimate(step):
        vals = np.array([profile(r + step * o) for o in offsets], dtype=float)
        return float(w @ vals) / step**alpha

    fine, coarse = estimate(h), estimate(2.0 * h)
    # central stencils built this way are at least fourth order
    value = fine + (fine - coarse) / 15.0
    return FiniteDifference(value, abs(fine - coarse) / 15.0)
