"""Geometric invariants of products of unit-volume balls, with Monte Carlo oracles.

Samples come from a counter-based generator (Philox). A run is split into
fixed-size blocks, each seeded from ``SeedSequence(seed).spawn``; results
therefore do not depend on how blocks are scheduled.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ResourceError, ShapeError
from .fourier import ball_volume, unit_volume_radius
from .specfun import gamma

__all__ = [
    "McConfig",
    "McEstimate",
    "block_generators",
    "sample_product_body",
    "isotropic_constant",
    "second_moment_mc",
    "cross_term_mc",
    "q_invariant",
    "q_invariant_cauchy",
    "projection_volume",
    "analytic_maximizer",
    "shadow_volume_mc",
    "in_shadow",
    "smoothing_sigma",
    "smoothed_moment",
]


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings: sample count, seed, and the sigma multiplier for checks."""

    sample_count: int = 100_000
    seed: int = 0
    sigma: float = 3.0
    block_size: int = 1 << 16

    def __post_init__(self):
        if self.sample_count < 1 or self.block_size < 1:
            raise DomainError("sample_count and block_size must be positive")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class McEstimate:
    """A Monte Carlo mean with its standard error."""

    value: float
    stderr: float
    samples: int

    def within(self, target, sigma=3.0):
        return abs(self.value - target) <= sigma * self.stderr


def block_generators(mc, stream=0):
    """Yield ``(generator, size)`` per block; ``stream`` separates independent uses of one seed."""
    nblocks = -(-mc.sample_count // mc.block_size)
    seqs = np.random.SeedSequence([mc.seed, stream]).spawn(nblocks)
    for i, seq in enumerate(seqs):
        size = min(mc.block_size, mc.sample_count - i * mc.block_size)
        yield np.random.Generator(np.random.Philox(seq)), size


def _uniform_ball(rng, size, N, r):
    g = rng.standard_normal((size, N))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return g * (r * rng.random(size) ** (1.0 / N))[:, None]


def sample_product_body(geom, rng, size):
    """``size`` uniform samples from a ball product, shape ``(size, n)``."""
    if geom.kind != "ball":
        raise DomainError("sampling is implemented for ball products")
    return np.concatenate([_uniform_ball(rng, size, d, r) for d, r in zip(geom.factor_dims, geom.radii)], axis=1)


def _mean_estimate(chunks):
    # chunks: iterable of 1-D arrays of samples, combined in fixed order
    total = total_sq = 0.0
    count = 0
    for c in chunks:
        total += math.fsum(c)
        total_sq += math.fsum(c * c)
        count += c.size
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0)
    return McEstimate(mean, math.sqrt(var / max(count - 1, 1)), count)


def _check_unit_balls(geom):
    if geom.kind != "ball":
        raise DomainError("needs a ball product")
    for d, r in zip(geom.factor_dims, geom.radii):
        if abs(r - unit_volume_radius(d)) > 1e-12 * r:
            raise DomainError("factors must be unit-volume balls")


def _unit_direction(geom, xi):
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (geom.n,):
        raise ShapeError(f"direction must have shape ({geom.n},), got {xi.shape}")
    norm = np.linalg.norm(xi)
    if abs(norm - 1.0) > 1e-12:
        raise DomainError("direction must be a unit vector")
    return xi


def isotropic_constant(geom):
    """``L(B) = r_N / sqrt(N + 2)`` for a product of unit-volume N-balls."""
    _check_unit_balls(geom)
    values = [r / math.sqrt(d + 2.0) for d, r in zip(geom.factor_dims, geom.radii)]
    if max(values) - min(values) > 1e-9:
        raise DomainError("factors give different isotropic constants; the product is not isotropic")
    return values[0]


def second_moment_mc(geom, xi, mc):
    """MC estimate of ``int_B <x, xi>^2 dx`` (the body has unit volume)."""
    _check_unit_balls(geom)
    xi = _unit_direction(geom, xi)
    return _mean_estimate((sample_product_body(geom, rng, size) @ xi) ** 2 for rng, size in block_generators(mc, 1))


def cross_term_mc(geom, xi, mc, blocks=(0, 1)):
    """MC estimate of ``int_B <x^(a), xi^(a)> <x^(b), xi^(b)> dx``; zero by symmetry."""
    _check_unit_balls(geom)
    xi = _unit_direction(geom, xi)
    ga, gb = (geom.groups[i] for i in blocks)

    def chunks():
        for rng, size in block_generators(mc, 2):
            x = sample_product_body(geom, rng, size)
            yield (x[:, ga] @ xi[ga]) * (x[:, gb] @ xi[gb])

    return _mean_estimate(chunks())


def q_invariant(N, ell):
    """``sqrt(ell) pi^(-1/2) Gamma(N/2 + 1) / Gamma((N + 1)/2)`` as stated for products of unit-volume N-balls.

    This closed form is ``r_N`` times the maximal shadow volume; see
    :func:`q_invariant_cauchy` for the value the shadows actually attain.
    """
    if int(N) != N or N < 2:
        raise DomainError("q_invariant needs an integer N >= 2")
    if int(ell) != ell or ell < 1:
        raise DomainError("ell must be a positive integer")
    return math.sqrt(ell) * gamma(0.5 * N + 1.0) / (math.sqrt(math.pi) * gamma(0.5 * (N + 1)))


def q_invariant_cauchy(N, ell):
    """Maximal shadow volume ``sqrt(ell) |B^(N-1)_(r_N)|`` of ``(B^N_(r_N))^ell``.

    Equals ``sqrt(ell) Gamma(N/2+1)^((N-1)/N) / Gamma((N+1)/2)``; at ``N = 1``
    it gives ``sqrt(ell)``, the cube value.
    """
    if int(N) != N or N < 1:
        raise DomainError("N must be a positive integer")
    if int(ell) != ell or ell < 1:
        raise DomainError("ell must be a positive integer")
    if N == 1:
        return math.sqrt(ell)
    return math.sqrt(ell) * ball_volume(N - 1, unit_volume_radius(N))


def projection_volume(geom, xi, form="cauchy"):
    """Volume of the orthogonal projection of a ball product onto ``xi^perp``.

    ``form="cauchy"`` returns ``|B^(N-1)_(r_N)| sum_k |xi^(k)|``, the value from
    Cauchy's projection formula (each face ``dB_k x prod_{j != k} B_j``
    contributes ``|xi^(k)|`` times the shadow of ``B_k``). ``form="stated"``
    returns the stated closed form ``r_N |B^(N-1)_(r_N)| sum_k |xi^(k)|``.
    """
    _check_unit_balls(geom)
    dims = set(geom.factor_dims)
    if len(dims) != 1:
        raise DomainError("projection_volume needs equal factor dimensions")
    N = dims.pop()
    if N < 2:
        raise DomainError("projection_volume needs N >= 2")
    xi = _unit_direction(geom, xi)
    rN = unit_volume_radius(N)
    s = float(sum(np.linalg.norm(z) for z in geom.split(xi)))
    base = ball_volume(N - 1, rN) * s
    if form == "cauchy":
        return base
    if form == "stated":
        return rN * base
    raise DomainError(f"unknown form {form!r}")


def analytic_maximizer(geom):
    """The direction with ``xi^(k) = ell^(-1/2) e_1`` in every block."""
    xi = np.zeros(geom.n)
    for g in geom.groups:
        xi[g.start] = 1.0 / math.sqrt(geom.ell)
    return xi


def _complement_basis(xi):
    # orthonormal basis of xi^perp as rows, from a QR of [xi | I]
    n = xi.size
    q, _ = np.linalg.qr(np.column_stack([xi, np.eye(n)]))
    return q[:, 1:n].T


def in_shadow(geom, y, xi):
    """Whether points ``y`` (rows, already in ``xi^perp``) lie in the shadow of the body.

    ``y`` is in the shadow iff the line ``y + s xi`` meets every factor ball,
    i.e. the per-factor intervals of admissible ``s`` intersect.
    """
    lo = np.full(y.shape[0], -np.inf)
    hi = np.full(y.shape[0], np.inf)
    ok = np.ones(y.shape[0], dtype=bool)
    for g, r in zip(geom.groups, geom.radii):
        yk, zk = y[:, g], xi[g]
        a = float(zk @ zk)
        b = yk @ zk
        c = np.einsum("ij,ij->i", yk, yk) - r * r
        if a == 0.0:
            ok &= c <= 0.0
            continue
        disc = b * b - a * c
        ok &= disc >= 0.0
        root = np.sqrt(np.clip(disc, 0.0, None))
        lo = np.maximum(lo, (-b - root) / a)
        hi = np.minimum(hi, (-b + root) / a)
    return ok & (lo <= hi)


def shadow_volume_mc(geom, xi, mc):
    """Hit-or-miss estimate of the projection volume onto ``xi^perp``.

    Uniform points are drawn from a box in an orthonormal frame of
    ``xi^perp`` whose half-widths are the body's support values
    ``h(e_i) = sum_k r_k |e_i^(k)|``; a point counts if it lies in the shadow.
    """
    if geom.kind != "ball":
        raise DomainError("needs a ball product")
    xi = _unit_direction(geom, xi)
    basis = _complement_basis(xi)
    half = np.array([sum(r * np.linalg.norm(e[g]) for g, r in zip(geom.groups, geom.radii)) for e in basis])
    box = float(np.prod(2.0 * half))

    def chunks():
        for rng, size in block_generators(mc, 3):
            coords = (rng.random((size, half.size)) * 2.0 - 1.0) * half
            yield in_shadow(geom, coords @ basis, xi).astype(float)

    frac = _mean_estimate(chunks())
    return McEstimate(box * frac.value, box * frac.stderr, frac.samples)


def smoothing_sigma():
    """Standard deviation of the kernel with transform ``exp(-|xi|^2)``: ``1/(pi sqrt 2)``."""
    return 1.0 / (math.pi * math.sqrt(2.0))


def smoothed_moment(geom, xi, k, s, mc, target_stderr=None):
    """MC estimate of ``int |<x, xi>|^k (chi_B * H_(2^-s))(x) dx``.

    Sampled as ``x = y + 2^(-s) g`` with ``y`` uniform in the body and
    ``g`` centred normal with variance ``1/(2 pi^2)`` per coordinate, the
    density whose transform is ``exp(-|xi|^2)``.
    """
    _check_unit_balls(geom)
    if geom.n > 8:
        raise DomainError("smoothed_moment is limited to n <= 8")
    if int(k) != k or k < 1 or int(s) != s or s < 1:
        raise DomainError("k and s must be positive integers")
    xi = _unit_direction(geom, xi)
    scale = 2.0 ** (-s) * smoothing_sigma()

    def chunks():
        for rng, size in block_generators(mc, 4):
            x = sample_product_body(geom, rng, size) + scale * rng.standard_normal((size, geom.n))
            yield np.abs(x @ xi) ** k

    est = _mean_estimate(chunks())
    if target_stderr is not None and est.stderr > target_stderr:
        raise ResourceError(
            f"standard error {est.stderr:.3g} above target {target_stderr:.3g}; raise sample_count"
        )
    return est
