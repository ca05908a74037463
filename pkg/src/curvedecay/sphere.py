"""Quadrature grids and uniform samplers on the unit sphere S^{d-1}.

Grids are product constructions: equispaced angles for d=2, Gauss-Legendre
in cos(polar) times equispaced azimuth for d=3, and Gauss-Legendre in every
polar angle (sin-power Jacobians folded into the weights) for d up to 6.
The azimuth is offset by half a step so no node lands on a coordinate
plane, where several witness-set predicates have their boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, DomainError

UNIT_NORM_TOL = 1e-12
AREA_REL_TOL = 1e-9
_MIN_POLAR_NODES = 12  # keeps the sin-power Jacobian integrated to ~1e-12


def surface_area(d: int) -> float:
    """Area of S^{d-1}: 2 pi^{d/2} / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class SphericalGrid:
    dim: int
    nodes: np.ndarray     # (n, d), unit vectors
    weights: np.ndarray   # (n,), positive, sums to surface_area(dim)
    resolution: int       # nodes per full angular period

    def __post_init__(self):
        norms = np.linalg.norm(self.nodes, axis=1)
        if np.max(np.abs(norms - 1.0)) > UNIT_NORM_TOL:
            raise DomainError("grid nodes must be unit vectors")
        if np.any(self.weights <= 0):
            raise DomainError("grid weights must be positive")
        total = float(np.sum(self.weights))
        area = surface_area(self.dim)
        if abs(total - area) > AREA_REL_TOL * area:
            raise DomainError(
                f"weights sum {total!r} differs from surface area {area!r}")

    def __len__(self):
        return self.nodes.shape[0]

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum; np.sum is pairwise, so the reduction order is fixed."""
        return float(np.sum(self.weights * values))


def _gauss_legendre(n: int, a: float, b: float):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


def product_grid(d: int, m: int) -> SphericalGrid:
    """Product quadrature grid on S^{d-1} with ~m nodes per angular period."""
    if not 2 <= d <= 6:
        raise CapabilityError(f"product grids support d in 2..6, got {d}")
    if m < 4:
        raise DomainError("resolution m must be >= 4")
    if d == 2:
        theta = 2.0 * math.pi * (np.arange(m) + 0.5) / m
        nodes = np.column_stack([np.cos(theta), np.sin(theta)])
        weights = np.full(m, 2.0 * math.pi / m)
        return SphericalGrid(2, nodes, weights, m)

    n_pol = max(int(math.ceil(m / 2)), _MIN_POLAR_NODES)
    az = 2.0 * math.pi * (np.arange(m) + 0.5) / m
    az_w = np.full(m, 2.0 * math.pi / m)
    if d == 3:
        # Gauss-Legendre in cos(polar): exact for every spherical polynomial
        # of degree <= 2 n_pol - 1 when combined with the exact azimuth sums
        u, wu = _gauss_legendre(n_pol, -1.0, 1.0)
        phi = np.arccos(u)
        nodes = np.empty((n_pol * m, 3))
        s = np.sqrt(1.0 - u * u)
        nodes[:, 0] = np.repeat(s, m) * np.tile(np.cos(az), n_pol)
        nodes[:, 1] = np.repeat(s, m) * np.tile(np.sin(az), n_pol)
        nodes[:, 2] = np.repeat(u, m)
        weights = np.repeat(wu, m) * np.tile(az_w, n_pol)
        nodes /= np.linalg.norm(nodes, axis=1)[:, None]
        return SphericalGrid(3, nodes, weights, m)

    # d in {4, 5, 6}: polar angles phi_1..phi_{d-2} in [0, pi] with Jacobian
    # sin^{d-1-i}(phi_i), then equispaced azimuth; product of the 1-d rules.
    polar_rules = []
    for i in range(1, d - 1):
        phi, w = _gauss_legendre(n_pol, 0.0, math.pi)
        polar_rules.append((phi, w * np.sin(phi) ** (d - 1 - i)))

    angles = [r[0] for r in polar_rules] + [az]
    wlists = [r[1] for r in polar_rules] + [az_w]
    mesh = np.meshgrid(*angles, indexing="ij")
    wmesh = np.meshgrid(*wlists, indexing="ij")
    weights = np.ones_like(wmesh[0])
    for w in wmesh:
        weights = weights * w
    flat_angles = [g.ravel() for g in mesh]
    weights = weights.ravel()

    n = weights.size
    nodes = np.empty((n, d))
    sin_prod = np.ones(n)
    for i, phi in enumerate(flat_angles[:-1]):
        nodes[:, i] = sin_prod * np.cos(phi)
        sin_prod = sin_prod * np.sin(phi)
    last = flat_angles[-1]
    nodes[:, d - 2] = sin_prod * np.cos(last)
    nodes[:, d - 1] = sin_prod * np.sin(last)
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    return SphericalGrid(d, nodes, weights, m)


def default_resolution(d: int, R: float) -> int:
    """Grid resolution needed for integrands oscillating at frequency ~R.

    The transform of a curve measure varies on angular scales down to
    R^{-1/2} transverse to the curve directions, hence the sqrt scaling
    for d=3 and the linear one for d=2.
    """
    if d == 2:
        return max(64, int(math.ceil(8.0 * R)))
    return max(32, int(math.ceil(8.0 * math.sqrt(max(R, 1.0)))))


def _rng(seed: int, stream: int = 0):
    return np.random.default_rng([int(seed), int(stream)])


def random_sphere(d: int, n: int, seed: int, stream: int = 0) -> np.ndarray:
    """n i.i.d. uniform points on S^{d-1} (Gaussian normalization)."""
    if n < 1:
        raise DomainError("need n >= 1 samples")
    g = _rng(seed, stream).standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1)[:, None]


def estimate_measure(d: int, predicate, n: int, seed: int,
                     stream: int = 0) -> tuple[float, float]:
    """Monte-Carlo fraction of S^{d-1} where predicate holds, with stderr.

    predicate receives an (n, d) array and returns a boolean mask.
    """
    pts = random_sphere(d, n, seed, stream)
    hits = np.asarray(predicate(pts), dtype=bool)
    frac = float(np.count_nonzero(hits)) / n
    stderr = math.sqrt(frac * (1.0 - frac) / n)
    return frac, stderr


def sample_cap(d: int, eps: float, n: int, rng) -> np.ndarray:
    """Uniform samples from the cap {|omega - e_d| <= eps} around the last axis.

    |omega - e|^2 = 2 - 2<omega, e>, so the cap is <omega, e> >= 1 - eps^2/2.
    The axis component u has density (1-u^2)^{(d-3)/2}; we draw it by
    rejection against a uniform envelope, which is cheap on a small cap.
    """
    if not 0 < eps < math.sqrt(2.0):
        raise DomainError("cap radius must be in (0, sqrt(2))")
    u_min = 1.0 - 0.5 * eps * eps
    u = np.empty(n)
    have = 0
    if d == 3:
        u = rng.uniform(u_min, 1.0, size=n)
    else:
        env = max((1.0 - u_min * u_min) ** ((d - 3) / 2.0), 1e-300)
        while have < n:
            cand = rng.uniform(u_min, 1.0, size=2 * (n - have) + 16)
            dens = (1.0 - cand * cand) ** ((d - 3) / 2.0)
            keep = cand[rng.uniform(0.0, env, size=cand.size) < dens]
            take = min(keep.size, n - have)
            u[have:have + take] = keep[:take]
            have += take
    v = rng.standard_normal((n, d - 1))
    v /= np.linalg.norm(v, axis=1)[:, None]
    out = np.empty((n, d))
    out[:, : d - 1] = np.sqrt(np.maximum(1.0 - u * u, 0.0))[:, None] * v
    out[:, d - 1] = u
    return out


def cap_area(d: int, eps: float) -> float:
    """Area of the cap {|omega - e| <= eps} on S^{d-1}."""
    u_min = 1.0 - 0.5 * eps * eps
    if d == 2:
        return 2.0 * math.acos(max(min(u_min, 1.0), -1.0))
    us, ws = _gauss_legendre(64, u_min, 1.0)
    return float(np.sum(ws * (1.0 - us * us) ** ((d - 3) / 2.0))
                 * surface_area(d - 1))
