"""Spherical L^q average decay: series, exponent fits, and envelopes.

The central object is the table R -> (integral over the sphere of |F_R|^q)^{1/q}
for the transform F_R of a smooth density on a curve.  Grids come from
`sphere.product_grid` with R-dependent resolution for d <= 3 and from
quasi-uniform Monte-Carlo nodes for d >= 4 where product grids blow up.
Exponents are extracted by least squares in log space against the model
c R^{-sigma} (log R)^beta, reporting both the free fit and the beta = 0 fit
so log factors are a model comparison, never a hard boolean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .curve import Curve
from .errors import DomainError, FitError
from .oscquad import CutoffSpec, QuadResult, _adaptive_osc, fourier_batch
from .sphere import SphericalGrid, default_resolution, product_grid, surface_area

MC_DIM_THRESHOLD = 4          # d >= 4 uses Monte-Carlo nodes by default
MC_CAP = 10_000_000
MAX_EXCLUDED_FRACTION = 0.10  # more than this and the fit is unreliable


def experiment_grid(d: int, R: float, seed: int = 0) -> SphericalGrid:
    """Default integration grid for frequency R: product rule for d <= 3,
    equal-weight Monte-Carlo nodes (a valid SphericalGrid) for d >= 4."""
    if d < MC_DIM_THRESHOLD:
        return product_grid(d, default_resolution(d, R))
    n = int(min(10_000 * math.sqrt(max(R, 1.0)), MC_CAP))
    rng = np.random.default_rng([int(seed), int(R)])
    pts = rng.standard_normal((n, d))
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    w = np.full(n, surface_area(d) / n)
    return SphericalGrid(d, pts, w, n)


def planar_adapted_grid(R: float, n_phi: int = 12) -> SphericalGrid:
    """Grid on S^2 with dyadic refinement toward the poles, for curves lying
    in the first two coordinates.

    Their transform depends on omega only through rho = |(omega_1, omega_2)|
    and concentrates near the poles down to rho ~ 1/R, far below the reach
    of a Gauss-Legendre product grid (whose extreme polar node sits at
    rho ~ 1/m).  Nodes here are placed per dyadic shell rho ~ 2^{-l} with
    Gauss-Legendre in the polar angle and an azimuth count matched to the
    effective frequency R rho, plus a cap covering the polar core.
    """
    gx, gw = np.polynomial.legendre.leggauss(n_phi)
    l_max = max(1, int(math.floor(math.log2(max(R, 16.0) / 8.0))))
    blocks = []

    def add_band(phi_lo, phi_hi, m_az, n_nodes=n_phi):
        mid, half = 0.5 * (phi_hi + phi_lo), 0.5 * (phi_hi - phi_lo)
        px, pw = (gx, gw) if n_nodes == n_phi else \
            np.polynomial.legendre.leggauss(n_nodes)
        phis = mid + half * px
        wphi = half * pw * np.sin(phis)          # d(cos phi) jacobian
        ang = 2.0 * math.pi * (np.arange(m_az) + 0.5) / m_az
        waz = 2.0 * math.pi / m_az
        cp, sp = np.cos(phis), np.sin(phis)
        ca, sa = np.cos(ang), np.sin(ang)
        for sgn in (1.0, -1.0):
            nodes = np.empty((phis.size * m_az, 3))
            nodes[:, 0] = np.repeat(sp, m_az) * np.tile(ca, phis.size)
            nodes[:, 1] = np.repeat(sp, m_az) * np.tile(sa, phis.size)
            nodes[:, 2] = sgn * np.repeat(cp, m_az)
            blocks.append((nodes, np.repeat(wphi, m_az) * waz))

    for l in range(1, l_max + 1):
        rho_lo = 2.0 ** (-l)
        rho_hi = min(2.0 ** (-l + 1), 1.0)
        m_az = max(64, int(math.ceil(8.0 * math.sqrt(R * rho_hi))))
        add_band(math.asin(rho_lo), math.asin(rho_hi), m_az)
    add_band(0.0, math.asin(2.0 ** (-l_max)), 64, n_nodes=8)

    nodes = np.vstack([b[0] for b in blocks])
    weights = np.concatenate([b[1] for b in blocks])
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    return SphericalGrid(3, nodes, weights, int(default_resolution(3, R)))


@dataclass(frozen=True)
class SeriesRow:
    R: float
    value: float
    m: int
    resolved_fraction: float

    @property
    def included(self) -> bool:
        return self.resolved_fraction >= 1.0


@dataclass(frozen=True)
class DecaySeries:
    curve_id: str
    d: int
    K: int
    q: float
    rows: tuple
    cutoff: CutoffSpec

    def __post_init__(self):
        rs = [r.R for r in self.rows]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise DomainError("R values must be strictly increasing")

    def included_rows(self):
        return [r for r in self.rows if r.included]


def power_sum(weights, absF, q: float) -> float:
    """(sum_i w_i |F_i|^q)^{1/q}; q = inf is the grid max, which is a lower
    bound on the true sup.  np.sum is pairwise, so the order is fixed."""
    if math.isinf(q):
        return float(np.max(absF))
    return float(np.sum(weights * absF ** q) ** (1.0 / q))


def spherical_average(curve: Curve, cutoff: CutoffSpec, q: float, R: float,
                      grid: SphericalGrid, workers: int = 1,
                      backend: str | None = None,
                      tol: float | None = None) -> SeriesRow:
    """One table entry: the L^q average of |F_R| over the given grid."""
    if grid.dim != curve.dim:
        raise DomainError("grid dimension must match curve dimension")
    if not (q >= 1.0):
        raise DomainError("need q >= 1 (or inf)")
    batch = fourier_batch(curve, cutoff, R, grid.nodes, tol=tol,
                          workers=workers, backend=backend)
    resolved_fraction = float(np.mean(batch.resolved))
    value = power_sum(grid.weights, np.abs(batch.values), q)
    return SeriesRow(float(R), value, grid.resolution, resolved_fraction)


def gq_series(curve: Curve, cutoff: CutoffSpec, qs, R_values,
              grid_fn=None, workers: int = 1, backend: str | None = None,
              seed: int = 0, K: int | None = None) -> dict:
    """Decay series for several q at once; the transform values at each R
    are computed once and shared across the q list.

    Curves in R^3 lying in a coordinate plane automatically get the
    polar-adapted grid: their averages at large q live on polar shells down
    to |omega'| ~ 1/R that a uniform-resolution grid cannot see.
    """
    from .curve import planar_order
    if grid_fn is None and curve.dim == 3 and planar_order(curve) == 2:
        grid_fn = planar_adapted_grid
    grid_fn = grid_fn or (lambda R: experiment_grid(curve.dim, R, seed))
    if K is None:
        from .curve import derivative_rank
        mid = 0.5 * (curve.interval[0] + curve.interval[1])
        K = derivative_rank(curve, mid, curve.dim)
    rows: dict[float, list[SeriesRow]] = {float(q): [] for q in qs}
    for R in sorted(float(r) for r in R_values):
        grid = grid_fn(R)
        batch = fourier_batch(curve, cutoff, R, grid.nodes,
                              workers=workers, backend=backend)
        frac = float(np.mean(batch.resolved))
        absF = np.abs(batch.values)
        for q in rows:
            rows[q].append(SeriesRow(R, power_sum(grid.weights, absF, q),
                                     grid.resolution, frac))
    return {q: DecaySeries(curve.curve_id, curve.dim, K, q, tuple(rs), cutoff)
            for q, rs in rows.items()}


def resolution_check(curve: Curve, cutoff: CutoffSpec, q: float, R: float,
                     m: int, workers: int = 1) -> tuple[float, float, float]:
    """Relative change of the average between an m grid and a 2m grid;
    flags under-resolution when the two disagree."""
    v1 = spherical_average(curve, cutoff, q, R, product_grid(curve.dim, m),
                           workers=workers).value
    v2 = spherical_average(curve, cutoff, q, R, product_grid(curve.dim, 2 * m),
                           workers=workers).value
    return v1, v2, abs(v1 - v2) / max(abs(v2), 1e-300)


# -- exponent fitting ------------------------------------------------------------


@dataclass(frozen=True)
class DecayFit:
    sigma_hat: float
    beta_hat: float
    amplitude: float
    residual_rms: float          # RMS of ln-space residuals
    window: tuple                # (R_min, R_max) of the rows used
    n_used: int
    n_excluded: int
    forced_beta: float | None
    free_sigma: float
    free_beta: float
    free_residual_rms: float
    beta0_sigma: float
    beta0_residual_rms: float
    unreliable: bool

    @property
    def residual_rms_log2(self) -> float:
        return self.residual_rms / math.log(2.0)

    def model_comparison(self) -> dict:
        return {
            "free": {"sigma": self.free_sigma, "beta": self.free_beta,
                     "residual_rms": self.free_residual_rms},
            "beta0": {"sigma": self.beta0_sigma,
                      "residual_rms": self.beta0_residual_rms},
        }


def _lstsq_fit(lnR, lnG, fixed_beta=None):
    lnlog = np.log(lnR)      # ln ln R; callers guarantee R > 1
    if fixed_beta is None:
        X = np.column_stack([np.ones_like(lnR), lnR, lnlog])
        coef, *_ = np.linalg.lstsq(X, lnG, rcond=None)
        resid = lnG - X @ coef
        return -coef[1], coef[2], math.exp(coef[0]), \
            float(np.sqrt(np.mean(resid ** 2)))
    y = lnG - fixed_beta * lnlog
    X = np.column_stack([np.ones_like(lnR), lnR])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return -coef[1], fixed_beta, math.exp(coef[0]), \
        float(np.sqrt(np.mean(resid ** 2)))


def fit_exponent(series: DecaySeries, force_beta: float | None = None) -> DecayFit:
    """Least squares of ln G against (1, ln R, ln ln R).

    Requires at least 6 included rows spanning two decades of R (with R > 1
    throughout so ln ln R is defined).  Reports the free fit and the beta=0
    fit side by side; `force_beta` pins beta and refits (c, sigma) only.
    """
    rows = series.included_rows()
    excluded = len(series.rows) - len(rows)
    if len(rows) < 6:
        raise FitError(f"need >= 6 included rows, have {len(rows)}")
    rs = np.array([r.R for r in rows])
    if np.min(rs) <= 1.0:
        raise FitError("fit window must have R > 1")
    if np.max(rs) / np.min(rs) < 100.0:
        raise FitError("R window spans less than two decades")
    vals = np.array([r.value for r in rows])
    if np.any(vals <= 0):
        raise FitError("nonpositive averages cannot be fit in log space")
    lnR, lnG = np.log(rs), np.log(vals)

    free = _lstsq_fit(lnR, lnG, None)
    beta0 = _lstsq_fit(lnR, lnG, 0.0)
    primary = free if force_beta is None else _lstsq_fit(lnR, lnG, force_beta)
    unreliable = excluded > MAX_EXCLUDED_FRACTION * len(series.rows)
    return DecayFit(
        sigma_hat=primary[0], beta_hat=primary[1], amplitude=primary[2],
        residual_rms=primary[3], window=(float(rs[0]), float(rs[-1])),
        n_used=len(rows), n_excluded=excluded, forced_beta=force_beta,
        free_sigma=free[0], free_beta=free[1], free_residual_rms=free[3],
        beta0_sigma=beta0[0], beta0_residual_rms=beta0[3],
        unreliable=unreliable)


def synthetic_series(R_values, sigma: float, beta: float = 0.0,
                     amplitude: float = 1.0, q: float = 2.0) -> DecaySeries:
    """Noiseless model data, used to validate the fitter against itself."""
    rows = tuple(SeriesRow(float(R),
                           amplitude * R ** (-sigma) * math.log(R) ** beta,
                           0, 1.0)
                 for R in sorted(R_values))
    return DecaySeries("synthetic", 3, 3, q, rows,
                       CutoffSpec(0.0, 0.5, "bump"))


# -- pointwise envelope ----------------------------------------------------------


def _env_at(curve: Curve, thetas: np.ndarray, s: np.ndarray, R: float,
            n: int) -> np.ndarray:
    """max_{1<=j<=n} (R |<gamma^(j)(s_i), theta_i>|)^{1/j}, elementwise in i."""
    out = np.zeros(s.shape[0])
    for j in range(1, n + 1):
        dv = curve.derivatives(s, j)
        pair = np.abs(np.einsum("id,id->i", dv, thetas))
        np.maximum(out, (R * pair) ** (1.0 / j), out)
    return out


def decay_envelope_batch(curve: Curve, thetas: np.ndarray, R: float, n: int,
                         s_density: int = 1024) -> np.ndarray:
    """min over s in I of max_{1<=j<=n} (R |<gamma^(j)(s), theta>|)^{1/j}.

    Dense-grid minimum followed by one vectorized trisection pass on the
    bracketing cell; deterministic for a given density.
    """
    if n > curve.max_order:
        raise DomainError("envelope order exceeds curve max_order")
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    lo, hi = curve.interval
    s_grid = np.linspace(lo, hi, s_density + 1)
    best = np.full(thetas.shape[0], np.inf)
    arg = np.zeros(thetas.shape[0], dtype=int)
    chunk = 8192
    for c0 in range(0, thetas.shape[0], chunk):
        th = thetas[c0:c0 + chunk]
        env = np.zeros((s_grid.size, th.shape[0]))
        for j in range(1, n + 1):
            dv = curve.derivatives(s_grid, j)      # (ns, d)
            pair = np.abs(dv @ th.T)               # (ns, nth)
            np.maximum(env, (R * pair) ** (1.0 / j), env)
        idx = np.argmin(env, axis=0)
        best[c0:c0 + chunk] = env[idx, np.arange(th.shape[0])]
        arg[c0:c0 + chunk] = idx
    a = s_grid[np.maximum(arg - 1, 0)]
    b = s_grid[np.minimum(arg + 1, s_grid.size - 1)]
    for _ in range(48):
        m1 = a + (b - a) / 3.0
        m2 = b - (b - a) / 3.0
        f1 = _env_at(curve, thetas, m1, R, n)
        f2 = _env_at(curve, thetas, m2, R, n)
        take1 = f1 <= f2
        b = np.where(take1, m2, b)
        a = np.where(take1, a, m1)
    mid = 0.5 * (a + b)
    return np.minimum(best, _env_at(curve, thetas, mid, R, n))


def decay_envelope(curve: Curve, theta, R: float, n: int,
                   s_density: int = 1024) -> float:
    return float(decay_envelope_batch(curve, np.asarray(theta, float)[None, :],
                                      R, n, s_density)[0])


@dataclass(frozen=True)
class LevelSetRow:
    l: int
    fraction: float          # measure fraction of {2^l <= envelope < 2^{l+1}}
    bound: float             # 2^{l k (k+1)/2 + l} R^{-k} reference scaling
    ratio: float


@dataclass(frozen=True)
class EnvelopeReport:
    R: float
    constant: float          # max over nodes of |F| * max(1, envelope)
    resolved_fraction: float
    level_sets: tuple


def envelope_check(curve: Curve, cutoff: CutoffSpec, R_values, n: int,
                   grid_fn=None, k: int | None = None, workers: int = 1,
                   seed: int = 0) -> list[EnvelopeReport]:
    """Fitted constant of the bound |F_R| <= C min(1, envelope^{-1}) per R,
    plus the dyadic level-set measure table of the envelope."""
    grid_fn = grid_fn or (lambda R: experiment_grid(curve.dim, R, seed))
    if k is None:
        k = curve.dim
    reports = []
    area = surface_area(curve.dim)
    for R in R_values:
        grid = grid_fn(R)
        batch = fourier_batch(curve, cutoff, R, grid.nodes, workers=workers)
        env = decay_envelope_batch(curve, grid.nodes, R, n)
        C = float(np.max(np.abs(batch.values) * np.maximum(1.0, env)))
        levels = []
        env_pos = env[env > 0]
        if env_pos.size:
            l_lo = int(np.floor(np.log2(np.min(env_pos))))
            l_hi = int(np.ceil(np.log2(np.max(env))))
            for l in range(l_lo, l_hi + 1):
                mask = (env >= 2.0 ** l) & (env < 2.0 ** (l + 1))
                frac = float(np.sum(grid.weights[mask]) / area)
                bound = 2.0 ** (l * (k * k + k + 2) / 2.0) * R ** (-k)
                ratio = frac / bound if bound > 0 else math.inf
                levels.append(LevelSetRow(l, frac, bound, ratio))
        reports.append(EnvelopeReport(float(R), C,
                                      float(np.mean(batch.resolved)),
                                      tuple(levels)))
    return reports


# -- dyadic decomposition diagnostics --------------------------------------------


def _dyadic_window(x, l: int, terminal: bool):
    """eta_l(x) = eta1(2^{l-1} x) with eta1 = eta - eta(2 .), eta a smooth
    plateau equal to 1 on [-1/2, 1/2] and supported in (-1, 1); the terminal
    piece is eta(2^{l-1} x) itself so the family telescopes exactly to 1."""
    from .oscquad import _smoothstep

    def eta(y):
        return _smoothstep(2.0 * (1.0 - np.abs(y)))

    y = 2.0 ** (l - 1) * np.asarray(x, dtype=float)
    return eta(y) if terminal else eta(y) - eta(2.0 * y)


def dyadic_piece(curve: Curve, cutoff: CutoffSpec, R: float, l: int, omega,
                 terminal: bool = False, tol: float | None = None) -> QuadResult:
    """The piece of F_R(omega) supported where |<omega, gamma'(s)>| ~ 2^{-l}.

    Diagnostic only.  l may be slightly negative for curves whose speed
    exceeds 1 (the pieces vanish once 2^{-l} exceeds the speed bound).
    """
    if not (2.0 ** l <= R):
        raise DomainError("need 2^l <= R")
    if l < -8:
        raise DomainError("l below the supported range")
    omega = np.asarray(omega, dtype=float)

    def phase(t):
        return curve.derivatives(t, 0) @ omega

    def dphase(t):
        return curve.derivatives(t, 1) @ omega

    def amp(t):
        return cutoff.value(t) * _dyadic_window(dphase(t), l, terminal)

    ts = np.linspace(*cutoff.support, 2049)
    acc_bound = float(np.max(np.abs(curve.derivatives(ts, 2) @ omega))) + 1e-12
    width_cap = min(cutoff.half_width / 4.0, 2.0 ** (-l) / (4.0 * acc_bound))
    return _adaptive_osc(phase, dphase, amp, cutoff.support, R,
                         1e-10 if tol is None else tol, width_cap)


def dyadic_levels(curve: Curve, cutoff: CutoffSpec, R: float, omega) -> list:
    """The (l, terminal) pairs whose windows tile 1 for this direction."""
    ts = np.linspace(*cutoff.support, 2049)
    max_a = float(np.max(np.abs(curve.derivatives(ts, 1) @ np.asarray(omega))))
    l_start = int(math.floor(-math.log2(max(max_a, 1e-9))))
    M = int(math.floor(math.log2(R))) if R > 1 else l_start + 1
    M = max(M, l_start + 1)
    return [(l, False) for l in range(l_start, M)] + [(M, True)]
