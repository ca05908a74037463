"""One-dimensional oscillatory quadrature with certified accuracy.

The scheme is frequency-adaptive composite Gauss-Legendre: panels are sized
so that the accumulated phase variation per panel is at most one period
(estimated from the exact phase derivative) and the width never exceeds a
quarter of the cutoff half-width, then 15-point Gauss-Legendre is applied
per panel.  The value is accepted once halving every panel moves it by less
than the requested tolerance; otherwise the result is flagged unresolved
rather than returned silently.

No Filon or Levin machinery: at the scales this package targets
(frequencies up to ~1e6) adaptive panels are fast enough, and a brute-force
oracle (`eval_fourier_oracle`) guards correctness in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .curve import Curve
from .errors import DomainError
from .kernels import active_backend, phase_sum

TWO_PI = 2.0 * math.pi
GL_POINTS = 15
MIN_HALF_WIDTH = 1e-6
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_POINTS)


def default_tol(R: float) -> float:
    """1e-9 absolute up to R=1e4, relaxed to 1e-7 above."""
    return 1e-9 if R <= 1e4 else 1e-7


# -- smooth cutoffs -------------------------------------------------------------


def _smoothstep(x):
    """C-infinity step: 0 for x<=0, 1 for x>=1, exp(-1/x) blend between."""
    x = np.asarray(x, dtype=float)
    lo = x <= 0.0
    hi = x >= 1.0
    mid = ~(lo | hi)
    out = np.where(hi, 1.0, 0.0)
    if np.any(mid):
        xm = np.clip(x[mid], 1e-12, 1.0 - 1e-12)
        b = np.exp(-1.0 / xm)
        b1 = np.exp(-1.0 / (1.0 - xm))
        out[mid] = b / (b + b1)
    return out


def _smoothstep_deriv(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    mid = (x > 0.0) & (x < 1.0)
    if np.any(mid):
        xm = np.clip(x[mid], 1e-8, 1.0 - 1e-8)
        b = np.exp(-1.0 / xm)
        b1 = np.exp(-1.0 / (1.0 - xm))
        db = b / xm**2
        db1 = b1 / (1.0 - xm) ** 2
        out[mid] = (db * b1 + b * db1) / (b + b1) ** 2
    return out


@dataclass(frozen=True)
class CutoffSpec:
    """Compactly supported amplitude window on [center-h, center+h].

    Families:
      bump          exp(1 - 1/(1-u^2)), the standard C-infinity bump;
      cosine-window cos^2(pi u / 2), only C^1 at the endpoints;
      plateau       C-infinity, identically 1 on the inner half-support.
    All satisfy chi(center)=1 and 0 <= chi <= 1.
    """

    center: float = 0.0
    half_width: float = 0.5
    family: str = "bump"

    def __post_init__(self):
        if self.half_width < MIN_HALF_WIDTH:
            raise DomainError(
                f"degenerate cutoff: half-width {self.half_width} < {MIN_HALF_WIDTH}")
        if self.family not in ("bump", "cosine-window", "plateau"):
            raise DomainError(f"unknown cutoff family {self.family!r}")

    @property
    def support(self) -> tuple[float, float]:
        return (self.center - self.half_width, self.center + self.half_width)

    def value(self, t):
        u = (np.asarray(t, dtype=float) - self.center) / self.half_width
        inside = np.abs(u) < 1.0
        out = np.zeros_like(u)
        if self.family == "bump":
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                val = np.exp(1.0 - 1.0 / np.clip(1.0 - u * u, 1e-300, None))
            out = np.where(inside, val, 0.0)
        elif self.family == "cosine-window":
            out = np.where(inside, np.cos(0.5 * math.pi * u) ** 2, 0.0)
        else:
            out = _smoothstep(2.0 * (1.0 - np.abs(u)))
        return out if out.ndim else float(out)

    def deriv(self, t):
        u = (np.asarray(t, dtype=float) - self.center) / self.half_width
        inside = np.abs(u) < 1.0
        if self.family == "bump":
            with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
                core = np.exp(1.0 - 1.0 / np.clip(1.0 - u * u, 1e-300, None))
                slope = -2.0 * u / np.clip((1.0 - u * u) ** 2, 1e-300, None)
            out = np.where(inside, core * slope, 0.0) / self.half_width
        elif self.family == "cosine-window":
            out = np.where(inside, -0.5 * math.pi * np.sin(math.pi * u), 0.0) \
                / self.half_width
        else:
            out = _smoothstep_deriv(2.0 * (1.0 - np.abs(u))) * \
                (-2.0 * np.sign(u)) / self.half_width
        return out if out.ndim else float(out)

    @cached_property
    def mass(self) -> float:
        """The normalization integral of chi over its support."""
        a, b = self.support
        edges = np.linspace(a, b, 401)
        t, w = _gl_nodes(edges)
        return float(np.sum(w * self.value(t)))

    def c1_norms(self, n: int = 20001) -> tuple[float, float]:
        """(sup|chi| + ||chi'||_1, sup|chi'|) sampled on a dense grid."""
        a, b = self.support
        ts = np.linspace(a, b, n)
        dv = np.abs(self.deriv(ts))
        l1 = float(np.trapezoid(dv, ts))
        return float(np.max(np.abs(self.value(ts))) + l1), float(np.max(dv))


@dataclass(frozen=True)
class QuadResult:
    value: complex
    error: float
    panels: int
    resolved: bool


@dataclass(frozen=True)
class BatchResult:
    """Transform values over a direction list, with a shared resolution check.

    Panels are sized from sup_t |gamma'(t)|, which bounds the phase speed for
    every direction simultaneously, so one panel set serves the whole batch;
    the check halves the panels on a strided subset of directions and takes
    the worst deviation as the (uniform) error estimate.
    """

    values: np.ndarray
    error: float
    resolved: np.ndarray
    panels: int
    subset_size: int
    backend: str

    @property
    def all_resolved(self) -> bool:
        return bool(np.all(self.resolved))


# -- panel construction ---------------------------------------------------------


def _gl_nodes(edges: np.ndarray, gl_x=_GL_X, gl_w=_GL_W):
    mids = 0.5 * (edges[1:] + edges[:-1])
    halfs = 0.5 * (edges[1:] - edges[:-1])
    t = (mids[:, None] + halfs[:, None] * gl_x[None, :]).ravel()
    w = (halfs[:, None] * gl_w[None, :]).ravel()
    return t, w


def _halve_edges(edges: np.ndarray) -> np.ndarray:
    mids = 0.5 * (edges[1:] + edges[:-1])
    return np.sort(np.concatenate([edges, mids]))


def _panel_edges(support, dphase_abs, scale, width_cap, samples=4097):
    """Panel edges with <= one phase period and <= width_cap per panel."""
    a, b = support
    ts = np.linspace(a, b, samples)
    sp = np.abs(dphase_abs(ts))
    cum = np.concatenate(
        [[0.0], np.cumsum(0.5 * (sp[1:] + sp[:-1]) * np.diff(ts))])
    total_phase = scale * cum[-1]
    n_phase = max(1, int(math.ceil(total_phase / TWO_PI)))
    targets = np.linspace(0.0, cum[-1], n_phase + 1)
    edges = np.interp(targets, cum, ts)
    edges[0], edges[-1] = a, b
    widths = np.diff(edges)
    counts = np.maximum(1, np.ceil(widths / width_cap).astype(int))
    if np.all(counts == 1):
        return edges
    # subdivide wide panels into equal parts
    reps = np.repeat(np.arange(widths.size), counts)
    offs = np.concatenate([np.arange(c) for c in counts])
    new = edges[reps] + widths[reps] * offs / counts[reps]
    return np.concatenate([new, [b]])


def _adaptive_osc(phase_fn, dphase_abs, amp_fn, support, scale, tol,
                  width_cap, node_budget=6_000_000) -> QuadResult:
    def integrate(edges):
        t, w = _gl_nodes(edges)
        return complex(np.sum(w * amp_fn(t) * np.exp(1j * scale * phase_fn(t))))

    edges = _panel_edges(support, dphase_abs, scale, width_cap)
    value = integrate(edges)
    err = math.inf
    while True:
        if (2 * (edges.size - 1)) * GL_POINTS > node_budget:
            return QuadResult(value, err, edges.size - 1, False)
        edges2 = _halve_edges(edges)
        value2 = integrate(edges2)
        err = abs(value2 - value)
        if err <= tol:
            return QuadResult(value2, err, edges2.size - 1, True)
        edges, value = edges2, value2


# -- curve transforms -----------------------------------------------------------


def _check_cutoff_inside(curve: Curve, cutoff: CutoffSpec):
    lo, hi = curve.interval
    a, b = cutoff.support
    if a < lo or b > hi:
        raise DomainError(
            f"cutoff support [{a}, {b}] not inside curve interval [{lo}, {hi}]")


def eval_fourier(curve: Curve, cutoff: CutoffSpec, R: float, omega,
                 tol: float | None = None,
                 node_budget: int = 6_000_000) -> QuadResult:
    """integral of chi(t) exp(i R <gamma(t), omega>) dt for one direction."""
    if R < 0:
        raise DomainError("R must be >= 0")
    _check_cutoff_inside(curve, cutoff)
    omega = np.asarray(omega, dtype=float)
    tol = default_tol(R) if tol is None else tol

    def phase(t):
        return curve.derivatives(t, 0) @ omega

    def dphase(t):
        return curve.derivatives(t, 1) @ omega

    return _adaptive_osc(phase, dphase, cutoff.value, cutoff.support, R,
                         tol, cutoff.half_width / 4.0, node_budget)


def eval_fourier_oracle(curve: Curve, cutoff: CutoffSpec, R: float, omega,
                        n: int | None = None) -> complex:
    """Independent check value: composite 10-point Gauss-Legendre on n equal
    panels, n >= 50 (1 + R diam).  Test-suite oracle, deliberately naive."""
    _check_cutoff_inside(curve, cutoff)
    omega = np.asarray(omega, dtype=float)
    a, b = cutoff.support
    ts = np.linspace(a, b, 257)
    diam = float(np.max(np.linalg.norm(curve.derivatives(ts, 0), axis=1)))
    n_min = int(math.ceil(50.0 * (1.0 + R * diam)))
    n = n_min if n is None else max(int(n), n_min)
    edges = np.linspace(a, b, n + 1)
    gx, gw = np.polynomial.legendre.leggauss(10)
    t, w = _gl_nodes(edges, gx, gw)
    ph = curve.derivatives(t, 0) @ omega
    return complex(np.sum(w * cutoff.value(t) * np.exp(1j * R * ph)))


def fourier_batch(curve: Curve, cutoff: CutoffSpec, R: float, omegas,
                  tol: float | None = None, workers: int = 1,
                  backend: str | None = None,
                  check_subset: int = 512) -> BatchResult:
    """Transform values for a whole direction list with shared panels."""
    if R < 0:
        raise DomainError("R must be >= 0")
    _check_cutoff_inside(curve, cutoff)
    omegas = np.atleast_2d(np.asarray(omegas, dtype=float))
    tol = default_tol(R) if tol is None else tol

    def speed(t):
        return np.linalg.norm(curve.derivatives(t, 1), axis=-1)

    edges = _panel_edges(cutoff.support, speed, R, cutoff.half_width / 4.0)

    def nodes_for(e):
        t, w = _gl_nodes(e)
        pts = curve.derivatives(t, 0)
        return pts, w * cutoff.value(t)

    pts, coef = nodes_for(edges)
    be = backend or active_backend()
    values = phase_sum(pts, coef, omegas, R, backend=be, workers=workers)

    n = omegas.shape[0]
    idx = np.unique(np.linspace(0, n - 1, min(n, check_subset)).astype(int))
    pts2, coef2 = nodes_for(_halve_edges(edges))
    check = phase_sum(pts2, coef2, omegas[idx], R, backend=be)
    err = float(np.max(np.abs(values[idx] - check))) if idx.size else 0.0
    ok = err <= tol
    return BatchResult(values, err, np.full(n, ok), edges.size - 1,
                       int(idx.size), be)


# -- polynomial-phase integrals -------------------------------------------------


def _poly_c2_norm(coeffs, radius: float) -> float:
    """max over [-radius, radius] of |g| + |g'| + |g''| for a polynomial g."""
    c = np.asarray(coeffs, dtype=float)
    if c.size == 0:
        return 0.0
    ts = np.linspace(-radius, radius, 2001)
    total = 0.0
    cur = c.copy()
    for _ in range(3):
        vals = np.zeros_like(ts)
        for p in reversed(cur):
            vals = vals * ts + p
        total = max(total, float(np.max(np.abs(vals))))
        cur = cur[1:] * np.arange(1, cur.size) if cur.size > 1 else np.zeros(0)
    return total


def eval_phase_integral(k: int, lam: float, cutoff: CutoffSpec,
                        x=None, g_coeffs=None,
                        tol: float | None = None) -> QuadResult:
    """integral of eta(s) exp(i lam (sum_j x_j s^j + s^k + g(s) s^{k+1})) ds.

    x supplies the low-order coefficients x_1..x_{k-2}; the s^k coefficient
    is normalized to 1 and g is an optional polynomial perturbation.  The
    cutoff half-width must satisfy the smallness bound
    h <= 1/(10 (1 + ||g||_C2)) on the doubled support.
    """
    if k < 2:
        raise DomainError("phase degree k must be >= 2")
    if lam <= 2.0:
        raise DomainError("need lam > 2")
    x = np.zeros(max(k - 2, 0)) if x is None else np.asarray(x, dtype=float)
    if x.size > k - 2:
        raise DomainError("at most k-2 low-order coefficients allowed")
    g = np.asarray([] if g_coeffs is None else g_coeffs, dtype=float)

    h = cutoff.half_width
    g_norm = _poly_c2_norm(g, 2.0 * h)
    if h > 1.0 / (10.0 * (1.0 + g_norm)):
        raise DomainError(
            f"cutoff half-width {h} violates h <= 1/(10(1+||g||_C2)) "
            f"with ||g||_C2 = {g_norm:.3g}")

    # full phase polynomial: x_1 s + ... + x_{k-2} s^{k-2} + s^k + s^{k+1} g(s)
    deg = k + 1 + max(g.size - 1, 0) if g.size else k
    p = np.zeros(deg + 1)
    p[1:1 + x.size] = x
    p[k] += 1.0
    if g.size:
        p[k + 1: k + 1 + g.size] += g
    dp = p[1:] * np.arange(1, p.size)

    def horner(c, t):
        out = np.zeros_like(t)
        for v in reversed(c):
            out = out * t + v
        return out

    return _adaptive_osc(lambda t: horner(p, t), lambda t: horner(dp, t),
                         cutoff.value, cutoff.support, lam,
                         default_tol(lam) if tol is None else tol,
                         cutoff.half_width / 4.0)
