"""Witness sets: explicit sphere regions where the transform is large.

Around a direction aligned with the k-th derivative, the phase
<omega, gamma(t)> has a degenerate critical point; directions whose
low-order phase coefficients are small enough (after solving for the
parameter where the (k-1)-st coefficient vanishes) form a set of measure
~ R^{-(k^2-k-2)/(2k)} on which |F_R| >~ R^{-1/k}.  This module samples such
sets by rejection from a spherical cap, verifies the pointwise lower
bound, and provides the dyadic refinement (for k >= 4) and the planar
shell decomposition whose flat profile at the breakpoint exponent is the
visible mechanism behind the logarithmic factors.

All constructions run on the frame-normalized curve (derivatives at t0
mapped to the standard basis); sampled directions are genuine unit vectors
for that curve.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve import Curve, CoordFn, FrameMap, derivative_rank, normalize_frame
from .errors import DomainError
from .oscquad import CutoffSpec, fourier_batch
from .sphere import cap_area, sample_cap, surface_area

FLAT_RESIDUAL_TOL = 1e-10
NEWTON_TOL = 1e-12


def base_direction(curve: Curve, t0: float, k: int) -> np.ndarray:
    """Unit vector orthogonal to gamma^(1..k-1)(t0) with positive pairing
    against gamma^(k)(t0): Gram-Schmidt of the k-th derivative."""
    if derivative_rank(curve, t0, k) < k:
        raise DomainError("derivatives through order k must be independent")
    from .curve import derivative_matrix
    B = derivative_matrix(curve, t0, k)
    v = B[:, k - 1].copy()
    if k > 1:
        Q = B[:, : k - 1]
        for _ in range(2):
            v -= Q @ np.linalg.lstsq(Q, v, rcond=None)[0]
    n = np.linalg.norm(v)
    if n < 1e-12:
        raise DomainError("k-th derivative lies in the span of the lower ones")
    v /= n
    if v @ B[:, k - 1] < 0:
        v = -v
    return v


def _pair(curve: Curve, omegas: np.ndarray, t: np.ndarray, order: int):
    """<omega_i, gamma^(order)(t_i)> elementwise over samples."""
    dv = curve.derivatives(t, order)
    return np.einsum("id,id->i", dv, omegas)


def solve_flat_point(curve: Curve, omega, k: int, guess: float,
                     max_iter: int = 60) -> float:
    """Newton solution of <omega, gamma^(k-1)(t)> = 0 from the guess.

    Converged when both the residual and the step are below 1e-12; a walk
    out of the parameter interval or stagnation raises DomainError.
    """
    om = np.asarray(omega, dtype=float)[None, :]
    t = np.array([float(guess)])
    lo, hi = curve.interval
    for _ in range(max_iter):
        f = _pair(curve, om, t, k - 1)
        fp = _pair(curve, om, t, k)
        if abs(fp[0]) < 1e-300:
            raise DomainError("flat-point Newton hit a vanishing derivative")
        step = f[0] / fp[0]
        t[0] -= step
        if not lo <= t[0] <= hi:
            raise DomainError("flat-point Newton left the parameter interval")
        if abs(f[0]) <= NEWTON_TOL and abs(step) <= NEWTON_TOL:
            return float(t[0])
    raise DomainError("flat-point Newton did not converge")


def _newton_batch(curve: Curve, omegas: np.ndarray, k: int, guess: float,
                  max_iter: int = 60):
    n = omegas.shape[0]
    t = np.full(n, float(guess))
    lo, hi = curve.interval
    ok = np.ones(n, dtype=bool)
    done = np.zeros(n, dtype=bool)
    for _ in range(max_iter):
        act = ok & ~done
        if not np.any(act):
            break
        f = _pair(curve, omegas[act], t[act], k - 1)
        fp = _pair(curve, omegas[act], t[act], k)
        bad = np.abs(fp) < 1e-300
        step = np.where(bad, 0.0, f / np.where(bad, 1.0, fp))
        tn = t[act] - step
        idx = np.flatnonzero(act)
        out = (tn < lo) | (tn > hi) | bad
        conv = (np.abs(f) <= NEWTON_TOL) & (np.abs(step) <= NEWTON_TOL) & ~out
        t[idx] = np.where(out, t[idx], tn)
        ok[idx[out]] = False
        done[idx[conv]] = True
    ok &= done
    return t, ok


def phase_coeffs(curve: Curve, omegas: np.ndarray, t: np.ndarray,
                 k: int) -> np.ndarray:
    """Columns j = 1..k of <omega_i, gamma^(j)(t_i)>."""
    return np.column_stack([_pair(curve, omegas, t, j) for j in range(1, k + 1)])


def shifted_coeff_indices(k: int, nu: int):
    """Summation offsets for the nu-th shifted coefficient: 1..k-2-nu plus k-nu."""
    return list(range(1, k - 2 - nu + 1)) + [k - nu]


def shifted_phase_coeffs(a: np.ndarray, k: int) -> np.ndarray:
    """Taylor coefficients of the truncated phase at its second critical point.

    With b = -a_{k-2} > 0 and s1 = (2 b / a_k)^{1/2}, returns for
    nu = 1..k-3 the value of the nu-th derivative of
    P(s) = sum_{j<=k-2} a_j s^j/j! + a_k s^k/k!  at s1, via the finite sum
    a_nu + sum_{mu} a_{nu+mu}/mu!  s1^mu over mu in 1..k-2-nu and mu = k-nu.
    """
    a = np.atleast_2d(a)
    if a.shape[1] != k:
        raise DomainError("need coefficients a_1..a_k")
    ak = a[:, k - 1]
    b = -a[:, k - 3]
    if np.any(b <= 0):
        raise DomainError("shifted coefficients need a_{k-2} < 0")
    if np.any(ak <= 0):
        raise DomainError("shifted coefficients need a_k > 0")
    s1 = np.sqrt(2.0 * b / ak)
    out = np.empty((a.shape[0], k - 3))
    for nu in range(1, k - 2):
        acc = a[:, nu - 1].copy()
        for mu in shifted_coeff_indices(k, nu):
            acc = acc + a[:, nu + mu - 1] / math.factorial(mu) * s1 ** mu
        out[:, nu - 1] = acc
    return out


def tilde_a(curve: Curve, omega, k: int, guess: float | None = None):
    """Shifted phase coefficients for one direction (k >= 4 only)."""
    if k < 4:
        raise DomainError("shifted coefficients exist only for k >= 4")
    if guess is None:
        guess = 0.5 * (curve.interval[0] + curve.interval[1])
    t = solve_flat_point(curve, omega, k, guess)
    om = np.asarray(omega, dtype=float)[None, :]
    a = phase_coeffs(curve, om, np.array([t]), k)
    return shifted_phase_coeffs(a, k)[0]


# -- rejection sampling -----------------------------------------------------------


@dataclass(frozen=True)
class WitnessSample:
    omega: np.ndarray
    t_flat: float
    coeffs: tuple
    accepted: bool
    flags: dict
    shifted: tuple | None = None
    band_index: int | None = None


@dataclass(frozen=True)
class WitnessBatch:
    kind: str                     # "cap" (plain) or "dyadic"
    curve: Curve                  # frame-normalized curve used throughout
    frame: FrameMap
    k: int
    t0: float
    radius: float                 # cap radius (eps or delta)
    R: float
    band_index: int | None
    n_drawn: int
    omegas: np.ndarray            # accepted directions only
    t_flat: np.ndarray
    coeffs: np.ndarray            # (n_acc, k)
    shifted: np.ndarray | None
    rate: float
    stderr: float
    window_ok: bool | None = None

    @property
    def n_accepted(self) -> int:
        return self.omegas.shape[0]

    @property
    def measure(self) -> float:
        """Estimated spherical measure: cap area times the in-cap rate."""
        return self.rate * cap_area(self.curve.dim, self.radius)

    def samples(self, limit: int | None = None):
        m = self.n_accepted if limit is None else min(limit, self.n_accepted)
        out = []
        for i in range(m):
            out.append(WitnessSample(
                self.omegas[i], float(self.t_flat[i]),
                tuple(self.coeffs[i]), True, {"in_cap": True},
                None if self.shifted is None else tuple(self.shifted[i]),
                self.band_index))
        return out


def _cap_samples(d: int, axis_index: int, radius: float, n: int, rng):
    pts = sample_cap(d, radius, n, rng)
    if axis_index != d - 1:
        pts[:, [axis_index, d - 1]] = pts[:, [d - 1, axis_index]]
    return pts


def _prepare(curve: Curve, t0: float, k: int):
    frame = normalize_frame(curve, t0, k)
    return frame, frame.apply(curve)


def sample_witness_set(curve: Curve, t0: float, k: int, eps: float, R: float,
                       n: int, seed: int, stream: int = 0) -> WitnessBatch:
    """Rejection sampling of the order-k witness set at frequency R.

    Draws uniformly from the cap |omega - e_k| <= eps around the normalized
    k-th direction, solves the flat-point equation for each draw, and keeps
    directions whose phase coefficients obey |a_j| <= eps R^{(j-k)/k} for
    j = 1..k-2.  Zero acceptances are reported through the rate, not raised.
    """
    if not 2 <= k <= curve.dim:
        raise DomainError("need 2 <= k <= dim")
    if R <= 1:
        raise DomainError("need R > 1")
    frame, nc = _prepare(curve, t0, k)
    rng = np.random.default_rng([int(seed), int(stream)])
    omegas = _cap_samples(nc.dim, k - 1, eps, n, rng)
    t, ok = _newton_batch(nc, omegas, k, t0)
    a = phase_coeffs(nc, omegas, t, k)
    good = ok.copy()
    for j in range(1, k - 1):
        good &= np.abs(a[:, j - 1]) <= eps * R ** ((j - k) / k)
    good &= np.abs(a[:, k - 2]) <= FLAT_RESIDUAL_TOL  # solver contract
    rate = float(np.count_nonzero(good)) / n
    stderr = math.sqrt(max(rate * (1.0 - rate), 0.0) / n)
    return WitnessBatch("cap", nc, frame, k, t0, eps, float(R), None, n,
                        omegas[good], t[good], a[good], None, rate, stderr)


def dyadic_window_bounds(k: int, R: float, tau1: float | None = None,
                         tau2: float | None = None) -> tuple[int, int]:
    """Admissible band indices: R^{2/k - tau1} <= 2^j <= R^{2/k - tau2}
    with 2/k > tau1 > tau2 > 2/(k+1); defaults sit at the window midpoints."""
    lo_t, hi_t = 2.0 / (k + 1), 2.0 / k
    mid, quarter = 0.5 * (hi_t + lo_t), 0.25 * (hi_t - lo_t)
    tau1 = mid + quarter if tau1 is None else tau1
    tau2 = mid - quarter if tau2 is None else tau2
    if not hi_t > tau1 > tau2 > lo_t:
        raise DomainError("need 2/k > tau1 > tau2 > 2/(k+1)")
    lg = math.log2(R)
    return (int(math.ceil((hi_t - tau1) * lg - 1e-9)),
            int(math.floor((hi_t - tau2) * lg + 1e-9)))


def sample_dyadic_witness(curve: Curve, t0: float, k: int, delta: float,
                          j: int, R: float, n: int, seed: int,
                          stream: int = 0, tau1: float | None = None,
                          tau2: float | None = None) -> WitnessBatch:
    """Rejection sampling of the dyadic witness band (k >= 4).

    Keeps cap directions with a_{k-2} in the dyadic band
    (-2^{j+1} R^{-2/k}, -2^j R^{-2/k}] and shifted coefficients obeying
    |a~_nu| <= delta |a_{k-2}|^{nu/(2k-2)} R^{-(k-nu-1)/(k-1)}.  The window
    check on j (needed for the pointwise lower bound, not for the measure
    scaling) is recorded in window_ok rather than enforced: at desk-scale R
    the admissible window contains at most a couple of adjacent indices.
    """
    if k < 4:
        raise DomainError("dyadic witness sets need k >= 4")
    if not k <= curve.dim:
        raise DomainError("need k <= dim")
    if j < 0:
        raise DomainError("band index must be >= 0")
    frame, nc = _prepare(curve, t0, k)
    j_lo, j_hi = dyadic_window_bounds(k, R, tau1, tau2)
    rng = np.random.default_rng([int(seed), int(stream), int(j)])
    omegas = _cap_samples(nc.dim, k - 1, delta, n, rng)
    t, ok = _newton_batch(nc, omegas, k, t0)
    a = phase_coeffs(nc, omegas, t, k)

    b_lo, b_hi = 2.0 ** j * R ** (-2.0 / k), 2.0 ** (j + 1) * R ** (-2.0 / k)
    band = ok & (a[:, k - 3] < -b_lo) & (a[:, k - 3] > -b_hi) & (a[:, k - 1] > 0)
    shifted = np.zeros((omegas.shape[0], k - 3))
    if np.any(band):
        shifted[band] = shifted_phase_coeffs(a[band], k)
    good = band.copy()
    bmag = np.abs(a[:, k - 3])
    for nu in range(1, k - 2):
        cap = delta * bmag ** (nu / (2.0 * k - 2.0)) \
            * R ** (-(k - nu - 1.0) / (k - 1.0))
        good &= np.abs(shifted[:, nu - 1]) <= cap
    rate = float(np.count_nonzero(good)) / n
    stderr = math.sqrt(max(rate * (1.0 - rate), 0.0) / n)
    return WitnessBatch("dyadic", nc, frame, k, t0, delta, float(R), int(j), n,
                        omegas[good], t[good], a[good], shifted[good],
                        rate, stderr, window_ok=bool(j_lo <= j <= j_hi))


# -- pointwise lower bound --------------------------------------------------------


@dataclass(frozen=True)
class LowerBoundReport:
    R: float
    k: int
    min_scaled: float             # min over samples of |F_R| R^{1/k}
    histogram: tuple              # (bin_edges, counts) of the scaled values
    resolved_fraction: float
    n_samples: int
    cutoff: CutoffSpec


def default_witness_cutoff(curve: Curve, t0: float) -> CutoffSpec:
    """Bump at t0 with half-width 5% of the interval length; the fitted
    lower-bound constant depends on this choice, so it is reported."""
    lo, hi = curve.interval
    return CutoffSpec(center=t0, half_width=0.05 * (hi - lo), family="bump")


def verify_lower_bound(batch: WitnessBatch, R: float | None = None,
                       cutoff: CutoffSpec | None = None, workers: int = 1,
                       scale_power: float | None = None) -> LowerBoundReport:
    """min over accepted samples of |F_R(omega)| R^{1/k} with a histogram.

    For dyadic batches the scaled quantity is |F_R| 2^{j/(2k-2)} R^{1/k},
    matching the predicted band-dependent lower bound.
    """
    if batch.n_accepted == 0:
        raise DomainError("no accepted samples to verify")
    R = batch.R if R is None else float(R)
    cutoff = cutoff or default_witness_cutoff(batch.curve, batch.t0)
    if abs(cutoff.value(batch.t0) - 1.0) > 1e-12:
        raise DomainError("cutoff must peak at the expansion point t0")
    res = fourier_batch(batch.curve, cutoff, R, batch.omegas, workers=workers)
    scaled = np.abs(res.values) * R ** (1.0 / batch.k)
    if batch.kind == "dyadic" and batch.band_index is not None:
        scaled = scaled * 2.0 ** (batch.band_index / (2.0 * batch.k - 2.0))
    counts, edges = np.histogram(scaled, bins=24)
    return LowerBoundReport(R, batch.k, float(np.min(scaled)),
                            (edges, counts), float(np.mean(res.resolved)),
                            batch.n_accepted, cutoff)


# -- planar shell decomposition ---------------------------------------------------


@dataclass(frozen=True)
class ShellRow:
    l: int
    rho_lo: float
    rho_hi: float
    contribution: float           # integral of |F|^q over the shell
    measure: float


@dataclass(frozen=True)
class ShellScan:
    q: float
    R: float
    k: int
    rows: tuple
    core: float                   # contribution of the polar core |omega'| < 2^{-l_max}
    total: float

    def window_rows(self, margin_lo: int = 2, margin_hi: int = 4):
        """Shells comfortably inside c >= 2^{-l} >= C/R where the scaling
        prediction applies."""
        l_max = max(r.l for r in self.rows)
        return [r for r in self.rows
                if margin_lo <= r.l <= l_max - margin_hi]


def _planar_split(curve: Curve):
    """k and the k-dimensional subcurve for a curve whose coordinates vanish
    beyond position k."""
    from .curve import planar_order
    k = planar_order(curve)
    if k is None:
        raise DomainError("curve is not planar: last coordinate is nonzero")
    sub = Curve(k, curve.coords[:k], curve.interval,
                curve.curve_id + f"-sub{k}", curve.max_order)
    return k, sub


def planar_shell_scan(curve: Curve, cutoff: CutoffSpec, q: float, R: float,
                      n_phi: int = 12, workers: int = 1) -> ShellScan:
    """Decompose the sphere integral of |F_R|^q by dyadic shells in |omega'|,
    the projection onto the subspace containing the curve.

    F_R(omega) depends only on omega' = rho theta, and F_R(rho theta) equals
    the subcurve transform at frequency R rho, so each shell reduces to a
    1-d rho integral of sphere averages of the subcurve.  At the breakpoint
    exponent q = (k^2+k+2)/2 the shell contributions are flat in l; above
    it they grow geometrically toward the deepest shells (|omega'| ~ 1/R).
    """
    k, sub = _planar_split(curve)
    d = curve.dim
    m = d - k - 1
    ring = 2.0 if m == 0 else surface_area(m + 1)
    gx, gw = np.polynomial.legendre.leggauss(n_phi)

    l_max = max(2, int(math.floor(math.log2(max(R, 16.0) / 8.0))))
    rows = []
    total = 0.0
    for l in range(1, l_max + 1):
        rho_hi = min(2.0 ** (-l + 1), 1.0)
        rho_lo = 2.0 ** (-l)
        phi_lo, phi_hi = math.asin(rho_lo), math.asin(rho_hi)
        mid, half = 0.5 * (phi_hi + phi_lo), 0.5 * (phi_hi - phi_lo)
        phis = mid + half * gx
        wphi = half * gw
        contrib = 0.0
        meas = 0.0
        for phi, w in zip(phis, wphi):
            rho = math.sin(phi)
            m_th = max(256, int(math.ceil(8.0 * math.sqrt(R * rho))))
            ang = 2.0 * math.pi * (np.arange(m_th) + 0.5) / m_th
            if k == 2:
                thetas = np.column_stack([np.cos(ang), np.sin(ang)])
                w_th = np.full(m_th, 2.0 * math.pi / m_th)
            else:
                from .sphere import product_grid
                g = product_grid(k, max(32, int(8 * math.sqrt(R * rho))))
                thetas, w_th = g.nodes, g.weights
            fb = fourier_batch(sub, cutoff, R * rho, thetas, workers=workers)
            J = float(np.sum(w_th * np.abs(fb.values) ** q))
            jac = ring * math.sin(phi) ** (k - 1) * math.cos(phi) ** m
            contrib += w * J * jac
            meas += w * float(np.sum(w_th)) * jac
        rows.append(ShellRow(l, rho_lo, rho_hi, contrib, meas))
        total += contrib

    # polar core |omega'| <= 2^{-l_max}: the transform is essentially flat
    phi_hi = math.asin(2.0 ** (-l_max))
    mid, half = 0.5 * phi_hi, 0.5 * phi_hi
    core = 0.0
    for phi, w in zip(mid + half * gx, half * gw):
        rho = math.sin(phi)
        ang = 2.0 * math.pi * (np.arange(64) + 0.5) / 64
        if k == 2:
            thetas = np.column_stack([np.cos(ang), np.sin(ang)])
            w_th = np.full(64, 2.0 * math.pi / 64)
        else:
            from .sphere import product_grid
            g = product_grid(k, 32)
            thetas, w_th = g.nodes, g.weights
        fb = fourier_batch(sub, cutoff, R * rho, thetas, workers=workers)
        J = float(np.sum(w_th * np.abs(fb.values) ** q))
        core += w * J * ring * math.sin(phi) ** (k - 1) * math.cos(phi) ** m
    total += core
    return ShellScan(float(q), float(R), k, tuple(rows), core, total)


def shell_slope(scan: ShellScan, margin_lo: int = 2, margin_hi: int = 4) -> float:
    """Fitted slope of log2(contribution) against l over the valid window."""
    rows = scan.window_rows(margin_lo, margin_hi)
    if len(rows) < 2:
        raise DomainError("not enough shells in the window for a slope")
    ls = np.array([r.l for r in rows], dtype=float)
    ys = np.log2([max(r.contribution, 1e-300) for r in rows])
    return float(np.polyfit(ls, ys, 1)[0])
