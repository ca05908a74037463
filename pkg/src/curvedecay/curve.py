"""Curves in R^d with exact derivatives of every order.

A coordinate function is a polynomial plus a trigonometric polynomial,

    f(t) = sum_i  p_i t^i  +  sum_j [ a_j cos(nu_j t) + b_j sin(nu_j t) ],

so derivatives of any order are available in closed form (coefficient
shifts for the polynomial part, amplitude rotations for the trig part).
This class of curves is closed under invertible linear maps of R^d, which
lets frame normalization return an ordinary `Curve` again.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import CapabilityError, DegeneracyError, DomainError

DEFAULT_RANK_TOL = 1e-8
FRAME_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class CoordFn:
    """One coordinate function: polynomial part + trigonometric part."""

    poly: tuple = ()          # poly[i] multiplies t**i
    freqs: tuple = ()
    cos_amps: tuple = ()
    sin_amps: tuple = ()

    def derivative(self, order: int) -> "CoordFn":
        if order == 0:
            return self
        poly = np.asarray(self.poly, dtype=float)
        for _ in range(order):
            if poly.size:
                poly = poly[1:] * np.arange(1, poly.size)
        cos_a = np.asarray(self.cos_amps, dtype=float)
        sin_a = np.asarray(self.sin_amps, dtype=float)
        nu = np.asarray(self.freqs, dtype=float)
        for _ in range(order):
            # d/dt [a cos(nu t) + b sin(nu t)] = (nu b) cos(nu t) + (-nu a) sin(nu t)
            cos_a, sin_a = nu * sin_a, -nu * cos_a
        return CoordFn(tuple(poly), tuple(nu), tuple(cos_a), tuple(sin_a))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for p in reversed(self.poly):      # Horner
            out = out * t + p
        for nu, a, b in zip(self.freqs, self.cos_amps, self.sin_amps):
            out = out + a * np.cos(nu * t) + b * np.sin(nu * t)
        return out

    def is_zero(self, tol: float = 0.0) -> bool:
        return (all(abs(p) <= tol for p in self.poly)
                and all(abs(a) <= tol for a in self.cos_amps)
                and all(abs(b) <= tol for b in self.sin_amps))

    def scaled_sum(self, others_with_weights) -> "CoordFn":
        """Linear combination sum_w w * g for (w, g) pairs, self excluded."""
        polys = [np.asarray(g.poly, float) * w for w, g in others_with_weights]
        n = max((p.size for p in polys), default=0)
        poly = np.zeros(n)
        for p in polys:
            poly[: p.size] += p
        terms: dict[float, list[float]] = {}
        for w, g in others_with_weights:
            for nu, a, b in zip(g.freqs, g.cos_amps, g.sin_amps):
                acc = terms.setdefault(float(nu), [0.0, 0.0])
                acc[0] += w * a
                acc[1] += w * b
        freqs = sorted(terms)
        return CoordFn(
            tuple(poly),
            tuple(freqs),
            tuple(terms[nu][0] for nu in freqs),
            tuple(terms[nu][1] for nu in freqs),
        )


@dataclass(frozen=True)
class Curve:
    """Parametrized curve t -> (f_1(t), ..., f_d(t)) on a compact interval."""

    dim: int
    coords: tuple            # d CoordFn entries
    interval: tuple          # (t_lo, t_hi)
    curve_id: str = "curve"
    max_order: int = 64
    _deriv_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.dim < 2:
            raise DomainError("curve dimension must be >= 2")
        if len(self.coords) != self.dim:
            raise DomainError("need one coordinate function per dimension")
        lo, hi = self.interval
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise DomainError("parameter interval must be nonempty and bounded")
        if self.max_order < self.dim + 3:
            raise DomainError("max_order must be at least dim + 3")

    # -- evaluation ---------------------------------------------------------

    def _coord_derivs(self, order: int):
        key = int(order)
        if key not in self._deriv_cache:
            self._deriv_cache[key] = tuple(c.derivative(key) for c in self.coords)
        return self._deriv_cache[key]

    def point(self, t):
        return self.derivatives(t, 0)

    def derivatives(self, t, order: int):
        """Exact order-th derivative; t may be a scalar or an array.

        Returns shape (d,) for scalar t, (n, d) for an array of n values.
        """
        if order < 0:
            raise DomainError("derivative order must be >= 0")
        if order > self.max_order:
            raise CapabilityError(
                f"order {order} exceeds max_order {self.max_order}")
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        fns = self._coord_derivs(order)
        out = np.stack([f(t_arr) for f in fns], axis=-1)
        return out[0] if np.isscalar(t) or np.ndim(t) == 0 else out

    def contains(self, t) -> bool:
        lo, hi = self.interval
        t_arr = np.asarray(t, dtype=float)
        return bool(np.all((t_arr >= lo) & (t_arr <= hi)))

    def speed_bound_samples(self, a: float, b: float, n: int = 4096):
        """|gamma'(t)| sampled on [a, b]; used to size quadrature panels."""
        ts = np.linspace(a, b, n)
        dv = self.derivatives(ts, 1)
        return ts, np.linalg.norm(dv, axis=1)

    # -- transforms ---------------------------------------------------------

    def transformed(self, matrix, curve_id: str | None = None) -> "Curve":
        """The image curve A @ gamma for an invertible matrix A."""
        A = np.asarray(matrix, dtype=float)
        if A.shape != (self.dim, self.dim):
            raise DomainError("transform matrix must be d x d")
        new_coords = tuple(
            CoordFn().scaled_sum(list(zip(A[i], self.coords)))
            for i in range(self.dim)
        )
        return Curve(self.dim, new_coords, self.interval,
                     curve_id or self.curve_id + "-mapped", self.max_order)


@dataclass(frozen=True)
class FrameMap:
    """Invertible A with A @ gamma^(j)(t0) = e_j for j = 1..order."""

    matrix: np.ndarray
    t0: float
    order: int

    def apply(self, curve: Curve) -> Curve:
        return curve.transformed(self.matrix, curve.curve_id + "-framed")


# -- operations ---------------------------------------------------------------


def eval_derivative(curve: Curve, t: float, order: int):
    """Exact derivative vector gamma^(order)(t)."""
    if not curve.contains(t):
        raise DomainError(f"t={t} outside parameter interval {curve.interval}")
    return curve.derivatives(t, order)


def derivative_matrix(curve: Curve, t: float, K: int):
    """Columns gamma'(t), ..., gamma^(K)(t) as a d x K matrix."""
    cols = [eval_derivative(curve, t, j) for j in range(1, K + 1)]
    return np.column_stack(cols)


def derivative_rank(curve: Curve, t: float, K: int,
                    tol: float = DEFAULT_RANK_TOL) -> int:
    """Numerical rank of the first K derivative vectors at t."""
    if not 1 <= K <= curve.dim:
        raise DomainError("need 1 <= K <= dim")
    sv = np.linalg.svd(derivative_matrix(curve, t, K), compute_uv=False)
    if sv[0] == 0.0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def moment_curve(d: int, interval=(-1.0, 1.0)) -> Curve:
    """The curve (t, t^2, ..., t^d): all d derivatives independent everywhere."""
    if d < 2:
        raise DomainError("moment curve needs d >= 2")
    coords = tuple(CoordFn(poly=(0.0,) * (j + 1) + (1.0,)) for j in range(d))
    return Curve(d, coords, tuple(interval), f"moment{d}")


def helix_curve(interval=(-1.0, 1.0)) -> Curve:
    """(cos t, sin t, t): a nondegenerate curve in R^3 with trig coordinates."""
    coords = (
        CoordFn(freqs=(1.0,), cos_amps=(1.0,), sin_amps=(0.0,)),
        CoordFn(freqs=(1.0,), cos_amps=(0.0,), sin_amps=(1.0,)),
        CoordFn(poly=(0.0, 1.0)),
    )
    return Curve(3, coords, tuple(interval), "helix")


def circle_curve(interval=(-1.0, 1.0)) -> Curve:
    coords = (
        CoordFn(freqs=(1.0,), cos_amps=(1.0,), sin_amps=(0.0,)),
        CoordFn(freqs=(1.0,), cos_amps=(0.0,), sin_amps=(1.0,)),
    )
    return Curve(2, coords, tuple(interval), "circle")


def planar_curve(d: int, k: int, interval=(-1.0, 1.0)) -> Curve:
    """(t, ..., t^k, 0, ..., 0) in R^d: derivatives beyond order k vanish."""
    if not 2 <= k < d:
        raise DomainError("planar curve needs 2 <= k < d")
    coords = tuple(
        CoordFn(poly=(0.0,) * (j + 1) + (1.0,)) if j < k else CoordFn()
        for j in range(d)
    )
    return Curve(d, coords, tuple(interval), f"planar{k}in{d}")


def planar_order(curve: Curve) -> int | None:
    """k if the coordinates beyond position k vanish identically (so the
    curve lies in the span of the first k axes), else None."""
    live = [i for i, c in enumerate(curve.coords) if not c.is_zero()]
    if not live or live[-1] == curve.dim - 1:
        return None
    k = live[-1] + 1
    return k if k >= 2 else None


def axial_symmetric_axis(curve: Curve) -> int | None:
    """Index of a rotation axis, if two coordinates form a circular pair
    (a cos nu t + b sin nu t, -b cos nu t + a sin nu t up to sign) and every
    other coordinate is polynomial.  Rotating such a curve about the axis
    is the same as shifting the parameter, so its transform magnitude is a
    function of the polar angle alone.  Only handled for d = 3."""
    if curve.dim != 3:
        return None
    trig = [i for i, c in enumerate(curve.coords) if c.freqs]
    if len(trig) != 2:
        return None
    i, j = trig
    ci, cj = curve.coords[i], curve.coords[j]
    if ci.poly or cj.poly or len(ci.freqs) != 1 or len(cj.freqs) != 1:
        return None
    if ci.freqs[0] != cj.freqs[0]:
        return None
    a, b = ci.cos_amps[0], ci.sin_amps[0]
    c, d = cj.cos_amps[0], cj.sin_amps[0]
    if abs(a * c + b * d) > 1e-12 * (a * a + b * b):
        return None
    if abs((a * a + b * b) - (c * c + d * d)) > 1e-12 * (a * a + b * b):
        return None
    return ({0, 1, 2} - {i, j}).pop()


def normalize_frame(curve: Curve, t0: float, k: int,
                    tol: float = DEFAULT_RANK_TOL) -> FrameMap:
    """Build A with A gamma^(j)(t0) = e_j, j <= k, completed orthonormally.

    The first k columns of A^{-1} are the derivative vectors; the remaining
    columns come from Gram-Schmidt of the standard basis against their span,
    which fixes a canonical (reproducible) completion.
    """
    d = curve.dim
    if not 1 <= k <= d:
        raise DomainError("need 1 <= k <= dim")
    B = derivative_matrix(curve, t0, k)
    for j in range(1, k + 1):
        if derivative_rank(curve, t0, j, tol) < j:
            raise DegeneracyError(
                f"derivatives through order {j} at t0={t0} are rank deficient",
                failing_order=j)
    cols = [B[:, j] for j in range(k)]
    basis = list(cols)
    for i in range(d):
        if len(basis) == d:
            break
        v = np.zeros(d)
        v[i] = 1.0
        w = v.copy()
        for _ in range(2):   # twice for numerical orthogonality
            Q = np.column_stack(basis)
            w = w - Q @ np.linalg.lstsq(Q, w, rcond=None)[0]
        norm = np.linalg.norm(w)
        if norm > 1e-10:
            basis.append(w / norm)
    M = np.column_stack(basis)
    A = np.linalg.inv(M)
    resid = max(
        float(np.max(np.abs(A @ B[:, j] - np.eye(d)[j]))) for j in range(k)
    )
    if resid > FRAME_RESIDUAL_TOL:
        raise DegeneracyError(
            f"frame residual {resid:.3e} exceeds {FRAME_RESIDUAL_TOL}")
    return FrameMap(matrix=A, t0=float(t0), order=k)


# -- curve definition files ----------------------------------------------------
#
# JSON document with keys: id, dim, kind in {poly, trig}, coordinate arrays,
# interval = [lo, hi].  A coordinate may override the top-level kind, which is
# how mixed curves such as the helix are written down.


def _coord_from_spec(spec, kind: str) -> CoordFn:
    if isinstance(spec, dict):
        kind = spec.get("kind", kind)
        if kind == "poly":
            return CoordFn(poly=tuple(float(c) for c in spec["coefficients"]))
        if kind in ("trig", "mixed"):
            freqs = tuple(float(v) for v in spec.get("freqs", ()))
            cos_a = tuple(float(v) for v in spec.get("cos", (0.0,) * len(freqs)))
            sin_a = tuple(float(v) for v in spec.get("sin", (0.0,) * len(freqs)))
            poly = tuple(float(c) for c in spec.get("coefficients", ()))
            if not poly and spec.get("const", 0.0):
                poly = (float(spec["const"]),)
            return CoordFn(poly=poly, freqs=freqs, cos_amps=cos_a, sin_amps=sin_a)
        raise DomainError(f"unknown coordinate kind {kind!r}")
    if kind == "poly":
        return CoordFn(poly=tuple(float(c) for c in spec))
    raise DomainError("trig coordinates must be written as objects")


def curve_from_dict(doc: dict) -> Curve:
    try:
        kind = doc.get("kind", "poly")
        coords = tuple(_coord_from_spec(s, kind) for s in doc["coords"])
        return Curve(
            dim=int(doc["dim"]),
            coords=coords,
            interval=(float(doc["interval"][0]), float(doc["interval"][1])),
            curve_id=str(doc.get("id", "curve")),
            max_order=int(doc.get("max_order", 64)),
        )
    except KeyError as exc:
        raise DomainError(f"curve document missing key {exc}") from exc


def load_curve(path) -> Curve:
    with open(path, "r", encoding="utf-8") as fh:
        return curve_from_dict(json.load(fh))


def curve_to_dict(curve: Curve) -> dict:
    coords = []
    for c in curve.coords:
        entry: dict = {}
        if c.freqs and c.poly:
            entry["kind"] = "mixed"
            entry["coefficients"] = list(c.poly)
            entry["freqs"] = list(c.freqs)
            entry["cos"] = list(c.cos_amps)
            entry["sin"] = list(c.sin_amps)
        elif c.freqs:
            entry["kind"] = "trig"
            entry["freqs"] = list(c.freqs)
            entry["cos"] = list(c.cos_amps)
            entry["sin"] = list(c.sin_amps)
        else:
            entry["kind"] = "poly"
            entry["coefficients"] = list(c.poly) or [0.0]
        coords.append(entry)
    return {
        "id": curve.curve_id,
        "dim": curve.dim,
        "kind": "poly",
        "coords": coords,
        "interval": list(curve.interval),
        "max_order": curve.max_order,
    }
