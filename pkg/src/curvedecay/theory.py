"""Exact rational calculus for the predicted decay exponents.

For a curve in R^d whose first K derivatives are independent, the spherical
L^q average of the transform decays like R^{-sigma} with

    sigma(q) = min_{k=2..d}  1/k + (k^2-k-2)/(2kq)              (K = d)
    sigma(q) = min( min_{k=2..K} 1/k + (k^2-k-2)/(2kq),  K/q )  (K < d)

and logarithmic factors (log R)^{1/q} exactly at the breakpoint exponents
q_k = (k^2+k+2)/2.  Everything here is computed in Fraction arithmetic;
floats appear only at the presentation boundary.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError


def breakpoint_q(k: int) -> Fraction:
    """The exponent q_k = (k^2 + k + 2)/2 where the decay polyline bends."""
    if k < 1:
        raise DomainError("need k >= 1")
    return Fraction(k * k + k + 2, 2)


def _line_term(k: int, q: Fraction) -> Fraction:
    return Fraction(1, k) + Fraction(k * k - k - 2, 2 * k) / q


@dataclass(frozen=True)
class ExponentPrediction:
    sigma: Fraction
    kstar: int | None      # smallest k achieving the min; None on the K/q branch
    beta: Fraction         # log exponent: 1/q at the breakpoint set, else 0
    q: Fraction
    d: int
    K: int

    @property
    def on_flat_branch(self) -> bool:
        return self.kstar is None


def decay_exponent(d: int, K: int, q) -> ExponentPrediction:
    """Exact minimum defining sigma, with the achieving branch.

    Ties report the smallest k.  q < 2 is rejected: the averages are only
    controlled from L^2 upward.
    """
    q = Fraction(q)
    if q < 2:
        raise DomainError("need q >= 2")
    if not 2 <= K <= d:
        raise DomainError("need 2 <= K <= d")
    candidates = [(_line_term(k, q), k) for k in range(2, (d if K == d else K) + 1)]
    sigma, kstar = min(candidates, key=lambda c: (c[0], c[1]))
    branch: int | None = kstar
    if K < d and Fraction(K) / q < sigma:
        sigma, branch = Fraction(K) / q, None
    beta = _log_exponent(d, K, q, degenerate=False)
    return ExponentPrediction(sigma, branch, beta, q, d, K)


def _log_exponent(d: int, K: int, q: Fraction, degenerate: bool) -> Fraction:
    if K == d:
        ks = range(2, d)
    elif degenerate:
        ks = range(2, K + 1)
    else:
        ks = range(2, K)
    if any(q == breakpoint_q(k) for k in ks):
        return 1 / q
    return Fraction(0)


def predicted_model(d: int, K: int, q, degenerate: bool = False):
    """(sigma, beta) for the model G ~ c R^{-sigma} (log R)^{beta}.

    degenerate means the (K+1)-st derivative vanishes identically (the curve
    spans a K-dimensional affine subspace), which extends the breakpoint set
    carrying the log factor up to q_K.
    """
    q = Fraction(q)
    pred = decay_exponent(d, K, q)
    return pred.sigma, _log_exponent(d, K, q, degenerate)


def breakpoints(d: int, K: int) -> list[tuple[Fraction, Fraction]]:
    """Vertices of the polyline q^{-1} -> sigma, as exact pairs.

    (1/q_k, k/q_k) for k = 1..min(K, d-1), then (0, 1/d) for the fully
    nondegenerate case or (0, 0) when K < d.
    """
    if not 2 <= K <= d:
        raise DomainError("need 2 <= K <= d")
    verts = []
    for k in range(1, min(K, d - 1) + 1):
        qk = breakpoint_q(k)
        verts.append((1 / qk, Fraction(k) / qk))
    verts.append((Fraction(0), Fraction(1, d)) if K == d
                 else (Fraction(0), Fraction(0)))
    return verts


CSV_HEADER = "d,K,q_num,q_den,sigma_num,sigma_den,kstar,beta_num,beta_den"


def predictions_csv(d: int, K: int, qs) -> str:
    """CSV table of exact predictions for a list of rational q."""
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for q in qs:
        p = decay_exponent(d, K, q)
        kstar = "" if p.kstar is None else str(p.kstar)
        buf.write(f"{d},{K},{p.q.numerator},{p.q.denominator},"
                  f"{p.sigma.numerator},{p.sigma.denominator},{kstar},"
                  f"{p.beta.numerator},{p.beta.denominator}\n")
    return buf.getvalue()
