from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedecay.errors import DomainError
from curvedecay.theory import (breakpoint_q, breakpoints, decay_exponent,
                               predicted_model, predictions_csv)


def test_breakpoint_q_values():
    assert [breakpoint_q(k) for k in (1, 2, 3, 4)] == [2, 4, 7, 11]


def test_sigma_examples():
    p = decay_exponent(3, 3, 7)
    assert p.sigma == Fraction(3, 7) and p.kstar == 3
    assert decay_exponent(5, 2, 8).sigma == Fraction(1, 4)
    p2 = decay_exponent(4, 3, 9)
    assert p2.sigma == Fraction(1, 3) and p2.on_flat_branch


def test_sigma_rejects_small_q():
    with pytest.raises(DomainError):
        decay_exponent(3, 3, Fraction(3, 2))


def test_breakpoints_examples():
    assert breakpoints(3, 3) == [
        (Fraction(1, 2), Fraction(1, 2)),
        (Fraction(1, 4), Fraction(1, 2)),
        (Fraction(0), Fraction(1, 3)),
    ]
    b43 = breakpoints(4, 3)
    assert b43[-2:] == [(Fraction(1, 7), Fraction(3, 7)),
                        (Fraction(0), Fraction(0))]
    b1010 = breakpoints(10, 10)
    assert b1010[0] == (Fraction(1, 2), Fraction(1, 2))
    assert b1010[-1] == (Fraction(0), Fraction(1, 10))
    assert len(b1010) == 10


def test_polyline_concavity_for_partial_rank():
    verts = breakpoints(6, 4)
    # slopes in 1/q are nonincreasing left to right (concave polyline)
    pts = list(reversed(verts))           # ascending 1/q
    slopes = [(b[1] - a[1]) / (b[0] - a[0]) for a, b in zip(pts, pts[1:])]
    assert all(s1 >= s2 - Fraction(0) for s1, s2 in zip(slopes, slopes[1:]))
    assert all(slopes[i] >= slopes[i + 1] for i in range(len(slopes) - 1))


def test_sigma_is_the_polyline():
    # exact piecewise linearity: at each midpoint of consecutive vertices the
    # exponent equals the chord value
    for d, K in ((3, 3), (4, 4), (4, 3), (10, 10), (6, 4)):
        verts = breakpoints(d, K)
        for (x1, y1), (x2, y2) in zip(verts, verts[1:]):
            if x2 == x1:
                continue
            xm = (x1 + x2) / 2
            if xm == 0:
                continue
            q = 1 / xm
            chord = y1 + (y2 - y1) * (xm - x1) / (x2 - x1)
            assert decay_exponent(d, K, q).sigma == chord


def test_vertex_values_exact():
    for d in (3, 4, 6, 10):
        for k in range(2, d):
            qk = breakpoint_q(k)
            assert decay_exponent(d, d, qk).sigma == Fraction(k) / qk


def test_sigma_exceeds_2_over_q():
    for d, K in ((3, 3), (5, 3), (6, 4)):
        for q in (Fraction(9, 2), 5, 7, 12, 40):
            assert decay_exponent(d, K, q).sigma > Fraction(2) / Fraction(q)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 9), st.integers(2, 9),
       st.fractions(min_value=2, max_value=60))
def test_monotone_in_rank(d, K, q):
    if K + 1 > d:
        return
    assert decay_exponent(d, K + 1, q).sigma >= decay_exponent(d, K, q).sigma


def test_predicted_model_log_sets():
    assert predicted_model(3, 3, 4) == (Fraction(1, 2), Fraction(1, 4))
    assert predicted_model(3, 2, 4, degenerate=True) == \
        (Fraction(1, 2), Fraction(1, 4))
    sigma, beta = predicted_model(3, 3, 5)
    assert beta == 0 and sigma == decay_exponent(3, 3, 5).sigma
    # nondegenerate partial rank: log set stops at K-1
    assert predicted_model(5, 3, 7)[1] == 0
    assert predicted_model(5, 3, 4)[1] == Fraction(1, 4)
    assert predicted_model(5, 3, 7, degenerate=True)[1] == Fraction(1, 7)
    # fully nondegenerate: no log at q_d
    assert predicted_model(3, 3, 7)[1] == 0


def test_csv_emission():
    text = predictions_csv(3, 3, [7, Fraction(9, 2)])
    lines = text.strip().splitlines()
    assert lines[0] == "d,K,q_num,q_den,sigma_num,sigma_den,kstar,beta_num,beta_den"
    assert lines[1] == "3,3,7,1,3,7,3,0,1"
    assert lines[2].startswith("3,3,9,2,")
