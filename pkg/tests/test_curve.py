import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedecay.curve import (CoordFn, Curve, circle_curve, curve_from_dict,
                              curve_to_dict, derivative_rank, eval_derivative,
                              helix_curve, load_curve, moment_curve,
                              normalize_frame, planar_order)
from curvedecay.errors import CapabilityError, DegeneracyError, DomainError

from conftest import random_rotation


def test_moment_curve_derivatives_at_zero():
    mc = moment_curve(3)
    assert np.allclose(eval_derivative(mc, 0.0, 2), [0, 2, 0])
    mc4 = moment_curve(4)
    assert np.allclose(eval_derivative(mc4, 0.0, 4), [0, 0, 0, 24])


def test_circle_first_derivative():
    c = circle_curve()
    assert np.allclose(eval_derivative(c, 0.0, 1), [0, 1])


def test_third_derivative_interior_point():
    # symbolic differentiation oracle: d^3/dt^3 (t, t^2, t^3) = (0, 0, 6)
    mc = moment_curve(3)
    assert np.allclose(eval_derivative(mc, 0.5, 3), [0, 0, 6])


def test_degree_exceeded_gives_zero_vector():
    mc = moment_curve(3)
    assert np.allclose(eval_derivative(mc, 0.3, 7), [0, 0, 0])


def test_trig_derivative_cycle():
    hx = helix_curve()
    # fourth derivative of (cos, sin) returns to itself
    assert np.allclose(eval_derivative(hx, 0.7, 4)[:2],
                       eval_derivative(hx, 0.7, 0)[:2], atol=1e-12)


def test_domain_and_capability_errors():
    mc = moment_curve(3)
    with pytest.raises(DomainError):
        eval_derivative(mc, 2.0, 1)
    with pytest.raises(CapabilityError):
        eval_derivative(mc, 0.0, mc.max_order + 1)


def test_rank_examples():
    mc = moment_curve(3)
    assert derivative_rank(mc, 0.0, 3, 1e-8) == 3
    pl = curve_from_dict({"id": "p", "dim": 3, "kind": "poly",
                          "coords": [[0, 1], [0, 0, 1], [0]],
                          "interval": [-1, 1]})
    assert derivative_rank(pl, 0.0, 3, 1e-8) == 2
    hx = helix_curve()
    # determinant oracle: det[gamma', gamma'', gamma'''](1) = sin^2+cos^2 = 1
    M = np.column_stack([eval_derivative(hx, 1.0, j) for j in (1, 2, 3)])
    assert abs(abs(np.linalg.det(M)) - 1.0) < 1e-12
    assert derivative_rank(hx, 1.0, 3, 1e-8) == 3


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6), st.floats(-0.9, 0.9))
def test_rank_rotation_invariant(seed, t):
    rng = np.random.default_rng(seed)
    mc = moment_curve(3)
    rot = random_rotation(rng, 3)
    assert derivative_rank(mc.transformed(rot), t, 3) == \
        derivative_rank(mc, t, 3)


def test_normalize_frame_moment_curve():
    mc = moment_curve(3)
    fm = normalize_frame(mc, 0.0, 3)
    assert np.allclose(fm.matrix, np.diag([1.0, 0.5, 1.0 / 6.0]))


def test_normalize_frame_circle():
    c = circle_curve()
    fm = normalize_frame(c, 0.0, 2)
    assert np.allclose(fm.matrix @ np.array([0.0, 1.0]), [1, 0], atol=1e-12)
    assert np.allclose(fm.matrix @ np.array([-1.0, 0.0]), [0, 1], atol=1e-12)


def test_normalize_frame_partial_order():
    hx = helix_curve()
    fm = normalize_frame(hx, 0.0, 2)
    for j in (1, 2):
        got = fm.matrix @ eval_derivative(hx, 0.0, j)
        want = np.eye(3)[j - 1]
        assert np.max(np.abs(got - want)) < 1e-10
    # frame-mapped curve has unit derivatives too
    nc = fm.apply(hx)
    assert np.max(np.abs(eval_derivative(nc, 0.0, 1) - [1, 0, 0])) < 1e-10


def test_normalize_frame_degenerate():
    pl = curve_from_dict({"id": "p", "dim": 3, "kind": "poly",
                          "coords": [[0, 1], [0, 0, 1], [0]],
                          "interval": [-1, 1]})
    with pytest.raises(DegeneracyError) as exc:
        normalize_frame(pl, 0.0, 3)
    assert exc.value.failing_order == 3


def test_transformed_matches_pointwise():
    rng = np.random.default_rng(5)
    hx = helix_curve()
    A = rng.standard_normal((3, 3)) + 3 * np.eye(3)
    tc = hx.transformed(A)
    for t in (-0.8, 0.1, 0.9):
        for order in (0, 1, 3):
            assert np.allclose(eval_derivative(tc, t, order),
                               A @ eval_derivative(hx, t, order), atol=1e-12)


def test_planar_order():
    from curvedecay.curve import planar_curve
    assert planar_order(planar_curve(3, 2)) == 2
    assert planar_order(moment_curve(3)) is None


def test_curve_file_roundtrip(tmp_path):
    hx = helix_curve()
    doc = curve_to_dict(hx)
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    back = load_curve(path)
    ts = np.linspace(-0.9, 0.9, 7)
    for order in (0, 2, 5):
        assert np.allclose(back.derivatives(ts, order),
                           hx.derivatives(ts, order))


def test_curve_file_validation(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"id": "x", "dim": 3, "kind": "poly",
                                "coords": [[0, 1]] * 3}))
    with pytest.raises(DomainError):
        load_curve(path)


def test_interval_validation():
    with pytest.raises(DomainError):
        Curve(2, (CoordFn(poly=(0, 1)), CoordFn(poly=(1,))), (1.0, 1.0))
