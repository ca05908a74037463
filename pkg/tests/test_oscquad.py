import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvedecay.curve import circle_curve, curve_from_dict, moment_curve
from curvedecay.errors import DomainError
from curvedecay.oscquad import (CutoffSpec, default_tol, eval_fourier,
                                eval_fourier_oracle, eval_phase_integral,
                                fourier_batch)

from conftest import random_rotation, random_unit


def test_cutoff_families():
    for fam in ("bump", "cosine-window", "plateau"):
        co = CutoffSpec(0.2, 0.4, fam)
        assert co.value(0.2) == pytest.approx(1.0)
        ts = np.linspace(-0.5, 0.9, 301)
        vals = co.value(ts)
        assert np.all(vals >= 0) and np.all(vals <= 1.0 + 1e-15)
        assert co.value(0.2 - 0.4) == 0.0 and co.value(0.2 + 0.41) == 0.0
        # derivative consistent with finite differences away from edges
        h = 1e-6
        mid = np.linspace(-0.1, 0.5, 41)
        fd = (co.value(mid + h) - co.value(mid - h)) / (2 * h)
        assert np.max(np.abs(fd - co.deriv(mid))) < 1e-5


def test_plateau_is_flat_inside():
    co = CutoffSpec(0.0, 0.4, "plateau")
    ts = np.linspace(-0.19, 0.19, 21)
    assert np.allclose(co.value(ts), 1.0)


def test_degenerate_cutoff_rejected():
    with pytest.raises(DomainError):
        CutoffSpec(0.0, 1e-7, "bump")


def test_cutoff_must_sit_inside_interval(moment3):
    co = CutoffSpec(0.9, 0.5, "bump")
    with pytest.raises(DomainError):
        eval_fourier(moment3, co, 10.0, np.array([0, 0, 1.0]))


def test_zero_frequency_gives_mass(moment3, wide_bump):
    res = eval_fourier(moment3, wide_bump, 0.0, np.array([0, 0, 1.0]))
    assert res.resolved
    assert res.value.imag == pytest.approx(0.0, abs=1e-12)
    assert res.value.real == pytest.approx(wide_bump.mass, abs=1e-9)


def test_conjugate_symmetry(moment3, narrow_bump):
    rng = np.random.default_rng(2)
    for _ in range(5):
        om = random_unit(rng, 3)
        R = rng.uniform(5, 400)
        a = eval_fourier(moment3, narrow_bump, R, om).value
        b = eval_fourier(moment3, narrow_bump, R, -om).value
        assert abs(a - np.conjugate(b)) < 1e-10


def test_modulus_bounded_by_mass(moment3, wide_bump):
    rng = np.random.default_rng(3)
    for _ in range(8):
        om = random_unit(rng, 3)
        R = rng.uniform(0, 800)
        v = eval_fourier(moment3, wide_bump, R, om)
        assert abs(v.value) <= wide_bump.mass + 1e-9


def test_circle_stationary_phase():
    # |F_R| ~ sqrt(2 pi / R) chi(0) at the stationary point t=0
    cc = circle_curve((-1.5, 1.5))
    co = CutoffSpec(0.0, 0.9, "bump")
    R = 1e4
    got = abs(eval_fourier(cc, co, R, np.array([1.0, 0.0])).value)
    assert got == pytest.approx(math.sqrt(2 * math.pi / R), rel=0.05)


def test_linear_curve_normal_direction():
    # phase vanishes in the direction normal to a straight line
    line = curve_from_dict({"id": "line", "dim": 2, "kind": "poly",
                            "coords": [[0, 1], [0]], "interval": [-1, 1]})
    co = CutoffSpec(0.0, 0.7, "bump")
    for R in (0.0, 37.0, 512.0):
        v = eval_fourier(line, co, R, np.array([0.0, 1.0]))
        assert abs(v.value - co.mass) < 1e-9


def test_oracle_agreement_small_sample(moment3, narrow_bump):
    rng = np.random.default_rng(4)
    for _ in range(10):
        om = random_unit(rng, 3)
        R = rng.uniform(0, 1000)
        a = eval_fourier(moment3, narrow_bump, R, om)
        b = eval_fourier_oracle(moment3, narrow_bump, R, om)
        assert a.resolved
        assert abs(a.value - b) <= 2 * default_tol(R)


def test_rotation_covariance(moment3, narrow_bump):
    rng = np.random.default_rng(5)
    A = random_rotation(rng, 3)
    rc = moment3.transformed(A)
    for _ in range(4):
        om = random_unit(rng, 3)
        R = rng.uniform(10, 300)
        v1 = eval_fourier(moment3, narrow_bump, R, om)
        v2 = eval_fourier(rc, narrow_bump, R, A @ om)
        assert abs(v1.value - v2.value) <= 2 * default_tol(R)


def test_budget_doubling_within_error_estimate(moment3, wide_bump):
    om = np.array([0.2, 0.4, 0.89])
    om /= np.linalg.norm(om)
    small = eval_fourier(moment3, wide_bump, 5e4, om, node_budget=40_000)
    big = eval_fourier(moment3, wide_bump, 5e4, om, node_budget=80_000)
    assert abs(small.value - big.value) <= max(small.error, 1e-15)


def test_unresolved_is_flagged(moment3, wide_bump):
    res = eval_fourier(moment3, wide_bump, 2e5, np.array([0, 0, 1.0]),
                       tol=1e-16, node_budget=20_000)
    assert not res.resolved


def test_batch_matches_single(moment3, narrow_bump):
    from curvedecay.sphere import product_grid
    grid = product_grid(3, 16)
    R = 128.0
    batch = fourier_batch(moment3, narrow_bump, R, grid.nodes)
    assert batch.all_resolved
    for i in range(0, len(grid), 41):
        single = eval_fourier(moment3, narrow_bump, R, grid.nodes[i])
        assert abs(batch.values[i] - single.value) <= 2 * default_tol(R)


def test_batch_backends_and_workers_agree(moment3, narrow_bump):
    from curvedecay.kernels import HAVE_COMPILED
    from curvedecay.sphere import product_grid
    grid = product_grid(3, 24)
    b1 = fourier_batch(moment3, narrow_bump, 64.0, grid.nodes, workers=1)
    b3 = fourier_batch(moment3, narrow_bump, 64.0, grid.nodes, workers=3)
    assert np.array_equal(b1.values, b3.values)
    if HAVE_COMPILED:
        bp = fourier_batch(moment3, narrow_bump, 64.0, grid.nodes,
                           backend="python")
        assert np.max(np.abs(b1.values - bp.values)) < 1e-11


def test_phase_integral_fresnel():
    co = CutoffSpec(0.0, 0.08, "bump")
    lam = 1e4
    res = eval_phase_integral(2, lam, co)
    pred = math.sqrt(math.pi / lam) * complex(math.cos(math.pi / 4),
                                              math.sin(math.pi / 4))
    assert res.resolved
    assert abs(res.value - pred) < 5e-4        # window correction ~ 1/lam


def test_phase_integral_cubic_leading_term():
    # second-order correction scales like lam^{-1} with an O(1/h^2)
    # coefficient, so the relative deviation shrinks like lam^{-2/3}
    from curvedecay.asymptotics import alpha
    co = CutoffSpec(0.0, 0.08, "bump")
    rel = {}
    for lam in (1e4, 1e6):
        res = eval_phase_integral(3, lam, co)
        lead = alpha(3).value * lam ** (-1 / 3)
        rel[lam] = abs(res.value - lead) / abs(lead)
    assert rel[1e4] < 0.08
    assert rel[1e6] < 0.01
    assert rel[1e6] < 0.1 * rel[1e4]


def test_phase_integral_preconditions():
    co = CutoffSpec(0.0, 0.08, "bump")
    with pytest.raises(DomainError):
        eval_phase_integral(3, 0.0, co)
    with pytest.raises(DomainError):
        eval_phase_integral(3, 2.0, co)
    wide = CutoffSpec(0.0, 0.3, "bump")
    with pytest.raises(DomainError):
        eval_phase_integral(3, 100.0, wide)    # h > 1/10
    with pytest.raises(DomainError):
        eval_phase_integral(3, 100.0, co, x=[0.1, 0.2])   # too many coeffs


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_batch_error_estimate_is_honest(seed):
    rng = np.random.default_rng(seed)
    mc = moment_curve(3)
    co = CutoffSpec(0.0, 0.5, "bump")
    om = random_unit(rng, 3)
    R = rng.uniform(1, 500)
    batch = fourier_batch(mc, co, R, om[None, :])
    oracle = eval_fourier_oracle(mc, co, R, om)
    assert abs(batch.values[0] - oracle) <= max(4 * batch.error, 1e-9)
