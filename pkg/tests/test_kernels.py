import numpy as np
import pytest

from curvedecay.kernels import (HAVE_COMPILED, _phase_sum_numpy,
                                active_backend, phase_sum)


def _case(n_pts=3000, n_om=300, d=3, seed=0):
    rng = np.random.default_rng(seed)
    pts = rng.standard_normal((n_pts, d))
    coef = rng.standard_normal(n_pts)
    om = rng.standard_normal((n_om, d))
    om /= np.linalg.norm(om, axis=1)[:, None]
    return pts, coef, om


def test_python_backend_matches_direct():
    pts, coef, om = _case(500, 40)
    got = phase_sum(pts, coef, om, 3.7, backend="python")
    want = np.array([np.sum(coef * np.exp(1j * 3.7 * (pts @ w))) for w in om])
    assert np.max(np.abs(got - want)) < 1e-10


@pytest.mark.skipif(not HAVE_COMPILED, reason="extension not built")
def test_backends_agree():
    pts, coef, om = _case()
    a = phase_sum(pts, coef, om, 251.3, backend="compiled")
    b = phase_sum(pts, coef, om, 251.3, backend="python")
    scale = np.sum(np.abs(coef))
    assert np.max(np.abs(a - b)) < 1e-12 * scale


def test_worker_count_does_not_change_values():
    pts, coef, om = _case(2000, 5000)
    one = phase_sum(pts, coef, om, 97.0, workers=1)
    three = phase_sum(pts, coef, om, 97.0, workers=3)
    assert np.array_equal(one, three)


def test_forced_backend_env(monkeypatch):
    monkeypatch.setenv("CURVEDECAY_KERNEL", "python")
    assert active_backend() == "python"
    monkeypatch.delenv("CURVEDECAY_KERNEL")
    assert active_backend() in ("python", "compiled")
