import math

import mpmath as mp
import numpy as np
import pytest

from curvedecay.asymptotics import (AiryValue, airy, airy_asymptotic,
                                    airy_comparison_grid,
                                    airy_oscillatory_leading, airy_series,
                                    alpha, check_airy_comparison,
                                    check_phase_asymptotics, lanczos_gamma,
                                    plateau_window)
from curvedecay.errors import CapabilityError, DomainError


def test_lanczos_gamma_accuracy():
    xs = np.linspace(0.005, 1.0, 200)
    for x in xs:
        assert abs(lanczos_gamma(float(x)) - math.gamma(float(x))) \
            <= 1e-12 * math.gamma(float(x))


def test_alpha_values():
    a2 = alpha(2).value
    assert a2 == pytest.approx(complex(1.2533141373155003, 1.2533141373155003),
                               abs=1e-7)
    a3 = alpha(3).value
    assert a3.imag == 0.0
    assert a3.real == pytest.approx((2 / 3) * math.gamma(1 / 3)
                                    * math.sin(math.pi / 3), abs=1e-12)
    assert abs(a3.real - 1.54669) < 1e-5


def test_alpha_structure():
    for k in range(2, 9):
        val = alpha(k).value
        mag = (2 / k) * math.gamma(1 / k)
        if k % 2:
            assert val.imag == 0.0
            assert abs(abs(val) - mag * math.sin((k - 1) * math.pi / (2 * k))) \
                < 1e-10
        else:
            assert abs(abs(val) - mag) < 1e-10
            assert math.atan2(val.imag, val.real) == \
                pytest.approx(math.pi / (2 * k), abs=1e-12)


def test_alpha_matches_closed_form_oracle():
    # independent route: int_0^inf cos(u^k) du = Gamma(1+1/k) cos(pi/(2k))
    # (and the sine analogue), so the full-line constant is
    # 2 Gamma(1+1/k) (cos + i [k even] sin)(pi/(2k)); uses math.gamma,
    # not the package's Lanczos evaluation.
    for k in range(2, 9):
        g = math.gamma(1.0 + 1.0 / k)
        re = 2.0 * g * math.cos(math.pi / (2 * k))
        im = 2.0 * g * math.sin(math.pi / (2 * k)) if k % 2 == 0 else 0.0
        assert abs(alpha(k).value - complex(re, im)) < 1e-12


def test_airy_at_zero():
    got = airy(0.0)
    assert got.method == "series"
    assert got.value == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3),
                                      abs=1e-8)
    assert got.value == pytest.approx(0.3550280538878172, abs=1e-12)


def test_airy_first_negative_zero():
    lo, hi = -3.0, -2.0
    flo = airy_series(lo)[0]
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        fm = airy_series(mid)[0]
        if flo * fm <= 0:
            hi = mid
        else:
            lo, flo = mid, fm
    assert 0.5 * (lo + hi) == pytest.approx(-2.33810741, abs=1e-6)


def test_airy_against_mpmath():
    for tau in (-80.0, -25.0, -10.0, -6.5, -5.5, -3.0, -1.0, 0.5, 2.0, 5.5, 9.0):
        got = airy(tau)
        ref = float(mp.airyai(tau))
        assert abs(got.value - ref) <= max(1e-8, 2 * got.error)


def test_airy_methods_agree_in_band():
    for tau in (-7.0, -6.5, -6.0, -5.5, -5.0, 5.0, 6.0, 7.0):
        s = airy_series(tau)[0]
        a = airy_asymptotic(tau)[0]
        assert abs(s - a) < 1e-8


def test_airy_range_check():
    with pytest.raises(CapabilityError):
        airy(-101.0)
    with pytest.raises(CapabilityError):
        airy(11.0)


def test_airy_ode_under_finite_differences():
    h = 1e-3
    for tau in np.linspace(-10, 2, 25):
        if abs(abs(tau) - 6.0) < 2 * h:
            continue   # stencil would straddle the series/asymptotic switch
        second = (airy(tau + h).value - 2 * airy(tau).value
                  + airy(tau - h).value) / h ** 2
        assert abs(second - tau * airy(tau).value) < 1e-5


def test_airy_leading_oscillatory_term():
    for t in (5.0, 10.0, 20.0, 50.0):
        lead = airy_oscillatory_leading(t)
        rel = abs(airy(-t).value - lead) / abs(lead)
        assert rel <= 2.0 * t ** -0.75


def test_phase_law_pure_even_k():
    rep = check_phase_asymptotics(2, [1e2, 1e3, 1e4, 1e5])
    assert rep.passed and rep.log_corrected


def test_phase_law_pure_cubic():
    rep = check_phase_asymptotics(3, [1e3, 1e4, 1e5, 1e6])
    assert rep.passed
    assert rep.fitted_order == pytest.approx(2 / 3, abs=0.15)
    assert all(r.resolved for r in rep.rows)


def test_phase_law_perturbed_constant():
    # switched-on low-order coefficient: residual <= C delta lam^{-1/3}, C <= 10
    rep = check_phase_asymptotics(3, [1e3, 1e4, 1e5, 1e6], delta=0.1)
    assert rep.passed
    assert rep.fitted_constant <= 10.0


def test_phase_law_rejects_bad_window():
    from curvedecay.oscquad import CutoffSpec
    off = CutoffSpec(center=0.5, half_width=0.08, family="bump")
    with pytest.raises(DomainError):
        check_phase_asymptotics(3, [1e3], cutoff=off)   # 0 outside support


def test_airy_comparison_single_row():
    row = check_airy_comparison(1e4, 0.01)
    assert row.resolved
    assert row.err_airy <= 10.0 * row.envelope
    assert row.err_cosine <= 10.0 * row.envelope


def test_airy_comparison_cosine_model_matches_airy_deep():
    # in the oscillatory regime the two model terms differ by O(1/(lam theta))
    row = check_airy_comparison(1e5, 0.03)
    diff = abs(row.airy_model - row.cosine_model)
    assert diff <= 5.0 / (row.lam * row.theta)


def test_airy_comparison_hypotheses():
    with pytest.raises(DomainError):
        check_airy_comparison(1e4, 0.04, eps=0.25)      # theta >= eps^2/2
    with pytest.raises(DomainError):
        check_airy_comparison(3.0, 0.01, eps=0.25)      # lam <= 1/eps


def test_plateau_window_properties():
    w = plateau_window(0.25)
    assert w.value(0.0) == 1.0
    assert np.allclose(w.value(np.linspace(-0.124, 0.124, 11)), 1.0)
    assert w.value(0.26) == 0.0


def test_comparison_grid_constant():
    rows, c = airy_comparison_grid([1e3, 1e4], [0.01, 0.03])
    assert len(rows) == 4
    assert c < 50.0
