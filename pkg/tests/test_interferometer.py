import math

import numpy as np
import pytest
from scipy.integrate import quad

from mzsim.interferometer import (
    FitError,
    FringeFit,
    Interferometer,
    B_revival,
    B_zero,
    analytic_B,
    contrast,
    contrast_curve,
    default_shifts,
    fit_fringe,
    fit_fringe_free_period,
    scan_third_grating,
    y12_prime_for_ratio,
)
from mzsim.scattering import make_event, p1_pdf


def synthetic(a, b, phi, d, x):
    return np.column_stack([x, a + b * np.cos(2 * math.pi * x / d + phi)])


@pytest.mark.parametrize("phi", [-3.0, -0.4, 0.0, 1.2, math.pi])
def test_fit_recovers_sinusoid(phi):
    d = 2e-7
    x = default_shifts(d)
    fit = fit_fringe(synthetic(3.0, 0.7, phi, d, x), d)
    assert fit.a == pytest.approx(3.0, abs=1e-12)
    assert fit.b == pytest.approx(0.7, abs=1e-12)
    assert math.remainder(fit.phi - phi, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)
    assert -math.pi < fit.phi <= math.pi
    assert fit.residual_rms < 1e-12


def test_constant_fringe_has_no_phase():
    x = default_shifts(2e-7)
    fit = fit_fringe(np.column_stack([x, np.full_like(x, 2.5)]), 2e-7)
    assert fit.a == pytest.approx(2.5, rel=1e-14)
    assert (fit.b, fit.phi) == (0.0, 0.0)


def test_degenerate_samples_rejected():
    with pytest.raises(FitError):
        fit_fringe([(0.0, 1.0), (2e-7, 1.0), (4e-7, 1.0)], 2e-7)
    with pytest.raises(FitError):
        fit_fringe([(0.0, 1.0), (1e-7, 2.0)], 2e-7)
    with pytest.raises(FitError):
        fit_fringe([1.0, 2.0, 3.0], 2e-7)


def test_free_period_fit():
    d = 2e-7
    x = default_shifts(d)
    fit = fit_fringe_free_period(synthetic(1.0, 0.3, 0.5, 1.003 * d, x), d)
    assert fit.period == pytest.approx(1.003 * d, rel=1e-9)
    assert fit.b == pytest.approx(0.3, rel=1e-9)


def test_fit_evaluates():
    f = FringeFit(1.0, 0.5, 0.0, 2.0, 0.0)
    assert f(0.0) == 1.5 and f(1.0) == pytest.approx(0.5)
    assert f.contrast == 0.5


def test_transmission_is_periodic_in_shift(cfg, ifm):
    x = default_shifts(cfg.d, periods=1)
    a = ifm.transmission_scan(None, x)
    b = ifm.transmission_scan(None, x + cfg.d)
    np.testing.assert_allclose(b, a, rtol=1e-6)


def test_uniform_intensity_gives_flat_transmission(cfg, ifm):
    lo, hi = ifm.window()
    t = ifm.transmission_of(np.ones(ifm.sgrid.count), default_shifts(cfg.d), (lo, hi))
    np.testing.assert_allclose(t, (hi - lo) * cfg.delta / cfg.d, rtol=1e-9)


def test_linear_intensity_integrated_exactly(cfg, ifm):
    x = ifm.sgrid.x
    intensity = 2.0 + 1e4 * x
    lo, hi = ifm.window()
    shift = 0.37 * cfg.d
    t = ifm.transmission_of(intensity, [shift], (lo, hi))[0]
    c0 = ifm.slit3_center + shift
    centers = c0 + cfg.d * np.arange(-400, 400)
    ref = 0.0
    for c in centers:
        a, b = max(c - cfg.delta / 2, lo), min(c + cfg.delta / 2, hi)
        if b > a:
            ref += quad(lambda u: 2.0 + 1e4 * u, a, b)[0]
    assert t == pytest.approx(ref, rel=1e-10)


def test_zero_kick_matches_laser_off(cfg, ifm):
    x = default_shifts(cfg.d)
    event = make_event(cfg, 0.3, 0.0)
    np.testing.assert_array_equal(ifm.transmission_scan(event, x), ifm.transmission_scan(None, x))


def test_scan_sample_count(cfg):
    out = scan_third_grating(cfg, None, default_shifts(cfg.d))
    assert len(out) == 32
    assert out[5][0] == pytest.approx(5 * cfg.d / 16)


def test_window_follows_kick(cfg, ifm):
    event = make_event(cfg, 0.2, cfg.k_i)
    lo0, hi0 = ifm.window()
    lo1, hi1 = ifm.window(event)
    shift = cfg.k_i * (cfg.y12 + cfg.y23 - 0.2) / cfg.k
    assert lo1 - lo0 == pytest.approx(shift, rel=1e-9)
    assert hi0 - lo0 == pytest.approx(cfg.n_slits * cfg.d)
    assert cfg.diffraction_angle * cfg.y23 * 0.9 < 0.5 * (lo0 + hi0) < cfg.diffraction_angle * cfg.y23 * 1.1


def test_laser_off_has_fringes(cfg, ifm):
    x = default_shifts(cfg.d)
    fit = fit_fringe(np.column_stack([x, ifm.transmission_scan(None, x)]), cfg.d)
    assert fit.a > 0
    assert 0.1 < fit.contrast < 1


@pytest.mark.parametrize("r, value", [(0.25, 0.567911), (0.625, -0.3213595)])
def test_B_reference_values(r, value):
    assert analytic_B(r) == pytest.approx(value, abs=1e-6)


@pytest.mark.parametrize("r", [0.02, 0.3, 0.9, 2.4])
def test_B_matches_weighted_cosine_integral(cfg, r):
    ki, d_p = cfg.k_i, r * cfg.lambda_i
    # B = int P1 cos(d_p (dk - k_i)) by symmetry of P1 about k_i
    ref = quad(lambda u: p1_pdf(u, ki) * math.cos(d_p * (u - ki)), 0, 2 * ki, epsabs=1e-20, epsrel=1e-11, limit=500)[0]
    assert analytic_B(r) == pytest.approx(ref, abs=1e-11)


def test_B_limits_and_branch():
    assert analytic_B(0.0) == 1.0
    assert analytic_B(1e-6) == pytest.approx(1.0, abs=1e-10)
    x = 0.1 / (2 * math.pi)
    assert analytic_B(x * (1 - 1e-12)) == pytest.approx(analytic_B(x * (1 + 1e-12)), abs=1e-12)
    np.testing.assert_allclose(analytic_B(np.array([0.25, 0.625])), [analytic_B(0.25), analytic_B(0.625)])


def test_first_zero_and_revival():
    z1 = B_zero(1)
    assert z1 == pytest.approx(0.4366, abs=1e-3)
    assert abs(analytic_B(z1)) < 1e-12
    r, amp = B_revival(1)
    assert z1 < r < B_zero(2)
    assert 0 < amp < 1


def test_contrast_ratio():
    off = FringeFit(2.0, 1.0, 0.0, 1.0, 0.0)
    on = FringeFit(2.0, -0.25, 0.0, 1.0, 0.0)
    res = contrast(off, on, 0.25)
    assert res.C0 == 0.5 and res.C == 0.125 and res.B_numeric == 0.25
    assert res.B_analytic == pytest.approx(0.567911, abs=1e-6)
    with pytest.raises(FitError):
        contrast(FringeFit(0.0, 1.0, 0.0, 1.0, 0.0), on)


def test_contrast_curve_domain(cfg):
    with pytest.raises(ValueError):
        contrast_curve(cfg, [100.0])


def test_kick_position_for_ratio(cfg):
    yp = y12_prime_for_ratio(cfg, 0.625)
    assert yp == pytest.approx(5 * cfg.k * cfg.d / (8 * cfg.k_i), rel=1e-12)


@pytest.mark.slow
def test_window_width_insensitive(cfg):
    x = default_shifts(cfg.d)
    yp = y12_prime_for_ratio(cfg, 0.625)
    ratios = []
    for scale in (0.8, 1.0, 1.2):
        ifm = Interferometer(cfg, window_scale=scale)
        off = fit_fringe(np.column_stack([x, ifm.transmission_scan(None, x)]), cfg.d)
        on = fit_fringe(np.column_stack([x, ifm.averaged_scan(yp, x)]), cfg.d)
        ratios.append(contrast(off, on).B_numeric)
    assert abs(ratios[0] / ratios[1] - 1) < 5e-3
    assert abs(ratios[2] / ratios[1] - 1) < 5e-3
