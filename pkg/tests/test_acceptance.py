"""Acceptance criteria, one test per criterion.

Each test prints a PASS or FAIL line with the measured value. Criteria that
the model cannot meet are marked xfail(strict=True) so that an unexpected
pass is reported too.
"""

import math
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

from mzsim.cli import main
from mzsim.grating import GratingSpec, analytic_spectrum
from mzsim.interferometer import (
    B_revival,
    B_zero,
    analytic_B,
    contrast_curve,
    default_shifts,
    fit_fringe,
    fit_fringe_free_period,
    y12_prime_for_ratio,
)
from mzsim.physics import SpectralAmplitude
from mzsim.propagate import angular_spectrum_propagate, beam_region, far_field, relative_l2
from mzsim.scattering import make_event, p1_pdf, p1_quadrature
from mzsim.validation import check_representations, kick_errors

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def test_1_p1_normalisation(cfg, report):
    ki = cfg.k_i
    nodes, weights = p1_quadrature(ki, 64)
    norm_err = abs(weights.sum() - 1)
    mean_err = abs(np.dot(weights, nodes) / ki - 1)
    adaptive = quad(lambda u: p1_pdf(u, ki), 0, 2 * ki, epsabs=1e-20, epsrel=1e-13)[0]
    ok = norm_err <= 1e-12 and mean_err <= 1e-9 and abs(adaptive - 1) <= 1e-12
    report("criterion 1 P1", ok, f"|sum-1| = {norm_err:.2e}, |mean/k_i-1| = {mean_err:.2e}, adaptive |int-1| = {abs(adaptive - 1):.2e}")
    assert ok


def _oracle(r, cfg):
    """int P1(u) exp(i d_p u) du by adaptive Fourier quadrature."""
    ki, d_p = cfg.k_i, r * cfg.lambda_i
    opts = dict(epsabs=1e-15, limit=400)
    re = quad(lambda u: p1_pdf(u, ki), 0, 2 * ki, weight="cos", wvar=d_p, **opts)[0]
    im = quad(lambda u: p1_pdf(u, ki), 0, 2 * ki, weight="sin", wvar=d_p, **opts)[0]
    return complex(re, im)


def test_2_B_against_oracle(cfg, report):
    worst_amp = worst_phase = 0.0
    for r in np.linspace(0.01, 3.0, 50):
        z = _oracle(r, cfg)
        b = analytic_B(r)
        worst_amp = max(worst_amp, abs(abs(z) - abs(b)))
        # the phase is d_p k_i, plus pi where B < 0
        rest = z * np.exp(-1j * r * cfg.lambda_i * cfg.k_i) * np.sign(b)
        worst_phase = max(worst_phase, abs(np.angle(rest)))
    ok = worst_amp <= 1e-9 and worst_phase <= 1e-9
    report("criterion 2 B vs oracle", ok, f"amplitude {worst_amp:.2e}, phase {worst_phase:.2e} rad")
    assert ok


@pytest.mark.xfail(strict=True, reason="next series term 3 x^4/280 exceeds 1e-3 x^4")
def test_3_small_r_limit(cfg, report):
    worst = 0.0
    for r in np.linspace(0.001, 0.05, 50):
        x = 2 * math.pi * r
        ref = _oracle(r, cfg) * np.exp(-1j * r * cfg.lambda_i * cfg.k_i)
        assert abs(ref.real - analytic_B(r)) <= 1e-9
        worst = max(worst, abs(analytic_B(r) - (1 - x * x / 5)) / x**4)
    ok = worst <= 1e-3
    report("criterion 3 small-r limit", ok, f"max |B - (1 - x^2/5)| / x^4 = {worst:.4e} (limit 1e-3)")
    assert ok


def test_4_first_zero_and_revival(report):
    z1, z2 = B_zero(1), B_zero(2)
    r_rev, amp = B_revival(1)
    ok = abs(z1 - 0.4366) <= 1e-3 and z1 < r_rev < z2 and 0 < amp < 1
    report("criterion 4 zero and revival", ok, f"first zero r = {z1:.6f}, revival |B| = {amp:.4f} at r = {r_rev:.4f}")
    assert ok


@pytest.mark.slow
def test_5_full_pipeline_contrast(cfg, report):
    r_values = [round(0.1 * i, 10) for i in range(1, 16)]
    _, points = contrast_curve(cfg, r_values, node_count=64, workers=4)
    err = np.array([p.B_numeric_abs - p.B_analytic_abs for p in points])
    rms = float(np.sqrt(np.mean(err**2)))
    ok = rms <= 0.02
    report("criterion 5 full-pipeline contrast", ok, f"RMS |B| error {rms:.4e} over r = 0.1..1.5, max {np.abs(err).max():.4e}")
    assert ok


def _laser_off_samples(cfg, ifm):
    x = default_shifts(cfg.d)
    return np.column_stack([x, ifm.transmission_scan(None, x)])


@pytest.mark.xfail(strict=True, reason="the laser-off fringe carries a third harmonic of about 2.7%")
def test_6a_fringe_is_sinusoidal(cfg, ifm, report):
    fit = fit_fringe(_laser_off_samples(cfg, ifm), cfg.d)
    ratio = fit.residual_rms / fit.b
    ok = ratio <= 1e-2
    report("criterion 6a fringe residual", ok, f"residual_rms / b = {ratio:.4e} (limit 1e-2)")
    assert ok


def test_6b_free_period(cfg, ifm, report):
    fit = fit_fringe_free_period(_laser_off_samples(cfg, ifm), 1.05 * cfg.d)
    rel = abs(fit.period / cfg.d - 1)
    ok = rel <= 1e-3
    report("criterion 6b free period", ok, f"|period/d - 1| = {rel:.3e}")
    assert ok


def test_7_kick_invariants(cfg, report):
    rng = np.random.default_rng(20240607)
    worst_mod = worst_tr = 0.0
    for _ in range(10):
        y_prime = rng.uniform(0.0, cfg.y12)
        dk = rng.uniform(0.0, 2 * cfg.k_i)
        mod_err, tr_err = kick_errors(cfg, y_prime, dk)
        worst_mod, worst_tr = max(worst_mod, mod_err), max(worst_tr, tr_err)
    ok = worst_mod <= 1e-10 and worst_tr <= 1e-4
    report("criterion 7 kick invariants", ok, f"modulus {worst_mod:.2e}, translation {worst_tr:.2e}")
    assert ok


def test_8a_angular_spectrum_vs_fresnel(cfg, report):
    check = check_representations(cfg)
    report("criterion 8a AS vs FK at y12", check.passed, f"relative L2 {check.value:.3e}")
    assert check.passed


@pytest.mark.xfail(strict=True, reason="y12 is inside the Fresnel distance, far-field form does not apply")
def test_8b_far_field_at_y12(cfg, ifm, report):
    g1 = GratingSpec(cfg.d, cfg.delta, cfg.n_slits)
    c = SpectralAmplitude(ifm.kgrid, analytic_spectrum(g1, ifm.kgrid.kx, amplitude=cfg.amplitude))
    psi = angular_spectrum_propagate(c, cfg.y12, cfg)
    with pytest.warns(UserWarning):
        ff = far_field(c, cfg.y12, cfg)
    err = relative_l2(np.abs(ff.values), np.abs(psi.values), beam_region(cfg, cfg.y12, ifm.sgrid))
    ok = err <= 5e-2
    report("criterion 8b far field at y12", ok, f"relative L2 of modulus {err:.3e} (limit 5e-2)")
    assert ok


def test_9_per_node_amplitude(cfg, ifm, report):
    x = default_shifts(cfg.d)
    off = fit_fringe(np.column_stack([x, ifm.transmission_scan(None, x)]), cfg.d)
    nodes, _ = p1_quadrature(cfg.k_i, 64)
    worst_b = worst_phase = 0.0
    for r in (0.2, 0.625, 1.5):
        y_prime = y12_prime_for_ratio(cfg, r)
        d_p = r * cfg.lambda_i
        for dk in nodes:
            fit = fit_fringe(np.column_stack([x, ifm.transmission_scan(make_event(cfg, y_prime, dk), x)]), cfg.d)
            worst_b = max(worst_b, abs(fit.b / off.b - 1))
            worst_phase = max(worst_phase, abs(math.remainder(off.phi - fit.phi - d_p * dk, 2 * math.pi)))
    ok = worst_b <= 1e-2 and worst_phase <= 1e-2
    report("criterion 9 per-node fringes", ok, f"max |b/b_off - 1| = {worst_b:.3e}, phase error {worst_phase:.3e} rad")
    assert ok


@pytest.mark.slow
def test_10_determinism(tmp_path, report):
    runs = [
        ["field-profile", "--config", str(CONFIGS / "reference_kick.ini"), "--plane", "g3"],
        ["fringe-scan", "--config", str(CONFIGS / "reference.ini"), "--nodes", "16"],
        ["fringe-scan", "--config", str(CONFIGS / "reference_kick.ini")],
        ["contrast-curve", "--config", str(CONFIGS / "reference.ini"), "--r-values", "0.3,0.9", "--nodes", "16", "--workers", "2"],
        ["validate", "--config", str(CONFIGS / "reference.ini")],
    ]
    same = True
    for i, argv in enumerate(runs):
        outs = []
        for j in range(2):
            path = tmp_path / f"run{i}_{j}.csv"
            assert main(argv + ["--out", str(path)]) == 0
            outs.append(path.read_bytes())
        same &= outs[0] == outs[1]
    report("criterion 10 determinism", same, f"{len(runs)} commands run twice, byte-identical = {same}")
    assert same
