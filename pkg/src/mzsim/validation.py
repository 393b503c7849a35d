"""Self-checks of the numerical model against closed forms and exact identities."""

from __future__ import annotations

import dataclasses
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grating import GratingSpec, analytic_spectrum, slit_mask
from .interferometer import analytic_B, pipeline
from .kernels import fourier_sum
from .physics import SpectralAmplitude, Wavefield, make_grids, to_wavefield
from .propagate import (
    angular_spectrum_propagate,
    beam_region,
    far_field,
    fresnel_distance,
    fresnel_propagate,
    free_phase,
    relative_l2,
)
from .scattering import kick_spectrum, kicked_field, make_event, p1_quadrature, phase_average


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    limit: float

    @property
    def passed(self) -> bool:
        return bool(self.value <= self.limit)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} (limit {self.limit:.1e})"


def check_p1(config, node_count=64):
    nodes, weights = p1_quadrature(config.k_i, node_count)
    yield Check("P1 normalisation |sum w - 1|", abs(weights.sum() - 1), 1e-12)
    yield Check("P1 mean |<dk>/k_i - 1|", abs(np.dot(weights, nodes) / config.k_i - 1), 1e-9)


def masked_plane_wave(config, sgrid) -> Wavefield:
    """Plane wave of the configured amplitude just behind grating 1."""
    g1 = GratingSpec(config.d, config.delta, config.n_slits)
    return Wavefield(sgrid, 0.0, config.amplitude * slit_mask(g1, sgrid))


def check_representations(config, oversample=1):
    """Angular spectrum against Fresnel-Kirchhoff at the second grating."""
    ifm = pipeline(config, oversample)
    region = beam_region(config, config.y12, ifm.sgrid)
    psi_as = angular_spectrum_propagate(ifm.c1, config.y12, config)
    psi_fk = fresnel_propagate(masked_plane_wave(config, ifm.sgrid), config.y12, config)
    return Check("angular spectrum vs Fresnel-Kirchhoff at y12", relative_l2(psi_fk.values, psi_as.values, region), 1e-3)


def check_far_field(config, factor=10.0):
    """Far-field modulus against the angular spectrum well beyond the Fresnel distance."""
    y = factor * fresnel_distance(config)
    far_cfg = dataclasses.replace(config, y12=0.5 * y, y23=0.5 * y)
    sgrid, kgrid = make_grids(far_cfg)
    g1 = GratingSpec(config.d, config.delta, config.n_slits)
    c = SpectralAmplitude(kgrid, analytic_spectrum(g1, kgrid.kx, amplitude=config.amplitude))
    psi = angular_spectrum_propagate(c, y, config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        ff = far_field(c, y, config)
    region = beam_region(config, y, sgrid)
    return Check(f"far field modulus at {factor:g} Fresnel distances", relative_l2(np.abs(ff.values), np.abs(psi.values), region), 5e-2)


def kick_errors(config, y12_prime, dk_x, oversample=1, stride=8):
    """Modulus change at the kick and translation error downstream.

    The translated laser-off field is evaluated by direct summation of its
    plane-wave expansion at the displaced points, independently of the FFT
    used by :func:`kicked_field`.
    """
    ifm = pipeline(config, oversample)
    sgrid, c1 = ifm.sgrid, ifm.c1
    event = make_event(config, y12_prime, dk_x)
    c_t = SpectralAmplitude(c1.grid, c1.values * free_phase(c1.kx, y12_prime, config.k), t_ref=event.t12_prime)
    before = to_wavefield(c_t, sgrid).intensity
    after = to_wavefield(kick_spectrum(c_t, event), sgrid).intensity
    modulus_err = relative_l2(after, before)

    y = config.y12
    kicked = kicked_field(c1, event, y, config).intensity
    s = dk_x * (y - y12_prime) / config.k
    region = np.flatnonzero(beam_region(config, y, sgrid))
    pts = region[::stride]
    x_pts = sgrid.x[pts]
    w = c1.values * free_phase(c1.kx, y, config.k) * (c1.grid.dkx / math.sqrt(2 * math.pi))
    # sample spacing of the selected points is stride * dx
    shifted = fourier_sum(c1.kx, w, x_pts[0] - s, stride * sgrid.dx, len(pts), +1)
    reference = np.abs(shifted) ** 2
    translate_err = relative_l2(kicked[pts], reference)
    return modulus_err, translate_err


def check_kick(config, y12_prime=None, dk_x=None):
    if y12_prime is None:
        y12_prime = 5 * config.k * config.d / (8 * config.k_i)
    if dk_x is None:
        dk_x = config.k_i
    y12_prime = min(y12_prime, 0.5 * config.y12)
    mod_err, tr_err = kick_errors(config, y12_prime, dk_x)
    yield Check("kick preserves |psi|^2 at the kick", mod_err, 1e-10)
    yield Check("kicked intensity is the translated laser-off intensity", tr_err, 1e-4)


def check_B(config, node_count=64):
    worst_amp = worst_phase = 0.0
    for r in np.linspace(0.01, 3.0, 50):
        d_p = r * config.lambda_i
        z = phase_average(d_p, config.k_i, node_count)
        b = analytic_B(r)
        # remove the phase d_p k_i; what is left is real and equal to B
        rest = z * np.exp(-1j * d_p * config.k_i)
        worst_amp = max(worst_amp, abs(rest.real - b))
        worst_phase = max(worst_phase, abs(np.angle(rest * np.sign(b))))
    yield Check("quadrature vs closed-form B", worst_amp, 1e-9)
    yield Check("quadrature phase vs d_p k_i (rad)", worst_phase, 1e-9)


def run_all(config, node_count=64):
    """All checks as a list of :class:`Check`."""
    checks = list(check_p1(config, node_count))
    checks.append(check_representations(config))
    checks.extend(check_kick(config))
    checks.extend(check_B(config, node_count))
    checks.append(check_far_field(config))
    return checks

