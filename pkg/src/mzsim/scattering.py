"""Single-photon recoil: the momentum kick and its transverse distribution."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .physics import PhysicalConfig, SpatialGrid, SpectralAmplitude, Wavefield, spectrum_to_field_values
from .propagate import _check_paraxial, free_phase


@dataclass(frozen=True)
class ScatteringEvent:
    """A photon scattered at distance ``y12_prime`` behind the first grating.

    Attributes
    ----------
    y12_prime : float
        Kick position, m.
    dk_x : float
        Transverse momentum transfer, 1/m.
    t12_prime : float
        Kick time y12_prime / v, s.
    dx0 : float
        Shift dk_x * y12_prime / k, m.
    d_p : float
        Separation of the two interferometer paths at the kick, m.
    """

    y12_prime: float
    dk_x: float
    t12_prime: float
    dx0: float
    d_p: float


def make_event(config: PhysicalConfig, y12_prime: float, dk_x: float) -> ScatteringEvent:
    """Validated :class:`ScatteringEvent` for ``config``."""
    if not (0 < y12_prime < config.y12):
        raise ValueError(f"kick position must lie in (0, y12 = {config.y12}), got {y12_prime!r}")
    if not (0 <= dk_x <= 2 * config.k_i):
        raise ValueError(f"momentum transfer must lie in [0, 2 k_i = {2 * config.k_i:.6g}], got {dk_x!r}")
    return ScatteringEvent(
        y12_prime=float(y12_prime),
        dk_x=float(dk_x),
        t12_prime=y12_prime / config.v,
        dx0=dk_x * y12_prime / config.k,
        d_p=config.diffraction_angle * y12_prime,
    )


def y12_prime_for_ratio(config: PhysicalConfig, r: float) -> float:
    """Kick position at which the path separation is ``r`` photon wavelengths."""
    return r * config.lambda_i / config.diffraction_angle


def kick_spectrum(c: SpectralAmplitude, event: ScatteringEvent) -> SpectralAmplitude:
    """Momentum-space kick c(k_x) -> c(k_x - dk_x).

    The samples are kept and the grid is moved by dk_x, so the shift is exact
    for any dk_x and nothing leaves the grid. The phase function of the
    transform is identically zero, which preserves |psi(x)| at the kick time.
    """
    if event.dk_x == 0:
        return c
    return SpectralAmplitude(c.grid.shifted(event.dk_x), c.values, t_ref=c.t_ref)


def kicked_field(
    c0: SpectralAmplitude,
    event: ScatteringEvent,
    y: float,
    config: PhysicalConfig,
    sgrid: SpatialGrid | None = None,
) -> Wavefield:
    """Wave function at ``y`` > y12_prime after a kick.

    Built from the stationary grating spectrum ``c0`` in a single transform:

        psi(x, y) = exp(i dk (x + dx0) - i dk^2 y / k) * psi_0(x - dk (y - y12_prime) / k, y),

    where psi_0 is the unkicked angular-spectrum integral. The displacement
    enters as the spectral factor exp(-i k_x s), so no interpolation is needed.
    """
    if not y > event.y12_prime:
        raise ValueError(f"y = {y!r} must lie beyond the kick at {event.y12_prime!r}")
    _check_paraxial(c0, config)
    if sgrid is None:
        sgrid = c0.grid.conjugate()
    k, dk = config.k, event.dk_x
    s = dk * (y - event.y12_prime) / k
    kx = c0.kx
    vals = c0.values * free_phase(kx, y, k)
    if dk != 0:
        vals = vals * np.exp(-1j * kx * s)
    psi = spectrum_to_field_values(vals, c0.grid, sgrid)
    if dk != 0:
        psi = psi * np.exp(1j * dk * (sgrid.x + event.dx0) - 1j * dk * dk * y / k)
    return Wavefield(sgrid, y, psi)


def p1_pdf(dk_x, k_i):
    """Density of the transverse momentum transfer for one scattered photon.

    P1(dk) = 3/(8 k_i) [1 + (1 - dk/k_i)^2] on [0, 2 k_i].

    Raises
    ------
    ValueError
        If any ``dk_x`` lies outside [0, 2 k_i].
    """
    dk = np.asarray(dk_x, dtype=float)
    if np.any(dk < 0) or np.any(dk > 2 * k_i * (1 + 1e-15)):
        raise ValueError("dk_x outside the support [0, 2 k_i]")
    u = 1 - dk / k_i
    out = 3 / (8 * k_i) * (1 + u * u)
    return float(out) if out.ndim == 0 else out


def p1_quadrature(k_i: float, node_count: int = 64):
    """Gauss-Legendre nodes on [0, 2 k_i] with weights multiplied by P1.

    Returns
    -------
    nodes : ndarray
        Momentum transfers, 1/m.
    weights : ndarray
        Probabilities summing to one.
    """
    if int(node_count) != node_count or node_count < 2:
        raise ValueError(f"node_count must be an integer >= 2, got {node_count!r}")
    t, w = leggauss(int(node_count))
    nodes = k_i * (t + 1)
    weights = w * k_i * p1_pdf(nodes, k_i)
    return nodes, weights


def phase_average(d_p: float, k_i: float, node_count: int = 64) -> complex:
    """Quadrature of int P1(dk) exp(i d_p dk) d(dk)."""
    nodes, weights = p1_quadrature(k_i, node_count)
    return complex(np.sum(weights * np.exp(1j * d_p * nodes)))
