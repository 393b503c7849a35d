"""Free paraxial propagation of transverse wave functions.

Three equivalent representations are provided: the angular spectrum, the
Fresnel-Kirchhoff convolution and its far-field limit. The longitudinal
factor exp(i k y) is never sampled.
"""

from __future__ import annotations

import math
import warnings

import numpy as np

from .kernels import fourier_sum
from .physics import (
    PhysicalConfig,
    SpatialGrid,
    SpectralAmplitude,
    Wavefield,
    spectrum_to_field_values,
)

#: Spectra reaching beyond k/10 are refused as non-paraxial.
PARAXIAL_FRACTION = 0.1
#: Far-field formulas are trusted beyond this multiple of the Fresnel distance.
FAR_FIELD_FACTOR = 10.0


def free_phase(kx, y, k):
    """Paraxial free-evolution factor exp(-i k_x^2 y / 2k)."""
    return np.exp(-0.5j * np.asarray(kx) ** 2 * (y / k))


def _check_paraxial(c: SpectralAmplitude, config: PhysicalConfig):
    kmax = max(abs(c.grid.kx0), abs(c.grid.kx0 + c.grid.dkx * (c.grid.count - 1)))
    if kmax > PARAXIAL_FRACTION * config.k:
        raise ValueError(
            f"spectral support reaches |kx| = {kmax:.3g} 1/m, beyond k/10 = {PARAXIAL_FRACTION * config.k:.3g}"
        )


def angular_spectrum_propagate(
    c: SpectralAmplitude, y: float, config: PhysicalConfig, sgrid: SpatialGrid | None = None
) -> Wavefield:
    """Transverse wave function at distance ``y`` behind the grating.

    psi(x, y) = (1/sqrt(2 pi)) int c(k_x) exp(i k_x x - i k_x^2 y / 2k) dk_x.

    A spectrum with nonzero ``t_ref`` is taken to be already evolved to
    y = v t_ref, and only the remaining distance is applied.
    """
    start = c.t_ref * config.v
    if y < start - 1e-15 * max(1.0, abs(start)):
        raise ValueError(f"cannot propagate backwards: y = {y!r} is before the spectrum's plane {start!r}")
    _check_paraxial(c, config)
    if sgrid is None:
        sgrid = c.grid.conjugate()
    vals = c.values * free_phase(c.kx, y - start, config.k)
    return Wavefield(sgrid, y, spectrum_to_field_values(vals, c.grid, sgrid))


def fresnel_distance(config: PhysicalConfig) -> float:
    """(n d)^2 k / 4 pi, the distance at which the grating's Fresnel number is one half."""
    return (config.n_slits * config.d) ** 2 * config.k / (4 * math.pi)


def fresnel_propagate(
    field0: Wavefield, y_rel: float, config: PhysicalConfig, out_grid: SpatialGrid | None = None
) -> Wavefield:
    """Fresnel-Kirchhoff propagation of a compactly supported field.

    psi(x, y0 + y_rel) = sqrt(k / 2 pi y_rel) exp(-i pi/4)
                         * int psi(x', y0) exp(i k (x - x')^2 / 2 y_rel) dx'.

    The kernel is split into exp(i k x^2/2y) exp(-i k x x'/y) exp(i k x'^2/2y);
    the middle factor is summed directly over the nonzero samples of
    ``field0``. Each sample is treated as constant over its cell, which adds
    the factor sinc(kappa dx / 2) with kappa = k x / y_rel.

    Raises
    ------
    ValueError
        If y_rel <= 0 or the source chirp exp(i k x'^2 / 2 y_rel) changes by
        more than pi between neighbouring samples of the support.
    """
    if not y_rel > 0:
        raise ValueError(f"y_rel must be positive, got {y_rel!r}")
    k = config.k
    grid = field0.grid
    if out_grid is None:
        out_grid = grid
    nz = np.flatnonzero(field0.values)
    out = np.zeros(out_grid.count, dtype=np.complex128)
    if nz.size == 0:
        return Wavefield(out_grid, field0.y + y_rel, out)
    xs = grid.x[nz]
    reach = np.max(np.abs(xs)) + 0.5 * grid.dx
    if k * grid.dx * reach / y_rel > math.pi:
        raise ValueError(
            f"source chirp undersampled: k dx max|x'| / y = {k * grid.dx * reach / y_rel:.3g} > pi;"
            " use angular_spectrum_propagate for wide fields"
        )
    weights = field0.values[nz] * np.exp(0.5j * k * xs * xs / y_rel) * grid.dx
    kappa0 = k * out_grid.x0 / y_rel
    dkappa = k * out_grid.dx / y_rel
    s = fourier_sum(xs, weights, kappa0, dkappa, out_grid.count, -1)
    x = out_grid.x
    kappa = k * x / y_rel
    s *= np.sinc(kappa * grid.dx / (2 * math.pi))
    pref = math.sqrt(k / (2 * math.pi * y_rel)) * np.exp(-0.25j * math.pi)
    out = pref * np.exp(0.5j * k * x * x / y_rel) * s
    return Wavefield(out_grid, field0.y + y_rel, out)


def _chirp(alpha, n):
    """exp(-i pi alpha n^2) for integer n, with the phase reduced modulo 2 pi first."""
    n = np.asarray(n, dtype=float)
    return np.exp(-1j * math.pi * np.mod(alpha * (n * n), 2.0))


def _cycles_phase(p, count, sign=-1):
    """exp(sign 2 pi i p j) for j = 0 .. count-1, accurate for large p j."""
    j = np.arange(count)
    whole = math.floor(p)
    frac = p - whole
    return np.exp(sign * 2j * math.pi * np.mod(frac * j, 1.0))


def spectrum_at(c: SpectralAmplitude, kappa0: float, dkappa: float, count: int) -> np.ndarray:
    """Band-limited interpolation of ``c`` at kappa0 + j dkappa, j = 0 .. count-1.

    The spectrum is expanded in the plane waves of its conjugate spatial grid,
    psi_m, and resummed as (dx/sqrt(2 pi)) sum_m psi_m exp(-i kappa_j x_m)
    with a chirp-z (Bluestein) transform. Points outside the sampled band are
    returned as zero.
    """
    sgrid = c.grid.conjugate()
    n = sgrid.count
    psi = spectrum_to_field_values(c.values, c.grid, sgrid)
    dx = sgrid.dx
    alpha = dkappa * dx / (2 * math.pi)
    # exp(-i kappa_j x_m) = exp(-i kappa_j x0) exp(-i kappa0 dx m) exp(-2 pi i alpha j m)
    a = psi * _cycles_phase(kappa0 * dx / (2 * math.pi), n) * _chirp(alpha, np.arange(n))
    size = 1 << math.ceil(math.log2(n + count - 1))
    b = np.zeros(size, dtype=np.complex128)
    b[:count] = np.conj(_chirp(alpha, np.arange(count)))
    b[size - n + 1:] = np.conj(_chirp(alpha, np.arange(-(n - 1), 0)))
    conv = np.fft.ifft(np.fft.fft(a, size) * np.fft.fft(b))[:count]
    x0_cycles = sgrid.x0 / (2 * math.pi)
    start = math.fmod(kappa0 * x0_cycles, 1.0)
    head = np.exp(-2j * math.pi * start) * _cycles_phase(dkappa * x0_cycles, count)
    vals = head * _chirp(alpha, np.arange(count)) * conv * (dx / math.sqrt(2 * math.pi))
    kappa = kappa0 + dkappa * np.arange(count)
    lo, hi = c.grid.kx0, c.grid.kx0 + c.grid.dkx * (c.grid.count - 1)
    vals[(kappa < lo) | (kappa > hi)] = 0.0
    return vals


def _warn_if_near(y, config):
    if y < FAR_FIELD_FACTOR * fresnel_distance(config):
        warnings.warn(
            f"y = {y:.3g} m is inside {FAR_FIELD_FACTOR:g} Fresnel distances"
            f" ({FAR_FIELD_FACTOR * fresnel_distance(config):.3g} m); far-field form is approximate",
            stacklevel=3,
        )


def far_field(
    c: SpectralAmplitude, y: float, config: PhysicalConfig, sgrid: SpatialGrid | None = None
) -> Wavefield:
    """Far-field wave function sqrt(k/y) exp(-i pi/4) exp(i k x^2/2y) c(k x / y)."""
    if not y > 0:
        raise ValueError(f"y must be positive, got {y!r}")
    _warn_if_near(y, config)
    if sgrid is None:
        sgrid = c.grid.conjugate()
    k = config.k
    x = sgrid.x
    cv = spectrum_at(c, k * sgrid.x0 / y, k * sgrid.dx / y, sgrid.count)
    vals = math.sqrt(k / y) * np.exp(-0.25j * math.pi) * np.exp(0.5j * k * x * x / y) * cv
    return Wavefield(sgrid, y, vals)


def far_field_kicked(c: SpectralAmplitude, event, y: float, config: PhysicalConfig, sgrid: SpatialGrid | None = None) -> Wavefield:
    """Far field of a wave kicked by ``event``.

    psi(x, y) = sqrt(k/y) exp(-i pi/4) exp(-i dk^2 y / 2k) exp(i k (x + dx0)^2 / 2y)
                * c(k (x + dx0) / y - dk).
    """
    if not y > event.y12_prime:
        raise ValueError("far field of a kicked wave needs y beyond the kick")
    if event.dk_x == 0:
        return far_field(c, y, config, sgrid)
    _warn_if_near(y, config)
    if sgrid is None:
        sgrid = c.grid.conjugate()
    k, dk = config.k, event.dk_x
    xs = sgrid.x + event.dx0
    cv = spectrum_at(c, k * (sgrid.x0 + event.dx0) / y - dk, k * sgrid.dx / y, sgrid.count)
    phase = np.exp(-0.25j * math.pi - 0.5j * dk * dk * y / k) * np.exp(0.5j * k * xs * xs / y)
    return Wavefield(sgrid, y, math.sqrt(k / y) * phase * cv)


def beam_region(config: PhysicalConfig, y: float, sgrid: SpatialGrid) -> np.ndarray:
    """Samples within 2.5 first-order beam offsets of the axis at distance ``y``.

    This covers orders -1, 0, +1, +2 and excludes the band edge, where the
    sampled spectrum is truncated.
    """
    return np.abs(sgrid.x) <= 2.5 * config.diffraction_angle * y


def relative_l2(a, b, region=None) -> float:
    """||a - b|| / ||b|| over ``region`` (all samples by default)."""
    a = np.asarray(a)
    b = np.asarray(b)
    if region is not None:
        a, b = a[region], b[region]
    den = np.linalg.norm(b)
    if den == 0:
        return float(np.linalg.norm(a))
    return float(np.linalg.norm(a - b) / den)
