"""Binary amplitude gratings: transmission masks and transverse-momentum spectra."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .kernels import fourier_sum
from .physics import SpatialGrid, SpectralAmplitude, SpectralGrid, Wavefield

_SERIES_EPS = 1e-4


@dataclass(frozen=True)
class GratingSpec:
    """``n_slits`` open slits of width ``delta`` repeated with period ``d``.

    Slit j (j = 0 .. n-1) is centred at
    ``center + lateral_shift + (j - (n - 1)/2) * d``.
    """

    d: float
    delta: float
    n_slits: int
    lateral_shift: float = 0.0
    center: float = 0.0

    def __post_init__(self):
        if not (self.d > 0 and 0 < self.delta <= self.d):
            raise ValueError(f"need 0 < delta <= d, got delta={self.delta!r}, d={self.d!r}")
        if int(self.n_slits) != self.n_slits or self.n_slits < 1:
            raise ValueError(f"n_slits must be a positive integer, got {self.n_slits!r}")

    @property
    def offset(self) -> float:
        return self.center + self.lateral_shift

    @property
    def first_slit_center(self) -> float:
        return self.offset - 0.5 * (self.n_slits - 1) * self.d

    def slit_edges(self):
        """Left and right edges of every slit, as two arrays."""
        centers = self.first_slit_center + self.d * np.arange(self.n_slits)
        return centers - 0.5 * self.delta, centers + 0.5 * self.delta

    @property
    def extent(self):
        left, right = self.slit_edges()
        return float(left[0]), float(right[-1])

    def shifted(self, shift) -> "GratingSpec":
        return GratingSpec(self.d, self.delta, self.n_slits, self.lateral_shift + shift, self.center)


def grating_for_grid(d, delta, grid: SpatialGrid, like: GratingSpec | None = None, shift=0.0) -> GratingSpec:
    """A grating filling ``grid`` on the same slit lattice as ``like``.

    Used for the second and third gratings, which are wider than any beam.
    """
    periods = int(math.floor(grid.span / d))
    if like is not None and (periods - like.n_slits) % 2:
        periods -= 1  # same parity as ``like`` keeps the slit lattice aligned
    center = 0.0 if like is None else like.center
    return GratingSpec(d, delta, max(periods, 1), lateral_shift=shift, center=center)


def _open_measure(g: GratingSpec, x):
    """Total slit length in (-inf, x]."""
    left0 = g.first_slit_center - 0.5 * g.delta
    u = np.asarray(x, dtype=float) - left0
    full = np.floor(u / g.d)
    partial = np.clip(u - full * g.d, 0.0, g.delta)
    inside = (full >= 0) & (full < g.n_slits)
    return np.clip(full, 0, g.n_slits) * g.delta + np.where(inside, partial, 0.0)


def slit_mask(g: GratingSpec, grid: SpatialGrid) -> np.ndarray:
    """Open fraction of every grid cell (1 inside slits, 0 on the bars).

    Cells cut by a slit edge get the covered fraction, so the mask integrates
    to the exact open length.
    """
    lo, hi = g.extent
    if lo < grid.left_edge or hi > grid.left_edge + grid.span:
        warnings.warn("grating extends beyond the spatial grid; outer slits are clipped", stacklevel=2)
    x = grid.x
    mask = (_open_measure(g, x + 0.5 * grid.dx) - _open_measure(g, x - 0.5 * grid.dx)) / grid.dx
    mask[np.abs(mask) < 1e-9] = 0.0
    mask[np.abs(mask - 1) < 1e-9] = 1.0
    return mask


def analytic_spectrum(g: GratingSpec, kx, amplitude=None):
    """Closed-form c(k_x) of a plane wave behind ``g``.

    With ``amplitude=None`` this is the normalised multi-slit amplitude

        c = sqrt(2) / (sqrt(pi n) delta) * sin(k_x delta/2)/k_x * sin(n k_x d/2)/sin(k_x d/2),

    which is the plane-wave spectrum for the incident amplitude
    1/(sqrt(n) delta). Passing ``amplitude`` rescales it to a plane wave of
    that amplitude. A laterally displaced grating picks up exp(-i k_x offset).

    Both removable singularities (k_x = 0 and k_x d/2 = m pi) are evaluated by
    series expansion rather than division.
    """
    kx = np.asarray(kx, dtype=float)
    n, d, delta = g.n_slits, g.d, g.delta

    z = 0.5 * kx * delta
    small = np.abs(z) < _SERIES_EPS
    safe_kx = np.where(small, 1.0, kx)
    envelope = np.where(small, 0.5 * delta * (1 - z * z / 6), np.sin(z) / safe_kx)

    u = 0.5 * kx * d
    order = np.round(u / math.pi)
    e = u - order * math.pi
    near = np.abs(e) < _SERIES_EPS
    sign = np.where((order * (n - 1)) % 2 == 0, 1.0, -1.0)
    safe_den = np.where(near, 1.0, np.sin(u))
    dirichlet = np.where(
        near,
        sign * n * (1 - (n * n - 1) * e * e / 6),
        np.sin(n * u) / safe_den,
    )

    c = math.sqrt(2) / (math.sqrt(math.pi * n) * delta) * envelope * dirichlet
    if amplitude is not None:
        c = c * (amplitude * math.sqrt(n) * delta)
    if g.offset != 0.0:
        c = c * np.exp(-1j * kx * g.offset)
    return c


def plane_wave(grid: SpatialGrid, amplitude=1.0, y=0.0) -> Wavefield:
    return Wavefield(grid, y, np.full(grid.count, amplitude, dtype=np.complex128))


def _sinc(z):
    small = np.abs(z) < 1e-4
    safe = np.where(small, 1.0, z)
    return np.where(small, 1 - z * z / 6, np.sin(z) / safe)


def _sinc_prime(z):
    small = np.abs(z) < 1e-3
    safe = np.where(small, 1.0, z)
    return np.where(small, -z / 3 + z**3 / 30, (safe * np.cos(safe) - np.sin(safe)) / (safe * safe))


def _slit_segments(psi: Wavefield, g: GratingSpec):
    """Piecewise-linear segments of psi restricted to the open slits."""
    x = psi.grid.x
    lo_grid, hi_grid = x[0], x[-1]
    lefts, rights = g.slit_edges()
    if lefts[0] < psi.grid.left_edge or rights[-1] > psi.grid.left_edge + psi.grid.span:
        warnings.warn("grating extends beyond the incident-field grid; outer slits are clipped", stacklevel=3)
    lefts = np.clip(lefts, lo_grid, hi_grid)
    rights = np.clip(rights, lo_grid, hi_grid)
    pts = []
    for left, right in zip(lefts, rights):
        if right <= left:
            continue
        i0 = np.searchsorted(x, left, side="right")
        i1 = np.searchsorted(x, right, side="left")
        p = np.concatenate(([left], x[i0:i1], [right]))
        pts.append((p[:-1], p[1:]))
    if not pts:
        empty = np.zeros(0)
        return empty, empty, empty.astype(complex), empty.astype(complex)
    a = np.concatenate([p[0] for p in pts])
    b = np.concatenate([p[1] for p in pts])
    keep = (b - a) > 1e-12 * psi.grid.dx
    a, b = a[keep], b[keep]
    vals = psi.values
    fa = np.interp(a, x, vals.real) + 1j * np.interp(a, x, vals.imag)
    fb = np.interp(b, x, vals.real) + 1j * np.interp(b, x, vals.imag)
    return a, b, fa, fb


def numeric_spectrum(field_before: Wavefield, g: GratingSpec, sgrid: SpectralGrid) -> SpectralAmplitude:
    """Spectrum of the field just behind ``g`` from the incident field.

    Integrates (1/sqrt(2 pi)) psi(x) exp(-i k_x x) over the open slits only,
    with psi linearly interpolated between its samples and the slit edges
    taken at their exact positions. Each linear piece is integrated in closed
    form, so a plane wave reproduces :func:`analytic_spectrum` to rounding.

    Raises
    ------
    ValueError
        If ``sgrid`` is too coarse to resolve the Dirichlet peaks of ``g``.
    """
    limit = 2 * math.pi / (16 * g.n_slits * g.d)
    if sgrid.dkx > limit * (1 + 1e-12):
        raise ValueError(f"dkx = {sgrid.dkx:.4g} 1/m undersamples the Dirichlet peaks (need <= {limit:.4g})")
    a, b, fa, fb = _slit_segments(field_before, g)
    kx = sgrid.kx
    total = np.zeros(sgrid.count, dtype=np.complex128)
    if a.size == 0:
        return SpectralAmplitude(sgrid, total)
    h = b - a
    mid = 0.5 * (a + b)
    mean_w = 0.5 * (fa + fb) * h
    slope_w = 0.5 * (fb - fa) * h
    # segments of equal length share the same kx-dependent factors
    keys = np.round(h / field_before.grid.dx, 9)
    for key in np.unique(keys):
        sel = keys == key
        hh = h[sel][0]
        z = 0.5 * kx * hh
        if np.any(mean_w[sel]):
            total += _sinc(z) * fourier_sum(mid[sel], mean_w[sel], sgrid.kx0, sgrid.dkx, sgrid.count, -1)
        if np.any(slope_w[sel]):
            total += 1j * _sinc_prime(z) * fourier_sum(mid[sel], slope_w[sel], sgrid.kx0, sgrid.dkx, sgrid.count, -1)
    return SpectralAmplitude(sgrid, total / math.sqrt(2 * math.pi))


def spectrum_of(g: GratingSpec, sgrid: SpectralGrid, amplitude=None) -> SpectralAmplitude:
    """:func:`analytic_spectrum` sampled on ``sgrid``."""
    return SpectralAmplitude(sgrid, analytic_spectrum(g, sgrid.kx, amplitude))
