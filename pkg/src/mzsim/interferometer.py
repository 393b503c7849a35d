"""Three-grating interferometer: transmission, fringe fits and contrast."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq, curve_fit, minimize_scalar

from .grating import GratingSpec, analytic_spectrum, grating_for_grid, slit_mask
from .physics import (
    PhysicalConfig,
    SpectralAmplitude,
    Wavefield,
    field_to_spectrum_values,
    make_grids,
    spectrum_to_field_values,
)
from .propagate import free_phase
from .scattering import ScatteringEvent, make_event, p1_quadrature, y12_prime_for_ratio


class FitError(ValueError):
    """The fringe samples cannot determine a sinusoid."""


@dataclass(frozen=True)
class FringeFit:
    """T(dx3) = a + b cos(2 pi dx3 / period + phi)."""

    a: float
    b: float
    phi: float
    period: float
    residual_rms: float

    def __call__(self, dx3):
        return self.a + self.b * np.cos(2 * math.pi * np.asarray(dx3) / self.period + self.phi)

    @property
    def contrast(self) -> float:
        return self.b / self.a


@dataclass(frozen=True)
class ContrastResult:
    C0: float
    C: float
    B_numeric: float
    B_analytic: float
    dp_over_lambda_i: float


def _wrap(phi):
    """Map to (-pi, pi]."""
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w == -math.pi else w


class Interferometer:
    """Wave-optics model of the grating sequence for one configuration.

    Grating 1 has ``config.n_slits`` slits centred on the axis and is lit by a
    plane wave. Gratings 2 and 3 share its period, slit width and slit
    lattice and span the whole grid.

    Parameters
    ----------
    config : PhysicalConfig
    oversample : int
        Spatial refinement passed to :func:`make_grids`.
    window_scale : float
        Width of the integration window at the third grating in units of
        n_slits * d.
    """

    def __init__(self, config: PhysicalConfig, oversample: int = 1, window_scale: float = 1.0):
        self.config = config
        self.sgrid, self.kgrid = make_grids(config, oversample)
        self.g1 = GratingSpec(config.d, config.delta, config.n_slits)
        self.g2 = grating_for_grid(config.d, config.delta, self.sgrid, like=self.g1)
        kx = self.kgrid.kx
        self.c1 = SpectralAmplitude(self.kgrid, analytic_spectrum(self.g1, kx, amplitude=config.amplitude))
        self.mask2 = slit_mask(self.g2, self.sgrid)
        self._prop12 = self.c1.values * free_phase(kx, config.y12, config.k)
        self._prop23 = free_phase(kx, config.y23, config.k)
        self.window_width = window_scale * config.n_slits * config.d
        # a G3 slit centre on the same lattice as G2
        self.slit3_center = math.remainder(self.g2.first_slit_center, config.d)
        self._off_intensity = None
        self._window_center = None

    # -- fields -----------------------------------------------------------
    def field_at_g2(self, event: ScatteringEvent | None = None) -> Wavefield:
        """Wave function arriving at the second grating."""
        cfg = self.config
        if event is None or event.dk_x == 0:
            vals = spectrum_to_field_values(self._prop12, self.kgrid, self.sgrid)
            return Wavefield(self.sgrid, cfg.y12, vals)
        k, dk = cfg.k, event.dk_x
        s = dk * (cfg.y12 - event.y12_prime) / k
        vals = self._prop12 * np.exp(-1j * self.kgrid.kx * s)
        psi = spectrum_to_field_values(vals, self.kgrid, self.sgrid)
        psi *= np.exp(1j * dk * (self.sgrid.x + event.dx0) - 1j * dk * dk * cfg.y12 / k)
        return Wavefield(self.sgrid, cfg.y12, psi)

    def field_at_g3(self, event: ScatteringEvent | None = None) -> Wavefield:
        """Wave function arriving at the third grating (G2 applied as a mask)."""
        psi2 = self.field_at_g2(event).values * self.mask2
        u = field_to_spectrum_values(psi2, self.sgrid, self.kgrid) * self._prop23
        vals = spectrum_to_field_values(u, self.kgrid, self.sgrid)
        return Wavefield(self.sgrid, self.config.y12 + self.config.y23, vals)

    def intensity_at_g3(self, event: ScatteringEvent | None = None) -> np.ndarray:
        if event is None or event.dk_x == 0:
            if self._off_intensity is None:
                self._off_intensity = self.field_at_g3(None).intensity
            return self._off_intensity
        return self.field_at_g3(event).intensity

    # -- window -----------------------------------------------------------
    @property
    def window_center(self) -> float:
        """Peak of the period-averaged laser-off intensity near the recombined beams."""
        if self._window_center is None:
            cfg = self.config
            intensity = self.intensity_at_g3(None)
            per = int(round(cfg.d / self.sgrid.dx))
            smooth = np.convolve(intensity, np.ones(per) / per, mode="same")
            x = self.sgrid.x
            target = cfg.diffraction_angle * cfg.y23
            idx = np.flatnonzero((x > 0.5 * target) & (x < 1.5 * target))
            i = idx[np.argmax(smooth[idx])]
            lo, mid, hi = smooth[i - 1], smooth[i], smooth[i + 1]
            den = lo - 2 * mid + hi
            frac = 0.5 * (lo - hi) / den if den != 0 else 0.0
            self._window_center = float(x[i] + frac * self.sgrid.dx)
        return self._window_center

    def window(self, event: ScatteringEvent | None = None):
        """Integration interval at the third grating.

        A kick translates the whole pattern by dk (y12 + y23 - y12') / k and
        the window follows it.
        """
        c = self.window_center
        if event is not None and event.dk_x != 0:
            cfg = self.config
            c += event.dk_x * (cfg.y12 + cfg.y23 - event.y12_prime) / cfg.k
        half = 0.5 * self.window_width
        return c - half, c + half

    # -- transmission -----------------------------------------------------
    def _cumulative(self, intensity):
        dx = self.sgrid.dx
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (intensity[1:] + intensity[:-1]) * dx)))
        return cum

    def _integral_to(self, intensity, cum, pts):
        """Integral of the linearly interpolated intensity from x[0] to ``pts``."""
        x0, dx = self.sgrid.x0, self.sgrid.dx
        u = (np.asarray(pts) - x0) / dx
        i = np.clip(np.floor(u).astype(int), 0, self.sgrid.count - 2)
        t = (u - i) * dx
        slope = (intensity[i + 1] - intensity[i]) / dx
        return cum[i] + intensity[i] * t + 0.5 * slope * t * t

    def transmission_scan(self, event: ScatteringEvent | None, dx3) -> np.ndarray:
        """Integrated intensity through the open G3 slits inside the window for each shift."""
        return self.transmission_of(self.intensity_at_g3(event), dx3, self.window(event))

    def transmission_of(self, intensity, dx3, window) -> np.ndarray:
        """Integral of ``intensity`` over the G3 slits (shifted by each dx3) within ``window``.

        The intensity is interpolated linearly between samples and integrated
        exactly, including the fractional pieces at slit and window edges.
        """
        intensity = np.asarray(intensity, dtype=float)
        cum = self._cumulative(intensity)
        lo, hi = window
        d, delta = self.config.d, self.config.delta
        out = []
        for shift in np.atleast_1d(np.asarray(dx3, dtype=float)):
            c0 = self.slit3_center + shift
            j0 = math.floor((lo - c0 - 0.5 * delta) / d)
            j1 = math.ceil((hi - c0 + 0.5 * delta) / d)
            centers = c0 + d * np.arange(j0, j1 + 1)
            left = np.clip(centers - 0.5 * delta, lo, hi)
            right = np.clip(centers + 0.5 * delta, lo, hi)
            open_ = right > left
            total = self._integral_to(intensity, cum, right[open_]) - self._integral_to(intensity, cum, left[open_])
            out.append(float(np.sum(total)))
        return np.array(out)

    def averaged_scan(self, y12_prime: float, dx3, node_count: int = 64) -> np.ndarray:
        """Transmission averaged over the single-photon momentum distribution."""
        nodes, weights = p1_quadrature(self.config.k_i, node_count)
        acc = np.zeros(len(np.atleast_1d(dx3)))
        for dk, w in zip(nodes, weights):
            acc += w * self.transmission_scan(make_event(self.config, y12_prime, dk), dx3)
        return acc


@lru_cache(maxsize=4)
def pipeline(config: PhysicalConfig, oversample: int = 1, window_scale: float = 1.0) -> Interferometer:
    """Cached :class:`Interferometer` for ``config``."""
    return Interferometer(config, oversample, window_scale)


def transmitted_intensity(config, event, dx3, oversample=1) -> float:
    """Intensity transmitted through the third grating shifted by ``dx3``."""
    return float(pipeline(config, oversample).transmission_scan(event, [dx3])[0])


def default_shifts(d, per_period=16, periods=2) -> np.ndarray:
    return d * np.arange(per_period * periods) / per_period


def scan_third_grating(config, event, dx3_samples, oversample=1):
    """List of (dx3, T) pairs in input order."""
    dx3 = np.asarray(dx3_samples, dtype=float)
    t = pipeline(config, oversample).transmission_scan(event, dx3)
    return list(zip(dx3.tolist(), t.tolist()))


def average_transmission(config, y12_prime, dx3, node_count=64, oversample=1) -> float:
    """Transmission at one shift averaged over the photon momentum transfer."""
    return float(pipeline(config, oversample).averaged_scan(y12_prime, [dx3], node_count)[0])


def _as_samples(samples):
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise FitError("samples must be a sequence of (dx3, T) pairs")
    return arr[:, 0], arr[:, 1]


def fit_fringe(samples, d) -> FringeFit:
    """Least-squares fit of a + b cos(2 pi dx3/d + phi) with the period fixed.

    Raises
    ------
    FitError
        If the samples do not determine the three coefficients.
    """
    x, t = _as_samples(samples)
    ph = 2 * math.pi * x / d
    design = np.column_stack([np.ones_like(ph), np.cos(ph), np.sin(ph)])
    if len(x) < 3 or np.linalg.matrix_rank(design) < 3:
        raise FitError("fringe samples do not span enough distinct phases")
    coef, *_ = np.linalg.lstsq(design, t, rcond=None)
    a, cc, ss = coef
    b = math.hypot(cc, ss)
    resid = t - design @ coef
    scale = max(abs(a), np.max(np.abs(t)), np.finfo(float).tiny)
    if b <= 1e-13 * scale:
        b, phi = 0.0, 0.0
    else:
        phi = _wrap(math.atan2(-ss, cc))
    return FringeFit(float(a), float(b), float(phi), float(d), float(np.sqrt(np.mean(resid**2))))


def fit_fringe_free_period(samples, d_guess) -> FringeFit:
    """Nonlinear fit with the period as a fourth parameter (diagnostic)."""
    x, t = _as_samples(samples)
    start = fit_fringe(samples, d_guess)

    def model(xx, a, b, phi, period):
        return a + b * np.cos(2 * math.pi * xx / period + phi)

    p, _ = curve_fit(model, x, t, p0=[start.a, max(start.b, 1e-300), start.phi, d_guess])
    a, b, phi, period = p
    if b < 0:
        b, phi = -b, phi + math.pi
    resid = t - model(x, *p)
    return FringeFit(float(a), float(b), _wrap(float(phi)), float(period), float(np.sqrt(np.mean(resid**2))))


_B_SERIES_X = 0.1


def analytic_B(r):
    """Contrast factor of the photon-averaged fringe at d_p = r lambda_i.

    With x = 2 pi r,

        B = (3/2) [(1 - 1/x^2) sin(x)/x + cos(x)/x^2],

    and the series 1 - x^2/5 + 3 x^4/280 - x^6/3780 for small x.
    """
    r = np.asarray(r, dtype=float)
    x = 2 * math.pi * r
    small = np.abs(x) < _B_SERIES_X
    xs = np.where(small, 1.0, x)
    exact = 1.5 * ((1 - 1 / xs**2) * np.sin(xs) / xs + np.cos(xs) / xs**2)
    x2 = x * x
    series = 1 - x2 / 5 + 3 * x2 * x2 / 280 - x2**3 / 3780
    out = np.where(small, series, exact)
    return float(out) if out.ndim == 0 else out


def B_zero(index: int = 1) -> float:
    """The ``index``-th positive zero of :func:`analytic_B` in r."""
    grid = np.linspace(0.05, index + 2.0, 4000)
    vals = analytic_B(grid)
    crossings = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if len(crossings) < index:
        raise ValueError("zero not bracketed")
    i = crossings[index - 1]
    return brentq(analytic_B, grid[i], grid[i + 1], xtol=1e-14)


def B_revival(after_zero: int = 1):
    """(r, |B|) of the largest |B| between zeros ``after_zero`` and ``after_zero + 1``."""
    lo, hi = B_zero(after_zero), B_zero(after_zero + 1)
    res = minimize_scalar(lambda r: -abs(analytic_B(r)), bounds=(lo, hi), method="bounded", options={"xatol": 1e-10})
    return float(res.x), float(abs(analytic_B(res.x)))


def contrast(fit_off: FringeFit, fit_on: FringeFit, r=None) -> ContrastResult:
    """Laser-off and laser-on contrasts and their ratio.

    Raises
    ------
    FitError
        If either fit has a non-positive offset.
    """
    if fit_off.a <= 0 or fit_on.a <= 0:
        raise FitError("fringe offset a must be positive")
    c0 = abs(fit_off.b / fit_off.a)
    c = abs(fit_on.b / fit_on.a)
    if c0 == 0:
        raise FitError("laser-off fringe has zero contrast")
    b_an = float("nan") if r is None else float(analytic_B(r))
    return ContrastResult(C0=c0, C=c, B_numeric=c / c0, B_analytic=b_an, dp_over_lambda_i=float("nan") if r is None else float(r))


@dataclass(frozen=True)
class CurvePoint:
    r: float
    B_numeric_abs: float
    B_analytic_abs: float
    phase_shift: float
    fit: FringeFit


def contrast_curve(config, r_values, node_count=64, oversample=1, workers=1, dx3=None):
    """Relative contrast from simulated averaged fringes at each r = d_p / lambda_i.

    ``phase_shift`` is the laser-off fringe phase minus the averaged one,
    which approaches d_p k_i (plus pi where B < 0).

    Raises
    ------
    ValueError
        If some r puts the kick at or beyond the second grating.
    """
    r_values = [float(r) for r in r_values]
    for r in r_values:
        yp = y12_prime_for_ratio(config, r)
        if not (0 < yp < config.y12):
            raise ValueError(f"r = {r} puts the kick at y12' = {yp:.4g} m, outside (0, y12)")
    ifm = pipeline(config, oversample)
    if dx3 is None:
        dx3 = default_shifts(config.d)
    samples_x = np.asarray(dx3, dtype=float)
    off = fit_fringe(np.column_stack([samples_x, ifm.transmission_scan(None, samples_x)]), config.d)

    def one(r):
        t = ifm.averaged_scan(y12_prime_for_ratio(config, r), samples_x, node_count)
        fit_on = fit_fringe(np.column_stack([samples_x, t]), config.d)
        res = contrast(off, fit_on, r)
        return CurvePoint(r, res.B_numeric, abs(res.B_analytic), _wrap(off.phi - fit_on.phi), fit_on)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(one, r_values))
    else:
        points = [one(r) for r in r_values]
    return off, points
