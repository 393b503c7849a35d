"""Physical constants, configuration, sampling grids and field containers.

Everything is SI. The global time factor exp(-i omega t) and the longitudinal
plane wave exp(i k y) are never sampled; all fields stored here are the
transverse factors.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

HBAR = 1.054571817e-34  # J s

#: Effective sodium mass that turns v = 1400 m/s into k = 5.09067e11 1/m.
#: The tabulated atomic mass (3.81754e-26 kg) gives k = 5.068e11 instead.
REFERENCE_MASS_KG = 3.834627e-26
REFERENCE_V_MPS = 1400.0
REFERENCE_LAMBDA_I_M = 589e-9

#: Minimum k*d/(2 pi) accepted as paraxial (the reference beam has ~1.6e4).
MIN_PERIODS_PER_WAVELENGTH = 100.0


class ConfigError(ValueError):
    """A physical parameter is missing, non-positive or inconsistent."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class PhysicalConfig:
    """Beam, grating and photon parameters of the interferometer.

    Build instances with :func:`make_config`, which validates the inputs.
    """

    mass: float
    v: float
    k_i: float
    d: float
    delta: float
    n_slits: int
    y12: float
    y23: float
    amplitude: complex = 1.0

    @property
    def k(self) -> float:
        """Longitudinal wave number m v / hbar."""
        return self.mass * self.v / HBAR

    @property
    def lambda_dB(self) -> float:
        return 2 * math.pi / self.k

    @property
    def lambda_i(self) -> float:
        return 2 * math.pi / self.k_i

    @property
    def diffraction_angle(self) -> float:
        """First-order deflection 2 pi / (k d), i.e. lambda_dB / d."""
        return 2 * math.pi / (self.k * self.d)

    def as_dict(self) -> dict:
        return {
            "mass_kg": self.mass,
            "v_mps": self.v,
            "k_i_per_m": self.k_i,
            "d_m": self.d,
            "delta_m": self.delta,
            "n_slits": self.n_slits,
            "y12_m": self.y12,
            "y23_m": self.y23,
            "amplitude": self.amplitude,
        }


def make_config(
    *,
    mass=REFERENCE_MASS_KG,
    v=REFERENCE_V_MPS,
    k_i=None,
    lambda_i=None,
    d=2e-7,
    delta=1e-7,
    n_slits=24,
    y12=0.65,
    y23=0.65,
    amplitude=1.0,
) -> PhysicalConfig:
    """Validate raw parameters and return a :class:`PhysicalConfig`.

    Defaults are the parameters of the reference sodium experiment. The photon
    may be given either as a wave number ``k_i`` or a wavelength ``lambda_i``
    (589 nm when neither is given).

    Raises
    ------
    ConfigError
        Naming the first offending field.
    """
    if k_i is not None and lambda_i is not None:
        raise ConfigError("k_i", "give either k_i or lambda_i, not both")
    if k_i is None:
        lam = REFERENCE_LAMBDA_I_M if lambda_i is None else lambda_i
        _require_positive("lambda_i", lam)
        k_i = 2 * math.pi / lam
    for name, value in (
        ("mass", mass),
        ("v", v),
        ("k_i", k_i),
        ("d", d),
        ("delta", delta),
        ("y12", y12),
        ("y23", y23),
    ):
        _require_positive(name, value)
    if delta > d:
        raise ConfigError("delta", f"slit width {delta!r} exceeds the period {d!r}")
    if int(n_slits) != n_slits or n_slits < 1:
        raise ConfigError("n_slits", f"must be a positive integer, got {n_slits!r}")
    try:
        amplitude = complex(amplitude)
    except (TypeError, ValueError):
        raise ConfigError("amplitude", f"not a number: {amplitude!r}") from None
    if not np.isfinite(amplitude):
        raise ConfigError("amplitude", "must be finite")
    cfg = PhysicalConfig(
        mass=float(mass),
        v=float(v),
        k_i=float(k_i),
        d=float(d),
        delta=float(delta),
        n_slits=int(n_slits),
        y12=float(y12),
        y23=float(y23),
        amplitude=amplitude,
    )
    if cfg.k * cfg.d < 2 * math.pi * MIN_PERIODS_PER_WAVELENGTH:
        raise ConfigError(
            "d", f"k*d = {cfg.k * cfg.d:.3g} is not much larger than 2 pi (paraxial regime violated)"
        )
    return cfg


def reference_config(**overrides) -> PhysicalConfig:
    """Reference parameters (sodium, v = 1400 m/s, 589 nm photons), optionally overridden."""
    return make_config(**overrides)


def _require_positive(name, value):
    try:
        ok = np.isfinite(value) and value > 0
    except TypeError:
        ok = False
    if not ok:
        raise ConfigError(name, f"must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform transverse sampling x_m = x0 + m dx, m = 0 .. count-1.

    ``x0`` is the position of the first sample; each sample stands for the
    cell [x_m - dx/2, x_m + dx/2].
    """

    x0: float
    dx: float
    count: int

    def __post_init__(self):
        if not self.dx > 0:
            raise ValueError("dx must be positive")
        if self.count < 2 or self.count & (self.count - 1):
            raise ValueError(f"count must be a power of two, got {self.count}")

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.count)

    @property
    def span(self) -> float:
        return self.dx * self.count

    @property
    def left_edge(self) -> float:
        return self.x0 - 0.5 * self.dx

    def conjugate(self, kx0=None) -> "SpectralGrid":
        """FFT-conjugate spectral grid, centred on k_x = 0 unless ``kx0`` is given."""
        dkx = 2 * math.pi / self.span
        if kx0 is None:
            kx0 = -(self.count // 2) * dkx
        return SpectralGrid(kx0=kx0, dkx=dkx, count=self.count)


@dataclass(frozen=True)
class SpectralGrid:
    """Uniform transverse wave-number sampling kx_j = kx0 + j dkx."""

    kx0: float
    dkx: float
    count: int

    def __post_init__(self):
        if not self.dkx > 0:
            raise ValueError("dkx must be positive")
        if self.count < 2:
            raise ValueError("count must be at least 2")

    @property
    def kx(self) -> np.ndarray:
        return self.kx0 + self.dkx * np.arange(self.count)

    @property
    def span(self) -> float:
        return self.dkx * self.count

    def shifted(self, dk) -> "SpectralGrid":
        return SpectralGrid(kx0=self.kx0 + dk, dkx=self.dkx, count=self.count)

    def conjugate(self, x0=None) -> SpatialGrid:
        dx = 2 * math.pi / self.span
        if x0 is None:
            x0 = -(self.count // 2) * dx + 0.5 * dx
        return SpatialGrid(x0=x0, dx=dx, count=self.count)


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Wavefield:
    """Transverse wave function psi(x) at longitudinal position ``y``."""

    grid: SpatialGrid
    y: float
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.grid.count,):
            raise ValueError(f"expected {self.grid.count} samples, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("wavefield contains non-finite samples")
        object.__setattr__(self, "values", vals)

    @property
    def x(self) -> np.ndarray:
        return self.grid.x

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    def norm(self) -> float:
        """Integral of |psi|^2 over the grid."""
        return float(np.sum(self.intensity) * self.grid.dx)


@dataclass(frozen=True, eq=False)
class SpectralAmplitude:
    """Transverse-momentum amplitude c(k_x) at reference time ``t_ref``."""

    grid: SpectralGrid
    values: np.ndarray = field(repr=False)
    t_ref: float = 0.0

    def __post_init__(self):
        vals = _frozen(self.values)
        if vals.shape != (self.grid.count,):
            raise ValueError(f"expected {self.grid.count} samples, got {vals.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("spectrum contains non-finite samples")
        object.__setattr__(self, "values", vals)

    @property
    def kx(self) -> np.ndarray:
        return self.grid.kx

    def edge_ratio(self) -> float:
        """Largest |c| at the two grid ends relative to the peak |c|.

        Spectra of sharp-edged apertures decay only like 1/k_x, so this is a
        diagnostic of truncation rather than something to enforce.
        """
        mag = np.abs(self.values)
        peak = mag.max()
        if peak == 0:
            return 0.0
        return float(max(mag[0], mag[-1]) / peak)


def make_grids(config: PhysicalConfig, oversample: int = 1):
    """Choose conjugate spatial and spectral grids for ``config``.

    The spatial step is d/16 (finer when the slit is narrower than 6 steps,
    and divided by ``oversample``), always an integer fraction of d. The
    sample count is the smallest power of two whose span

    * is at least 4 (2 pi / k d)(y12 + y23), four times the beam separation
      at the third grating,
    * gives dkx <= 2 pi / (16 n d), resolving the Dirichlet peaks, and
    * is at least 2 pi (y12 + y23) / (k dx), so that every component below
      the grid Nyquist wave number stays inside the window up to the third
      grating instead of wrapping around.

    Slit edges of gratings centred on x = 0 fall on cell boundaries.
    """
    if int(oversample) != oversample or oversample < 1:
        raise ValueError(f"oversample must be a positive integer, got {oversample!r}")
    d, delta, k = config.d, config.delta, config.k
    per_period = 16
    while d / per_period > delta / 6:
        per_period += 1
    dx = d / (per_period * int(oversample))
    total = config.y12 + config.y23
    span_needed = max(
        4 * config.diffraction_angle * total,
        16 * config.n_slits * d,
        2 * math.pi * total / (k * dx),
    )
    count = 1 << max(1, math.ceil(math.log2(span_needed / dx)))
    # count is even and the span a multiple of dx; x = 0 sits on a cell boundary
    sgrid = SpatialGrid(x0=-(count // 2) * dx + 0.5 * dx, dx=dx, count=count)
    return sgrid, sgrid.conjugate()


def _check_conjugate(sgrid: SpatialGrid, kgrid: SpectralGrid):
    if sgrid.count != kgrid.count or not math.isclose(
        sgrid.dx * kgrid.dkx * sgrid.count, 2 * math.pi, rel_tol=1e-12
    ):
        raise ValueError("spatial and spectral grids are not FFT conjugates")


def _in_steps(value, step):
    """value / step, snapped to a multiple of 1/2 when it is one up to rounding."""
    u = value / step
    half = round(2 * u) / 2
    return half if abs(u - half) <= 1e-9 * max(1.0, abs(u)) else u


def _step_phase(p, count):
    """exp(2 pi i p j / count) for j = 0 .. count-1.

    The integer part of p is reduced modulo count exactly, so the phase stays
    accurate to rounding when p j / count amounts to many thousands of cycles.
    """
    j = np.arange(count)
    whole = math.floor(p)
    cycles = np.mod(whole * j, count) + (p - whole) * j
    return np.exp(2j * math.pi * np.mod(cycles, count) / count)


def _transform_phases(sgrid: SpatialGrid, kgrid: SpectralGrid):
    _check_conjugate(sgrid, kgrid)
    n = sgrid.count
    a = _in_steps(sgrid.x0, sgrid.dx)
    b = _in_steps(kgrid.kx0, kgrid.dkx)
    # exp(i kx0 x0), exp(i kx0 dx m), exp(i dkx x0 j)
    ab = a * b
    const = np.exp(2j * math.pi * math.fmod(ab, n) / n)
    return const, _step_phase(b, n), _step_phase(a, n)


def spectrum_to_field_values(values, kgrid: SpectralGrid, sgrid: SpatialGrid) -> np.ndarray:
    """(1/sqrt(2 pi)) sum_j c_j exp(i kx_j x_m) dkx, evaluated with one inverse FFT."""
    const, e_m, f_j = _transform_phases(sgrid, kgrid)
    n = kgrid.count
    return (const * kgrid.dkx * n / math.sqrt(2 * math.pi)) * e_m * np.fft.ifft(values * f_j)


def field_to_spectrum_values(values, sgrid: SpatialGrid, kgrid: SpectralGrid) -> np.ndarray:
    """(1/sqrt(2 pi)) sum_m psi_m exp(-i kx_j x_m) dx, the exact inverse of the above.

    It uses the conjugates of the same phase factors, so a round trip cancels
    them identically.
    """
    const, e_m, f_j = _transform_phases(sgrid, kgrid)
    return (np.conj(const) * sgrid.dx / math.sqrt(2 * math.pi)) * np.conj(f_j) * np.fft.fft(values * np.conj(e_m))


def to_wavefield(c: SpectralAmplitude, sgrid: SpatialGrid | None = None, y: float = 0.0) -> Wavefield:
    """Inverse transform of ``c`` onto ``sgrid`` (default: its conjugate grid)."""
    if sgrid is None:
        sgrid = c.grid.conjugate()
    return Wavefield(sgrid, y, spectrum_to_field_values(c.values, c.grid, sgrid))


def to_spectrum(psi: Wavefield, kgrid: SpectralGrid | None = None) -> SpectralAmplitude:
    """Forward transform of ``psi`` onto ``kgrid`` (default: its conjugate grid)."""
    if kgrid is None:
        kgrid = psi.grid.conjugate()
    return SpectralAmplitude(kgrid, field_to_spectrum_values(psi.values, psi.grid, kgrid))


def check_grid_resolution(config: PhysicalConfig, sgrid: SpatialGrid, kgrid: SpectralGrid):
    """Warn when a grid misses the resolution rules used by :func:`make_grids`."""
    if sgrid.dx > config.d / 16 * (1 + 1e-12):
        warnings.warn(f"dx = {sgrid.dx:.3g} m does not resolve d/16", stacklevel=2)
    if kgrid.dkx > 2 * math.pi / (16 * config.n_slits * config.d) * (1 + 1e-12):
        warnings.warn("dkx does not resolve the multi-slit Dirichlet peaks", stacklevel=2)
