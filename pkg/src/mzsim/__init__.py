"""Wave-optics simulator of a three-grating atom interferometer with photon recoil."""

from .grating import GratingSpec, analytic_spectrum, numeric_spectrum, slit_mask
from .interferometer import (
    ContrastResult,
    FringeFit,
    Interferometer,
    analytic_B,
    average_transmission,
    contrast,
    contrast_curve,
    fit_fringe,
    fit_fringe_free_period,
    scan_third_grating,
    transmitted_intensity,
)
from .kernels import BACKEND
from .physics import (
    ConfigError,
    PhysicalConfig,
    SpatialGrid,
    SpectralAmplitude,
    SpectralGrid,
    Wavefield,
    make_config,
    make_grids,
    reference_config,
    to_spectrum,
    to_wavefield,
)
from .propagate import angular_spectrum_propagate, far_field, far_field_kicked, fresnel_propagate
from .scattering import ScatteringEvent, kick_spectrum, kicked_field, make_event, p1_pdf, p1_quadrature

__version__ = "0.1.0"
