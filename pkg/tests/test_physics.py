import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mzsim.physics import (
    ConfigError,
    SpatialGrid,
    SpectralAmplitude,
    make_config,
    make_grids,
    reference_config,
    to_spectrum,
    to_wavefield,
)


def test_reference_wave_number(cfg):
    assert cfg.k == pytest.approx(5.09067e11, rel=1e-6)


def test_photon_wave_number_from_wavelength():
    c = make_config(lambda_i=589e-9)
    assert c.k_i == pytest.approx(1.06675e7, rel=1e-5)


def test_derived_lengths_are_consistent(cfg):
    assert cfg.lambda_dB * cfg.k == pytest.approx(2 * math.pi, rel=1e-15)
    assert cfg.lambda_i * cfg.k_i == pytest.approx(2 * math.pi, rel=1e-15)


def test_slit_wider_than_period_rejected():
    with pytest.raises(ConfigError) as info:
        make_config(d=2e-7, delta=3e-7)
    assert info.value.field == "delta"


@pytest.mark.parametrize(
    "field, kwargs",
    [
        ("v", {"v": 0.0}),
        ("mass", {"mass": -1.0}),
        ("y12", {"y12": float("nan")}),
        ("n_slits", {"n_slits": 0}),
        ("n_slits", {"n_slits": 2.5}),
        ("k_i", {"k_i": 1e7, "lambda_i": 5e-7}),
    ],
)
def test_bad_fields_named(field, kwargs):
    with pytest.raises(ConfigError) as info:
        make_config(**kwargs)
    assert info.value.field == field


def test_non_paraxial_rejected():
    with pytest.raises(ConfigError, match="paraxial"):
        make_config(v=1e-3)


def test_config_is_immutable(cfg):
    with pytest.raises(AttributeError):
        cfg.d = 1.0


def test_grid_covers_both_beams(cfg):
    sgrid, kgrid = make_grids(cfg)
    assert sgrid.span >= 160e-6
    assert sgrid.span >= 4 * cfg.diffraction_angle * (cfg.y12 + cfg.y23)
    assert sgrid.x[0] + sgrid.x[-1] == pytest.approx(0.0, abs=1e-20)


def test_grid_resolution_invariants(cfg):
    sgrid, kgrid = make_grids(cfg)
    assert sgrid.dx <= cfg.d / 16
    assert kgrid.dkx <= 2 * math.pi / (16 * 24 * 2e-7)
    assert kgrid.span >= 2 * 3 * (2 * math.pi / cfg.delta)
    assert sgrid.count & (sgrid.count - 1) == 0


def test_single_slit_spectral_span():
    sgrid, kgrid = make_grids(reference_config(n_slits=1))
    assert kgrid.span >= 6 * math.pi / 1e-7


def test_narrow_slit_refines_step():
    c = reference_config(delta=1e-8)
    sgrid, kgrid = make_grids(c)
    assert sgrid.dx <= c.delta / 6
    assert (c.d / sgrid.dx) == pytest.approx(round(c.d / sgrid.dx), abs=1e-9)


def test_oversample_halves_step(cfg):
    a, _ = make_grids(cfg)
    b, _ = make_grids(cfg, oversample=2)
    assert b.dx == pytest.approx(a.dx / 2)
    with pytest.raises(ValueError):
        make_grids(cfg, oversample=0)


def test_slit_edges_fall_on_cell_boundaries(cfg):
    sgrid, _ = make_grids(cfg)
    # x = 0 and x = delta/2 are cell boundaries
    u = (np.array([0.0, cfg.delta / 2, cfg.d]) - sgrid.left_edge) / sgrid.dx
    np.testing.assert_allclose(u, np.round(u), atol=1e-6)


def test_grid_count_must_be_power_of_two():
    with pytest.raises(ValueError):
        SpatialGrid(0.0, 1.0, 12)


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    kx0_steps=st.integers(-40, 40),
    x0=st.floats(-1e-3, 1e-3),
)
def test_round_trip(seed, kx0_steps, x0):
    rng = np.random.default_rng(seed)
    sgrid = SpatialGrid(x0=x0, dx=1e-8, count=512)
    kgrid = sgrid.conjugate(kx0=kx0_steps * 2 * math.pi / sgrid.span - 256 * 2 * math.pi / sgrid.span)
    vals = np.zeros(512, complex)
    vals[100:400] = rng.normal(size=300) + 1j * rng.normal(size=300)
    c = SpectralAmplitude(kgrid, vals)
    back = to_spectrum(to_wavefield(c, sgrid), kgrid)
    assert np.linalg.norm(back.values - vals) / np.linalg.norm(vals) <= 1e-12


def test_wavefield_rejects_non_finite():
    sgrid = SpatialGrid(0.0, 1.0, 4)
    from mzsim.physics import Wavefield

    with pytest.raises(ValueError):
        Wavefield(sgrid, 0.0, [1, 2, np.inf, 0])


def test_values_are_read_only(cfg):
    sgrid, kgrid = make_grids(cfg)
    c = SpectralAmplitude(kgrid, np.zeros(kgrid.count))
    with pytest.raises(ValueError):
        c.values[0] = 1.0
