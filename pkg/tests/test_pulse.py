
import numpy as np
import pytest
from scipy.integrate import trapezoid

from conftest import make_config
from grid import build_time_grid
from pulse import (EnvelopeStrategyBuilder, GaussianEnvelope, ModeSet, build_envelope, classical_field, mode_envelopes,
                   mode_set, pulse_from_config, vector_potential)


def test_envelope_fwhm():
    envelope = GaussianEnvelope(fwhm=100.0)
    assert envelope.value(0.0) == 1.0
    assert envelope.value(50.0) == pytest.approx(0.5)
    assert envelope.value(-50.0) == pytest.approx(0.5)
    assert envelope.value(envelope.half_width_below(1e-8)) == pytest.approx(1e-8)


def test_intensity_convention():
    """fwhm_of=intensity puts half of the peak intensity n_cycles periods apart"""
    cfg = make_config(fwhm_of="intensity")
    envelope = build_envelope(cfg)
    half = 0.5 * cfg.n_cycles * cfg.period
    assert envelope.value(half) ** 2 == pytest.approx(0.5)


def test_envelope_builder():
    envelope = EnvelopeStrategyBuilder().set_strategy_type("Gaussian").set_option("fwhm", 10.0).build()
    assert isinstance(envelope, GaussianEnvelope)
    with pytest.raises(ValueError):
        EnvelopeStrategyBuilder().build()
    with pytest.raises(ValueError, match="sech2"):
        EnvelopeStrategyBuilder().set_strategy_type("sech2").build()
    with pytest.raises(ValueError, match="fwhm"):
        EnvelopeStrategyBuilder().set_strategy_type("gaussian").build()


def test_field_is_minus_the_vector_potential_slope(fast_cfg):
    grid = build_time_grid(fast_cfg)
    pulse = pulse_from_config(fast_cfg)
    a = vector_potential(pulse, grid.t)
    e = classical_field(pulse, grid.t)
    slope = np.gradient(a, grid.dt)
    assert np.max(np.abs(e[1:-1] + slope[1:-1])) < 1e-3 * fast_cfg.e0
    assert np.max(np.abs(e)) == pytest.approx(fast_cfg.e0, rel=0.05)


def test_vector_potential_vanishes_at_the_grid_ends(fast_cfg):
    grid = build_time_grid(fast_cfg)
    pulse = pulse_from_config(fast_cfg)
    assert abs(vector_potential(pulse, grid.t0)) < 1e-12
    assert abs(vector_potential(pulse, grid.t1)) < 1e-12
    assert abs(trapezoid(classical_field(pulse, grid.t), grid.t)) < 1e-10


def test_mode_couplings():
    modes = ModeSet(omega_l=0.014, q_cutoff=5, g0=2.0)
    assert np.array_equal(modes.orders, [1, 2, 3, 4, 5])
    assert np.allclose(modes.frequencies, 0.014 * np.arange(1, 6))
    assert np.allclose(modes.couplings, 2.0 * np.sqrt(np.arange(1, 6)))


def test_mode_envelopes():
    cfg = make_config(n_cycles=3, n_t=16384)
    grid = build_time_grid(cfg)
    tables = mode_envelopes(pulse_from_config(cfg), mode_set(cfg), grid)
    assert tables.f.shape == tables.F.shape == (grid.n, cfg.q_cutoff)
    assert np.all(tables.F[0] == 0)
    assert np.allclose(np.abs(tables.f[grid.n // 2]), 1.0, atol=1e-6)
    ratio = np.abs(tables.F[-1]) / np.max(np.abs(tables.F), axis=0)
    assert np.all(ratio < 1e-2)
    assert abs(tables.f[grid.n // 2 + 100, 2] - build_envelope(cfg).value(grid.t[grid.n // 2 + 100])
               * np.exp(3j * cfg.omega_l * grid.t[grid.n // 2 + 100])) < 1e-12
