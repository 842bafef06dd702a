import numpy as np
import pytest
from scipy.integrate import trapezoid

from calibration import reference_config
from conftest import make_config, make_displacements, make_full_config
from currents import MatrixElementTables
from displacement import aggregate_displacement, mode_displacement
from enums import Component
from grid import build_grids
from pulse import mode_envelopes, mode_set, pulse_from_config
from sweep import run_sweep


@pytest.fixture
def setup(fast_cfg):
    grid, k_grid = build_grids(fast_cfg)
    modes = mode_set(fast_cfg, g0=0.5)
    envelopes = mode_envelopes(pulse_from_config(fast_cfg), modes, grid)
    return grid, k_grid, modes, envelopes


def test_channels(setup, fast_cfg):
    grid, _, modes, envelopes = setup
    carrier = np.cos(modes.omega_l * grid.t)
    tables = MatrixElementTables(k=np.array([0.0, 0.1]), m_ter=np.stack([carrier, np.zeros_like(carrier)], axis=1),
                                 m_tra=np.stack([np.zeros_like(carrier), np.ones_like(carrier)], axis=1))
    inter = mode_displacement(tables, modes, envelopes, grid, Component.INTER)
    intra = mode_displacement(tables, modes, envelopes, grid, Component.INTRA)
    total = mode_displacement(tables, modes, envelopes, grid, Component.TOTAL)
    assert total.shape == (2, modes.q_cutoff)
    assert np.allclose(total, inter + intra, atol=1e-14)
    assert np.all(inter[1] == 0)
    assert np.all(intra[0] == 0)
    expected = modes.couplings * trapezoid(envelopes.F, dx=grid.dt, axis=0)
    assert np.allclose(intra[1], expected, rtol=1e-9, atol=1e-12 * np.max(np.abs(expected)))
    expected = -modes.couplings * trapezoid(carrier[:, None] * envelopes.f, dx=grid.dt, axis=0)
    assert abs(expected[0]) > 0.25 * modes.couplings[0] * fast_cfg.field_fwhm
    assert np.allclose(inter[0], expected, rtol=1e-9, atol=1e-12 * np.max(np.abs(expected)))


def test_aggregate(setup):
    _, k_grid, _, _ = setup
    per_k = np.ones((k_grid.n, 3), dtype=complex)
    disp = aggregate_displacement(per_k, k_grid, 2.0, np.arange(1, 4), direction="gm")
    assert np.allclose(disp.chi, 2.0 * k_grid.n * k_grid.dk)
    assert disp.metadata == {"direction": "gm", "n_z": 2.0}


def test_mode_lookup():
    disp = make_displacements([1.0, 2.0j], orders=[1, 3])
    assert disp[3] == 2.0j
    assert len(disp) == 2
    with pytest.raises(KeyError):
        disp[2]
    scaled = disp.scaled(3.0, g0=3.0)
    assert scaled[3] == 6.0j
    assert scaled.metadata == {"g0": 3.0}
    assert disp.metadata == {}


def test_sweep_displacements_are_linear(fast_sweep):
    unit = fast_sweep.displacements(1.0)
    scale = np.max(np.abs(unit.chi))
    assert np.allclose(fast_sweep.displacements(2.5).chi, 2.5 * unit.chi, rtol=1e-10, atol=1e-12 * scale)
    assert np.allclose(fast_sweep.displacements(1.0, n_z=1.0).chi * fast_sweep.config.n_z, unit.chi, rtol=1e-12)
    assert unit.metadata["g0"] == 1.0
    assert unit.metadata["component"] == "total"
    assert unit.metadata["direction"] == "gm"
    inter = fast_sweep.displacements(1.0, Component.INTER).chi
    intra = fast_sweep.displacements(1.0, Component.INTRA).chi
    scale = max(np.max(np.abs(inter)), np.max(np.abs(intra)))
    assert np.allclose(inter + intra, unit.chi, rtol=0, atol=1e-10 * scale)
    assert np.all(np.abs(unit.chi) > 0)


def test_field_free_sweep_does_not_displace():
    """Without a field every K carries the valence velocity, which cancels across the zone"""
    sweep = run_sweep(make_config(e0_v_per_angstrom=0.0))
    per_k = sweep.per_k()
    assert np.max(np.abs(per_k)) > 0
    assert np.max(np.abs(np.sum(per_k, axis=0))) <= 1e-12 * np.max(np.abs(per_k))
    assert np.max(np.abs(sweep.current.total)) <= 1e-14


@pytest.mark.slow
def test_gamma_m_displaces_the_fundamental_more_than_gamma_a(full_sweeps, reference_g0):
    reference = reference_config(make_full_config())
    gm = full_sweeps.get(reference, 1).displacements(reference_g0)
    ga = full_sweeps.get(reference.with_options(direction="ga"), 1).displacements(reference_g0)
    assert abs(gm[1]) == pytest.approx(1.5)
    assert abs(ga[1]) < abs(gm[1])


@pytest.mark.slow
def test_dephasing_drives_the_intraband_fundamental(full_sweeps):
    weak = make_full_config(e0_v_per_angstrom=0.2)
    damped = full_sweeps.get(weak, 1).displacements(1.0, Component.INTRA)
    coherent = full_sweeps.get(weak.with_options(t2_fs="inf"), 1).displacements(1.0, Component.INTRA)
    assert abs(damped[1]) > 10.0 * abs(coherent[1])
