import numpy as np
import pytest

from bands import bandgap_extrema
from conftest import make_full_config
from currents import (DB_FLOOR, CurrentTrace, GridMismatchError, HannWindow, NoWindow, SpectrumTrace,
                      WindowStrategyBuilder, cutoff_order, direct_dft, harmonic_peaks, hhg_spectrum,
                      macroscopic_currents, matrix_elements, windowed_transform)
from enums import Derivative, Provenance
from grid import TimeGrid
from sbe import SBETrajectory, solve

rng = np.random.default_rng(7)


@pytest.fixture
def gaussian_grid():
    return TimeGrid(t=np.linspace(-50.0, 50.0, 2048), dt=100.0 / 2047)


def test_fft_matches_direct_dft():
    signal = rng.normal(size=300)
    for window in (HannWindow(), NoWindow()):
        assert np.allclose(windowed_transform(signal, window), direct_dft(signal * window.weights(signal.size)),
                           atol=1e-10, rtol=0)


def test_window_builder():
    assert isinstance(WindowStrategyBuilder().set_strategy_type("hann").build(), HannWindow)
    assert isinstance(WindowStrategyBuilder().set_strategy_type("NONE").build(), NoWindow)
    with pytest.raises(ValueError, match="blackman"):
        WindowStrategyBuilder().set_strategy_type("blackman").build()
    with pytest.raises(ValueError):
        WindowStrategyBuilder().build()
    weights = HannWindow().weights(101)
    assert weights[0] == weights[-1] == 0.0
    assert weights[50] == pytest.approx(1.0)


@pytest.mark.parametrize("derivative, atol", [(Derivative.TIME, 1e-4), (Derivative.FREQUENCY, 1e-9)])
def test_interband_current_is_the_polarization_slope(gaussian_grid, derivative, atol):
    t = gaussian_grid.t
    polarization = np.exp(-t ** 2 / 25.0)
    trace = CurrentTrace.from_polarization(gaussian_grid, polarization, np.zeros_like(t), derivative)
    assert np.allclose(trace.j_ter, -2.0 * t / 25.0 * polarization, atol=atol, rtol=0)
    assert np.array_equal(trace.total, trace.j_ter)


def test_spectrum_shares_one_reference():
    spectrum = SpectrumTrace(orders=np.arange(3.0), total=np.array([1.0, 4.0, 2.0]),
                             inter=np.array([8.0, 1.0, 1.0]), intra=np.zeros(3))
    assert spectrum.reference == 8.0
    assert np.allclose(spectrum.total_db, 10 * np.log10([1 / 8, 1 / 2, 1 / 4]))
    assert spectrum.inter_db[0] == 0.0
    assert np.all(spectrum.intra_db == DB_FLOOR)


def test_silent_current_sits_on_the_floor(gaussian_grid):
    zeros = np.zeros(gaussian_grid.n)
    trace = CurrentTrace(t=gaussian_grid.t, polarization=zeros, j_ter=zeros, j_tra=zeros)
    spectrum = hhg_spectrum(trace, HannWindow(), omega_l=0.1)
    assert np.all(spectrum.total_db == DB_FLOOR)


def test_spectrum_of_a_harmonic_current(gaussian_grid):
    """A current oscillating at 3 omega_l peaks at harmonic order 3"""
    omega_l = 2 * np.pi / 10.0
    t = gaussian_grid.t
    j = np.exp(-t ** 2 / 200.0) * np.cos(3 * omega_l * t)
    trace = CurrentTrace(t=t, polarization=np.zeros_like(t), j_ter=j, j_tra=np.zeros_like(t))
    spectrum = hhg_spectrum(trace, HannWindow(), omega_l)
    assert spectrum.orders[np.argmax(spectrum.total)] == pytest.approx(3.0, abs=0.1)
    assert np.allclose(spectrum.total, spectrum.inter)
    assert np.max(spectrum.total_db) == 0.0


def synthetic_spectrum(levels):
    orders = np.linspace(0.0, 30.0, 3001)
    total = np.full(orders.size, 1e-12)
    for order, level in levels.items():
        total[order * 100] = level
    return SpectrumTrace(orders=orders, total=total, inter=total, intra=total)


def test_harmonic_peaks_and_cutoff():
    levels = {order: 1.0 for order in range(1, 16, 2)}
    levels.update({order: 1e-4 for order in range(17, 30, 2)})
    spectrum = synthetic_spectrum(levels)
    peaks = harmonic_peaks(spectrum, 29)
    assert peaks[7] == pytest.approx(0.0)
    assert peaks[21] == pytest.approx(-40.0)
    assert cutoff_order(spectrum, plateau=(5, 13)) == 15.0
    assert cutoff_order(spectrum, plateau=(5, 13), drop_db=50.0) == 29.0


def test_cutoff_needs_a_plateau():
    with pytest.raises(ValueError):
        cutoff_order(synthetic_spectrum({1: 1.0}), plateau=(40, 50))


def test_grid_mismatch(fast_sweep):
    trajectory = SBETrajectory(k=np.zeros(1), n_c=np.zeros((10, 1)), pi=np.zeros((10, 1), dtype=complex),
                               provenance=Provenance.SBE, t2=1.0)
    with pytest.raises(GridMismatchError):
        matrix_elements(trajectory, fast_sweep.model, fast_sweep.pulse, fast_sweep.grid)


def test_sweep_currents(fast_sweep):
    current = fast_sweep.current
    assert current.t.shape == current.j_tra.shape == current.j_ter.shape == (fast_sweep.grid.n,)
    assert np.max(np.abs(current.j_ter)) > 0
    assert np.max(np.abs(current.j_tra)) > 0
    spectral = CurrentTrace.from_polarization(fast_sweep.grid, current.polarization, current.j_tra,
                                              Derivative.FREQUENCY)
    assert np.max(np.abs(spectral.j_ter - current.j_ter)) <= 5e-2 * np.max(np.abs(current.j_ter))


def test_whole_zone_currents_match_the_sweep(fast_sweep):
    cfg = fast_sweep.config
    trajectory = solve(fast_sweep.model, fast_sweep.pulse, fast_sweep.k_grid.k, cfg.t2, fast_sweep.grid,
                       cfg.norm_tolerance)
    tables = matrix_elements(trajectory, fast_sweep.model, fast_sweep.pulse, fast_sweep.grid)
    current = macroscopic_currents(tables, fast_sweep.k_grid, fast_sweep.grid)
    scale = np.max(np.abs(fast_sweep.current.j_tra))
    assert np.allclose(current.j_tra, fast_sweep.current.j_tra, rtol=0, atol=1e-12 * scale)
    assert np.allclose(current.polarization, fast_sweep.current.polarization, rtol=0,
                       atol=1e-12 * np.max(np.abs(fast_sweep.current.polarization)))


def full_spectrum(sweeps, **overrides):
    sweep = sweeps.get(make_full_config(**overrides), 1)
    spectrum = hhg_spectrum(sweep.current, HannWindow(), sweep.config.omega_l)
    return spectrum, bandgap_extrema(sweep.model, sweep.config.omega_l)


def band_peak(orders, levels, order):
    return float(np.max(levels[np.abs(orders - order) <= 0.5]))


@pytest.mark.slow
def test_dephased_spectrum_resolves_odd_harmonics(full_sweeps):
    spectrum, extrema = full_spectrum(full_sweeps)
    orders = spectrum.orders
    plateau = [q for q in range(1, int(extrema.max_order), 2) if q >= extrema.min_order]
    contrast = []
    for q in plateau:
        between = (orders > q + 0.5) & (orders < q + 1.5)
        contrast.append(band_peak(orders, spectrum.total_db, q) - float(np.min(spectrum.total_db[between])))
    assert np.median(contrast) >= 10.0
    # the intraband current still dominates at the bottom of the plateau
    assert band_peak(orders, spectrum.intra_db, 9) > band_peak(orders, spectrum.inter_db, 9)


@pytest.mark.slow
def test_cutoff_lies_beyond_the_largest_gap(full_sweeps):
    spectrum, extrema = full_spectrum(full_sweeps)
    cutoff = cutoff_order(spectrum, (extrema.min_order, extrema.max_order))
    assert extrema.max_order < cutoff <= extrema.max_order + 10


@pytest.mark.slow
def test_cutoff_does_not_fall_with_the_field(full_sweeps):
    cutoffs = []
    for e0 in (0.25, 0.35, 0.45):
        spectrum, extrema = full_spectrum(full_sweeps, e0_v_per_angstrom=e0)
        cutoffs.append(cutoff_order(spectrum, (extrema.min_order, extrema.max_order)))
    assert cutoffs == sorted(cutoffs)
    assert cutoffs[-1] > cutoffs[0]
