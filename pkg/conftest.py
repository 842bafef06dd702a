import numpy as np
import pytest

from calibration import SweepCache, calibrate
from config import SimulationConfigBuilder
from displacement import ModeDisplacements
from sweep import run_sweep

# One-cycle pulse on a short grid: every command runs in a few seconds
FAST_OPTIONS = {
    "n_cycles": 1,
    "e0_v_per_angstrom": 0.1,
    "n_t": 8192,
    "n_k": 11,
    "q_cutoff": 9,
    "t2_fs": 1.0,
    "norm_tolerance": 1e-3,
    "wigner_points": 41,
}


def make_config(**overrides):
    options = dict(FAST_OPTIONS)
    options.update(overrides)
    return SimulationConfigBuilder().set_options(options).build()


# Default pulse and K-grid on a quarter of the default time samples, with the norm guard loosened to match
FULL_OPTIONS = {
    "n_t": 131072,
    "norm_tolerance": 1e-3,
}


def make_full_config(**overrides):
    options = dict(FULL_OPTIONS)
    options.update(overrides)
    return SimulationConfigBuilder().set_options(options).build()


def make_displacements(chi, orders=None):
    chi = np.asarray(chi, dtype=complex)
    orders = np.arange(1, chi.size + 1) if orders is None else np.asarray(orders)
    return ModeDisplacements(orders=orders, chi=chi)


@pytest.fixture
def fast_cfg():
    return make_config()


@pytest.fixture(scope="session")
def fast_sweep():
    return run_sweep(make_config(), threads=1)


@pytest.fixture(scope="session")
def full_sweeps():
    return SweepCache()


@pytest.fixture(scope="session")
def reference_g0(full_sweeps):
    """Coupling calibrated to the default chi target at the reference point"""
    return calibrate(make_full_config(), cache=full_sweeps).g0


@pytest.fixture
def tol():
    return 1e-12


@pytest.fixture
def harmonic_displacements():
    return make_displacements([1.2 + 0.3j, 0.4 - 0.2j, 0.1j])
