import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Dict, Tuple

import numpy as np
from scipy.signal import windows

from bands import BandModel
from constants import ELECTRON_CHARGE
from enums import Derivative
from grid import TimeGrid, KGrid
from pulse import PulseSpec, vector_potential
from sbe import SBETrajectory

logger = logging.getLogger(__name__)

# Lowest dB level reported relative to the per-run maximum
DB_FLOOR = -300.0

_CHUNK = 8192


class GridMismatchError(Exception):
    """Raised when a trajectory and the time grid it is combined with have different lengths."""

    def __init__(self, expected: int, actual: int):
        super().__init__(expected, actual)
        self.expected = expected
        self.actual = actual

    def __str__(self):
        return f"trajectory has {self.actual} time samples, grid has {self.expected}"


@dataclass(frozen=True, eq=False)
class MatrixElementTables:
    """Valence-diagonal interband and intraband matrix elements, shape (n_t, n_k)."""
    k: np.ndarray
    m_ter: np.ndarray
    m_tra: np.ndarray


def matrix_elements(traj: SBETrajectory, model: BandModel, spec: PulseSpec, grid: TimeGrid) -> MatrixElementTables:
    if traj.n_c.shape[0] != grid.n:
        raise GridMismatchError(grid.n, traj.n_c.shape[0])

    a = vector_potential(spec, grid.t)
    m_ter = np.empty(traj.n_c.shape)
    m_tra = np.empty(traj.n_c.shape)
    for start in range(0, grid.n, _CHUNK):
        rows = slice(start, start + _CHUNK)
        k = traj.k[None, :] + a[rows, None]
        e_v, e_c = model.energies(k)
        v_v, v_c = model.velocities(k)
        n_c = traj.n_c[rows]
        m_ter[rows] = ELECTRON_CHARGE * 2.0 * (traj.pi[rows].real * model.dipole_from_gap(e_c - e_v))
        m_tra[rows] = ELECTRON_CHARGE * ((1.0 - n_c) * v_v + n_c * v_c)
    return MatrixElementTables(k=traj.k, m_ter=m_ter, m_tra=m_tra)


def k_partial_sums(tables: MatrixElementTables, k_grid: KGrid) -> Tuple[np.ndarray, np.ndarray]:
    """Polarization and intraband current of one K batch: sum over its K points times dK."""
    return np.sum(tables.m_ter, axis=1) * k_grid.dk, np.sum(tables.m_tra, axis=1) * k_grid.dk


@dataclass(frozen=True, eq=False)
class CurrentTrace:
    t: np.ndarray
    polarization: np.ndarray
    j_ter: np.ndarray
    j_tra: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.j_ter + self.j_tra

    @classmethod
    def from_polarization(cls, grid: TimeGrid, polarization: np.ndarray, j_tra: np.ndarray,
                          derivative: Derivative = Derivative.TIME) -> "CurrentTrace":
        if Derivative(derivative) == Derivative.FREQUENCY:
            omega = 2.0 * np.pi * np.fft.rfftfreq(grid.n, grid.dt)
            j_ter = np.fft.irfft(1j * omega * np.fft.rfft(polarization), n=grid.n)
        else:
            # centered differences inside, one-sided at both ends
            j_ter = np.gradient(polarization, grid.dt)
        return cls(t=grid.t, polarization=polarization, j_ter=j_ter, j_tra=j_tra)


def macroscopic_currents(tables: MatrixElementTables, k_grid: KGrid, grid: TimeGrid,
                         derivative: Derivative = Derivative.TIME) -> CurrentTrace:
    """
    Currents of a single table set covering the whole K grid. The periodic K grid
    makes the rectangle rule the trapezoid rule for a full zone.
    """
    polarization, j_tra = k_partial_sums(tables, k_grid)
    return CurrentTrace.from_polarization(grid, polarization, j_tra, derivative)


class AbstractWindowStrategy(ABC):

    @abstractmethod
    def weights(self, n: int) -> np.ndarray:
        pass


class HannWindow(AbstractWindowStrategy):

    def __str__(self):
        return "HannWindow()"

    def weights(self, n: int) -> np.ndarray:
        return windows.hann(n, sym=True)


class NoWindow(AbstractWindowStrategy):

    def __str__(self):
        return "NoWindow()"

    def weights(self, n: int) -> np.ndarray:
        return np.ones(n)


class WindowStrategyBuilder:
    """
    A builder class for creating FFT window strategy objects.

    Example:
        window = WindowStrategyBuilder().set_strategy_type("hann").build()
    """

    def __init__(self) -> None:
        self._strategy_type: Optional[str] = None

    def set_strategy_type(self, strategy_type: str) -> "WindowStrategyBuilder":
        self._strategy_type = strategy_type
        return self

    def build(self) -> AbstractWindowStrategy:
        if not self._strategy_type:
            raise ValueError("window type not set")

        if self._strategy_type.lower() == "hann":
            return HannWindow()
        if self._strategy_type.lower() == "none":
            return NoWindow()

        raise ValueError(f"unknown window type: {self._strategy_type}")


@dataclass(frozen=True, eq=False)
class SpectrumTrace:
    """
    omega^2 |FT|^2 of the total, interband and intraband currents on a harmonic-order
    axis; the dB columns share one reference, the largest value of the three.
    """
    orders: np.ndarray
    total: np.ndarray
    inter: np.ndarray
    intra: np.ndarray

    @property
    def reference(self) -> float:
        return float(max(np.max(self.total), np.max(self.inter), np.max(self.intra)))

    def to_db(self, intensity: np.ndarray) -> np.ndarray:
        reference = self.reference
        if reference <= 0:
            return np.full_like(intensity, DB_FLOOR)
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(intensity / reference)
        return np.maximum(db, DB_FLOOR)

    @property
    def total_db(self) -> np.ndarray:
        return self.to_db(self.total)

    @property
    def inter_db(self) -> np.ndarray:
        return self.to_db(self.inter)

    @property
    def intra_db(self) -> np.ndarray:
        return self.to_db(self.intra)


def windowed_transform(signal: np.ndarray, window: AbstractWindowStrategy) -> np.ndarray:
    return np.fft.rfft(signal * window.weights(signal.size))


def hhg_spectrum(trace: CurrentTrace, window: AbstractWindowStrategy, omega_l: float) -> SpectrumTrace:
    dt = trace.t[1] - trace.t[0]
    omega = 2.0 * np.pi * np.fft.rfftfreq(trace.t.size, dt)
    ft_ter = windowed_transform(trace.j_ter, window)
    ft_tra = windowed_transform(trace.j_tra, window)
    # the total is the spectrum of the summed current, not the sum of spectra
    ft_total = windowed_transform(trace.total, window)
    weight = omega ** 2
    return SpectrumTrace(orders=omega / omega_l,
                         total=weight * np.abs(ft_total) ** 2,
                         inter=weight * np.abs(ft_ter) ** 2,
                         intra=weight * np.abs(ft_tra) ** 2)


def direct_dft(signal: np.ndarray) -> np.ndarray:
    """O(n^2) one-sided DFT used to check the FFT path."""
    n = signal.size
    m = np.arange(n // 2 + 1)
    phases = np.exp(-2j * np.pi * np.outer(m, np.arange(n)) / n)
    return phases @ signal


def harmonic_peaks(spectrum: SpectrumTrace, highest: int) -> Dict[int, float]:
    """Peak dB level of the total spectrum within half an order of each odd harmonic up to `highest`."""
    total_db = spectrum.total_db
    peaks = {}
    for order in range(1, highest + 1, 2):
        mask = np.abs(spectrum.orders - order) <= 0.5
        if np.any(mask):
            peaks[order] = float(np.max(total_db[mask]))
    return peaks


def cutoff_order(spectrum: SpectrumTrace, plateau: Tuple[float, float], drop_db: float = 20.0) -> float:
    """
    Highest odd harmonic whose peak is within `drop_db` of the plateau level (median
    peak over the plateau range), scanning upward from the start of the plateau
    until the first harmonic that falls below.
    """
    low, high = plateau
    highest = int(np.floor(spectrum.orders[-1]))
    peaks = harmonic_peaks(spectrum, highest)
    plateau_levels = [level for order, level in peaks.items() if low <= order <= high]
    if not plateau_levels:
        raise ValueError(f"no odd harmonics in plateau range {plateau}")
    threshold = float(np.median(plateau_levels)) - drop_db

    cutoff = None
    for order in sorted(peaks):
        if order < low:
            continue
        if peaks[order] < threshold and order > high:
            break
        if peaks[order] >= threshold:
            cutoff = order
    logger.debug(f"Plateau level {threshold + drop_db:.1f} dB, cutoff order {cutoff}")
    return float(cutoff if cutoff is not None else low)
