import logging
import math
from dataclasses import dataclass

import numpy as np

from bands import preset_for
from config import SimulationConfig
from constants import ENVELOPE_TAIL, MIN_SAMPLES_PER_PERIOD
from pulse import build_envelope

logger = logging.getLogger(__name__)


class GridResolutionError(Exception):
    """Raised when the time grid cannot resolve the optical period or the highest mode."""

    def __init__(self, message: str, min_n_t: int):
        super().__init__(message, min_n_t)
        self.message = message
        self.min_n_t = min_n_t

    def __str__(self):
        return f"{self.message}; use n_t >= {self.min_n_t}"


class GridSpanError(Exception):
    """Raised when the time span does not cover the pulse down to the envelope tail level."""

    def __init__(self, message: str, min_span_fwhm: float):
        super().__init__(message, min_span_fwhm)
        self.message = message
        self.min_span_fwhm = min_span_fwhm

    def __str__(self):
        return f"{self.message}; use span_fwhm >= {self.min_span_fwhm:.2f}"


@dataclass(frozen=True, eq=False)
class TimeGrid:
    t: np.ndarray
    dt: float

    @property
    def n(self) -> int:
        return self.t.size

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    def stage_times(self) -> np.ndarray:
        """Full steps interleaved with midpoints: t0, t0+dt/2, t1, ... (length 2n-1)."""
        stages = np.empty(2 * self.n - 1)
        stages[0::2] = self.t
        stages[1::2] = 0.5 * (self.t[:-1] + self.t[1:])
        return stages

    def trapezoid_weights(self) -> np.ndarray:
        weights = np.full(self.n, self.dt)
        weights[0] *= 0.5
        weights[-1] *= 0.5
        return weights


@dataclass(frozen=True, eq=False)
class KGrid:
    k: np.ndarray
    dk: float
    lattice_constant: float

    @property
    def n(self) -> int:
        return self.k.size


def _next_power_of_two(n: float) -> int:
    return 1 << max(1, math.ceil(math.log2(n)))


def build_time_grid(cfg: SimulationConfig) -> TimeGrid:
    span = cfg.span_fwhm * cfg.field_fwhm
    envelope = build_envelope(cfg)
    if envelope.value(0.5 * span) >= ENVELOPE_TAIL:
        needed = 2.0 * envelope.half_width_below(ENVELOPE_TAIL) / cfg.field_fwhm
        raise GridSpanError("pulse envelope is not below %g at the grid ends" % ENVELOPE_TAIL, needed)

    t = np.linspace(-0.5 * span, 0.5 * span, cfg.n_t)
    dt = span / (cfg.n_t - 1)

    dt_max = cfg.period / MIN_SAMPLES_PER_PERIOD
    if dt > dt_max:
        raise GridResolutionError(f"dt = {dt:.4g} a.u. exceeds T_L/{MIN_SAMPLES_PER_PERIOD}",
                                  _next_power_of_two(span / dt_max + 1))
    nyquist_order = math.pi / (dt * cfg.omega_l)
    if nyquist_order <= cfg.q_cutoff:
        raise GridResolutionError(f"Nyquist order {nyquist_order:.1f} does not exceed q_cutoff = {cfg.q_cutoff}",
                                  _next_power_of_two(span * cfg.q_cutoff * cfg.omega_l / math.pi + 1))

    return TimeGrid(t=t, dt=dt)


def build_k_grid(cfg: SimulationConfig) -> KGrid:
    a = preset_for(cfg.direction).lattice_constant
    dk = 2.0 * math.pi / (a * cfg.n_k)
    k = (np.arange(cfg.n_k) - (cfg.n_k - 1) / 2) * dk
    return KGrid(k=k, dk=dk, lattice_constant=a)


def build_grids(cfg: SimulationConfig):
    time_grid = build_time_grid(cfg)
    k_grid = build_k_grid(cfg)
    logger.debug(f"Grids: n_t={time_grid.n} dt={time_grid.dt:.4g} a.u., "
                 f"n_k={k_grid.n} dk={k_grid.dk:.4g} a.u.")
    return time_grid, k_grid
