import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Any, Dict, TYPE_CHECKING

import numpy as np
from scipy.integrate import cumulative_trapezoid

from constants import HBAR

if TYPE_CHECKING:
    from config import SimulationConfig
    from grid import TimeGrid


class AbstractEnvelopeStrategy(ABC):
    """Dimensionless pulse envelope f(t) with peak 1 at t = 0."""

    @abstractmethod
    def value(self, t):
        pass

    @abstractmethod
    def derivative(self, t):
        pass


class GaussianEnvelope(AbstractEnvelopeStrategy):

    def __init__(self, fwhm: float) -> None:
        self.fwhm = fwhm
        self._rate = 4.0 * math.log(2.0) / fwhm ** 2

    def __str__(self):
        return f"GaussianEnvelope(fwhm={self.fwhm:.6g})"

    def value(self, t):
        return np.exp(-self._rate * np.square(t))

    def derivative(self, t):
        return -2.0 * self._rate * t * self.value(t)

    def half_width_below(self, level: float) -> float:
        """Smallest |t| beyond which f(t) < level."""
        return math.sqrt(-math.log(level) / self._rate)


class EnvelopeStrategyBuilder:
    """
    A builder class for creating envelope strategy objects.

    Example:
        envelope = (EnvelopeStrategyBuilder()
                    .set_strategy_type("gaussian")
                    .set_option("fwhm", 4033.0)
                    .build())
    """

    def __init__(self) -> None:
        self._strategy_type: Optional[str] = None
        self._options: Dict[str, Any] = {}

    def set_strategy_type(self, strategy_type: str) -> "EnvelopeStrategyBuilder":
        self._strategy_type = strategy_type
        return self

    def set_option(self, key: str, value: Any) -> "EnvelopeStrategyBuilder":
        self._options[key] = value
        return self

    def build(self) -> AbstractEnvelopeStrategy:
        if not self._strategy_type:
            raise ValueError("envelope type not set")

        if self._strategy_type.lower() == "gaussian":
            if "fwhm" not in self._options:
                raise ValueError("gaussian envelope needs the 'fwhm' option")
            return GaussianEnvelope(self._options["fwhm"])

        raise ValueError(f"unknown envelope type: {self._strategy_type}")


@dataclass(frozen=True)
class PulseSpec:
    """
    Linearly polarized driving pulse. The vector potential is the primary object,
    A(t) = (E0/omega) f(t) sin(omega t + cep), and the field is its exact negative
    time derivative, so A vanishes wherever the envelope does.
    """
    e0: float
    omega: float
    envelope: AbstractEnvelopeStrategy
    cep: float = 0.0

    @property
    def peak_vector_potential(self) -> float:
        return self.e0 / self.omega


def vector_potential(spec: PulseSpec, t):
    return spec.peak_vector_potential * spec.envelope.value(t) * np.sin(spec.omega * t + spec.cep)


def classical_field(spec: PulseSpec, t):
    phase = spec.omega * t + spec.cep
    f = spec.envelope.value(t)
    df = spec.envelope.derivative(t)
    return -spec.peak_vector_potential * (df * np.sin(phase) + spec.omega * f * np.cos(phase))


@dataclass(frozen=True)
class ModeSet:
    """Harmonic modes q = 1..q_c of the laser frequency with couplings g0*sqrt(q)."""
    omega_l: float
    q_cutoff: int
    g0: float = 1.0

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, self.q_cutoff + 1)

    @property
    def frequencies(self) -> np.ndarray:
        return self.orders * self.omega_l

    @property
    def couplings(self) -> np.ndarray:
        return self.g0 * np.sqrt(self.orders) / HBAR


@dataclass(frozen=True, eq=False)
class EnvelopeTables:
    """f_q(t) = f(t) exp(i q omega t) and its running integral F_q(t) with F_q(t0) = 0; shape (n_t, q_c)."""
    f: np.ndarray
    F: np.ndarray


def mode_envelopes(spec: PulseSpec, modes: ModeSet, grid: "TimeGrid") -> EnvelopeTables:
    carrier = np.exp(1j * np.multiply.outer(grid.t, modes.frequencies))
    f = spec.envelope.value(grid.t)[:, None] * carrier
    F = cumulative_trapezoid(f, dx=grid.dt, axis=0, initial=0)
    return EnvelopeTables(f=f, F=F)


def build_envelope(cfg: "SimulationConfig") -> AbstractEnvelopeStrategy:
    return (EnvelopeStrategyBuilder()
            .set_strategy_type(cfg.envelope.value)
            .set_option("fwhm", cfg.field_fwhm)
            .build())


def pulse_from_config(cfg: "SimulationConfig") -> PulseSpec:
    return PulseSpec(e0=cfg.e0, omega=cfg.omega_l, envelope=build_envelope(cfg), cep=cfg.cep)


def mode_set(cfg: "SimulationConfig", g0: float = 1.0) -> ModeSet:
    return ModeSet(omega_l=cfg.omega_l, q_cutoff=cfg.q_cutoff, g0=g0)
