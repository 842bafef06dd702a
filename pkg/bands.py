import math
from dataclasses import dataclass
from typing import Optional, Tuple, TYPE_CHECKING

import numpy as np

from constants import BAND_SCAN_POINTS
from enums import Band, CrystalDirection

if TYPE_CHECKING:
    from config import SimulationConfig


class BandModelError(Exception):
    """Raised when a coefficient set closes the gap somewhere in the zone."""


def _cosine_table(x, order: int) -> np.ndarray:
    """cos(j x) for j = 0..order-1 along a trailing axis, by the Chebyshev recurrence."""
    x = np.asarray(x, dtype=float)
    table = np.empty(x.shape + (order,))
    table[..., 0] = 1.0
    if order > 1:
        table[..., 1] = np.cos(x)
    for j in range(2, order):
        table[..., j] = 2.0 * table[..., 1] * table[..., j - 1] - table[..., j - 2]
    return table


def _sine_table(x, order: int) -> np.ndarray:
    """sin(j x) for j = 0..order-1 along a trailing axis."""
    x = np.asarray(x, dtype=float)
    table = np.zeros(x.shape + (order,))
    if order > 1:
        cos_x = np.cos(x)
        table[..., 1] = np.sin(x)
        for j in range(2, order):
            table[..., j] = 2.0 * cos_x * table[..., j - 1] - table[..., j - 2]
    return table


@dataclass(frozen=True)
class BandModel:
    """
    Two-band tight-binding model along one crystal axis.

    E_v(k) = sum_j alpha_v[j] cos(j k a)
    E_c(k) = e_g + sum_j alpha_c[j] cos(j k a)
    d_vc(k) = sqrt(e_p / (2 (E_c - E_v)^2))

    The cosine series make every band function periodic in k, so momenta
    pushed outside the first zone by the vector potential need no wrapping.
    """
    lattice_constant: float
    alpha_v: Tuple[float, ...]
    alpha_c: Tuple[float, ...]
    e_g: float
    e_p: float
    name: str = "custom"

    def __post_init__(self):
        if len(self.alpha_v) != len(self.alpha_c):
            raise BandModelError(f"{self.name}: valence and conduction expansions differ in length")
        k = np.linspace(-math.pi / self.lattice_constant, math.pi / self.lattice_constant, BAND_SCAN_POINTS)
        e_v, e_c = self.energies(k)
        if np.min(e_c - e_v) <= 0:
            raise BandModelError(f"{self.name}: conduction band touches the valence band")

    @property
    def order(self) -> int:
        return len(self.alpha_v)

    def energies(self, k) -> Tuple[np.ndarray, np.ndarray]:
        """Valence and conduction energies at k from one shared cosine table."""
        table = _cosine_table(np.multiply(k, self.lattice_constant), self.order)
        e_v = np.sum(table * np.asarray(self.alpha_v), axis=-1)
        e_c = self.e_g + np.sum(table * np.asarray(self.alpha_c), axis=-1)
        return e_v, e_c

    def velocities(self, k) -> Tuple[np.ndarray, np.ndarray]:
        weights = -self.lattice_constant * np.arange(self.order)
        table = _sine_table(np.multiply(k, self.lattice_constant), self.order)
        v_v = np.sum(table * (weights * np.asarray(self.alpha_v)), axis=-1)
        v_c = np.sum(table * (weights * np.asarray(self.alpha_c)), axis=-1)
        return v_v, v_c

    def dipole_from_gap(self, gap):
        return math.sqrt(0.5 * self.e_p) / gap


def band_energy(model: BandModel, band: Band, k):
    e_v, e_c = model.energies(k)
    return e_v if Band(band) == Band.VALENCE else e_c


def group_velocity(model: BandModel, band: Band, k):
    v_v, v_c = model.velocities(k)
    return v_v if Band(band) == Band.VALENCE else v_c


def transition_energy(model: BandModel, k):
    e_v, e_c = model.energies(k)
    return e_c - e_v


def dipole_vc(model: BandModel, k):
    return model.dipole_from_gap(transition_energy(model, k))


@dataclass(frozen=True)
class GapExtrema:
    min_gap: float
    max_gap: float
    k_at_min: float
    k_at_max: float
    min_order: Optional[float] = None
    max_order: Optional[float] = None


def bandgap_extrema(model: BandModel, omega_l: Optional[float] = None) -> GapExtrema:
    """Extrema of E_c - E_v on a dense scan of the zone, optionally also as harmonic orders of omega_l."""
    k = np.linspace(-math.pi / model.lattice_constant, math.pi / model.lattice_constant, BAND_SCAN_POINTS + 1)
    gap = transition_energy(model, k)
    i_min, i_max = int(np.argmin(gap)), int(np.argmax(gap))
    extrema = GapExtrema(min_gap=float(gap[i_min]), max_gap=float(gap[i_max]),
                         k_at_min=float(k[i_min]), k_at_max=float(k[i_max]))
    if omega_l is None:
        return extrema
    return GapExtrema(extrema.min_gap, extrema.max_gap, extrema.k_at_min, extrema.k_at_max,
                      min_order=extrema.min_gap / omega_l, max_order=extrema.max_gap / omega_l)


# Cosine-expansion coefficients (a.u.) of ZnO along its three principal directions
_PRESETS = {
    CrystalDirection.GAMMA_M: dict(
        name="zno_gm",
        lattice_constant=5.32,
        alpha_v=(-0.0928, 0.0705, 0.0200, -0.0012, 0.0029, 0.0006),
        alpha_c=(0.0898, -0.0814, -0.0024, -0.0048, -0.0003, -0.0009),
    ),
    CrystalDirection.GAMMA_K: dict(
        name="zno_gk",
        lattice_constant=6.14,
        alpha_v=(-0.0307, 0.0307),
        alpha_c=(0.1147, -0.1147),
    ),
    CrystalDirection.GAMMA_A: dict(
        name="zno_ga",
        lattice_constant=9.83,
        alpha_v=(-0.0059, 0.0059),
        alpha_c=(0.0435, -0.0435),
    ),
}

PRESET_NAMES = {preset["name"]: direction for direction, preset in _PRESETS.items()}

DEFAULT_E_G = 0.1213
DEFAULT_E_P = 0.355


@dataclass(frozen=True)
class _Preset:
    name: str
    lattice_constant: float
    alpha_v: Tuple[float, ...]
    alpha_c: Tuple[float, ...]

    def model(self, e_g: float = DEFAULT_E_G, e_p: float = DEFAULT_E_P) -> BandModel:
        return BandModel(lattice_constant=self.lattice_constant, alpha_v=self.alpha_v, alpha_c=self.alpha_c,
                         e_g=e_g, e_p=e_p, name=self.name)


def preset_for(direction) -> _Preset:
    if isinstance(direction, str) and direction in PRESET_NAMES:
        direction = PRESET_NAMES[direction]
    return _Preset(**_PRESETS[CrystalDirection(direction)])


def band_model(cfg: "SimulationConfig") -> BandModel:
    return preset_for(cfg.direction).model(e_g=cfg.e_g, e_p=cfg.kane_parameter)
