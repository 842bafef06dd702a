from dataclasses import dataclass, field, replace
from typing import Any, Dict

import numpy as np

from currents import MatrixElementTables
from enums import Component
from grid import TimeGrid, KGrid
from pulse import ModeSet, EnvelopeTables


@dataclass(frozen=True, eq=False)
class ModeDisplacements:
    """Aggregate coherent displacement chi of each harmonic mode, with the run metadata it came from."""
    orders: np.ndarray
    chi: np.ndarray
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __len__(self):
        return self.chi.size

    def __getitem__(self, order: int) -> complex:
        return complex(self.chi[self.index(order)])

    def index(self, order: int) -> int:
        matches = np.flatnonzero(self.orders == order)
        if matches.size == 0:
            raise KeyError(order)
        return int(matches[0])

    def scaled(self, factor: float, **metadata) -> "ModeDisplacements":
        """Displacements are linear in g0 and N_z; rescale both the values and the metadata."""
        merged = dict(self.metadata)
        merged.update(metadata)
        return replace(self, chi=self.chi * factor, metadata=merged)


def mode_displacement(tables: MatrixElementTables, modes: ModeSet, envelopes: EnvelopeTables, grid: TimeGrid,
                      component: Component = Component.TOTAL) -> np.ndarray:
    """
    Per-K displacements, shape (n_k, q_c):
    chi_q(K) = g_q / hbar * trapz[-M_ter(K, t) f_q(t) + M_tra(K, t) F_q(t)].
    """
    component = Component(component)
    weights = grid.trapezoid_weights()[:, None]
    chi = np.zeros((tables.k.size, modes.q_cutoff), dtype=complex)
    if component in (Component.TOTAL, Component.INTER):
        weighted_ter = weights * tables.m_ter
        for q in range(modes.q_cutoff):
            chi[:, q] -= np.sum(weighted_ter * envelopes.f[:, q, None], axis=0)
    if component in (Component.TOTAL, Component.INTRA):
        weighted_tra = weights * tables.m_tra
        for q in range(modes.q_cutoff):
            chi[:, q] += np.sum(weighted_tra * envelopes.F[:, q, None], axis=0)
    return chi * modes.couplings[None, :]


def aggregate_displacement(per_k: np.ndarray, k_grid: KGrid, n_z: float, orders: np.ndarray,
                           **metadata) -> ModeDisplacements:
    """chi_bar_q = N_z * sum_K chi_q(K) dK, summed in K-grid order."""
    chi = n_z * np.sum(per_k, axis=0) * k_grid.dk
    metadata.setdefault("n_z", n_z)
    return ModeDisplacements(orders=np.asarray(orders), chi=chi, metadata=metadata)
