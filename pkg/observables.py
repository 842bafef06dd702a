import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from enums import Reference
from states import ConditionedState, ModeIndexError, coherent_overlap

logger = logging.getLogger(__name__)

__all__ = ["WignerMap", "WignerGridWarning", "ModeIndexError", "wigner", "wigner_at", "fidelity", "purity",
           "linear_entropy"]

# Minimum margin between the largest amplitude and the Wigner grid edge
WIGNER_MARGIN = 4.0
WIGNER_PADDING = 5.0


class WignerGridWarning(UserWarning):
    """The phase-space grid does not extend far enough past the state's amplitudes."""


@dataclass(frozen=True, eq=False)
class WignerMap:
    """W(x + ip) on a square grid; `values[i, j]` belongs to (x[i], p[j])."""
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray

    @property
    def step(self) -> float:
        return float(self.x[1] - self.x[0])

    def integral(self) -> float:
        return float(trapezoid(trapezoid(self.values, self.p, axis=1), self.x))

    def minimum(self) -> float:
        return float(np.min(self.values))

    def negative_volume(self) -> float:
        return float(-trapezoid(trapezoid(np.minimum(self.values, 0.0), self.p, axis=1), self.x))


def wigner_at(state: ConditionedState, mode: int, beta) -> np.ndarray:
    """
    Wigner function (2/pi) tr[D(beta) Parity D(beta)^dag rho] of the reduced state of
    `mode` at the complex points `beta`, built from the closed form of every
    branch pair: W_{|a><b|}(beta) = (2/pi) <b|a> exp(-2 (beta - a)(beta* - b*)).
    """
    reduced = state.reduced(mode)
    weights = reduced.normalized_weights()
    alpha = reduced.amplitudes
    beta = np.asarray(beta, dtype=complex)
    values = np.zeros(beta.shape, dtype=complex)
    for i in range(alpha.size):
        for j in range(alpha.size):
            overlap = coherent_overlap(alpha[j], alpha[i])
            values += weights[i, j] * overlap * np.exp(-2.0 * (beta - alpha[i]) * (np.conj(beta) - np.conj(alpha[j])))
    return (2.0 / np.pi) * values.real


def wigner(state: ConditionedState, mode: int = 1, extent: Optional[float] = None, points: int = 201) -> WignerMap:
    """Wigner map on [-extent, extent]^2; the default extent pads the largest amplitude by 5."""
    largest = float(np.max(np.abs(state.mode_amplitudes(mode))))
    if extent is None:
        extent = largest + WIGNER_PADDING
    elif extent < largest + WIGNER_MARGIN:
        warnings.warn(f"Wigner grid half-width {extent:.3g} is less than {WIGNER_MARGIN:g} beyond "
                      f"the largest amplitude {largest:.3g}", WignerGridWarning)
    axis = np.linspace(-extent, extent, points)
    x, p = np.meshgrid(axis, axis, indexing="ij")
    return WignerMap(x=axis, p=axis.copy(), values=wigner_at(state, mode, x + 1j * p))


def _reference_overlaps(reference: Reference, amplitudes: np.ndarray, alpha: Optional[complex]) -> np.ndarray:
    """<phi|a_i> for the reference ket phi."""
    reference = Reference(reference)
    if reference == Reference.FOCK1:
        return amplitudes * np.exp(-0.5 * np.abs(amplitudes) ** 2)
    if reference == Reference.VACUUM:
        return np.exp(-0.5 * np.abs(amplitudes) ** 2)
    if alpha is None:
        alpha = amplitudes[0]
    return coherent_overlap(alpha, amplitudes)


def fidelity(state: ConditionedState, reference: Reference = Reference.FOCK1, mode: int = 1,
             alpha: Optional[complex] = None) -> float:
    """
    <phi|rho_mode|phi> for a pure reference phi: the Fock state |1>, the vacuum, or the
    coherent state |alpha> (default: the displaced branch of the mode).
    """
    reduced = state.reduced(mode)
    v = _reference_overlaps(reference, reduced.amplitudes, alpha)
    value = float(np.real(v @ reduced.normalized_weights() @ np.conj(v)))
    return min(max(value, 0.0), 1.0)


def purity(state: ConditionedState, mode: int) -> float:
    return state.reduced(mode).purity()


def linear_entropy(state: ConditionedState, mode: int) -> float:
    """1 - tr(rho_mode^2) from the Gram algebra of the two non-orthogonal branch kets."""
    value = 1.0 - purity(state, mode)
    return min(max(value, 0.0), 1.0)
