import logging
from dataclasses import dataclass, replace

import numpy as np

from displacement import ModeDisplacements

logger = logging.getLogger(__name__)


class ConditioningError(Exception):
    """Raised when projecting out the all-vacuum component leaves the zero vector."""


class ModeIndexError(Exception):
    """Raised when an observable is requested for a mode the state does not carry."""

    def __init__(self, order: int, available):
        super().__init__(order, available)
        self.order = order
        self.available = available

    def __str__(self):
        return f"mode q={self.order} not in {list(self.available)}"


def coherent_overlap(beta, alpha):
    """<beta|alpha> for coherent states, elementwise."""
    beta = np.asarray(beta)
    alpha = np.asarray(alpha)
    return np.exp(-0.5 * np.abs(alpha) ** 2 - 0.5 * np.abs(beta) ** 2 + np.conj(beta) * alpha)


@dataclass(frozen=True, eq=False)
class ReducedMode:
    """
    Single-mode reduced state rho = sum_ij weights[i, j] |a_i><a_j| on the
    non-orthogonal kets |a_i> = |amplitudes[i]>; not normalized.
    """
    amplitudes: np.ndarray
    weights: np.ndarray

    def gram(self) -> np.ndarray:
        return coherent_overlap(self.amplitudes[:, None], self.amplitudes[None, :])

    def trace(self) -> float:
        return float(np.real(np.trace(self.weights @ self.gram())))

    def purity(self) -> float:
        cg = self.weights @ self.gram()
        return float(np.real(np.trace(cg @ cg)) / np.real(np.trace(cg)) ** 2)

    def normalized_weights(self) -> np.ndarray:
        return self.weights / self.trace()


@dataclass(frozen=True, eq=False)
class ConditionedState:
    """
    Unnormalized superposition sum_i coefficients[i] |amplitudes[i, :]> of multimode
    coherent states over the harmonic modes `orders`.
    """
    orders: np.ndarray
    amplitudes: np.ndarray
    coefficients: np.ndarray
    xi_ir: float = 1.0
    xi_uv: float = 1.0
    form: str = "custom"

    @property
    def n_branches(self) -> int:
        return self.coefficients.size

    def mode_index(self, order: int) -> int:
        matches = np.flatnonzero(self.orders == order)
        if matches.size == 0:
            raise ModeIndexError(order, self.orders)
        return int(matches[0])

    def mode_amplitudes(self, order: int) -> np.ndarray:
        return self.amplitudes[:, self.mode_index(order)]

    def gram(self) -> np.ndarray:
        """G[i, j] = <branch_i|branch_j>."""
        overlaps = coherent_overlap(self.amplitudes[:, None, :], self.amplitudes[None, :, :])
        return np.prod(overlaps, axis=-1)

    def norm_squared(self) -> float:
        c = self.coefficients
        return float(np.real(np.conj(c) @ self.gram() @ c))

    def normalized(self) -> "ConditionedState":
        return replace(self, coefficients=self.coefficients / np.sqrt(self.norm_squared()))

    def with_phase(self, phase: float) -> "ConditionedState":
        return replace(self, coefficients=self.coefficients * np.exp(1j * phase))

    def displaced(self, delta: complex, order: int) -> "ConditionedState":
        """Apply D(delta) to mode `order`: D(d)|a> = exp(i Im(d a*)) |a + d>."""
        index = self.mode_index(order)
        alpha = self.amplitudes[:, index]
        amplitudes = self.amplitudes.copy()
        amplitudes[:, index] = alpha + delta
        phases = np.exp(1j * np.imag(delta * np.conj(alpha)))
        return replace(self, amplitudes=amplitudes, coefficients=self.coefficients * phases)

    def reduced(self, order: int) -> ReducedMode:
        """
        Trace out every mode but `order`:
        weights[i, j] = c_i c_j* prod_{m != order} <a_j^m|a_i^m>.
        """
        index = self.mode_index(order)
        others = np.delete(self.amplitudes, index, axis=1)
        partner = np.prod(coherent_overlap(others[None, :, :], others[:, None, :]), axis=-1)
        weights = np.outer(self.coefficients, np.conj(self.coefficients)) * partner
        return ReducedMode(amplitudes=self.amplitudes[:, index].copy(), weights=weights)


def _vacuum_factors(disp: ModeDisplacements):
    if not np.any(disp.chi != 0):
        raise ConditioningError("conditioning annihilates state: every displacement is zero")
    vacuum = np.exp(-0.5 * np.abs(disp.chi) ** 2)
    first = disp.index(1) if np.any(disp.orders == 1) else 0
    xi_ir = float(vacuum[first])
    xi_uv = float(np.prod(np.delete(vacuum, first)))
    return first, xi_ir, xi_uv


def condition_full(disp: ModeDisplacements) -> ConditionedState:
    """|chi_1, ..., chi_qc> - xi_ir xi_uv |0, ..., 0> over every mode."""
    _, xi_ir, xi_uv = _vacuum_factors(disp)
    amplitudes = np.zeros((2, disp.chi.size), dtype=complex)
    amplitudes[0] = disp.chi
    state = ConditionedState(orders=np.asarray(disp.orders), amplitudes=amplitudes,
                             coefficients=np.array([1.0, -xi_ir * xi_uv], dtype=complex),
                             xi_ir=xi_ir, xi_uv=xi_uv, form="full")
    _check_norm(state)
    return state


def condition_ir(disp: ModeDisplacements) -> ConditionedState:
    """Fundamental mode alone after projecting the harmonics: |chi_1> - xi_ir xi_uv^2 |0>."""
    first, xi_ir, xi_uv = _vacuum_factors(disp)
    amplitudes = np.array([[disp.chi[first]], [0.0]], dtype=complex)
    state = ConditionedState(orders=np.asarray(disp.orders)[[first]], amplitudes=amplitudes,
                             coefficients=np.array([1.0, -xi_ir * xi_uv ** 2], dtype=complex),
                             xi_ir=xi_ir, xi_uv=xi_uv, form="ir")
    _check_norm(state)
    return state


def _check_norm(state: ConditionedState):
    norm_squared = state.norm_squared()
    if not norm_squared > 1e-300:
        raise ConditioningError(f"conditioning annihilates state: norm^2 = {norm_squared:.3e}")
    logger.debug(f"Conditioned {state.form} state: xi_ir={state.xi_ir:.4g} xi_uv={state.xi_uv:.4g} "
                 f"norm^2={norm_squared:.6g}")
