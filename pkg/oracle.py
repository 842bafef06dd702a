"""
Number-basis reference implementation of the single-mode observables.

Every branch of a conditioned state is expanded in Fock states, the reduced
density matrix is built explicitly and the Wigner function is evaluated with the
Laguerre recursion for the displaced-parity matrix elements. Nothing here shares
code with the closed-form coherent-branch algebra in observables.py.
"""
import math
from typing import Optional

import numpy as np
from scipy.special import gammaln

from states import ConditionedState

# Largest allowed probability outside the truncated Fock space, per branch
TAIL_TOLERANCE = 1e-10


class TruncationError(Exception):
    """Raised when the Fock truncation leaves more than the tolerated probability outside."""

    def __init__(self, n_max: int, tail: float):
        super().__init__(n_max, tail)
        self.n_max = n_max
        self.tail = tail

    def __str__(self):
        return f"Fock truncation n_max={self.n_max} leaves tail norm {self.tail:.3e} > {TAIL_TOLERANCE:g}"


def required_cutoff(largest_amplitude: float) -> int:
    return int(math.ceil(largest_amplitude ** 2 + 8.0 * largest_amplitude + 20.0))


def fock_coefficients(alpha: complex, n_max: int) -> np.ndarray:
    """<n|alpha> for n < n_max, with factorials in log space."""
    n = np.arange(n_max)
    if alpha == 0:
        coefficients = np.zeros(n_max, dtype=complex)
        coefficients[0] = 1.0
        return coefficients
    log_modulus = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_modulus + 1j * n * np.angle(alpha))


def fock_density_matrix(state: ConditionedState, mode: int, n_max: Optional[int] = None) -> np.ndarray:
    """Normalized reduced density matrix <m|rho|n> of `mode`."""
    reduced = state.reduced(mode)
    if n_max is None:
        n_max = required_cutoff(float(np.max(np.abs(reduced.amplitudes))))

    kets = np.array([fock_coefficients(complex(a), n_max) for a in reduced.amplitudes])
    tails = 1.0 - np.sum(np.abs(kets) ** 2, axis=1)
    if np.max(tails) > TAIL_TOLERANCE:
        raise TruncationError(n_max, float(np.max(tails)))

    rho = kets.T @ reduced.weights @ np.conj(kets)
    return rho / np.real(np.trace(rho))


def fock_purity(state: ConditionedState, mode: int, n_max: Optional[int] = None) -> float:
    rho = fock_density_matrix(state, mode, n_max)
    return float(np.real(np.trace(rho @ rho)))


def wigner_from_density_matrix(rho: np.ndarray, beta) -> np.ndarray:
    """
    W(beta) = (2/pi) tr[D(beta) Parity D(beta)^dag rho], summed over matrix elements with
    the stable two-row recursion for the Wigner function of |m><n|.
    """
    beta = np.asarray(beta, dtype=complex)
    cutoff = rho.shape[0]
    rows = np.zeros((2, cutoff) + beta.shape, dtype=complex)

    rows[0, 0] = np.exp(-2.0 * np.abs(beta) ** 2) / np.pi
    w = np.real(rho[0, 0]) * np.real(rows[0, 0])
    for n in range(1, cutoff):
        rows[0, n] = 2.0 * beta * rows[0, n - 1] / np.sqrt(n)
        w += 2.0 * np.real(rho[0, n] * rows[0, n])

    for m in range(1, cutoff):
        rows[1, m] = (2.0 * np.conj(beta) * rows[0, m] - np.sqrt(m) * rows[0, m - 1]) / np.sqrt(m)
        w += np.real(rho[m, m] * rows[1, m])
        for n in range(m + 1, cutoff):
            rows[1, n] = (2.0 * beta * rows[1, n - 1] - np.sqrt(m) * rows[0, n - 1]) / np.sqrt(n)
            w += 2.0 * np.real(rho[m, n] * rows[1, n])
        rows[0] = rows[1]

    # the recursion is normalized to 1/pi at the vacuum peak
    return 2.0 * w


def wigner_fock_oracle(state: ConditionedState, mode: int, beta, n_max: Optional[int] = None) -> np.ndarray:
    return wigner_from_density_matrix(fock_density_matrix(state, mode, n_max), beta)
