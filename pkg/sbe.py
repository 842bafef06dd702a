import logging
import math
from dataclasses import dataclass
from typing import Callable, Tuple

import numpy as np

from bands import BandModel
from enums import Provenance
from grid import TimeGrid
from pulse import PulseSpec, vector_potential, classical_field

logger = logging.getLogger(__name__)

# Rows of the (stage time x K) band tables evaluated per chunk
_TABLE_CHUNK = 8192

_coupling_notice_logged = False


class IntegratorResolutionError(Exception):
    """Raised when a conserved quantity drifts beyond tolerance at the configured time step."""

    def __init__(self, quantity: str, drift: float, required_n_t: int):
        super().__init__(quantity, drift, required_n_t)
        self.quantity = quantity
        self.drift = drift
        self.required_n_t = required_n_t

    def __str__(self):
        return (f"{self.quantity} drifted by {self.drift:.3e}; "
                f"rerun with n_t >= {self.required_n_t}")


@dataclass(frozen=True, eq=False)
class AmplitudeTrajectory:
    """
    Two-band amplitudes b_v, b_c of shape (n_t, n_k), reported with the valence
    dynamical phase removed (a global phase per K; populations and the coherence
    b_v* b_c are unaffected).
    """
    k: np.ndarray
    b_v: np.ndarray
    b_c: np.ndarray

    def norm(self) -> np.ndarray:
        return np.abs(self.b_v) ** 2 + np.abs(self.b_c) ** 2

    def to_sbe(self) -> "SBETrajectory":
        n_c = np.abs(self.b_c) ** 2
        return SBETrajectory(k=self.k, n_c=n_c, pi=np.conj(self.b_v) * self.b_c,
                             provenance=Provenance.TDSE, t2=math.inf)


@dataclass(frozen=True, eq=False)
class SBETrajectory:
    """Populations and interband coherence pi = rho_vc of shape (n_t, n_k); n_v is 1 - n_c by construction."""
    k: np.ndarray
    n_c: np.ndarray
    pi: np.ndarray
    provenance: Provenance
    t2: float

    @property
    def n_v(self) -> np.ndarray:
        return 1.0 - self.n_c


def _log_coupling_form():
    global _coupling_notice_logged
    if not _coupling_notice_logged:
        logger.info("Interband coupling is E_cl(t) * d_vc(K + A(t)) (field-multiplied dipole)")
        _coupling_notice_logged = True


def band_tables(model: BandModel, spec: PulseSpec, k, grid: TimeGrid) -> Tuple[np.ndarray, np.ndarray]:
    """
    Transition energy and field coupling E(t) d_vc(K + A(t)) on the RK4 stage times
    (full steps interleaved with midpoints), shape (2 n_t - 1, n_k).
    """
    stages = grid.stage_times()
    a = vector_potential(spec, stages)
    e = classical_field(spec, stages)
    gap = np.empty((stages.size, k.size))
    coupling = np.empty((stages.size, k.size))
    for start in range(0, stages.size, _TABLE_CHUNK):
        rows = slice(start, start + _TABLE_CHUNK)
        e_v, e_c = model.energies(k[None, :] + a[rows, None])
        gap[rows] = e_c - e_v
        coupling[rows] = e[rows, None] * model.dipole_from_gap(gap[rows])
    return gap, coupling


def integrate_rk4(rhs: Callable[[int, np.ndarray], np.ndarray], y0: np.ndarray, n_steps: int,
                  dt: float) -> np.ndarray:
    """
    Classical fixed-step RK4. `rhs(stage, y)` receives the index into the interleaved
    stage-time tables: 2n at t_n, 2n+1 at the midpoint, 2n+2 at t_(n+1).
    """
    out = np.empty((n_steps + 1,) + y0.shape, dtype=complex)
    out[0] = y0
    y = out[0].copy()
    half = 0.5 * dt
    sixth = dt / 6.0
    for n in range(n_steps):
        s = 2 * n
        k1 = rhs(s, y)
        k2 = rhs(s + 1, y + half * k1)
        k3 = rhs(s + 1, y + half * k2)
        k4 = rhs(s + 2, y + dt * k3)
        y = y + sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[n + 1] = y
    return out


def _required_n_t(n_t: int, drift: float, tolerance: float) -> int:
    # global RK4 error ~ dt^4 on amplitudes; norm error of an oscillator ~ dt^5
    factor = 1.25 * (drift / tolerance) ** 0.2
    return 1 << math.ceil(math.log2(n_t * max(factor, 2.0)))


def solve_tdse(model: BandModel, spec: PulseSpec, k, grid: TimeGrid,
               tolerance: float = 1e-6) -> AmplitudeTrajectory:
    """
    Two-band Schrödinger equation in the moving frame k = K + A(t), for one K or an
    array of K. The valence energy is subtracted from both diagonal entries, which
    only changes a global phase per K.
    """
    _log_coupling_form()
    k = np.atleast_1d(np.asarray(k, dtype=float))
    gap, coupling = band_tables(model, spec, k, grid)

    def rhs(s, y):
        dy = np.empty_like(y)
        dy[0] = -1j * coupling[s] * y[1]
        dy[1] = -1j * (gap[s] * y[1] + coupling[s] * y[0])
        return dy

    y0 = np.zeros((2, k.size), dtype=complex)
    y0[0] = 1.0
    y = integrate_rk4(rhs, y0, grid.n - 1, grid.dt)
    trajectory = AmplitudeTrajectory(k=k, b_v=y[:, 0, :], b_c=y[:, 1, :])

    drift = float(np.max(np.abs(trajectory.norm() - 1.0)))
    if drift > tolerance:
        raise IntegratorResolutionError("norm |b_v|^2 + |b_c|^2", drift, _required_n_t(grid.n, drift, tolerance))
    logger.debug(f"TDSE: {k.size} K points, norm drift {drift:.2e}")
    return trajectory


def solve_sbe(model: BandModel, spec: PulseSpec, k, t2: float, grid: TimeGrid,
              tolerance: float = 1e-6) -> SBETrajectory:
    """
    Two-band Bloch equations for (n_c, pi) with dephasing time t2 acting on pi only.
    Only n_c is integrated, so n_v + n_c = 1 holds exactly.
    """
    _log_coupling_form()
    k = np.atleast_1d(np.asarray(k, dtype=float))
    gap, coupling = band_tables(model, spec, k, grid)
    damped = not math.isinf(t2)
    rate = 1.0 / t2 if damped else 0.0

    def rhs(s, y):
        n_c = y[0].real
        pi = y[1]
        dy = np.empty_like(y)
        dy[0] = -2.0 * coupling[s] * pi.imag
        dy[1] = -1j * (gap[s] * pi + coupling[s] * (1.0 - 2.0 * n_c))
        if damped:
            dy[1] -= rate * pi
        return dy

    y = integrate_rk4(rhs, np.zeros((2, k.size), dtype=complex), grid.n - 1, grid.dt)
    trajectory = SBETrajectory(k=k, n_c=y[:, 0, :].real.copy(), pi=y[:, 1, :].copy(),
                               provenance=Provenance.SBE, t2=t2)

    excess = float(np.max(np.abs(trajectory.pi) ** 2 - trajectory.n_v * trajectory.n_c))
    if excess > tolerance:
        raise IntegratorResolutionError("coherence bound |pi|^2 <= n_v n_c", excess,
                                        _required_n_t(grid.n, excess, tolerance))
    logger.debug(f"SBE: {k.size} K points, T2={t2:.4g} a.u., coherence excess {excess:.2e}")
    return trajectory


def solve(model: BandModel, spec: PulseSpec, k, t2: float, grid: TimeGrid,
          tolerance: float = 1e-6) -> SBETrajectory:
    """SBE trajectory for any T2; T2 = inf goes through the norm-checked amplitude equations."""
    if math.isinf(t2):
        return solve_tdse(model, spec, k, grid, tolerance).to_sbe()
    return solve_sbe(model, spec, k, t2, grid, tolerance)
