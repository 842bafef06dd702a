import logging
import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from bands import band_energy, band_model, preset_for
from config import SimulationConfig
from currents import HannWindow, direct_dft, windowed_transform
from enums import Band, CrystalDirection
from grid import GridResolutionError, build_grids, build_time_grid
from oracle import fock_purity, wigner_fock_oracle
from observables import purity, wigner_at
from pulse import pulse_from_config
from sbe import solve_sbe, solve_tdse
from states import ConditionedState

logger = logging.getLogger(__name__)

ORACLE_K_POINTS = 21
RANDOM_STATES = 100
SEED = 20240613


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_state(rng: np.random.Generator, largest: float = 3.0) -> ConditionedState:
    radius = largest * np.sqrt(rng.uniform(size=2))
    amplitudes = (radius * np.exp(2j * np.pi * rng.uniform(size=2)))[:, None]
    coefficients = rng.normal(size=2) + 1j * rng.normal(size=2)
    return ConditionedState(orders=np.array([1]), amplitudes=amplitudes, coefficients=coefficients)


class InvariantSuite:
    """
    Self-checks of the numerical core: band arithmetic, integrator conservation,
    the two solvers against each other, the FFT path against a direct DFT and the
    closed-form single-mode observables against the Fock-basis oracle.
    """

    def __init__(self, cfg: SimulationConfig, seed: int = SEED):
        self._cfg = cfg
        self._seed = seed

    def checks(self) -> List[Callable[[], CheckResult]]:
        return [self.band_arithmetic, self.solver_oracle, self.fft_against_dft, self.wigner_against_oracle,
                self.purity_against_oracle, self.oracle_sensitivity, self.resolution_guard]

    def run(self) -> List[CheckResult]:
        results = []
        for check in self.checks():
            try:
                result = check()
            except Exception as e:
                result = CheckResult(check.__name__, False, f"{type(e).__name__}: {e}")
            logger.info(f"{result.name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")
            results.append(result)
        return results

    def band_arithmetic(self) -> CheckResult:
        model = preset_for(CrystalDirection.GAMMA_M).model(e_g=self._cfg.e_g)
        e_v0 = float(band_energy(model, Band.VALENCE, 0.0))
        gap0 = float(band_energy(model, Band.CONDUCTION, 0.0)) - e_v0
        width = e_v0 - float(band_energy(model, Band.VALENCE, math.pi / model.lattice_constant))
        errors = (abs(e_v0), abs(gap0 - model.e_g), abs(width - 0.1398))
        return CheckResult("band_arithmetic", max(errors) <= 1e-12,
                           f"E_v(0)={e_v0:.2e}, gap(0)-E_g={errors[1]:.2e}, bandwidth={width:.4f}")

    def solver_oracle(self) -> CheckResult:
        cfg = self._cfg
        grid, k_grid = build_grids(cfg)
        model = band_model(cfg)
        pulse = pulse_from_config(cfg)
        k = np.linspace(k_grid.k[0], k_grid.k[-1], ORACLE_K_POINTS)
        amplitudes = solve_tdse(model, pulse, k, grid, cfg.norm_tolerance)
        drift = float(np.max(np.abs(amplitudes.norm() - 1.0)))
        bloch = solve_sbe(model, pulse, k, math.inf, grid, cfg.norm_tolerance)
        deviation = float(np.max(np.abs(bloch.n_c - np.abs(amplitudes.b_c) ** 2)))
        return CheckResult("solver_oracle", deviation <= 1e-6 and drift <= cfg.norm_tolerance,
                           f"{ORACLE_K_POINTS} K points, max |dn_c|={deviation:.2e}, norm drift={drift:.2e}")

    def fft_against_dft(self) -> CheckResult:
        signal = np.random.default_rng(self._seed).normal(size=256)
        window = HannWindow()
        fast = windowed_transform(signal, window)
        slow = direct_dft(signal * window.weights(signal.size))
        error = float(np.max(np.abs(fast - slow)))
        return CheckResult("fft_against_dft", error <= 1e-10, f"max deviation {error:.2e}")

    def wigner_against_oracle(self) -> CheckResult:
        rng = np.random.default_rng(self._seed)
        axis = np.linspace(-4.0, 4.0, 21)
        x, p = np.meshgrid(axis, axis, indexing="ij")
        beta = x + 1j * p
        worst = 0.0
        for _ in range(RANDOM_STATES):
            state = _random_state(rng)
            worst = max(worst, float(np.max(np.abs(wigner_at(state, 1, beta) - wigner_fock_oracle(state, 1, beta)))))
        return CheckResult("wigner_against_oracle", worst <= 1e-8,
                           f"{RANDOM_STATES} random states, max deviation {worst:.2e}")

    def purity_against_oracle(self) -> CheckResult:
        rng = np.random.default_rng(self._seed + 1)
        worst = 0.0
        for _ in range(RANDOM_STATES):
            state = _random_state(rng)
            worst = max(worst, abs(purity(state, 1) - fock_purity(state, 1)))
        return CheckResult("purity_against_oracle", worst <= 1e-8,
                           f"{RANDOM_STATES} random states, max deviation {worst:.2e}")

    def oracle_sensitivity(self) -> CheckResult:
        """A sign-flipped displacement must be told apart by the oracle comparison."""
        state = ConditionedState(orders=np.array([1]), amplitudes=np.array([[1.5], [0.0]], dtype=complex),
                                 coefficients=np.array([1.0, -np.exp(-1.125)], dtype=complex))
        flipped = ConditionedState(orders=state.orders, amplitudes=-state.amplitudes,
                                   coefficients=state.coefficients)
        beta = np.linspace(-3.0, 3.0, 21) + 0.5j
        mismatch = float(np.max(np.abs(wigner_at(state, 1, beta) - wigner_fock_oracle(flipped, 1, beta))))
        return CheckResult("oracle_sensitivity", mismatch > 1e-3, f"mutated-state deviation {mismatch:.2e}")

    def resolution_guard(self) -> CheckResult:
        coarse = self._cfg.with_options(n_t=1024)
        try:
            build_time_grid(coarse)
        except GridResolutionError as e:
            return CheckResult("resolution_guard", True, f"n_t=1024 rejected, needs n_t >= {e.min_n_t}")
        return CheckResult("resolution_guard", False, "n_t=1024 was accepted")


def format_report(results: List[CheckResult]) -> str:
    width = max(len(result.name) for result in results)
    lines = [f"{'check':<{width}}  status  detail", f"{'-' * width}  ------  ------"]
    for result in results:
        lines.append(f"{result.name:<{width}}  {'ok' if result.passed else 'FAIL':<6}  {result.detail}")
    passed = sum(result.passed for result in results)
    lines.append(f"{passed}/{len(results)} checks passed")
    return "\n".join(lines)
