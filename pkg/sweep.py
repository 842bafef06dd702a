import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from joblib import Parallel, delayed

from bands import BandModel, band_model
from config import SimulationConfig
from constants import K_BATCH_SIZE
from currents import CurrentTrace
from displacement import ModeDisplacements, aggregate_displacement
from enums import Component
from grid import TimeGrid, KGrid, build_grids
from pipeline import KBatchPipeline, BatchResult, StageError
from progress import ProgressMonitor
from pulse import PulseSpec, ModeSet, pulse_from_config, mode_set, mode_envelopes

logger = logging.getLogger(__name__)

__all__ = ["SweepResult", "StageError", "k_batches", "run_sweep"]


@dataclass(frozen=True, eq=False)
class SweepResult:
    """
    Everything one K-sweep produces. Displacements are stored per K at unit coupling
    (g0 = 1, N_z = 1); `displacements` applies the physical g0 and N_z, both of
    which enter linearly.
    """
    config: SimulationConfig
    model: BandModel
    pulse: PulseSpec
    grid: TimeGrid
    k_grid: KGrid
    modes: ModeSet
    current: CurrentTrace
    chi_inter: np.ndarray
    chi_intra: np.ndarray

    def per_k(self, component: Component = Component.TOTAL) -> np.ndarray:
        component = Component(component)
        if component == Component.INTER:
            return self.chi_inter
        if component == Component.INTRA:
            return self.chi_intra
        return self.chi_inter + self.chi_intra

    def displacements(self, g0: float, component: Component = Component.TOTAL,
                      n_z: Optional[float] = None) -> ModeDisplacements:
        n_z = self.config.n_z if n_z is None else n_z
        cfg = self.config
        return aggregate_displacement(
            g0 * self.per_k(component), self.k_grid, n_z, self.modes.orders,
            g0=g0, component=Component(component).value, direction=cfg.direction.value,
            e0_v_per_angstrom=cfg.snapshot()["e0_v_per_angstrom"], t2_fs=cfg.snapshot()["t2_fs"],
        )


def k_batches(n_k: int, batch_size: int = K_BATCH_SIZE) -> List[np.ndarray]:
    """Fixed-size index batches in K-grid order; the split never depends on the worker count."""
    return [np.arange(start, min(start + batch_size, n_k)) for start in range(0, n_k, batch_size)]


def _process_batch(pipeline: KBatchPipeline, k: np.ndarray) -> BatchResult:
    return pipeline.process(k)


def run_sweep(cfg: SimulationConfig, threads: int = 1) -> SweepResult:
    """
    Solve every K point of the grid and reduce to macroscopic currents and per-K
    displacements. Batches run on `threads` joblib workers; their results are
    consumed and summed in batch order, so the output does not depend on `threads`.
    """
    grid, k_grid = build_grids(cfg)
    model = band_model(cfg)
    pulse = pulse_from_config(cfg)
    modes = mode_set(cfg, g0=1.0)
    envelopes = mode_envelopes(pulse, modes, grid)
    pipeline = KBatchPipeline(model, pulse, grid, k_grid, modes, envelopes, cfg.t2, cfg.norm_tolerance)
    batches = k_batches(k_grid.n)

    logger.info(f"K-sweep: {k_grid.n} K points in {len(batches)} batches, {threads} worker(s), "
                f"direction={cfg.direction.value}, T2={'inf' if cfg.t2_infinite else f'{cfg.t2:.4g} a.u.'}")

    polarization = np.zeros(grid.n)
    j_tra = np.zeros(grid.n)
    chi_inter = []
    chi_intra = []
    with ProgressMonitor("K-sweep batches", len(batches)) as monitor:
        results = Parallel(n_jobs=threads, return_as="generator")(
            delayed(_process_batch)(pipeline, k_grid.k[indices]) for indices in batches
        )
        for result in results:
            polarization += result.polarization
            j_tra += result.j_tra
            chi_inter.append(result.chi_inter)
            chi_intra.append(result.chi_intra)
            monitor.advance()

    current = CurrentTrace.from_polarization(grid, polarization, j_tra, cfg.derivative)
    return SweepResult(config=cfg, model=model, pulse=pulse, grid=grid, k_grid=k_grid, modes=modes,
                       current=current, chi_inter=np.concatenate(chi_inter), chi_intra=np.concatenate(chi_intra))
