import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Union, Any

import numpy as np

from bands import BandModel
from currents import MatrixElementTables, matrix_elements, k_partial_sums
from displacement import mode_displacement
from enums import Component as CurrentComponent
from grid import TimeGrid, KGrid
from pulse import PulseSpec, ModeSet, EnvelopeTables
from sbe import SBETrajectory, solve

logger = logging.getLogger(__name__)


class StageError(Exception):
    """Wraps any error raised inside a pipeline component with the name of its stage."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(stage, cause)
        self.stage = stage
        self.cause = cause

    def __str__(self):
        return f"stage '{self.stage}' failed: {self.cause}"


@dataclass(frozen=True, eq=False)
class BatchResult:
    """Contribution of one K batch: partial K-sums of the polarization and intraband current, per-K chi."""
    k: np.ndarray
    polarization: np.ndarray
    j_tra: np.ndarray
    chi_inter: np.ndarray
    chi_intra: np.ndarray


class Component(ABC):
    stage: str

    @abstractmethod
    def run(self, *args) -> Union[None, Any]:
        pass


class _SolveComponent(Component):
    """
    Integrates the two-band dynamics of a batch of K points.

    T2 = inf goes through the amplitude equations, finite T2 through the Bloch equations.
    """
    stage = "solve"

    def __init__(self, model: BandModel, pulse: PulseSpec, grid: TimeGrid, t2: float, tolerance: float):
        super().__init__()
        self._model = model
        self._pulse = pulse
        self._grid = grid
        self._t2 = t2
        self._tolerance = tolerance

    def __str__(self):
        return f"SolveComponent(model={self._model.name}, t2={self._t2:.4g}, n_t={self._grid.n})"

    def run(self, k) -> SBETrajectory:
        return solve(self._model, self._pulse, k, self._t2, self._grid, self._tolerance)


class _MatrixElementComponent(Component):
    stage = "matrix_elements"

    def __init__(self, model: BandModel, pulse: PulseSpec, grid: TimeGrid):
        super().__init__()
        self._model = model
        self._pulse = pulse
        self._grid = grid

    def __str__(self):
        return f"MatrixElementComponent(model={self._model.name})"

    def run(self, trajectory: SBETrajectory) -> MatrixElementTables:
        return matrix_elements(trajectory, self._model, self._pulse, self._grid)


class _ReductionComponent(Component):
    """Partial K-sums of the currents and per-K displacements of every mode, split by channel."""
    stage = "displacement"

    def __init__(self, modes: ModeSet, envelopes: EnvelopeTables, grid: TimeGrid, k_grid: KGrid):
        super().__init__()
        self._modes = modes
        self._envelopes = envelopes
        self._grid = grid
        self._k_grid = k_grid

    def __str__(self):
        return f"ReductionComponent(q_cutoff={self._modes.q_cutoff})"

    def run(self, tables: MatrixElementTables) -> BatchResult:
        polarization, j_tra = k_partial_sums(tables, self._k_grid)
        chi_inter = mode_displacement(tables, self._modes, self._envelopes, self._grid, CurrentComponent.INTER)
        chi_intra = mode_displacement(tables, self._modes, self._envelopes, self._grid, CurrentComponent.INTRA)
        return BatchResult(k=tables.k, polarization=polarization, j_tra=j_tra,
                           chi_inter=chi_inter, chi_intra=chi_intra)


class AbstractPipeline(ABC):
    """
    A chain of components; each receives the previous component's result. A
    component returning None ends the chain early and the pipeline yields None.
    """

    @abstractmethod
    def get_components(self):
        pass

    def process(self, item):
        last_result = item
        for component in self.get_components():
            try:
                component_result = component.run(last_result)
            except Exception as e:
                raise StageError(component.stage, e) from e
            if component_result is None:
                return None
            last_result = component_result
        return last_result


class KBatchPipeline(AbstractPipeline):
    """solve -> matrix elements -> partial sums and displacements, for one batch of K points."""

    def __init__(self, model: BandModel, pulse: PulseSpec, grid: TimeGrid, k_grid: KGrid, modes: ModeSet,
                 envelopes: EnvelopeTables, t2: float, tolerance: float):
        self._solve_component = _SolveComponent(model, pulse, grid, t2, tolerance)
        self._matrix_element_component = _MatrixElementComponent(model, pulse, grid)
        self._reduction_component = _ReductionComponent(modes, envelopes, grid, k_grid)

    def __str__(self):
        return f"KBatchPipeline({', '.join(str(c) for c in self.get_components())})"

    def get_components(self):
        return [self._solve_component, self._matrix_element_component, self._reduction_component]
