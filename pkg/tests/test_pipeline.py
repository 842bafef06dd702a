import numpy as np
import pytest

from bands import band_model
from conftest import make_config
from enums import Component
from grid import build_grids
from pipeline import AbstractPipeline, Component as PipelineComponent, KBatchPipeline, StageError
from pulse import mode_envelopes, mode_set, pulse_from_config
from sbe import IntegratorResolutionError
from sweep import k_batches, run_sweep


class _Double(PipelineComponent):
    stage = "double"

    def run(self, item):
        return 2 * item


class _Drop(PipelineComponent):
    stage = "drop"

    def run(self, item):
        return None if item > 10 else item


class _Fail(PipelineComponent):
    stage = "fail"

    def run(self, item):
        raise RuntimeError("boom")


class _Chain(AbstractPipeline):
    def __init__(self, *components):
        self._components = components

    def get_components(self):
        return self._components


def test_batches_are_fixed_size():
    assert [batch.size for batch in k_batches(70)] == [32, 32, 6]
    assert np.array_equal(np.concatenate(k_batches(70)), np.arange(70))
    assert [batch.size for batch in k_batches(5, batch_size=2)] == [2, 2, 1]


def test_chain_passes_results_along():
    assert _Chain(_Double(), _Drop(), _Double()).process(2) == 8
    assert _Chain(_Double(), _Drop(), _Double()).process(6) is None


def test_failures_name_their_stage():
    with pytest.raises(StageError) as e:
        _Chain(_Double(), _Fail()).process(1)
    assert e.value.stage == "fail"
    assert isinstance(e.value.cause, RuntimeError)
    assert "fail" in str(e.value)


def test_solver_failure_is_wrapped():
    cfg = make_config(t2_fs="inf")
    grid, k_grid = build_grids(cfg)
    pulse = pulse_from_config(cfg)
    modes = mode_set(cfg, g0=1.0)
    pipeline = KBatchPipeline(band_model(cfg), pulse, grid, k_grid, modes, mode_envelopes(pulse, modes, grid),
                              cfg.t2, tolerance=1e-18)
    with pytest.raises(StageError) as e:
        pipeline.process(k_grid.k[:3])
    assert e.value.stage == "solve"
    assert isinstance(e.value.cause, IntegratorResolutionError)


def test_sweep_shapes(fast_sweep):
    cfg = fast_sweep.config
    assert fast_sweep.chi_inter.shape == (cfg.n_k, cfg.q_cutoff)
    assert fast_sweep.current.j_tra.shape == (cfg.n_t,)
    assert np.allclose(fast_sweep.per_k(Component.TOTAL), fast_sweep.chi_inter + fast_sweep.chi_intra)


def test_sweep_does_not_depend_on_the_worker_count():
    cfg = make_config(n_k=41)
    serial = run_sweep(cfg, threads=1)
    parallel = run_sweep(cfg, threads=2)
    assert np.array_equal(serial.current.j_ter, parallel.current.j_ter)
    assert np.array_equal(serial.current.j_tra, parallel.current.j_tra)
    assert np.array_equal(serial.chi_inter, parallel.chi_inter)
    assert np.array_equal(serial.displacements(1.0).chi, parallel.displacements(1.0).chi)


def test_displacement_metadata(fast_sweep):
    metadata = fast_sweep.displacements(2.0, Component.INTRA).metadata
    assert metadata["g0"] == 2.0
    assert metadata["component"] == "intra"
    assert metadata["direction"] == "gm"
    assert metadata["t2_fs"] == 1.0
