import logging
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from artifacts import ArtifactWriter, RunManifest
from bands import band_model, bandgap_extrema
from calibration import SweepCache, calibrate, resolve_coupling
from config import SimulationConfig
from currents import WindowStrategyBuilder, cutoff_order, hhg_spectrum
from enums import Component, Reference, ScanAxis
from grid import build_grids
from observables import fidelity, linear_entropy, wigner
from pulse import mode_envelopes, mode_set, pulse_from_config, vector_potential, classical_field
from sbe import solve
from states import condition_full, condition_ir
from sweep import SweepResult
from timing import StageTimer
from units import UNITS
from validation import InvariantSuite, format_report

logger = logging.getLogger(__name__)

# Default scan points when no range is given on the command line
DEFAULT_E0_RANGE = np.linspace(0.2, 0.6, 9)
DEFAULT_T2_RANGE = np.array([1.0, 2.0, 4.0, 6.0, 8.0, 10.0, math.inf])

_SCAN_KEYS = {ScanAxis.E0: "e0_v_per_angstrom", ScanAxis.T2: "t2_fs"}


class Command(ABC):

    @abstractmethod
    def execute(self, *args, **kwargs):
        raise NotImplementedError


class SimulationCommand(Command, ABC):
    """
    Common plumbing of the pipeline commands: K-sweeps through a shared cache,
    coupling resolution, stage timing and the run manifest.
    """
    name = "simulation"

    def __init__(self, cfg: SimulationConfig, out_dir, threads: int = 1, cache: Optional[SweepCache] = None):
        self._cfg = cfg
        self._out_dir = Path(out_dir)
        self._threads = threads
        self._cache = cache or SweepCache()
        self._timer = StageTimer()
        self._writer: Optional[ArtifactWriter] = None

    def __str__(self):
        return f"{type(self).__name__}(out={self._out_dir}, threads={self._threads})"

    @property
    def writer(self) -> ArtifactWriter:
        if self._writer is None:
            self._writer = ArtifactWriter(self._out_dir)
        return self._writer

    def sweep(self, cfg: Optional[SimulationConfig] = None) -> SweepResult:
        with self._timer.stage("sweep"):
            return self._cache.get(cfg or self._cfg, self._threads)

    def coupling(self) -> float:
        with self._timer.stage("calibrate"):
            return resolve_coupling(self._cfg, self._threads, self._cache)

    def derived(self, cfg: Optional[SimulationConfig] = None) -> Dict[str, Any]:
        cfg = cfg or self._cfg
        grid, k_grid = build_grids(cfg)
        extrema = bandgap_extrema(band_model(cfg), cfg.omega_l)
        return {
            "omega_l_au": cfg.omega_l,
            "period_fs": float(UNITS.au_to_fs(cfg.period)),
            "field_fwhm_fs": float(UNITS.au_to_fs(cfg.field_fwhm)),
            "e0_au": cfg.e0,
            "dt_au": grid.dt,
            "dk_au": k_grid.dk,
            "min_bandgap_order": extrema.min_order,
            "max_bandgap_order": extrema.max_order,
        }

    def finish(self, derived: Dict[str, Any]) -> RunManifest:
        manifest = RunManifest(command=self.name, config=self._cfg.snapshot(), derived=derived,
                               timings_s=self._timer.durations())
        self.writer.write_manifest(manifest)
        return manifest


class SpectrumCommand(SimulationCommand):
    """Currents and the HHG spectrum of one configuration; optionally one K trajectory for inspection."""
    name = "spectrum"

    def __init__(self, cfg: SimulationConfig, out_dir, threads: int = 1, cache: Optional[SweepCache] = None,
                 dump_k: Optional[float] = None):
        super().__init__(cfg, out_dir, threads, cache)
        self._dump_k = dump_k

    def execute(self) -> RunManifest:
        result = self.sweep()
        window = WindowStrategyBuilder().set_strategy_type(self._cfg.window.value).build()
        with self._timer.stage("spectrum"):
            spectrum = hhg_spectrum(result.current, window, self._cfg.omega_l)

        derived = self.derived()
        try:
            derived["cutoff_order"] = cutoff_order(spectrum, (derived["min_bandgap_order"],
                                                              derived["max_bandgap_order"]))
        except ValueError as e:
            logger.warning(f"Cutoff not determined: {e}")
            derived["cutoff_order"] = None

        self.writer.write_csv("spectrum.csv", {
            "harmonic_order": spectrum.orders,
            "total_db": spectrum.total_db,
            "interband_db": spectrum.inter_db,
            "intraband_db": spectrum.intra_db,
        })
        self.writer.write_csv("current.csv", {
            "t_fs": UNITS.au_to_fs(result.grid.t),
            "j_tra_au": result.current.j_tra,
            "j_ter_au": result.current.j_ter,
        })
        if self._dump_k is not None:
            derived["trajectory_k_au"] = self._write_trajectory(result)
        return self.finish(derived)

    def _write_trajectory(self, result: SweepResult) -> float:
        k = float(result.k_grid.k[np.argmin(np.abs(result.k_grid.k - self._dump_k))])
        with self._timer.stage("trajectory"):
            trajectory = solve(result.model, result.pulse, k, self._cfg.t2, result.grid, self._cfg.norm_tolerance)
        self.writer.write_csv("trajectory.csv", {
            "t_fs": UNITS.au_to_fs(result.grid.t),
            "n_v": trajectory.n_v[:, 0],
            "n_c": trajectory.n_c[:, 0],
            "re_pi": trajectory.pi[:, 0].real,
            "im_pi": trajectory.pi[:, 0].imag,
        })
        return k


class DisplacementCommand(SimulationCommand):
    name = "displacement"

    def __init__(self, cfg: SimulationConfig, out_dir, threads: int = 1, cache: Optional[SweepCache] = None,
                 component: Component = Component.TOTAL):
        super().__init__(cfg, out_dir, threads, cache)
        self._component = Component(component)

    def execute(self) -> RunManifest:
        g0 = self.coupling()
        disp = self.sweep().displacements(g0, self._component)
        state = condition_full(disp)
        self.writer.write_csv("displacements.csv", {
            "q": disp.orders,
            "re_chi": disp.chi.real,
            "im_chi": disp.chi.imag,
            "abs_chi": np.abs(disp.chi),
        })
        derived = self.derived()
        derived.update(g0=g0, component=self._component.value, xi_ir=state.xi_ir, xi_uv=state.xi_uv)
        return self.finish(derived)


class WignerCommand(SimulationCommand):
    """Wigner map of the fundamental mode after conditioning on harmonic emission."""
    name = "wigner"

    def __init__(self, cfg: SimulationConfig, out_dir, threads: int = 1, cache: Optional[SweepCache] = None,
                 component: Component = Component.TOTAL):
        super().__init__(cfg, out_dir, threads, cache)
        self._component = Component(component)

    def execute(self) -> RunManifest:
        g0 = self.coupling()
        disp = self.sweep().displacements(g0, self._component)
        state = condition_ir(disp)
        with self._timer.stage("wigner"):
            w_map = wigner(state, 1, points=self._cfg.wigner_points)

        x, p = np.meshgrid(w_map.x, w_map.p, indexing="ij")
        self.writer.write_csv("wigner.csv", {"x": x.ravel(), "p": p.ravel(), "W": w_map.values.ravel()})
        derived = self.derived()
        derived.update(g0=g0, component=self._component.value, chi_1=disp[1], xi_ir=state.xi_ir,
                       xi_uv=state.xi_uv, wigner_integral=w_map.integral(), wigner_min=w_map.minimum(),
                       wigner_negative_volume=w_map.negative_volume())
        return self.finish(derived)


class FidelityScanCommand(SimulationCommand):
    """Fidelity of the conditioned fundamental mode with |1>, with its coherent branch and with vacuum."""
    name = "fidelity"

    def __init__(self, cfg: SimulationConfig, out_dir, threads: int = 1, cache: Optional[SweepCache] = None,
                 axis: ScanAxis = ScanAxis.E0, values: Optional[Sequence[float]] = None,
                 component: Component = Component.TOTAL):
        super().__init__(cfg, out_dir, threads, cache)
        self._axis = ScanAxis(axis)
        if self._axis == ScanAxis.Q:
            raise ValueError("fidelity scans run over e0 or t2")
        self._values = np.asarray(values if values is not None else _default_range(self._axis), dtype=float)
        self._component = Component(component)

    def execute(self) -> RunManifest:
        g0 = self.coupling()
        key = _SCAN_KEYS[self._axis]
        rows = {key: self._values, "F_fock": [], "F_coherent": [], "F_vacuum": []}
        for value in tqdm(self._values, desc=f"fidelity scan over {key}", disable=len(self._values) < 2):
            cfg = self._cfg.with_options(**{key: _scan_option(value)})
            state = condition_ir(self.sweep(cfg).displacements(g0, self._component))
            rows["F_fock"].append(fidelity(state, Reference.FOCK1))
            rows["F_coherent"].append(fidelity(state, Reference.COHERENT))
            rows["F_vacuum"].append(fidelity(state, Reference.VACUUM))
        self.writer.write_csv("fidelity_scan.csv", rows)
        derived = self.derived()
        derived.update(g0=g0, axis=self._axis.value, component=self._component.value)
        return self.finish(derived)


class EntropyScanCommand(SimulationCommand):
    """Linear entropy of single harmonic modes of the fully conditioned multimode state."""
    name = "entropy"

    def __init__(self, cfg: SimulationConfig, out_dir, threads: int = 1, cache: Optional[SweepCache] = None,
                 axis: ScanAxis = ScanAxis.Q, values: Optional[Sequence[float]] = None,
                 modes: Optional[List[int]] = None, component: Component = Component.TOTAL):
        super().__init__(cfg, out_dir, threads, cache)
        self._axis = ScanAxis(axis)
        self._values = None if self._axis == ScanAxis.Q else \
            np.asarray(values if values is not None else _default_range(self._axis), dtype=float)
        self._modes = list(modes) if modes else [1]
        self._component = Component(component)

    def execute(self) -> RunManifest:
        g0 = self.coupling()
        if self._axis == ScanAxis.Q:
            state = condition_full(self.sweep().displacements(g0, self._component))
            rows = {"q": state.orders, "S_lin": [linear_entropy(state, int(q)) for q in state.orders]}
        else:
            key = _SCAN_KEYS[self._axis]
            rows = {key: self._values}
            rows.update({f"S_lin_q{q}": [] for q in self._modes})
            for value in tqdm(self._values, desc=f"entropy scan over {key}", disable=len(self._values) < 2):
                cfg = self._cfg.with_options(**{key: _scan_option(value)})
                state = condition_full(self.sweep(cfg).displacements(g0, self._component))
                for q in self._modes:
                    rows[f"S_lin_q{q}"].append(linear_entropy(state, q))
        self.writer.write_csv("entropy_scan.csv", rows)
        derived = self.derived()
        derived.update(g0=g0, axis=self._axis.value, component=self._component.value)
        return self.finish(derived)


class CalibrateCommand(SimulationCommand):
    name = "calibrate"

    def execute(self) -> RunManifest:
        with self._timer.stage("calibrate"):
            result = calibrate(self._cfg, self._threads, self._cache)
        derived = self.derived()
        derived.update(g0=result.g0, calibrate_to=result.target.value, chi_1_abs=result.chi1_abs,
                       entropy_q1=result.entropy_q1)
        return self.finish(derived)


class BandsCommand(SimulationCommand):
    """Band energies, transition dipole and gap across the zone of the active direction."""
    name = "bands"
    points = 1001

    def execute(self) -> RunManifest:
        model = band_model(self._cfg)
        k = np.linspace(-math.pi / model.lattice_constant, math.pi / model.lattice_constant, self.points)
        e_v, e_c = model.energies(k)
        self.writer.write_csv("bands.csv", {
            "k_au": k,
            "e_v_au": e_v,
            "e_c_au": e_c,
            "d_vc_au": model.dipole_from_gap(e_c - e_v),
            "gap_au": e_c - e_v,
        })
        extrema = bandgap_extrema(model, self._cfg.omega_l)
        return self.finish({"min_gap_au": extrema.min_gap, "max_gap_au": extrema.max_gap,
                            "min_bandgap_order": extrema.min_order, "max_bandgap_order": extrema.max_order})


class EnvelopesCommand(SimulationCommand):
    """Driving field, vector potential and the mode envelopes f_q, F_q of one harmonic."""
    name = "envelopes"

    def __init__(self, cfg: SimulationConfig, out_dir, threads: int = 1, cache: Optional[SweepCache] = None,
                 mode: int = 1):
        super().__init__(cfg, out_dir, threads, cache)
        if not 1 <= mode <= cfg.q_cutoff:
            raise ValueError(f"mode {mode} outside 1..{cfg.q_cutoff}")
        self._mode = mode

    def execute(self) -> RunManifest:
        grid, _ = build_grids(self._cfg)
        pulse = pulse_from_config(self._cfg)
        tables = mode_envelopes(pulse, mode_set(self._cfg), grid)
        column = self._mode - 1
        self.writer.write_csv("envelopes.csv", {
            "t_fs": UNITS.au_to_fs(grid.t),
            "e_cl_au": classical_field(pulse, grid.t),
            "a_cl_au": vector_potential(pulse, grid.t),
            "re_f_q": tables.f[:, column].real,
            "im_f_q": tables.f[:, column].imag,
            "re_F_q": tables.F[:, column].real,
            "im_F_q": tables.F[:, column].imag,
        })
        derived = self.derived()
        derived.update(q=self._mode, a_cl_end_au=float(vector_potential(pulse, grid.t1)))
        return self.finish(derived)


class ValidateCommand(Command):
    """Runs the invariant suite; `execute` returns True when every check passed."""

    def __init__(self, cfg: SimulationConfig, out=print):
        self._cfg = cfg
        self._out = out

    def execute(self) -> bool:
        results = InvariantSuite(self._cfg).run()
        self._out(format_report(results))
        return all(result.passed for result in results)


def parse_range(text: str) -> np.ndarray:
    """`start:stop:count` (inclusive linspace) or a comma-separated list; `inf` is accepted."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must look like start:stop:count, got {text!r}")
        return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
    return np.array([float(part) for part in text.split(",") if part.strip()])


def parse_modes(text: str) -> List[int]:
    return [int(part) for part in text.split(",") if part.strip()]


def _default_range(axis: ScanAxis) -> np.ndarray:
    return DEFAULT_E0_RANGE if axis == ScanAxis.E0 else DEFAULT_T2_RANGE


def _scan_option(value: float):
    return "inf" if math.isinf(value) else float(value)
