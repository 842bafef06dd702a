import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from enums import (CrystalDirection, EnvelopeKind, FwhmOf, WindowKind, Derivative, KaneConvention,
                   CalibrationTarget)
from units import UNITS

logger = logging.getLogger(__name__)


class ConfigError(Exception):
    """Base class of every configuration problem; `key` names the offending key (None for file-level errors)."""

    def __init__(self, key: Optional[str], message: str):
        super().__init__(key, message)
        self.key = key
        self.message = message

    def __str__(self):
        return f"{self.key}: {self.message}" if self.key else self.message


class ConfigFileNotFound(ConfigError):
    """Raised when the config path does not exist."""

    def __init__(self, path: str, message: str = "config file not found"):
        super().__init__(None, f"{message}: {path}")
        self.path = path


class ConfigParseError(ConfigError):
    """Raised when the config document is not a flat YAML mapping."""


class UnknownConfigKey(ConfigError):
    """Raised for keys the simulation does not know."""


class ConfigValueError(ConfigError):
    """Raised when a value cannot be converted to the type its key expects."""


class ConfigInvariantError(ConfigError):
    """Raised when a converted value violates a configuration invariant."""


# Lab-unit defaults of every recognised key
DEFAULTS: Dict[str, Any] = {
    "direction": "gm",
    "e_g_au": 0.1213,
    "ep_x_au": None,
    "ep_y_au": None,
    "ep_z_au": None,
    "kane_convention": "text",
    "lambda_um": 3.25,
    "e0_v_per_angstrom": 0.5,
    "n_cycles": 9,
    "envelope": "gaussian",
    "fwhm_of": "field",
    "cep_rad": 0.0,
    "span_fwhm": 7.0,
    "t2_fs": 1.0,
    "n_k": 201,
    "n_t": 524288,
    "q_cutoff": 17,
    "n_z": 6.6e6,
    "g0": "auto",
    "window": "hann",
    "derivative": "time",
    "wigner_points": 201,
    "calibrate_to": "chi",
    "chi_target": 1.5,
    "entropy_target": 0.44,
    "norm_tolerance": 1e-6,
}

# Kane parameters per axis; the running text and the parameter table disagree on x/z
KANE_PARAMETERS = {
    KaneConvention.TEXT: {"x": 0.355, "y": 0.355, "z": 0.479},
    KaneConvention.TABLE: {"x": 0.479, "y": 0.355, "z": 0.355},
}

_INFINITY_WORDS = ("inf", "infinity", "+inf", "∞")


@dataclass(frozen=True)
class SimulationConfig:
    """
    Validated simulation settings. Physical quantities are in atomic units; `options`
    keeps the lab-unit values the config was built from so that it can be rebuilt
    with overrides and reported in a manifest.
    """
    direction: CrystalDirection
    e_g: float
    e_p: Tuple[float, float, float]
    kane_convention: KaneConvention
    omega_l: float
    e0: float
    n_cycles: float
    envelope: EnvelopeKind
    fwhm_of: FwhmOf
    cep: float
    span_fwhm: float
    t2: float
    n_k: int
    n_t: int
    q_cutoff: int
    n_z: float
    g0: Optional[float]
    window: WindowKind
    derivative: Derivative
    wigner_points: int
    calibrate_to: CalibrationTarget
    chi_target: float
    entropy_target: float
    norm_tolerance: float
    options: Tuple[Tuple[str, Any], ...] = field(compare=False)

    @property
    def period(self) -> float:
        return 2.0 * math.pi / self.omega_l

    @property
    def field_fwhm(self) -> float:
        """FWHM (a.u.) of the field envelope f(t)."""
        fwhm = self.n_cycles * self.period
        if self.fwhm_of == FwhmOf.INTENSITY:
            # f(t)^2 is narrower than f(t) by sqrt(2) for a Gaussian
            fwhm *= math.sqrt(2.0)
        return fwhm

    @property
    def t2_infinite(self) -> bool:
        return math.isinf(self.t2)

    @property
    def kane_parameter(self) -> float:
        return self.e_p["xyz".index(self.direction.axis)]

    def option(self, key: str) -> Any:
        return dict(self.options)[key]

    def snapshot(self) -> Dict[str, Any]:
        """Lab-unit view of the configuration with defaults filled in."""
        values = dict(DEFAULTS)
        values.update(dict(self.options))
        values["ep_x_au"], values["ep_y_au"], values["ep_z_au"] = self.e_p
        return values

    def with_options(self, **overrides: Any) -> "SimulationConfig":
        builder = SimulationConfigBuilder()
        for key, value in self.options:
            builder.set_option(key, value)
        for key, value in overrides.items():
            builder.set_option(key, value)
        return builder.build()


class SimulationConfigBuilder:
    """
    A builder class for creating SimulationConfig objects.

    Options are given in lab units under the config-file key names; `build`
    validates them, applies defaults and converts to atomic units.

    Example:
        cfg = (SimulationConfigBuilder()
               .set_option("direction", "ga")
               .set_option("t2_fs", "inf")
               .build())
    """

    def __init__(self) -> None:
        self._options: Dict[str, Any] = {}

    def set_option(self, key: str, value: Any) -> "SimulationConfigBuilder":
        if key not in DEFAULTS:
            raise UnknownConfigKey(key, "unknown configuration key")
        self._options[key] = value
        return self

    def set_options(self, options: Dict[str, Any]) -> "SimulationConfigBuilder":
        for key, value in options.items():
            self.set_option(key, value)
        return self

    def build(self) -> SimulationConfig:
        raw = dict(DEFAULTS)
        raw.update(self._options)

        direction = _enum(CrystalDirection, "direction", raw["direction"])
        convention = _enum(KaneConvention, "kane_convention", raw["kane_convention"])
        kane = KANE_PARAMETERS[convention]
        e_p = tuple(
            _positive("ep_%s_au" % axis, kane[axis] if raw["ep_%s_au" % axis] is None else raw["ep_%s_au" % axis])
            for axis in "xyz"
        )

        e_g = _positive("e_g_au", raw["e_g_au"])
        wavelength = _positive("lambda_um", raw["lambda_um"])
        e0 = _float("e0_v_per_angstrom", raw["e0_v_per_angstrom"])
        if e0 < 0:
            raise ConfigInvariantError("e0_v_per_angstrom", f"must be >= 0, got {e0}")

        n_k = _integer("n_k", raw["n_k"])
        if n_k < 1 or n_k % 2 == 0:
            raise ConfigInvariantError("n_k", f"must be odd so the grid is symmetric about K = 0, got {n_k}")
        n_t = _integer("n_t", raw["n_t"])
        if n_t < 2 or n_t & (n_t - 1):
            raise ConfigInvariantError("n_t", f"must be a power of two, got {n_t}")
        q_cutoff = _integer("q_cutoff", raw["q_cutoff"])
        if q_cutoff < 1:
            raise ConfigInvariantError("q_cutoff", f"must be >= 1, got {q_cutoff}")
        wigner_points = _integer("wigner_points", raw["wigner_points"])
        if wigner_points < 3:
            raise ConfigInvariantError("wigner_points", f"must be >= 3, got {wigner_points}")

        entropy_target = _positive("entropy_target", raw["entropy_target"])
        if entropy_target >= 0.5:
            raise ConfigInvariantError("entropy_target", f"must lie in (0, 0.5), got {entropy_target}")

        return SimulationConfig(
            direction=direction,
            e_g=e_g,
            e_p=e_p,
            kane_convention=convention,
            omega_l=float(UNITS.wavelength_to_omega(wavelength)),
            e0=float(UNITS.field_to_au(e0)),
            n_cycles=_positive("n_cycles", raw["n_cycles"]),
            envelope=_enum(EnvelopeKind, "envelope", raw["envelope"]),
            fwhm_of=_enum(FwhmOf, "fwhm_of", raw["fwhm_of"]),
            cep=_float("cep_rad", raw["cep_rad"]),
            span_fwhm=_positive("span_fwhm", raw["span_fwhm"]),
            t2=_dephasing_time(raw["t2_fs"]),
            n_k=n_k,
            n_t=n_t,
            q_cutoff=q_cutoff,
            n_z=_positive("n_z", raw["n_z"]),
            g0=_coupling(raw["g0"]),
            window=_enum(WindowKind, "window", raw["window"]),
            derivative=_enum(Derivative, "derivative", raw["derivative"]),
            wigner_points=wigner_points,
            calibrate_to=_enum(CalibrationTarget, "calibrate_to", raw["calibrate_to"]),
            chi_target=_positive("chi_target", raw["chi_target"]),
            entropy_target=entropy_target,
            norm_tolerance=_positive("norm_tolerance", raw["norm_tolerance"]),
            options=tuple(sorted(self._options.items())),
        )


def load_config(path: Union[str, Path, None]) -> SimulationConfig:
    """Read a flat YAML config; `None` yields the all-defaults configuration."""
    builder = SimulationConfigBuilder()
    if path is None:
        return builder.build()

    path = Path(path)
    if not path.is_file():
        raise ConfigFileNotFound(str(path))
    try:
        document = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as e:
        raise ConfigParseError(None, f"cannot parse {path}: {e}")

    if document is None:
        document = {}
    if not isinstance(document, dict):
        raise ConfigParseError(None, f"{path} must contain a key-value mapping")

    for key, value in document.items():
        if isinstance(value, (dict, list)):
            raise ConfigValueError(str(key), "nested values are not allowed")
        builder.set_option(str(key), value)

    cfg = builder.build()
    logger.info(f"Loaded config {path} ({len(document)} keys)")
    return cfg


def parse_override(text: str) -> Tuple[str, Any]:
    """Split a `key=value` command-line override, reading the value with YAML scalar rules."""
    key, sep, value = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigParseError(key or None, f"override must look like key=value, got {text!r}")
    try:
        return key, yaml.safe_load(value)
    except yaml.YAMLError as e:
        raise ConfigValueError(key, f"cannot parse value {value!r}: {e}")


def _float(key: str, value: Any) -> float:
    if isinstance(value, bool):
        raise ConfigValueError(key, f"expected a number, got {value!r}")
    try:
        result = float(value)
    except (TypeError, ValueError):
        raise ConfigValueError(key, f"expected a number, got {value!r}")
    if math.isnan(result):
        raise ConfigValueError(key, "NaN is not allowed")
    return result


def _positive(key: str, value: Any) -> float:
    result = _float(key, value)
    if not 0 < result < math.inf:
        raise ConfigInvariantError(key, f"must be a positive finite number, got {result}")
    return result


def _integer(key: str, value: Any) -> int:
    result = _float(key, value)
    if not result.is_integer():
        raise ConfigValueError(key, f"expected an integer, got {value!r}")
    return int(result)


def _enum(enum_type, key: str, value: Any):
    try:
        return enum_type(str(value).lower())
    except ValueError:
        allowed = "|".join(member.value for member in enum_type)
        raise ConfigValueError(key, f"expected one of {allowed}, got {value!r}")


def _dephasing_time(value: Any) -> float:
    if isinstance(value, str) and value.strip().lower() in _INFINITY_WORDS:
        return math.inf
    t2_fs = _float("t2_fs", value)
    if math.isinf(t2_fs) and t2_fs > 0:
        return math.inf
    if t2_fs <= 0:
        raise ConfigInvariantError("t2_fs", f"must be > 0 or inf, got {t2_fs}")
    return float(UNITS.fs_to_au(t2_fs))


def _coupling(value: Any) -> Optional[float]:
    if isinstance(value, str) and value.strip().lower() == "auto":
        return None
    return _positive("g0", value)
