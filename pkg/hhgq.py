import argparse
import logging
import sys
from typing import List, Optional

from calibration import CalibrationError, SweepCache
from commands import (SpectrumCommand, DisplacementCommand, WignerCommand, FidelityScanCommand, EntropyScanCommand,
                      CalibrateCommand, ValidateCommand, BandsCommand, EnvelopesCommand, parse_range, parse_modes)
from config import ConfigError, ConfigValueError, SimulationConfigBuilder, load_config, parse_override
from constants import THREADS
from currents import GridMismatchError
from enums import Component, ExitCode, ScanAxis
from grid import GridResolutionError, GridSpanError
from oracle import TruncationError
from pipeline import StageError
from sbe import IntegratorResolutionError
from states import ConditioningError, ModeIndexError

logger = logging.getLogger("hhgq")

NUMERICAL_ERRORS = (GridResolutionError, GridSpanError, IntegratorResolutionError, GridMismatchError,
                    TruncationError, ConditioningError, CalibrationError, StageError)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat YAML config file (defaults apply when omitted)")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key; may be repeated")
    common.add_argument("--out", default="out", help="output directory (default: out)")
    common.add_argument("--threads", type=int, default=THREADS, help="K-batch worker count")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    parser = argparse.ArgumentParser(
        prog="hhgq",
        description="High-harmonic generation in a two-band ZnO model and the quantum-optical "
                    "state of the driving and harmonic modes."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    spectrum = commands.add_parser("spectrum", parents=[common], help="currents and HHG spectrum")
    spectrum.add_argument("--dump-k", type=float, default=None, metavar="K_AU",
                          help="also write the trajectory of the grid point nearest to this K")

    for name, help_text in (("wigner", "Wigner map of the conditioned fundamental mode"),
                            ("displacement", "mode displacements chi_q")):
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.add_argument("--component", choices=[c.value for c in Component], default=Component.TOTAL.value)

    fidelity = commands.add_parser("fidelity", parents=[common], help="fidelity scan over E0 or T2")
    fidelity.add_argument("--axis", choices=[ScanAxis.E0.value, ScanAxis.T2.value], default=ScanAxis.E0.value)
    fidelity.add_argument("--range", dest="values", default=None, metavar="START:STOP:N|V1,V2,...")
    fidelity.add_argument("--component", choices=[c.value for c in Component], default=Component.TOTAL.value)

    entropy = commands.add_parser("entropy", parents=[common], help="linear-entropy scan over q, E0 or T2")
    entropy.add_argument("--axis", choices=[a.value for a in ScanAxis], default=ScanAxis.Q.value)
    entropy.add_argument("--range", dest="values", default=None, metavar="START:STOP:N|V1,V2,...")
    entropy.add_argument("--modes", default="1", help="comma-separated harmonic orders for e0/t2 scans")
    entropy.add_argument("--component", choices=[c.value for c in Component], default=Component.TOTAL.value)

    commands.add_parser("calibrate", parents=[common], help="choose g0 at the reference working point")
    commands.add_parser("validate", parents=[common], help="run the invariant suite")
    commands.add_parser("bands", parents=[common], help="band structure of the active direction")

    envelopes = commands.add_parser("envelopes", parents=[common], help="field and mode envelopes")
    envelopes.add_argument("--mode", type=int, default=1, help="harmonic order q")
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def load_run_config(path: Optional[str], overrides: List[str]):
    cfg = load_config(path)
    if not overrides:
        return cfg
    builder = SimulationConfigBuilder().set_options(dict(cfg.options))
    for text in overrides:
        key, value = parse_override(text)
        builder.set_option(key, value)
    return builder.build()


def build_command(args: argparse.Namespace):
    cfg = load_run_config(args.config, args.overrides)
    if args.command == "validate":
        return ValidateCommand(cfg)

    common = dict(cfg=cfg, out_dir=args.out, threads=max(1, args.threads), cache=SweepCache())
    try:
        values = parse_range(args.values) if getattr(args, "values", None) else None
        modes = parse_modes(args.modes) if getattr(args, "modes", None) else None
    except ValueError as e:
        raise ConfigValueError("range", str(e))

    if args.command == "spectrum":
        return SpectrumCommand(dump_k=args.dump_k, **common)
    if args.command == "displacement":
        return DisplacementCommand(component=Component(args.component), **common)
    if args.command == "wigner":
        return WignerCommand(component=Component(args.component), **common)
    if args.command == "fidelity":
        return FidelityScanCommand(axis=ScanAxis(args.axis), values=values, component=Component(args.component),
                                   **common)
    if args.command == "entropy":
        return EntropyScanCommand(axis=ScanAxis(args.axis), values=values, modes=modes,
                                  component=Component(args.component), **common)
    if args.command == "calibrate":
        return CalibrateCommand(**common)
    if args.command == "bands":
        return BandsCommand(**common)
    try:
        return EnvelopesCommand(mode=args.mode, **common)
    except ValueError as e:
        raise ConfigValueError("mode", str(e))


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)

    try:
        command = build_command(args)
        logger.info(f"Running {args.command}")
        result = command.execute()
        if args.command == "validate" and not result:
            return ExitCode.NUMERICAL_FAILURE
        return ExitCode.OK

    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return ExitCode.CONFIG_ERROR

    except ModeIndexError as e:
        logger.error(f"Configuration error: {e}")
        return ExitCode.CONFIG_ERROR

    except NUMERICAL_ERRORS as e:
        logger.error(f"Numerical failure: {e}")
        return ExitCode.NUMERICAL_FAILURE

    except OSError as e:
        logger.error(f"I/O error: {e}")
        return ExitCode.IO_ERROR

    except KeyboardInterrupt:
        logger.warning("KeyboardInterrupt received, stopping...")
        return ExitCode.INTERRUPTED


if __name__ == "__main__":
    sys.exit(int(main()))
