"""Command-line interface: synth | simulate | mar | eval | ingest | encode.

Exit codes: 0 success, 1 configuration error, 2 data error, 3 internal error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from typing import Any, NoReturn

from rich.logging import RichHandler

from ctmar.cli.commands.batch import stderr_console
from ctmar.cli.commands.encode import cmd_encode
from ctmar.cli.commands.evaluate import cmd_eval
from ctmar.cli.commands.ingest import cmd_ingest
from ctmar.cli.commands.mar import cmd_mar
from ctmar.cli.commands.simulate import cmd_simulate
from ctmar.cli.commands.synth import cmd_synth
from ctmar.cli.config_loader import load_run_config
from ctmar.errors import ConfigError, CtmarError
from ctmar.models.enums import MarMethod, PadMode
from ctmar.settings import settings

logger = logging.getLogger(__name__)

INTERNAL_ERROR = 3


class _Parser(argparse.ArgumentParser):
    """Usage errors become ConfigError (exit code 1) instead of argparse's exit code 2"""

    def error(self, message: str) -> NoReturn:
        raise ConfigError(f"{self.prog}: {message}")


def configure_logging(level: str) -> None:
    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)
    root.addHandler(RichHandler(console=stderr_console, show_path=False, rich_tracebacks=True))
    root.setLevel(level.upper())


def _add_common_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, metavar="PATH", help="TOML or JSON run configuration")
    p.add_argument("--out", default=None, metavar="DIR", help="Output directory")
    p.add_argument("--workers", type=int, default=None, help=f"Parallel cases (default: {settings.workers})")
    p.add_argument("--seed", type=int, default=None, help="RNG seed for synthetic data and noise")
    p.add_argument("--log-level", default=None, choices=("DEBUG", "INFO", "WARNING", "ERROR"),
                   help=f"Log level (default: CTMAR_LOG_LEVEL or {settings.log_level})")


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    """Flag values mapped onto RunConfig fields; unset flags are None and ignored"""
    return {
        "out": args.out,
        "workers": args.workers,
        "seed": args.seed,
        "mar": {"method": getattr(args, "method", None)},
        "synth": {"n_cases": getattr(args, "n_cases", None)},
        "encoding": {
            "pyramid_depth": getattr(args, "depth", None),
            "pad_angles": getattr(args, "pad_angles", None),
            "pad_detectors": getattr(args, "pad_detectors", None),
            "pad_mode": getattr(args, "pad_mode", None),
        },
    }


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="ctmar",
        description="Metal artifact simulation, classical MAR baselines, encodings and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    # synth
    p_syn = sub.add_parser("synth", help="Write seeded synthetic clean slices and metal masks")
    _add_common_args(p_syn)
    p_syn.add_argument("--n-cases", type=int, default=None, help="Number of cases (default: 50)")
    p_syn.set_defaults(_run=cmd_synth)

    # simulate
    p_sim = sub.add_parser("simulate", help="Simulate metal artifacts for paired clean images and masks")
    _add_common_args(p_sim)
    p_sim.add_argument("images", metavar="IMAGE_DIR", help="Clean HU slices (raw+JSON)")
    p_sim.add_argument("masks", metavar="MASK_DIR", help="Metal masks with matching basenames")
    p_sim.set_defaults(_run=cmd_simulate)

    # mar
    p_mar = sub.add_parser("mar", help="Run a classical MAR baseline on case directories")
    _add_common_args(p_mar)
    p_mar.add_argument("cases", metavar="CASE_DIR", help="Directory of simulated or ingested cases")
    p_mar.add_argument("--method", default=None, help=f"One of: {', '.join(m.value for m in MarMethod)}")
    p_mar.set_defaults(_run=cmd_mar)

    # eval
    p_ev = sub.add_parser("eval", help="Score candidate grids against ground truth")
    _add_common_args(p_ev)
    p_ev.add_argument("truth", metavar="TRUTH_DIR", help="Simulated cases with X_gt and S_gt")
    p_ev.add_argument("candidates", metavar="CANDIDATE_DIR", nargs="?", default=None,
                      help="Case directories holding candidate grids (default: TRUTH_DIR)")
    p_ev.add_argument("--candidate-image", default="X_corrected", help="Candidate image grid name")
    p_ev.add_argument("--candidate-sino", default="S_corrected", help="Candidate sinogram grid name")
    p_ev.set_defaults(_run=cmd_eval)

    # ingest
    p_in = sub.add_parser("ingest", help="Process clinical HU slices with the simulation geometry")
    _add_common_args(p_in)
    p_in.add_argument("images", metavar="IMAGE_DIR", help="Clinical HU slices (raw+JSON)")
    p_in.set_defaults(_run=cmd_ingest)

    # encode
    p_enc = sub.add_parser("encode", help="Write M_p pyramids and padded sinograms")
    _add_common_args(p_enc)
    p_enc.add_argument("cases", metavar="CASE_DIR", help="Directory of cases with M_p, M_t and S_ma")
    p_enc.add_argument("--depth", type=int, default=None, help="Pyramid depth (default: 4)")
    p_enc.add_argument("--pad-angles", type=int, default=None, help="Angle padding per side (default: 8)")
    p_enc.add_argument("--pad-detectors", type=int, default=None, help="Detector padding per side (default: 8)")
    p_enc.add_argument("--pad-mode", default=None, choices=[m.value for m in PadMode])
    p_enc.set_defaults(_run=cmd_encode)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    """Parse, configure and dispatch; returns the process exit code"""
    try:
        args = _build_parser().parse_args(argv)
        configure_logging(args.log_level or settings.log_level)
        config = load_run_config(args.config, _overrides(args))
        return args._run(args, config)
    except CtmarError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except Exception:
        logger.exception("Internal error")
        return INTERNAL_ERROR


def main() -> None:
    sys.exit(run())
