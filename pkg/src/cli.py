"""
kg 명령행 인터페이스.

    kg spectrum|bounds|verify|sweep|reproduce [옵션]

종료 코드: 0 성공, 2 파싱/사용법 오류, 3 입력 검증 오류,
4 가정 위반 또는 솔버 실패, 1 예기치 않은 오류.
"""
import argparse
import logging

from commands.bounds import cmd_bounds
from commands.common import (FORMAT_CSV, FORMAT_REPORT, SHIFT_EXPLICIT, SHIFT_NONE, SHIFT_OPTIMIZED, SHIFT_PAPER,
                             RunConfig)
from commands.reproduce import cmd_reproduce
from commands.spectrum import cmd_spectrum
from commands.sweep import cmd_sweep
from commands.verify import cmd_verify
from utils.config import get_settings
from utils.errors import AssumptionError, InputError, ParseError, SolverError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_SOLVER = 4

COMMANDS = {
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "reproduce": cmd_reproduce,
}


def parse_range(text):
    try:
        start, stop = (float(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got {text!r}")
    return start, stop


def _add_model_arguments(p):
    p.add_argument("--model", dest="model_path", help="Model file (JSON).")
    p.add_argument("--tau", type=float, help="Square well coupling.")
    p.add_argument("--eta", type=float,
                   help="Perturbation strength, delta_v = eta at entry (1, 1); "
                        "-eta for the square well with --paper-shift.")
    p.add_argument("--alpha", type=float, help="Harmonic oscillator field strength.")
    p.add_argument("--beta", type=float, default=0.0, help="Harmonic oscillator mass offset (default: 0).")
    p.add_argument("--grid-points", type=int, dest="grid_points", help="Harmonic grid points N.")
    p.add_argument("--half-width", type=float, dest="half_width", help="Harmonic half width L.")

    shift = p.add_mutually_exclusive_group()
    shift.add_argument("--shift", type=float, help="Explicit shift mu.")
    shift.add_argument("--optimize-shift", action="store_true", dest="optimize_shift",
                       help="Minimize |(V - mu) U^-1| over mu.")
    shift.add_argument("--paper-shift", action="store_true", dest="paper_shift",
                       help="mu = -tau/2 for the square well.")

    p.add_argument("--seed", type=int, default=0, help="Seed for random perturbations (default: 0).")
    p.add_argument("--scale", type=float, help="Random perturbation entry bound.")


def _add_output_arguments(p):
    p.add_argument("--out", dest="output_path", help="Output file (default: stdout).")
    p.add_argument("--format", choices=[FORMAT_CSV, FORMAT_REPORT], default=FORMAT_CSV, dest="output_format",
                   help="csv or report (indented JSON).")


def build_parser():
    parser = argparse.ArgumentParser(prog="kg", description="Spectral perturbation toolkit for Klein-Gordon Hamiltonians.")
    parser.add_argument("--log-level", dest="log_level", help="Override the configured log level.")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (("spectrum", "Eigenvalues, sign types and pencil residuals."),
                            ("bounds", "Perturbation constants and predicted gaps."),
                            ("verify", "Compare true eigenvalue motion with the bounds.")):
        p = sub.add_parser(name, help=help_text)
        _add_model_arguments(p)
        _add_output_arguments(p)

    p = sub.add_parser("sweep", help="Eigenvalue trajectories over a coupling range.")
    _add_model_arguments(p)
    _add_output_arguments(p)
    p.add_argument("--sweep-range", type=parse_range, dest="sweep_range", required=True, help="Range a:b.")
    p.add_argument("--steps", type=int, default=101, help="Grid points (default: 101).")

    p = sub.add_parser("reproduce", help="Recompute the worked examples.")
    p.add_argument("which", choices=["example1", "example2"])
    p.add_argument("--grid-points", type=int, dest="grid_points", help="Harmonic grid points N.")
    p.add_argument("--half-width", type=float, dest="half_width", help="Harmonic half width L.")
    _add_output_arguments(p)
    return parser


def config_from_args(args) -> RunConfig:
    policy = SHIFT_NONE
    if getattr(args, "shift", None) is not None:
        policy = SHIFT_EXPLICIT
    elif getattr(args, "optimize_shift", False):
        policy = SHIFT_OPTIMIZED
    elif getattr(args, "paper_shift", False):
        policy = SHIFT_PAPER
    return RunConfig(
        command=args.command,
        model_path=getattr(args, "model_path", None),
        tau=getattr(args, "tau", None),
        eta=getattr(args, "eta", None),
        alpha=getattr(args, "alpha", None),
        beta=getattr(args, "beta", 0.0),
        grid_points=getattr(args, "grid_points", None),
        half_width=getattr(args, "half_width", None),
        shift_policy=policy,
        shift=getattr(args, "shift", None),
        sweep_range=getattr(args, "sweep_range", None),
        steps=getattr(args, "steps", 101),
        seed=getattr(args, "seed", 0),
        scale=getattr(args, "scale", None),
        output_path=args.output_path,
        output_format=args.output_format,
        which=getattr(args, "which", None),
    )


def run(argv=None, settings=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE

    if args.log_level:
        logging.getLogger().setLevel(args.log_level.upper())
    settings = settings or get_settings()
    config = config_from_args(args)
    try:
        COMMANDS[config.command](config, settings)
    except ParseError as e:
        logger.error("parse error: %s", e)
        return EXIT_PARSE
    except InputError as e:
        logger.error("invalid input: %s", e)
        return EXIT_VALIDATION
    except (AssumptionError, SolverError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_SOLVER
    except Exception:
        logger.exception("unexpected error")
        return EXIT_UNEXPECTED
    return EXIT_OK
