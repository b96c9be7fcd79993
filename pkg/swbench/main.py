import json
import sys
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from argparse import ArgumentParser, ArgumentTypeError, Namespace
from pathlib import Path
from typing import Literal

from loguru import logger
from pydantic import ValidationError

from swbench import task_runner
from swbench.common.constants import (
    DEFAULT_RANDOM_SAMPLES,
    EXIT_BLOWUP,
    EXIT_OK,
    EXIT_USAGE_ERROR,
    EXIT_VERIFICATION_FAILED,
)
from swbench.common.errors import BlowUpError, SwbenchError, UsageError
from swbench.config import AppConfig, ConfigSingleton
from swbench.pydantic_models.scenario import Scenario
from swbench.scenarios.presets import PRESETS, get_preset
from swbench.spectral.grid import PeriodicGrid
from swbench.verification.suites import SUITES, run_suite
from swbench.verification.sweeps import run_sweep

SWEEPS = ("uniqueness", "damping", "convergence", "smallness")
# Scenario each sweep starts from when neither --preset nor --config is given.
SWEEP_PRESETS = {"uniqueness": "small-data", "convergence": "smooth", "smallness": "small-data"}


def parse_horizon(value: str) -> float | Literal["auto"]:
    if value.strip().lower() == "auto":
        return "auto"
    try:
        horizon = float(value)
    except ValueError:
        raise ArgumentTypeError(f"Invalid horizon {value}: expected a positive number or 'auto'")
    if not horizon > 0:
        raise ArgumentTypeError(f"The horizon must be positive, received {value}")
    return horizon


def parse_float_list(value: str) -> list[float]:
    try:
        values = [float(v) for v in value.split(",") if v.strip()]
    except ValueError:
        raise ArgumentTypeError(f"Invalid list {value}: expected comma separated numbers")
    if not values:
        raise ArgumentTypeError("Received an empty list")
    return values


def add_common_args(parser: ArgumentParser) -> None:
    parser.add_argument(
        "--out",
        type=str,
        default="runs",
        help="Directory that receives run directories and report files.",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="Seed for random fields; overrides the scenario's initial-data seed.",
    )
    parser.add_argument(
        "--workers",
        type=int,
        default=1,
        help="Worker processes for sweeps.",
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        help="Console log level.",
    )
    parser.add_argument(
        "--log-file",
        default=None,
        help="Optional file that receives the DEBUG level log.",
    )


def add_scenario_args(parser: ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument(
        "--preset",
        type=str,
        choices=sorted(PRESETS),
        default=None,
        help="Named scenario to start from.",
    )
    source.add_argument(
        "--config",
        type=Path,
        default=None,
        help="A TOML scenario file to start from.",
    )
    parser.add_argument("--grid", type=int, default=None, help="Points per direction N.")
    parser.add_argument("--dim", type=int, default=None, help="Space dimension d.")
    parser.add_argument("--gamma", type=float, default=None, help="Pressure exponent gamma.")
    parser.add_argument(
        "--T", type=parse_horizon, default=None, help="Horizon, a positive number or 'auto'."
    )
    parser.add_argument("--eta", type=float, default=None, help="Smallness parameter eta in (0, 1].")
    parser.add_argument("--name", type=str, default=None, help="Name of the run directory.")


def set_verify_parser_args(parser: ArgumentParser) -> None:
    parser.add_argument("suite", choices=sorted(SUITES), help="Verification suite to run.")
    add_common_args(parser)
    parser.add_argument("--grid", type=int, default=64, help="Points per direction N.")
    parser.add_argument("--dim", type=int, default=2, help="Space dimension d.")
    parser.add_argument(
        "--samples",
        type=int,
        default=DEFAULT_RANDOM_SAMPLES,
        help="Random fields drawn per randomized check.",
    )


def set_run_parser_args(parser: ArgumentParser) -> None:
    parser.add_argument("system", choices=["sw"], help="The system to integrate.")
    add_common_args(parser)
    add_scenario_args(parser)
    parser.add_argument("--n", type=float, default=None, help="Friedrichs truncation parameter n.")
    parser.add_argument(
        "--checkpoints",
        action="store_true",
        help="Store the trajectory under checkpoints/ in the run directory.",
    )


def set_sweep_parser_args(parser: ArgumentParser) -> None:
    parser.add_argument("sweep", choices=SWEEPS, help="Sweep to run.")
    add_common_args(parser)
    add_scenario_args(parser)
    parser.add_argument(
        "--n",
        type=parse_float_list,
        default=None,
        help="Comma separated truncations for the uniqueness sweep, e.g. 16,32,64.",
    )
    parser.add_argument(
        "--slopes",
        type=parse_float_list,
        default=None,
        help="Comma separated values of P'(1) for the damping sweep.",
    )
    parser.add_argument(
        "--viscosity",
        choices=["laplacian", "lame"],
        default="laplacian",
        help="Velocity dissipation of the damping sweep.",
    )
    parser.add_argument(
        "--refinements",
        type=int,
        default=None,
        help="Number of halvings of dt in the convergence sweep.",
    )
    parser.add_argument(
        "--scales",
        type=parse_float_list,
        default=None,
        help="Comma separated amplitude scales for the smallness sweep.",
    )


def set_report_parser_args(parser: ArgumentParser) -> None:
    parser.add_argument("run", type=str, help="A run directory, or the name of one under --out.")
    add_common_args(parser)


def parse_args(argv: list[str] | None = None):
    parser = ArgumentParser(prog="swbench")

    subparser_dest_attr_name = "command"
    subparsers = parser.add_subparsers(dest=subparser_dest_attr_name)

    verify_parser = subparsers.add_parser(
        "verify", help="Run a verification suite of the harmonic-analysis and flow layers."
    )
    set_verify_parser_args(verify_parser)

    run_parser = subparsers.add_parser(
        "run", help="Integrate the truncated shallow-water system and check the a priori estimate."
    )
    set_run_parser_args(run_parser)

    sweep_parser = subparsers.add_parser("sweep", help="Run a parameter sweep.")
    set_sweep_parser_args(sweep_parser)

    report_parser = subparsers.add_parser("report", help="Summarize a finished run directory.")
    set_report_parser_args(report_parser)

    args = parser.parse_args(argv)
    if getattr(args, subparser_dest_attr_name, None) is None:
        parser.print_help()
        sys.exit(EXIT_USAGE_ERROR)
    return args, subparser_dest_attr_name


def resolve_scenario(args: Namespace, default_preset: str = "small-data") -> Scenario:
    """Preset or TOML file, then the command-line flags field by field."""
    if getattr(args, "config", None) is not None:
        base = Scenario.from_toml(args.config)
    else:
        base = get_preset(args.preset or default_preset)
    n = getattr(args, "n", None)
    overrides = {
        "": {"name": args.name},
        "grid": {"N": args.grid, "d": args.dim},
        "physics": {"gamma": args.gamma},
        "initial_data": {"seed": args.seed},
        "run": {"T": args.T, "n": n if isinstance(n, float) else None},
        "estimates": {"eta": args.eta},
        "output": {"checkpoints": True if getattr(args, "checkpoints", False) else None},
    }
    return base.with_overrides(overrides)


def _write_json(out: str, name: str, payload: dict) -> Path:
    path = Path(out) / name
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2)
    logger.info(f"Report written to {path}")
    return path


def _verify(args: Namespace) -> int:
    grid = PeriodicGrid(d=args.dim, N=args.grid)
    report = run_suite(args.suite, grid, samples=args.samples, seed=ConfigSingleton.config.seed)
    for check in report.checks:
        bound = f" <= {check.bound:.4e}" if check.bound is not None else ""
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name:<40} {check.value:.4e}{bound}  {check.detail or ''}")
    print(f"{args.suite}: {'passed' if report.passed else 'failed'} ({len(report.checks)} checks)")
    _write_json(args.out, f"verify_{args.suite}.json", report.to_json())
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def _sweep_options(args: Namespace) -> dict:
    match args.sweep:
        case "uniqueness":
            options = {"scenario": resolve_scenario(args, SWEEP_PRESETS["uniqueness"]), "truncations": args.n}
            if isinstance(args.T, float):
                options["horizon"] = args.T
        case "damping":
            options = {"slopes": args.slopes, "viscosity": args.viscosity}
        case "convergence":
            options = {"scenario": resolve_scenario(args, SWEEP_PRESETS["convergence"]), "refinements": args.refinements}
        case "smallness":
            options = {"scenario": resolve_scenario(args, SWEEP_PRESETS["smallness"]), "scales": args.scales}
            if isinstance(args.T, float):
                options["horizon"] = args.T
        case _:
            raise UsageError(f"Unknown sweep {args.sweep}")
    return {k: v for k, v in options.items() if v is not None}


def _sweep(args: Namespace) -> int:
    report = run_sweep(args.sweep, workers=ConfigSingleton.config.workers, **_sweep_options(args))
    for row in report.rows:
        extra = "  ".join(f"{k}={v:.4g}" for k, v in row.extra.items())
        print(f"{row.label:<24} {row.value:.6e}  {'ok' if row.completed else 'incomplete'}  {extra}")
    for note in report.notes:
        print(f"note: {note}")
    print(f"{args.sweep}: {'passed' if report.verdict else 'failed'}" + (f" (fit {report.fit:.4g})" if report.fit is not None else ""))
    _write_json(args.out, f"sweep_{args.sweep}.json", report.to_json())
    return EXIT_OK if report.verdict else EXIT_VERIFICATION_FAILED


def _report(args: Namespace) -> int:
    run_dir = Path(args.run)
    if not run_dir.is_dir():
        run_dir = Path(args.out) / args.run
    print(task_runner.describe(run_dir))
    return EXIT_OK


def handle_command(args: Namespace, subparser_dest_attr_name: str) -> int:
    subcommand = getattr(args, subparser_dest_attr_name, None)
    if subcommand == "verify":
        return _verify(args)

    elif subcommand == "run":
        scenario = resolve_scenario(args)
        task_runner.run(scenario, ConfigSingleton.config.output_dir)
        return EXIT_OK

    elif subcommand == "sweep":
        return _sweep(args)

    elif subcommand == "report":
        return _report(args)

    else:
        raise UsageError(f"Unknown command: {subcommand}")


def build_and_register_config(args: Namespace) -> AppConfig:
    ConfigSingleton.init(
        output_dir=args.out,
        seed=args.seed if args.seed is not None else 0,
        workers=args.workers,
    )
    return ConfigSingleton.config


def setup_loguru(console_log_level: str, log_file: str | None) -> None:
    logger.remove()
    fmt = "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <6}</level> | <cyan>{name}:{function}:{line}</cyan> - <level>{message}</level>"
    logger.add(sys.stderr, level=console_log_level.upper(), format=fmt)
    if log_file:
        logger.add(log_file, level="DEBUG", format=fmt)
    logger.info(
        f"Loguru initialized: console={console_log_level.upper()}, file={'enabled @ DEBUG level' if log_file else 'disabled'}"
    )


def execute(args: Namespace, subparser_dest_attr_name: str) -> int:
    """handle_command with every failure mapped onto an exit status."""
    try:
        build_and_register_config(args)
        return handle_command(args, subparser_dest_attr_name)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or "scenario"
        logger.error(f"[Setup] Invalid value for {location}: {first['msg']}")
        return EXIT_USAGE_ERROR
    except BlowUpError as e:
        logger.error(f"[Solver] {e}")
        return EXIT_BLOWUP
    except (SwbenchError, tomllib.TOMLDecodeError, FileNotFoundError, ValueError) as e:
        logger.error(f"[Setup] {e}")
        return EXIT_USAGE_ERROR


def main():
    args, subparser_dest_attr_name = parse_args()
    setup_loguru(console_log_level=args.log_level, log_file=args.log_file)
    sys.exit(execute(args, subparser_dest_attr_name))


if __name__ == "__main__":
    main()
