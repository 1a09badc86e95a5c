import argparse
import logging
import math
import sys

from collections.abc import Sequence
from pathlib import Path
from typing import Any

from gridrecovery.api import run_experiment
from gridrecovery.config.settings import ConfigError, RunConfig, parse_config
from gridrecovery.domain import Objective
from gridrecovery.experiment.metrics import summarize
from gridrecovery.experiment.reports import write_batch
from gridrecovery.hazard.scenarios import ScenarioFileError
from gridrecovery.logs import setup_logging
from gridrecovery.solver.selectors import SelectorKind
from gridrecovery.validation.validator import ValidationError


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridrecovery",
        description="Simulate power network recovery and compare repair policies.",
    )
    parser.add_argument("--config", type=Path, help="TOML run configuration")
    parser.add_argument("--scenarios", type=int, help="number of damage scenarios")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument(
        "--selector",
        action="append",
        metavar="NAME",
        help=(
            "selector to run, by configured name or kind "
            f"({', '.join(k.value for k in SelectorKind)}); repeatable"
        ),
    )
    parser.add_argument(
        "--objective", choices=[o.value for o in Objective], help="recovery objective"
    )
    parser.add_argument("--jobs", type=int, help="parallel scenario workers")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument(
        "--scenario-file", type=Path, help="JSON lines scenarios to use"
    )
    parser.add_argument(
        "--deterministic",
        action="store_true",
        default=None,
        help="plan and execute with exact repair times",
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        type=str.upper,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging level",
    )
    parser.add_argument("--log-file", type=Path, help="also log to this file")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    flags = {
        "hazard.scenarios": args.scenarios,
        "hazard.master_seed": args.seed,
        "hazard.scenario_file": args.scenario_file,
        "objective": args.objective,
        "jobs": args.jobs,
        "output_dir": args.out,
        "deterministic": args.deterministic,
    }
    return {key: value for key, value in flags.items() if value is not None}


def _select(config: RunConfig, names: Sequence[str]) -> RunConfig:
    """Keep the named selectors; unknown names become default selectors"""
    configured = {s.name or s.kind.value: s for s in config.selectors}
    chosen = [
        configured[name].model_dump() if name in configured else {"kind": name}
        for name in names
    ]
    data = config.model_dump()
    data["selectors"] = chosen
    return RunConfig.model_validate(data)


def _load(args: argparse.Namespace) -> RunConfig:
    config = parse_config(args.config, _overrides(args))
    if args.selector:
        try:
            config = _select(config, args.selector)
        except ValueError as e:
            msg = f"Invalid --selector: {e}"
            raise ConfigError(msg) from e
    return config


def _format_days(value: float) -> str:
    return "n/a" if math.isnan(value) else f"{value:.3f}"


def main(argv: Sequence[str] | None = None) -> int:
    """
    Run an experiment from the command line.

    Returns:
        0 on success, 2 for configuration errors, 1 for scenario,
        validation or I/O failures
    """
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level, args.log_file)

    try:
        config = _load(args)
    except ConfigError as e:
        logger.error("%s", e)  # noqa: TRY400
        return EXIT_CONFIG

    try:
        result = run_experiment(config)
        write_batch(config.output_dir, result)
    except (ValidationError, ScenarioFileError, OSError) as e:
        logger.error("Run failed: %s", e)  # noqa: TRY400
        return EXIT_FAILURE

    for summary in summarize(result):
        print(
            f"{summary.selector}: {summary.scenarios} scenarios, "
            f"mean days to goal {_format_days(summary.mean_days_to_goal)}, "
            f"mean recovery {_format_days(summary.mean_t_tot_days)} days, "
            f"mean benefit {summary.mean_benefit:.1f}"
        )
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
