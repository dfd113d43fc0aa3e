#!/usr/bin/env python3
"""
Command-line entry point.

    l4s-sim --scenario scenario1 --runs 30 --seed 1
    l4s-sim --scenario my.conf --scheduler timeshift --out results/ts --force

Exit codes: 0 success, 1 configuration error, 2 runtime error or bad usage.
"""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, TextIO

from dotenv import load_dotenv
from pydantic import ValidationError

from ..models.config import ScenarioConfig, SchedulerType
from ..models.results import Aggregate
from ..scenario.config_loader import resolve_scenario
from ..scenario.presets import list_presets
from ..scenario.runner import run_scenario
from ..utils.exceptions import ConfigurationException, L4sSimException
from ..utils.logger import get_logger, get_structured_logger, set_level

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_RUNTIME_ERROR = 2


@dataclass
class RunRequest:
    config: ScenarioConfig
    output_dir: Path
    parallel: int = 1
    force: bool = False
    emit_plots: bool = False


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="l4s-sim",
        description="Discrete-event L4S simulator: TCP Prague and Cubic over a DualPI2 bottleneck",
    )
    parser.add_argument("--scenario", "-s", help="Preset name or scenario file")
    parser.add_argument("--runs", "-n", type=int, help="Number of replications")
    parser.add_argument("--seed", type=int, help="Global RNG seed")
    parser.add_argument("--duration", type=float, help="Simulated seconds per replication")
    parser.add_argument("--out", "-o", help="Output directory (default results/<scenario>)")
    parser.add_argument(
        "--scheduler",
        choices=[s.value for s in SchedulerType],
        help="DualPI2 dequeue scheduler",
    )
    parser.add_argument("--parallel", "-j", type=int, default=1, help="Worker processes")
    parser.add_argument("--force", action="store_true", help="Overwrite an existing output directory")
    parser.add_argument("--emit-plots", action="store_true", help="Write gnuplot scripts next to the CSVs")
    parser.add_argument("--list-presets", action="store_true", help="List built-in scenarios and exit")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Overrides LOG_LEVEL",
    )
    return parser


def apply_overrides(config: ScenarioConfig, args: argparse.Namespace) -> ScenarioConfig:
    """Command-line flags win over file values; the result is re-validated."""
    data = config.model_dump()
    overrides = {
        'run_count': args.runs,
        'seed': args.seed,
        'duration_s': args.duration,
        'output_dir': args.out,
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if args.scheduler is not None:
        data['aqm']['scheduler'] = args.scheduler
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        first = exc.errors()[0]
        key = '.'.join(str(part) for part in first.get('loc', ())) or None
        raise ConfigurationException(first.get('msg', str(exc)), config_key=key, source='command line') from exc


def cli_parse(argv: List[str]) -> RunRequest:
    args = build_parser().parse_args(argv)
    if not args.scenario:
        raise ConfigurationException("--scenario is required", config_key='scenario')
    if args.parallel < 1:
        raise ConfigurationException("--parallel must be at least 1", config_key='parallel')
    config = apply_overrides(resolve_scenario(args.scenario), args)
    return RunRequest(
        config=config,
        output_dir=Path(config.resolved_output_dir),
        parallel=args.parallel,
        force=args.force,
        emit_plots=args.emit_plots,
    )


def print_summary(config: ScenarioConfig, aggregate: Aggregate, out: Path, stream: TextIO = sys.stdout) -> None:
    width = max((len(name) for name in aggregate.metrics), default=10)
    print(f"\n{config.name}: {aggregate.run_count} run(s), results in {out}", file=stream)
    print(f"{'metric':<{width}}  {'mean':>14}  {'95% CI':>12}", file=stream)
    for name, agg in aggregate.metrics.items():
        ci = f"± {agg.ci95:.6g}" if agg.ci95 is not None else "n/a"
        print(f"{name:<{width}}  {agg.mean:>14.6g}  {ci:>12}", file=stream)


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()

    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_RUNTIME_ERROR

    args = parser.parse_args(argv)
    if args.log_level:
        set_level(args.log_level)

    if args.list_presets:
        for name, description in list_presets().items():
            print(f"{name:<12} {description}")
        return EXIT_OK

    errors = get_structured_logger(__name__)
    try:
        request = cli_parse(argv)
        outcome = run_scenario(
            request.config,
            output_dir=request.output_dir,
            parallel=request.parallel,
            force=request.force,
            emit_plots=request.emit_plots,
        )
    except ConfigurationException as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except L4sSimException as exc:
        errors.error("scenario failed", error=exc, **exc.details)
        print(f"error: {exc.message}", file=sys.stderr)
        return EXIT_RUNTIME_ERROR

    print_summary(request.config, outcome.aggregate, outcome.output_dir)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
