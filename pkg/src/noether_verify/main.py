"""Command-line entry point for noether-verify."""

import argparse
import asyncio
import json
import sys
from dataclasses import dataclass
from typing import Optional

import yaml

from .calculus.operators import adjoint_eta, op_equal
from .errors import NoetherError
from .models.factory import create_model
from .runner.documents import dump_model, euler_lagrange_map, load_density, load_operator
from .runner.properties import SUITES, PropertyProfile, run_property
from .runner.suites import SuiteSettings
from .runner.verifier import verify_selector
from .theory.report import VerificationReport, render_json
from .utils.config import Config
from .utils.logger import configure_logging, get_logger

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def resolve_color(setting: bool | str) -> bool:
    """Explicit true/false wins; ``auto`` colors only a terminal."""
    if setting == "auto":
        return sys.stdout.isatty()
    return bool(setting)


@dataclass(frozen=True)
class RunConfig:
    """One invocation: parsed arguments over configuration defaults."""

    command: str
    output_format: str = "text"
    color: bool = False
    selector: Optional[str] = None
    input_path: Optional[str] = None
    output_dir: Optional[str] = None
    fields: Optional[tuple[str, ...]] = None
    roundtrip: bool = False
    suite: Optional[str] = None
    trials: int = 100
    seed: int = 0
    order: Optional[int] = None
    workers: int = 4

    def __post_init__(self) -> None:
        if self.output_format not in ("text", "json"):
            raise ValueError(f"Unknown output format: '{self.output_format}'")
        if self.trials < 1 or self.workers < 1:
            raise ValueError("trials and workers must be positive")
        if self.order is not None and self.order < 0:
            raise ValueError(f"order must be non-negative, got {self.order}")

    @classmethod
    def from_args(cls, args: argparse.Namespace, config: Config) -> "RunConfig":
        property_config = config.property_suite
        fields = tuple(f for f in args.fields.split(",") if f) if getattr(args, "fields", None) else None
        trials = getattr(args, "trials", None)
        seed = getattr(args, "seed", None)
        return cls(
            command=args.command,
            output_format=args.format or config.output.get("format", "text"),
            color=resolve_color(config.output.get("color", "auto")),
            selector=getattr(args, "selector", None),
            input_path=getattr(args, "input", None),
            output_dir=getattr(args, "output", None),
            fields=fields,
            roundtrip=bool(getattr(args, "roundtrip", False)),
            suite=getattr(args, "suite", None),
            trials=int(trials if trials is not None else property_config.get("trials", 100)),
            seed=int(seed if seed is not None else property_config.get("seed", 0)),
            order=getattr(args, "order", None),
            workers=int(config.verify.get("workers", 4)),
        )


def _emit_reports(reports: list[VerificationReport], run: RunConfig) -> int:
    if run.output_format == "json":
        print(render_json(reports))
    else:
        print("\n\n".join(r.render_text(color=run.color) for r in reports))
    return EXIT_OK if all(r.ok for r in reports) else EXIT_FAILED


def cmd_verify(run: RunConfig, config: Config) -> int:
    settings = SuiteSettings.from_config(config.verify)
    reports = asyncio.run(verify_selector(run.selector, settings, run.workers))
    return _emit_reports(reports, run)


def cmd_eta(run: RunConfig) -> int:
    op = load_operator(run.input_path)
    adjoint = adjoint_eta(op)
    print(json.dumps(adjoint.to_dict(), indent=2))
    if not run.roundtrip:
        return EXIT_OK
    if op_equal(adjoint_eta(adjoint), op):
        print("roundtrip: ok")
        return EXIT_OK
    print("roundtrip: FAILED")
    return EXIT_FAILED


def cmd_el(run: RunConfig) -> int:
    spec, density = load_density(run.input_path)
    print(json.dumps(euler_lagrange_map(spec, density, run.fields)))
    return EXIT_OK


def cmd_property(run: RunConfig, config: Config) -> int:
    profile = PropertyProfile.from_config(config.property_suite, run.order)
    result = run_property(run.suite, run.trials, run.seed, profile)
    code = _emit_reports([result.to_report()], run)
    if result.failure is not None and run.output_format == "text":
        print(f"failing seed: {result.failure.seed} (trial {result.failure.trial})")
        print(f"counterexample: {json.dumps(result.failure.counterexample, indent=2)}")
    return code


def cmd_dump(run: RunConfig) -> int:
    model = create_model(run.selector)
    for path in dump_model(model, run.output_dir):
        print(path)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noether",
        description="Exact verification of Noether identities for gauge theories",
    )
    parser.add_argument("--config", type=str, help="Path to configuration file")
    parser.add_argument("--format", choices=["text", "json"], help="Output format")
    parser.add_argument("--verbose", action="store_true", help="Log progress (INFO)")
    parser.add_argument("--debug", action="store_true", help="Log everything (DEBUG)")
    commands = parser.add_subparsers(dest="command", required=True)

    verify = commands.add_parser("verify", help="Run a model's check suite")
    verify.add_argument("selector", help="cs, bf:<n>:<p>:<q> or all")

    eta = commands.add_parser("eta", help="Adjoint of an operator document")
    eta.add_argument("input", help="Operator JSON file")
    eta.add_argument("--roundtrip", action="store_true", help="Also check eta(eta(op)) = op")

    el = commands.add_parser("el", help="Euler-Lagrange expressions of a density document")
    el.add_argument("input", help="Density JSON file")
    el.add_argument("--fields", help="Comma-separated families to vary (default: all fields)")

    prop = commands.add_parser("property", help="Randomized property suite")
    prop.add_argument("--suite", required=True, choices=sorted(SUITES), help="Property suite")
    prop.add_argument("--trials", type=int, help="Number of random cases")
    prop.add_argument("--seed", type=int, help="Run seed")
    prop.add_argument("--order", type=int, help="Largest operator order drawn")

    dump = commands.add_parser("dump", help="Write a built-in model's documents")
    dump.add_argument("selector", help="cs or bf:<n>:<p>:<q>")
    dump.add_argument("-o", "--output", required=True, help="Output directory")
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    try:
        config = Config(args.config)
    except (ValueError, yaml.YAMLError) as e:
        print(f"error: bad configuration: {e}", file=sys.stderr)
        return EXIT_USAGE
    configure_logging(config.logging, verbose=args.verbose, debug=args.debug)
    logger = get_logger("main")

    try:
        run = RunConfig.from_args(args, config)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if run.command == "verify":
            return cmd_verify(run, config)
        if run.command == "eta":
            return cmd_eta(run)
        if run.command == "el":
            return cmd_el(run)
        if run.command == "property":
            return cmd_property(run, config)
        return cmd_dump(run)
    except (NoetherError, json.JSONDecodeError, OSError) as e:
        logger.debug(f"{run.command} failed", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
