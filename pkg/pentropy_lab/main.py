"""
Main entry point for the P-entropy laboratory.

    pentropy-lab pentropy --config config/pentropy_golden.yaml
    pentropy-lab scan --system '{type: rotation, alpha: 2/5}' --m-range 0:20
    pentropy-lab schema --output docs/experiment_config.schema.json

Exit codes: 0 success, 2 validation, 3 cap exhaustion, 4 internal error.
Errors are reported as one JSON object on stderr.
"""

import argparse
import asyncio
import json
import re
import sys
from typing import Any, Dict, List, Optional, Sequence

import yaml

from .interfaces import IConfigurationManager
from .models.config import COMMANDS
from .orchestrator import ExperimentOrchestrator
from .services.config_manager import ConfigurationManager
from .utils.error_handling import ExitCode, LabError, ValidationError
from .utils.logging import LogLevel, get_logger, get_logging_stats, setup_logging

# flags holding structured values, parsed as YAML (a superset of JSON)
_STRUCTURED_FLAGS = (
    "system",
    "family",
    "partition",
    "partitions",
    "schedule",
    "times",
    "test_sets",
    "test_pairs",
)
_INT_LIST_FLAGS = ("j_set", "support", "rigidity_j", "tower_stages")
_CONSTANT_FLAGS = (
    "c",
    "kappa_threshold",
    "theta_r",
    "size_cap",
    "L_cap",
    "m_cap",
    "agreement_k",
)
_SCALAR_FLAGS = ("method", "samples", "seed", "workers", "output_dir", "log_level", "log_dir")


def _structured(text: str) -> Any:
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as e:
        raise ValidationError([f"Cannot parse flag value {text!r}: {e}"]) from e


def _int_list(text: str) -> Any:
    """'1,2,5', '1-50' or a YAML list."""
    text = text.strip()
    if text.startswith("["):
        return _structured(text)
    values: List[int] = []
    try:
        for part in filter(None, (p.strip() for p in text.split(","))):
            span = re.fullmatch(r"(-?\d+)-(-?\d+)", part)
            if span:
                values.extend(range(int(span.group(1)), int(span.group(2)) + 1))
            else:
                values.append(int(part))
    except ValueError as e:
        raise ValidationError([f"Cannot parse integer list {text!r}"]) from e
    return values


def _m_range(text: str) -> Any:
    """'start:stop[:step]' (inclusive) or a YAML list."""
    text = text.strip()
    if ":" not in text or text.startswith("[") or text.startswith("{"):
        return _structured(text)
    parts = text.split(":")
    try:
        numbers = [int(p) for p in parts]
    except ValueError as e:
        raise ValidationError([f"Cannot parse m_range {text!r}"]) from e
    if len(numbers) not in (2, 3):
        raise ValidationError([f"m_range needs start:stop or start:stop:step, got {text!r}"])
    out: Dict[str, int] = {"start": numbers[0], "stop": numbers[1]}
    if len(numbers) == 3:
        out["step"] = numbers[2]
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pentropy-lab",
        description="Batch experiments on P-entropy, weak limits and rigidity.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    for command in COMMANDS:
        sub = subparsers.add_parser(command, help=f"run a {command} experiment")
        sub.add_argument("--config", help="JSON or YAML experiment config")
        for name in _STRUCTURED_FLAGS:
            sub.add_argument(f"--{name.replace('_', '-')}", dest=name, help="YAML/JSON value")
        for name in _INT_LIST_FLAGS:
            sub.add_argument(
                f"--{name.replace('_', '-')}", dest=name, help="e.g. 1,2,5 or 1-50"
            )
        sub.add_argument("--m-range", dest="m_range", help="start:stop[:step], inclusive")
        sub.add_argument("--c", type=float, help="rigidity constant in (0, 1)")
        sub.add_argument("--kappa-threshold", dest="kappa_threshold", type=float)
        sub.add_argument("--theta-r", dest="theta_r", type=float)
        sub.add_argument("--size-cap", dest="size_cap", type=int)
        sub.add_argument("--L-cap", dest="L_cap", type=int)
        sub.add_argument("--m-cap", dest="m_cap", type=int)
        sub.add_argument("--agreement-k", dest="agreement_k", type=float)
        sub.add_argument("--method", choices=["exact", "analytic", "montecarlo"])
        sub.add_argument("--samples", type=int)
        sub.add_argument("--seed", type=int)
        sub.add_argument("--workers", type=int)
        sub.add_argument("--output-dir", dest="output_dir")
        sub.add_argument(
            "--log-level",
            dest="log_level",
            type=str.upper,
            choices=[level.value for level in LogLevel],
        )
        sub.add_argument("--log-dir", dest="log_dir")

    schema = subparsers.add_parser("schema", help="print or write the config JSON schema")
    schema.add_argument("--output", help="file to write; stdout when omitted")
    return parser


def flags_from_args(args: argparse.Namespace) -> Dict[str, Any]:
    """Config-shaped mapping of the flags actually given."""
    flags: Dict[str, Any] = {}
    for name in _STRUCTURED_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            flags[name] = _structured(value)
    for name in _INT_LIST_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            flags[name] = _int_list(value)
    if getattr(args, "m_range", None) is not None:
        flags["m_range"] = _m_range(args.m_range)
    constants = {
        name: getattr(args, name)
        for name in _CONSTANT_FLAGS
        if getattr(args, name, None) is not None
    }
    if constants:
        flags["constants"] = constants
    for name in _SCALAR_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            flags[name] = value
    return flags


def _report(error: LabError) -> int:
    print(json.dumps(error.to_report(), sort_keys=True), file=sys.stderr)
    return error.exit_code


async def async_main(args: argparse.Namespace) -> Any:
    """Load the config, set up logging and run the experiment."""
    manager: IConfigurationManager = ConfigurationManager(args.config)
    config = manager.load_config(flags_from_args(args), command=args.command)
    setup_logging(log_dir=config.log_dir, log_level=config.log_level)
    logger = get_logger("main")
    logger.info(
        "Starting experiment",
        extra={"command": args.command, "config_path": args.config, "seed": config.seed},
    )
    orchestrator = ExperimentOrchestrator(config)
    result = await orchestrator.run(args.command)
    logger.debug("Logging summary", extra=get_logging_stats())
    return result


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return the process exit code."""
    args = build_parser().parse_args(argv)

    if args.command == "schema":
        if args.output:
            ConfigurationManager.write_schema(args.output)
        else:
            print(json.dumps(ConfigurationManager.schema(), indent=2, sort_keys=True))
        return ExitCode.SUCCESS

    try:
        asyncio.run(async_main(args))
    except LabError as e:
        return _report(e)
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return ExitCode.INTERNAL
    except Exception as e:
        get_logger("main").error("Experiment failed", extra={"error": str(e)}, exc_info=True)
        return _report(LabError(f"{type(e).__name__}: {e}"))
    return ExitCode.SUCCESS


def main():
    """Console-script entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
