"""Command-line entry point.

Exit codes: 0 success, 1 program certified infeasible, 2 any other failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Sequence

from cli.config import Command, RunConfig, build_config, load_config
from cli.handlers import HANDLERS
from shared.core import log_context, logger
from shared.errors import ConfigValidationError, FtrlSynthError, ProgramInfeasibleError
from shared.models import AdversaryKind, BaselineKind, ExitCode, LocalityMargin, Weighting


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ftrl-synth", description="Synthesize, run and benchmark FTRL regularizers.")
    parser.add_argument("--config", type=Path, help="run a JSON config file instead of a subcommand")
    sub = parser.add_subparsers(dest="command")

    syn = sub.add_parser("synthesize", help="solve the regularizer program")
    syn.add_argument("--action-set", required=True, help="body description file")
    syn.add_argument("--loss-set", required=True, help="body description file")
    syn.add_argument("--out", required=True, type=Path, help="regularizer file to write")
    syn.add_argument("--report", required=True, type=Path)
    syn.add_argument("--eps-bar", type=float)
    syn.add_argument("--alpha", type=float)
    syn.add_argument("--c-guess", type=float)
    syn.add_argument("--margin", type=float, help="requested final strong-convexity margin")
    syn.add_argument("--c2", type=float)
    syn.add_argument("--locality-margin", choices=[m.value for m in LocalityMargin])
    syn.add_argument("--no-doubling", dest="doubling", action="store_false", default=None)
    syn.add_argument("--max-doublings", type=int)
    syn.add_argument("--no-validate", dest="validate_output", action="store_false", default=None)
    syn.add_argument("--samples", type=int)
    syn.add_argument("--seed", type=int)
    syn.add_argument("--metrics-out", type=Path, help="prometheus text file")

    run = sub.add_parser("run", help="play FTRL against an adversary")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--regularizer", type=Path)
    source.add_argument("--baseline", choices=[b.value for b in BaselineKind])
    run.add_argument("--c", type=float, help="quadratic baseline coefficient")
    run.add_argument("--action-set", required=True)
    run.add_argument("--loss-set", required=True)
    run.add_argument("--adversary", choices=[a.value for a in AdversaryKind])
    run.add_argument("--rounds", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--eta", type=float)
    run.add_argument("--weighting", choices=[w.value for w in Weighting])
    run.add_argument("--tol", type=float)
    run.add_argument("--trace-out", required=True, type=Path)
    run.add_argument("--report", type=Path)

    bench = sub.add_parser("bench", help="run a benchmark suite")
    bench.add_argument("--suite", required=True, type=Path)
    bench.add_argument("--out-dir", required=True, type=Path)

    check = sub.add_parser("check", help="sample strong convexity of a regularizer file")
    check.add_argument("--regularizer", required=True, type=Path)
    check.add_argument("--loss-set")
    check.add_argument("--action-set")
    check.add_argument("--alpha", type=float)
    check.add_argument("--samples", type=int)
    check.add_argument("--seed", type=int)
    check.add_argument("--report", required=True, type=Path)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.config is not None:
        return load_config(args.config)
    fields: dict[str, Any] = {
        k: v for k, v in vars(args).items() if k not in {"config", "command"} and v is not None
    }
    return build_config({"command": args.command, args.command: fields}, Path.cwd())


def dispatch(config: RunConfig) -> ExitCode:
    digest = config.digest()
    with log_context(command=config.command.value, digest=digest):
        logger.info(f"🚀 {config.command.value} started")
        return HANDLERS[Command(config.command)](config.block, digest)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config is None and args.command is None:
        parser.print_usage(sys.stderr)
        return ExitCode.INTERNAL

    try:
        return int(dispatch(config_from_args(args)))
    except ProgramInfeasibleError as e:
        logger.warning(f"Infeasible: {e}")
        return ExitCode.INFEASIBLE
    except ConfigValidationError as e:
        for violation in e.violations:
            logger.error(f"Invalid configuration: {violation}")
        return ExitCode.INTERNAL
    except (FtrlSynthError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return ExitCode.INTERNAL
    except Exception:
        logger.exception("Unexpected failure")
        return ExitCode.INTERNAL


if __name__ == "__main__":
    sys.exit(main())
