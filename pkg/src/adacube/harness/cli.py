import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from ..exceptions import AdacubeError
from ..logger import configure_logging
from .records import write_json
from .runners import (
    run_adaptrap,
    run_avgcase_validation,
    run_bc_experiment,
    run_illustration,
    run_robot_analogue,
    run_synthetic_assessment,
    save_all,
)
from .schema import load_config

logger = logging.getLogger(__name__)

SUBCOMMANDS = ("adaptrap", "bc", "synth-bench", "avgcase", "illustrate", "robot")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adacube", description="Adaptive trapezoidal and Bayesian cubature experiments")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None, help="experiment JSON file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--budget", type=int, default=None, help="total evaluations, initial design included")
        p.add_argument("--tau", type=float, default=None, help="stop once the posterior sd falls below tau")
        if name == "bc":
            p.add_argument("--method", choices=("StdBC", "EAdapBC", "AdapBC"), default=None)
    return parser


def run_command(args: argparse.Namespace) -> List[Path]:
    cfg = load_config(args.config).with_overrides(seed=args.seed, out=args.out, budget=args.budget, tau=args.tau)
    out = Path(cfg.out)
    if args.command == "adaptrap":
        records = [run_adaptrap(cfg)]
    elif args.command == "bc":
        records = [run_bc_experiment(cfg, args.method)]
    elif args.command == "synth-bench":
        records = [run_synthetic_assessment(cfg)]
    elif args.command == "avgcase":
        records = [run_avgcase_validation(cfg)]
    elif args.command == "illustrate":
        records = run_illustration(cfg)
    else:
        records = [run_robot_analogue(cfg)]
    paths = save_all(records, out, cfg.include_timing)
    paths.append(write_json(out / "config.json", cfg.model_dump(mode="json")))
    return paths


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        paths = run_command(args)
    except AdacubeError as e:
        logger.error(f"Error: Failed to run {args.command}: {e}")
        sys.stderr.write(f"adacube {args.command}: {e}\n")
        return 1
    for path in paths:
        sys.stdout.write(f"{path}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
