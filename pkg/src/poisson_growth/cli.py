"""Command line entry point: pg <experiment> --config cfg.json [--seed N]
[--out DIR].  Exit codes: 0 success, 1 usage error, 2 internal validation
failure."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import EXPERIMENTS, ConfigError, ExperimentConfig, \
    ValidationError, run_experiment


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pg",
        description="Poissonian growth experiments: seeded, deterministic "
                    "runs comparing simulation against macroscopic theory.")
    parser.add_argument("experiment", choices=EXPERIMENTS)
    parser.add_argument("--config", required=True,
                        help="JSON file with the ExperimentConfig fields")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
    parser.add_argument("--out", default=None,
                        help="override the config output directory")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        raw = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"pg: cannot read config: {exc}", file=sys.stderr)
        return 1
    raw["experiment"] = args.experiment
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.out is not None:
        raw["out_dir"] = args.out
    try:
        cfg = ExperimentConfig.from_json(raw)
        cfg.validate()
    except ConfigError as exc:
        print(f"pg: invalid config: {exc}", file=sys.stderr)
        return 1
    try:
        out = run_experiment(cfg)
    except ValidationError as exc:
        print(f"pg: internal validation failed: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"pg: internal validation failed: {exc}", file=sys.stderr)
        return 2
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
