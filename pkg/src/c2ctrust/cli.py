"""Command-line entry point.

Example::

    c2ctrust simulate --model B --seeds 1..20 --report --out runs/
"""

from __future__ import annotations

import argparse
import logging
import sys
import typing
from pathlib import Path

from c2ctrust.agents import THREAT_MODELS
from c2ctrust.experiment import ExperimentPlan, run_experiment
from c2ctrust.simulation import SimConfig

# CLI flag dest -> SimConfig field
FLAG_FIELDS = {
    "ticks": "total_ticks",
    "nodes": "n",
    "attacker_ratio": "attacker_ratio",
    "spy_ratio": "spy_ratio",
    "c": "c",
    "e": "e",
    "f": "f",
    "incubation": "incubation_period",
    "damping": "damping",
}


def _field_types() -> dict[str, type]:
    hints = typing.get_type_hints(SimConfig)
    out = {}
    for name, hint in hints.items():
        args = [a for a in typing.get_args(hint) if a is not type(None)]
        out[name] = args[0] if args else hint
    return out


def parse_config_file(path: str | Path) -> dict:
    """Read ``key = value`` lines; ``#`` starts a comment. Unknown keys are rejected."""
    types = _field_types()
    values: dict = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in types:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            if value.lower() in ("none", "") and key == "transactions_per_tick":
                values[key] = None
                continue
            try:
                values[key] = types[key](value)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def parse_seeds(text: str) -> list[int]:
    """``7``, ``1,4,9`` or an inclusive range ``1..20``."""
    seeds: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError(f"no seeds in {text!r}")
    return seeds


def parse_models(text: str) -> list[str]:
    if text.lower() == "all":
        return list(THREAT_MODELS)
    models = [m.strip().upper() for m in text.split(",") if m.strip()]
    bad = [m for m in models if m not in THREAT_MODELS]
    if bad or not models:
        raise argparse.ArgumentTypeError(f"unknown model(s) {bad or text!r}; choose from {','.join(THREAT_MODELS)} or 'all'")
    return models


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="c2ctrust", description="EigenTrust C2C marketplace simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sim = sub.add_parser("simulate", help="run one or more simulations and write CSV/JSON artifacts")
    sim.add_argument("--model", type=parse_models, default=None, help="A..F, comma list, or 'all'")
    seeds = sim.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=int, default=None)
    seeds.add_argument("--seeds", type=parse_seeds, default=None, help="e.g. 1..20 or 1,2,5")
    sim.add_argument("--ticks", type=int)
    sim.add_argument("--nodes", type=int)
    sim.add_argument("--attacker-ratio", type=float)
    sim.add_argument("--spy-ratio", type=float)
    sim.add_argument("--c", type=float)
    sim.add_argument("--e", type=float)
    sim.add_argument("--f", type=float)
    sim.add_argument("--incubation", type=int)
    sim.add_argument("--damping", type=float)
    sim.add_argument("--config", type=Path, help="flat 'key = value' file; flags override it")
    sim.add_argument("--out", type=Path, default=Path("runs"))
    sim.add_argument("--jobs", type=int, default=1)
    sim.add_argument("--report", action="store_true", help="write report.txt and figures over all runs")
    sim.add_argument("--dump-graph", action="store_true", help="write the initial edge list and roles per run")
    sim.add_argument("--variance-csv", action="store_true", help="write per-tick windowed variances per run")
    return parser


def plan_from_args(args: argparse.Namespace) -> ExperimentPlan:
    overrides = parse_config_file(args.config) if args.config else {}
    for flag, name in FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            overrides[name] = value
    models = args.model or [overrides.pop("model", "A").upper()]
    default_seed = overrides.pop("seed", 0)
    overrides.pop("model", None)
    if args.seeds is not None:
        seeds = args.seeds
    elif args.seed is not None:
        seeds = [args.seed]
    else:
        seeds = [default_seed]
    runs = [(m, s) for m in models for s in seeds]
    return ExperimentPlan(
        runs,
        args.out,
        overrides,
        jobs=max(1, args.jobs),
        report=args.report,
        dump_graph=args.dump_graph,
        variance_csv=args.variance_csv,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        plan = plan_from_args(args)
        status = run_experiment(plan)
    except (ValueError, OSError) as exc:
        print(f"c2ctrust: error: {exc}", file=sys.stderr)
        return 1
    if plan.report:
        print((plan.out_dir / "report.txt").read_text(), end="")
    return status


if __name__ == "__main__":
    sys.exit(main())
