"""Multi-run experiments: per-run artifacts, aggregated verdicts and the text report."""

from __future__ import annotations

import json
import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from c2ctrust.analysis import (
    EXPECTED_DETECTABLE,
    EXPECTED_SHAPES,
    DynamicsThresholds,
    classify_dynamics,
    windowed_residual_variance,
    windowed_variance,
)
from c2ctrust.marketplace import write_transactions
from c2ctrust.network import write_graph
from c2ctrust.simulation import SimConfig, SimulationResult, run_simulation, write_cohorts, write_trust_series

log = logging.getLogger(__name__)


@dataclass
class ExperimentPlan:
    runs: list[tuple[str, int]]
    out_dir: Path
    overrides: dict = field(default_factory=dict)
    thresholds: DynamicsThresholds = field(default_factory=DynamicsThresholds)
    jobs: int = 1
    report: bool = False
    dump_graph: bool = False
    variance_csv: bool = False

    def __post_init__(self) -> None:
        self.out_dir = Path(self.out_dir)
        seen = set()
        for model, seed in self.runs:
            if (model, seed) in seen:
                raise ValueError(f"duplicate seed {seed} for model {model}")
            seen.add((model, seed))
        unknown = set(self.overrides) - set(SimConfig.field_names()) | ({"model", "seed"} & set(self.overrides))
        if unknown:
            raise ValueError(f"invalid config keys: {', '.join(sorted(unknown))}")

    def config_for(self, model: str, seed: int) -> SimConfig:
        return SimConfig(**{**self.overrides, "model": model, "seed": seed}).validate()


@dataclass
class RunSummary:
    model: str
    seed: int
    shape: str
    oscillating: bool
    directory: Path


def run_dir_name(model: str, seed: int) -> str:
    return f"model_{model}_seed_{seed}"


def summarize(result: SimulationResult, thresholds: DynamicsThresholds) -> dict:
    cfg = result.config
    attackers, normals = result.cohorts()
    trust = result.series.trust
    verdict = classify_dynamics(
        trust[:, result.roster.malicious_ids], trust[:, result.roster.normal_ids], cfg.incubation_period, thresholds
    )
    return {
        "config": cfg.to_dict(),
        "roles": {
            "attackers": result.roster.malicious_ids.tolist(),
            "spies": result.roster.spy_ids.tolist(),
            "pre_trusted": np.flatnonzero(result.roster.pre_trusted).tolist(),
        },
        "dynamics": verdict.to_dict(),
        "oscillation": {
            "detected": verdict.oscillating,
            "variance_ratio": verdict.variance_ratio,
            "window": thresholds.window,
            "kappa": thresholds.kappa,
        },
        "thresholds": thresholds.to_dict(),
        "expected_shape": EXPECTED_SHAPES[cfg.model.upper()].value,
        "final": {"attacker_mean": float(attackers[-1]), "normal_mean": float(normals[-1])},
        "convergence": {
            "all_converged": bool(result.series.converged.all()),
            "max_iterations": int(result.series.iterations.max()),
        },
        "transactions": len(result.transactions),
    }


def write_run(result: SimulationResult, directory: Path, plan: ExperimentPlan) -> dict:
    directory.mkdir(parents=True, exist_ok=True)
    attackers, normals = result.cohorts()
    write_trust_series(result.series, directory / "trust_series.csv")
    write_cohorts(attackers, normals, directory / "cohorts.csv")
    write_transactions(result.transactions, directory / "transactions.csv")
    summary = summarize(result, plan.thresholds)
    with open(directory / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    if plan.dump_graph:
        write_graph(result.initial_graph, result.roster, directory / "edges.txt", directory / "roles.txt")
    if plan.variance_csv:
        _write_variance(result, directory / "variance.csv", plan.thresholds.window)
    return summary


def _write_variance(result: SimulationResult, path: Path, window: int) -> None:
    attackers, normals = result.cohorts()
    trust = result.series.trust
    if len(trust) < window:
        return
    cols = [
        windowed_variance(attackers, window),
        windowed_variance(normals, window),
        windowed_residual_variance(trust[:, result.roster.malicious_ids], window).mean(axis=1),
        windowed_residual_variance(trust[:, result.roster.normal_ids], window).mean(axis=1),
    ]
    with open(path, "w") as fh:
        fh.write("tick,attacker_mean_var,normal_mean_var,attacker_node_resid_var,normal_node_resid_var\n")
        for j in range(len(cols[0])):
            fh.write(",".join([str(j + window - 1)] + [repr(float(c[j])) for c in cols]) + "\n")


def _execute(args: tuple[ExperimentPlan, str, int]) -> tuple[RunSummary, np.ndarray, np.ndarray]:
    plan, model, seed = args
    cfg = plan.config_for(model, seed)
    result = run_simulation(cfg)
    directory = plan.out_dir / run_dir_name(model, seed)
    summary = write_run(result, directory, plan)
    attackers, normals = result.cohorts()
    run = RunSummary(model, seed, summary["dynamics"]["shape"], summary["oscillation"]["detected"], directory)
    return run, attackers, normals


def aggregate(runs: list[RunSummary]) -> dict[str, dict]:
    """Majority shape and oscillation vote per model."""
    out: dict[str, dict] = {}
    for model in sorted({r.model for r in runs}):
        mine = [r for r in runs if r.model == model]
        votes = Counter(r.shape for r in mine)
        # ties broken by name so the report is stable
        shape, count = sorted(votes.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        expected = EXPECTED_SHAPES[model].value
        out[model] = {
            "majority": shape,
            "count": count,
            "runs": len(mine),
            "votes": dict(votes),
            "oscillating": sum(r.oscillating for r in mine),
            "expected": expected,
            "expected_detectability": EXPECTED_DETECTABLE[model],
            "matches": shape == expected,
        }
    return out


def format_report(table: dict[str, dict]) -> str:
    lines = [
        f"{'model':<6} {'majority shape':<20} {'votes':>7} {'oscill.':>8}  {'expected':<20} {'expected outcome':<16} match",
        "-" * 92,
    ]
    for model, row in table.items():
        votes = f"{row['count']}/{row['runs']}"
        osc = f"{row['oscillating']}/{row['runs']}"
        lines.append(
            f"{model:<6} {row['majority']:<20} {votes:>7} {osc:>8}  {row['expected']:<20} "
            f"{row['expected_detectability']:<16} {'yes' if row['matches'] else 'NO'}"
        )
    lines.append("")
    for model, row in table.items():
        lines.append(f"{model}: {row['majority']} ({row['count']}/{row['runs']})")
    return "\n".join(lines) + "\n"


def run_experiment(plan: ExperimentPlan) -> int:
    """Execute every run in ``plan``; returns 0 when all runs completed."""
    plan.out_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(plan.out_dir, os.W_OK):
        raise PermissionError(f"output directory {plan.out_dir} is not writable")
    for model, seed in plan.runs:
        plan.config_for(model, seed)
    tasks = [(plan, m, s) for m, s in plan.runs]
    if plan.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=plan.jobs) as pool:
            results = list(pool.map(_execute, tasks))
    else:
        results = [_execute(t) for t in tasks]
    for run, _, _ in results:
        log.info("model %s seed %d: %s", run.model, run.seed, run.shape)

    if plan.report:
        runs = [r for r, _, _ in results]
        table = aggregate(runs)
        (plan.out_dir / "report.txt").write_text(format_report(table))
        with open(plan.out_dir / "report.json", "w") as fh:
            json.dump(table, fh, indent=2)
            fh.write("\n")
        from c2ctrust import plotting

        curves: dict[str, list[tuple[np.ndarray, np.ndarray]]] = {}
        for run, attackers, normals in results:
            curves.setdefault(run.model, []).append((attackers, normals))
        incubation = plan.config_for(*plan.runs[0]).incubation_period
        plotting.plot_cohort_grid(curves, plan.out_dir / "cohorts.png", attack_tick=incubation)
        for model, pairs in curves.items():
            plotting.plot_model_cohorts(model, pairs, plan.out_dir / f"cohorts_{model}.png", attack_tick=incubation)
    return 0
