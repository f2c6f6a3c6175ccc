"""Run orchestration: build the market, advance ticks, record global trust."""

from __future__ import annotations

import csv
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from c2ctrust.agents import THREAT_MODELS, BehaviorContext, threat_model
from c2ctrust.marketplace import TransactionRecord, execute_transaction, select_seller
from c2ctrust.network import Roster, TradeGraph, assign_roles, ensure_attacker_adjacency, generate_k_out_graph
from c2ctrust.streams import stream
from c2ctrust.trust_core import RatingLedger, compute_global_trust, local_trust_matrix

_PROBABILITIES = ("attacker_ratio", "spy_ratio", "c", "e", "f", "damping", "collusion_bias")


@dataclass
class SimConfig:
    model: str = "A"
    seed: int = 0
    n: int = 100
    k: int = 2
    alpha: float = 1.0
    pretrust_count: int = 32
    attacker_ratio: float = 0.10
    spy_ratio: float = 0.5
    c: float = 0.5
    e: float = 0.5
    f: float = 0.5
    incubation_period: int = 50
    total_ticks: int = 100
    damping: float = 0.1
    eps: float = 1e-6
    max_iter: int = 1000
    collusion_bias: float = 0.5
    transactions_per_tick: int | None = None  # None: every node buys once
    recompute: str = "tick"  # or "transaction"

    def errors(self) -> list[str]:
        errs = []
        if self.model.upper() not in THREAT_MODELS:
            errs.append(f"model: expected one of {', '.join(THREAT_MODELS)}, got {self.model!r}")
        for name in _PROBABILITIES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                errs.append(f"{name}: must be in [0, 1], got {value}")
        if self.n < 2:
            errs.append(f"n: need at least 2 nodes, got {self.n}")
        if self.k < 1 or self.k >= self.n:
            errs.append(f"k: need 1 <= k < n, got {self.k}")
        if self.alpha <= 0:
            errs.append(f"alpha: must be positive, got {self.alpha}")
        if self.pretrust_count < 0:
            errs.append(f"pretrust_count: must be >= 0, got {self.pretrust_count}")
        if self.total_ticks < 0:
            errs.append(f"total_ticks: must be >= 0, got {self.total_ticks}")
        if not 0 <= self.incubation_period <= self.total_ticks:
            errs.append(f"incubation_period: must be in [0, total_ticks], got {self.incubation_period}")
        if self.eps <= 0:
            errs.append(f"eps: must be positive, got {self.eps}")
        if self.max_iter < 1:
            errs.append(f"max_iter: must be >= 1, got {self.max_iter}")
        if self.transactions_per_tick is not None and self.transactions_per_tick < 0:
            errs.append(f"transactions_per_tick: must be >= 0, got {self.transactions_per_tick}")
        if self.recompute not in ("tick", "transaction"):
            errs.append(f"recompute: expected 'tick' or 'transaction', got {self.recompute!r}")
        return errs

    def validate(self) -> "SimConfig":
        errs = self.errors()
        if errs:
            raise ValueError("invalid config:\n  " + "\n  ".join(errs))
        return self

    def replace(self, **changes: Any) -> "SimConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def field_names(cls) -> tuple[str, ...]:
        return tuple(f.name for f in dataclasses.fields(cls))


@dataclass
class TrustTimeSeries:
    """Global trust per tick; row 0 is the state before any transaction."""

    trust: np.ndarray  # (ticks + 1, n)
    converged: np.ndarray  # bool per tick
    iterations: np.ndarray

    def __len__(self) -> int:
        return self.trust.shape[0]


@dataclass
class SimulationResult:
    config: SimConfig
    series: TrustTimeSeries
    transactions: list[TransactionRecord]
    roster: Roster
    initial_graph: TradeGraph
    final_graph: TradeGraph
    ledger: RatingLedger = field(repr=False)

    def cohorts(self) -> tuple[np.ndarray, np.ndarray]:
        return cohort_means(self.series, self.roster)


def cohort_means(series: TrustTimeSeries | np.ndarray, roster: Roster) -> tuple[np.ndarray, np.ndarray]:
    """Per-tick mean trust of the malicious cohort and of normal users."""
    trust = series.trust if isinstance(series, TrustTimeSeries) else np.asarray(series)
    if trust.ndim != 2 or trust.shape[1] != roster.n:
        raise ValueError(f"series has shape {trust.shape}, roster has {roster.n} nodes")
    bad, good = roster.malicious_ids, roster.normal_ids
    attackers = trust[:, bad].mean(axis=1) if len(bad) else np.zeros(len(trust))
    normals = trust[:, good].mean(axis=1) if len(good) else np.zeros(len(trust))
    return attackers, normals


def _buyer_order(n: int, count: int | None, rng: np.random.Generator) -> np.ndarray:
    if count is None:
        return rng.permutation(n)
    reps = -(-count // n) if count else 0
    return np.concatenate([rng.permutation(n) for _ in range(reps)] or [np.empty(0, dtype=int)])[:count]


def run_simulation(config: SimConfig) -> SimulationResult:
    config.validate()
    spec = threat_model(config.model, config.c, config.e, config.f)
    graph_rng = stream(config.seed, "graph")
    graph = generate_k_out_graph(config.n, config.k, config.alpha, graph_rng)
    roster = assign_roles(
        config.n, config.attacker_ratio, config.spy_ratio, config.pretrust_count, spec.model_id, stream(config.seed, "roles")
    )
    graph = ensure_attacker_adjacency(graph, roster, graph_rng)
    initial = graph.copy()

    shuffle_rng = stream(config.seed, "shuffle")
    select_rng = stream(config.seed, "selection")
    behave_rng = stream(config.seed, "behavior")

    p = roster.pretrust_vector()
    ledger = RatingLedger(config.n)

    def trust_now():
        C = local_trust_matrix(ledger, p)
        return compute_global_trust(C, p, config.damping, config.eps, config.max_iter)

    gt = trust_now()
    rows, flags, iters = [gt.t], [gt.converged], [gt.iterations]
    t = gt.t
    log: list[TransactionRecord] = []
    for tick in range(1, config.total_ticks + 1):
        # transactions of tick `incubation_period` are the first attacks
        ctx = BehaviorContext(tick, config.incubation_period, behave_rng)
        for buyer in _buyer_order(config.n, config.transactions_per_tick, shuffle_rng):
            buyer = int(buyer)
            seller = select_seller(buyer, graph, t, roster, spec, ctx, select_rng, config.collusion_bias)
            log.append(execute_transaction(buyer, seller, ledger, graph, roster, spec, ctx))
            if config.recompute == "transaction":
                t = trust_now().t
        gt = trust_now()
        t = gt.t
        rows.append(t)
        flags.append(gt.converged)
        iters.append(gt.iterations)
    series = TrustTimeSeries(np.array(rows), np.array(flags, dtype=bool), np.array(iters, dtype=int))
    return SimulationResult(config, series, log, roster, initial, graph, ledger)


def write_trust_series(series: TrustTimeSeries, path: str | Path) -> None:
    n = series.trust.shape[1]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tick"] + [f"node_{i}" for i in range(n)])
        for tick, row in enumerate(series.trust):
            writer.writerow([tick] + [repr(float(x)) for x in row])


def write_cohorts(attackers: np.ndarray, normals: np.ndarray, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["tick", "attacker_mean", "normal_mean"])
        for tick, (a, b) in enumerate(zip(attackers, normals)):
            writer.writerow([tick, repr(float(a)), repr(float(b))])


def read_trust_series(path: str | Path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1)[:, 1:]
