"""Per-transaction protocol: seller choice, delivery, and the two ratings."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from c2ctrust import agents
from c2ctrust.agents import BehaviorContext, Quality, ThreatModelSpec
from c2ctrust.network import Roster, TradeGraph
from c2ctrust.trust_core import RatingLedger, record_rating

TRANSACTION_FIELDS = ("tick", "buyer", "seller", "quality", "buyer_rating", "seller_rating")


@dataclass(frozen=True)
class TransactionRecord:
    tick: int
    buyer: int
    seller: int
    quality: Quality
    buyer_rating: bool
    seller_rating: bool

    def __post_init__(self) -> None:
        if self.buyer == self.seller:
            raise ValueError(f"buyer and seller are both node {self.buyer}")

    def row(self) -> tuple:
        return (self.tick, self.buyer, self.seller, self.quality.value, self.buyer_rating, self.seller_rating)


def sample_weighted(pool: np.ndarray, t: np.ndarray, rng: np.random.Generator) -> int:
    """Pick from ``pool`` proportionally to trust, uniformly if all trust is zero."""
    if len(pool) == 1:
        return int(pool[0])
    w = np.clip(t[pool], 0.0, None)
    total = w.sum()
    if total <= 0:
        return int(pool[rng.integers(len(pool))])
    return int(pool[rng.choice(len(pool), p=w / total)])


def select_seller(
    buyer: int,
    graph: TradeGraph,
    t: np.ndarray,
    roster: Roster,
    spec: ThreatModelSpec,
    ctx: BehaviorContext,
    rng: np.random.Generator,
    collusion_bias: float = 0.5,
) -> int:
    """Two-stage counterparty choice.

    A coin flip picks proven partners (out-neighbors) or everyone else; the
    seller is then drawn from that pool weighted by global trust. Colluding
    attackers past incubation first pick a random ally with probability
    ``collusion_bias``.
    """
    n = graph.n
    if n < 2:
        raise ValueError("no counterparty: marketplace needs at least two nodes")
    role = roster.role[buyer]
    if spec.collusion and role.malicious and ctx.attacking:
        allies = roster.malicious_ids
        allies = allies[allies != buyer]
        if len(allies) and rng.random() < collusion_bias:
            return int(allies[rng.integers(len(allies))])
    neighbors = graph.out_edges[buyer]
    proven = np.array(sorted(neighbors), dtype=int)
    mask = np.ones(n, dtype=bool)
    mask[buyer] = False
    if len(proven):
        mask[proven] = False
    unproven = np.flatnonzero(mask)
    pool, other = (proven, unproven) if rng.random() < 0.5 else (unproven, proven)
    if len(pool) == 0:
        pool = other
    return sample_weighted(pool, t, rng)


def execute_transaction(
    buyer: int,
    seller: int,
    ledger: RatingLedger,
    graph: TradeGraph,
    roster: Roster,
    spec: ThreatModelSpec,
    ctx: BehaviorContext,
) -> TransactionRecord:
    """Deliver, rate both ways, and record the purchase edge. Mutates ``ledger`` and ``graph``."""
    if buyer == seller:
        raise ValueError(f"buyer and seller are both node {buyer}")
    b_role, s_role = roster.role[buyer], roster.role[seller]
    quality = agents.service_quality(s_role, b_role, ctx, spec)
    b_rating = agents.buyer_rating(b_role, s_role, quality, ctx, spec)
    s_rating = agents.seller_rating(s_role, b_role, quality, b_rating, ctx, spec)
    record_rating(ledger, buyer, seller, b_rating)
    record_rating(ledger, seller, buyer, s_rating)
    graph.add_edge(buyer, seller)
    return TransactionRecord(ctx.tick, buyer, seller, quality, b_rating, s_rating)


def write_transactions(records: Iterable[TransactionRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRANSACTION_FIELDS)
        for rec in records:
            writer.writerow(rec.row())


def read_transactions(path: str | Path) -> list[TransactionRecord]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.append(
                TransactionRecord(
                    tick=int(row["tick"]),
                    buyer=int(row["buyer"]),
                    seller=int(row["seller"]),
                    quality=Quality(row["quality"]),
                    buyer_rating=row["buyer_rating"] == "True",
                    seller_rating=row["seller_rating"] == "True",
                )
            )
    return out
