"""Rating accumulation, local trust normalization and EigenTrust global trust."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np


@dataclass
class RatingLedger:
    """Signed rating totals between ordered node pairs.

    ``s[i, j]`` is the number of satisfied ratings ``i`` gave ``j`` minus the
    number of unsatisfied ones. The diagonal is never touched.
    """

    n: int
    s: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.s is None:
            self.s = np.zeros((self.n, self.n), dtype=np.int64)
        elif self.s.shape != (self.n, self.n):
            raise ValueError(f"ledger matrix must be {self.n}x{self.n}, got {self.s.shape}")

    def copy(self) -> "RatingLedger":
        return RatingLedger(self.n, self.s.copy())


def record_rating(ledger: RatingLedger, rater: int, target: int, satisfied: bool) -> RatingLedger:
    if not (0 <= rater < ledger.n and 0 <= target < ledger.n):
        raise ValueError(f"unknown node: rater={rater} target={target} (n={ledger.n})")
    if rater == target:
        raise ValueError(f"self-rating by node {rater}")
    ledger.s[rater, target] += 1 if satisfied else -1
    return ledger


def local_trust_matrix(ledger: RatingLedger | np.ndarray, p: np.ndarray) -> np.ndarray:
    """Row-normalize the positive part of the ratings.

    Rows without any positive rating fall back to the pre-trust vector ``p``,
    so the result is always row-stochastic.
    """
    s = ledger.s if isinstance(ledger, RatingLedger) else np.asarray(ledger)
    pos = np.maximum(s, 0).astype(float)
    np.fill_diagonal(pos, 0.0)
    totals = pos.sum(axis=1)
    C = np.empty_like(pos)
    live = totals > 0
    C[live] = pos[live] / totals[live, None]
    C[~live] = p
    return C


class GlobalTrust(NamedTuple):
    t: np.ndarray
    converged: bool
    iterations: int


def compute_global_trust(
    C: np.ndarray,
    p: np.ndarray,
    a: float = 0.1,
    eps: float = 1e-6,
    max_iter: int = 1000,
) -> GlobalTrust:
    """Damped power iteration ``t <- (1-a) C^T t + a p`` started from ``p``.

    Stops once the L1 change drops below ``eps``. Hitting ``max_iter`` is not
    an error; the last iterate comes back with ``converged=False``.
    """
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"damping must lie in [0, 1], got {a}")
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    p = np.asarray(p, dtype=float)
    CT = np.ascontiguousarray(np.asarray(C, dtype=float).T)
    t = p.copy()
    for it in range(1, max_iter + 1):
        nxt = (1.0 - a) * (CT @ t) + a * p
        # renormalize to keep round-off from drifting the total mass
        nxt /= nxt.sum()
        delta = np.abs(nxt - t).sum()
        t = nxt
        if delta < eps:
            return GlobalTrust(t, True, it)
    return GlobalTrust(t, False, max_iter)
