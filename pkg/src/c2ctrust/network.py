"""Initial trade graph generation and role assignment."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from c2ctrust.agents import Role, threat_model


@dataclass
class TradeGraph:
    """Directed purchase history: ``u -> v`` means ``u`` has bought from ``v``."""

    n: int
    out_edges: list[set[int]]

    @classmethod
    def empty(cls, n: int) -> "TradeGraph":
        return cls(n, [set() for _ in range(n)])

    def copy(self) -> "TradeGraph":
        return TradeGraph(self.n, [set(e) for e in self.out_edges])

    def add_edge(self, u: int, v: int) -> bool:
        if u == v:
            raise ValueError(f"self-loop on node {u}")
        if v in self.out_edges[u]:
            return False
        self.out_edges[u].add(v)
        return True

    def out_degree(self) -> np.ndarray:
        return np.array([len(e) for e in self.out_edges])

    def in_degree(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for targets in self.out_edges:
            for v in targets:
                deg[v] += 1
        return deg

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.out_edges[u])]


@dataclass
class Roster:
    role: list[Role]
    pre_trusted: np.ndarray  # bool per node

    @property
    def n(self) -> int:
        return len(self.role)

    @property
    def malicious_ids(self) -> np.ndarray:
        return np.array([i for i, r in enumerate(self.role) if r.malicious], dtype=int)

    @property
    def normal_ids(self) -> np.ndarray:
        return np.array([i for i, r in enumerate(self.role) if not r.malicious], dtype=int)

    @property
    def spy_ids(self) -> np.ndarray:
        return np.array([i for i, r in enumerate(self.role) if r is Role.SPY], dtype=int)

    def pretrust_vector(self) -> np.ndarray:
        count = int(self.pre_trusted.sum())
        if count == 0:
            return np.full(self.n, 1.0 / self.n)
        return self.pre_trusted.astype(float) / count


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def generate_k_out_graph(n: int, k: int, alpha: float, rng: np.random.Generator) -> TradeGraph:
    """Preferential-attachment k-out graph.

    Nodes draw their ``k`` targets in id order; a candidate's weight is
    ``alpha`` plus its in-degree at the moment of the draw.
    """
    if k < 1 or n <= k:
        raise ValueError(f"degenerate graph: need n > k >= 1, got n={n}, k={k}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    graph = TradeGraph.empty(n)
    indeg = np.zeros(n, dtype=float)
    for u in range(n):
        allowed = np.ones(n, dtype=bool)
        allowed[u] = False
        for _ in range(k):
            cum = np.cumsum(np.where(allowed, alpha + indeg, 0.0))
            v = int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
            graph.out_edges[u].add(v)
            allowed[v] = False
            indeg[v] += 1
    return graph


def assign_roles(
    n: int,
    attacker_ratio: float,
    spy_ratio: float,
    pretrust_count: int,
    model: str,
    rng: np.random.Generator,
) -> Roster:
    """Place one contiguous block of malicious ids and sample the pre-trusted set.

    Under the spy models the first half (``spy_ratio``) of the block are spies.
    """
    spec = threat_model(model)
    m = _round_half_up(attacker_ratio * n)
    if m < 1:
        raise ValueError(f"degenerate scenario: attacker_ratio={attacker_ratio} gives no attackers")
    if m > n:
        raise ValueError(f"degenerate scenario: {m} attackers among {n} nodes")
    if pretrust_count < 0 or pretrust_count > n - m:
        raise ValueError(f"insufficient normal nodes: {n - m} normals for {pretrust_count} pre-trusted")
    start = int(rng.integers(0, n - m + 1))
    role = [Role.NORMAL] * n
    spies = _round_half_up(spy_ratio * m) if spec.has_spies else 0
    for offset in range(m):
        role[start + offset] = Role.SPY if offset < spies else Role.ATTACKER
    normals = np.array([i for i in range(n) if role[i] is Role.NORMAL])
    chosen = rng.choice(normals, size=pretrust_count, replace=False)
    pre = np.zeros(n, dtype=bool)
    pre[chosen] = True
    return Roster(role, pre)


def ensure_attacker_adjacency(graph: TradeGraph, roster: Roster, rng: np.random.Generator) -> TradeGraph:
    """Give every malicious node at least one out-edge to a fellow malicious node.

    A node lacking one has a random out-edge rewired to a random fellow, so
    out-degrees are preserved. Returns a new graph.
    """
    out = graph.copy()
    bad = set(roster.malicious_ids.tolist())
    if len(bad) < 2:
        return out
    for u in sorted(bad):
        if out.out_edges[u] & bad:
            continue
        fellows = sorted(bad - {u})
        drop = int(rng.choice(sorted(out.out_edges[u])))
        new = int(rng.choice(fellows))
        out.out_edges[u].discard(drop)
        out.out_edges[u].add(new)
    return out


def write_graph(graph: TradeGraph, roster: Roster, edges_path: str | Path, roles_path: str | Path) -> None:
    """Dump ``u v`` edge lines and an ``id role pretrusted`` roles sidecar."""
    with open(edges_path, "w") as fh:
        for u, v in graph.edges():
            fh.write(f"{u} {v}\n")
    with open(roles_path, "w") as fh:
        for i, r in enumerate(roster.role):
            fh.write(f"{i} {r.value} {int(roster.pre_trusted[i])}\n")


def read_graph(edges_path: str | Path, roles_path: str | Path) -> tuple[TradeGraph, Roster]:
    roles: list[Role] = []
    pre: list[bool] = []
    with open(roles_path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            idx, role, flag = line.split()
            if int(idx) != len(roles):
                raise ValueError(f"{roles_path}:{lineno}: ids must be consecutive from 0")
            roles.append(Role(role))
            pre.append(flag == "1")
    graph = TradeGraph.empty(len(roles))
    with open(edges_path) as fh:
        for line in fh:
            if line.strip():
                u, v = map(int, line.split())
                graph.add_edge(u, v)
    return graph, Roster(roles, np.array(pre, dtype=bool))
