"""Shortest paths: classical Dijkstra and a variant whose min-extraction is a
simulated quantum minimum search."""
from __future__ import annotations

import heapq
import json
from dataclasses import dataclass, field

import numpy as np

from .graph import NetworkGraph, weight_cost
from .grover import durr_hoyer_min

MAX_QUANTUM_FRONTIER = 1 << 10


class NoPathError(ValueError):
    """Target not reachable from source."""


@dataclass(frozen=True)
class Path:
    nodes: tuple
    total_cost: float

    @property
    def hop_count(self) -> int:
        return len(self.nodes) - 1

    def edges(self):
        return list(zip(self.nodes[:-1], self.nodes[1:]))

    def reversed(self) -> Path:
        return Path(tuple(reversed(self.nodes)), self.total_cost)

    def to_json(self) -> str:
        return json.dumps({"nodes": list(self.nodes), "total_cost": self.total_cost,
                           "hop_count": self.hop_count}, sort_keys=True)


def path_cost(g: NetworkGraph, nodes, cost=weight_cost) -> float:
    total = 0.0
    for u, v in zip(nodes[:-1], nodes[1:]):
        if not g.has_edge(u, v):
            raise ValueError(f"({u},{v}) is not an edge")
        total += cost(u, v, g.edge(u, v))
    return total


def _check_nodes(g, *nodes):
    for n in nodes:
        if n not in g.g:
            raise KeyError(f"unknown node {n!r}")


def _relax(g, cost, u, du, dist, pred, settled=()):
    """Relax u's edges. A tie on distance goes to the smaller predecessor id."""
    improved = []
    for v in g.neighbors(u):
        w = cost(u, v, g.edge(u, v))
        if w < 0:
            raise ValueError("negative edge cost")
        nd = du + w
        if v in settled:
            continue
        tie = nd == dist.get(v) and pred[v] is not None and u < pred[v]
        if v not in dist or nd < dist[v] or tie:
            dist[v], pred[v] = nd, u
            improved.append(v)
    return improved


def _walk_back(pred, s, t, dist):
    nodes = [t]
    while nodes[-1] != s:
        nodes.append(pred[nodes[-1]])
    return Path(tuple(reversed(nodes)), float(dist[t]))


def dijkstra(g: NetworkGraph, s, t, cost=weight_cost) -> Path:
    _check_nodes(g, s, t)
    dist, pred = {s: 0.0}, {s: None}
    done = set()
    heap = [(0.0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if u in done or d > dist[u]:
            continue
        done.add(u)
        if u == t:
            return _walk_back(pred, s, t, dist)
        for v in _relax(g, cost, u, d, dist, pred, done):
            heapq.heappush(heap, (dist[v], v))
    raise NoPathError(f"node {t} is unreachable from {s}")


@dataclass
class QuantumStats:
    oracle_queries: int = 0
    frontier_extractions: int = 0
    fallbacks: int = 0
    suboptimal_extractions: int = 0
    queries_per_extraction: list = field(default_factory=list)   # (frontier size, queries)

    def as_dict(self) -> dict:
        return {"oracle_queries": self.oracle_queries, "frontier_extractions": self.frontier_extractions,
                "fallbacks": self.fallbacks, "suboptimal_extractions": self.suboptimal_extractions}


def grover_min_dijkstra(g: NetworkGraph, s, t, cost=weight_cost, rng=None,
                        max_frontier: int = MAX_QUANTUM_FRONTIER):
    """Dijkstra whose frontier minimum is found by Durr-Hoyer search.

    The quantum search can, rarely, return a non-minimal node. The loop is
    therefore label-correcting: a settled node whose distance later improves
    goes back on the frontier, and the search runs until the frontier is
    empty, so final distances are exact regardless of search misses.
    """
    _check_nodes(g, s, t)
    if rng is None:
        rng = np.random.default_rng(0)
    stats = QuantumStats()
    dist, pred = {s: 0.0}, {s: None}
    frontier = {s}
    while frontier:
        items = sorted(frontier)
        keys = [(dist[v], v) for v in items]
        m = len(items)
        if m > max_frontier:
            idx = min(range(m), key=keys.__getitem__)
            stats.fallbacks += 1
            q = 0
        else:
            idx, q = durr_hoyer_min(keys, rng)
        stats.oracle_queries += q
        stats.frontier_extractions += 1
        stats.queries_per_extraction.append((m, q))
        if keys[idx] != min(keys):
            stats.suboptimal_extractions += 1
        u = items[idx]
        frontier.discard(u)
        frontier.update(_relax(g, cost, u, dist[u], dist, pred))
    if t not in dist:
        raise NoPathError(f"node {t} is unreachable from {s}")
    return _walk_back(pred, s, t, dist), stats


def find_paths_bidirectional(g: NetworkGraph, s, t, cost=weight_cost, rng=None) -> dict:
    if s == t:
        raise ValueError("source and target must differ")
    if rng is None:
        rng = np.random.default_rng(0)
    fwd, fstats = grover_min_dijkstra(g, s, t, cost, rng)
    bwd, bstats = grover_min_dijkstra(g, t, s, cost, rng)
    return {"forward": fwd, "backward": bwd, "stats": {"forward": fstats.as_dict(), "backward": bstats.as_dict()}}
