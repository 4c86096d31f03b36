"""Network graph model, Waxman topologies and multi-criteria edge costs."""
from __future__ import annotations

import json
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.spatial.distance import pdist

DEFAULT_MEMORY = 50


@dataclass(frozen=True)
class WaxmanParams:
    num_nodes: int = 200
    area: tuple = (2000.0, 4000.0)     # (width km, height km)
    delta: float = 0.90
    epsilon: float = 0.01

    def __post_init__(self):
        if self.num_nodes < 2:
            raise ValueError("need at least two nodes")
        if min(self.area) <= 0 or self.epsilon <= 0 or not 0 < self.delta <= 1:
            raise ValueError(f"invalid Waxman parameters {self}")


class NetworkGraph:
    """Undirected simple graph with positioned nodes.

    Node attributes: pos (x km, y km), mem (memory slots).
    Edge attributes: length_km, weight, fidelity.
    """

    def __init__(self, g: nx.Graph | None = None):
        self.g = g if g is not None else nx.Graph()

    @classmethod
    def from_positions(cls, positions, edges=(), memory=DEFAULT_MEMORY, fidelity=1.0):
        g = nx.Graph()
        for i, (x, y) in enumerate(np.asarray(positions, dtype=float)):
            g.add_node(i, pos=(float(x), float(y)), mem=int(memory))
        out = cls(g)
        for u, v in edges:
            out.add_edge(u, v, fidelity=fidelity)
        return out

    def add_edge(self, u, v, weight=None, fidelity=1.0):
        if u == v:
            raise ValueError("self-loops are not allowed")
        length = self.distance(u, v)
        if weight is None:
            weight = length
        if weight <= 0:
            raise ValueError(f"edge ({u},{v}) needs a positive weight, got {weight}")
        if not 0 < fidelity <= 1:
            raise ValueError(f"link fidelity must lie in (0, 1], got {fidelity}")
        self.g.add_edge(u, v, length_km=length, weight=float(weight), fidelity=float(fidelity))

    def distance(self, u, v) -> float:
        (x1, y1), (x2, y2) = self.g.nodes[u]["pos"], self.g.nodes[v]["pos"]
        return float(np.hypot(x1 - x2, y1 - y2))

    @property
    def nodes(self):
        return sorted(self.g.nodes)

    def neighbors(self, u):
        return sorted(self.g.neighbors(u))

    def edge(self, u, v) -> dict:
        return self.g.edges[u, v]

    def has_edge(self, u, v) -> bool:
        return self.g.has_edge(u, v)

    def num_nodes(self) -> int:
        return self.g.number_of_nodes()

    def num_edges(self) -> int:
        return self.g.number_of_edges()

    def edge_lengths(self) -> np.ndarray:
        return np.array([d["length_km"] for _, _, d in self.g.edges(data=True)])

    def max_pairwise_distance(self) -> float:
        pos = np.array([self.g.nodes[i]["pos"] for i in self.nodes])
        return float(pdist(pos).max()) if len(pos) > 1 else 0.0

    def is_connected(self) -> bool:
        return self.g.number_of_nodes() > 0 and nx.is_connected(self.g)

    def copy(self) -> NetworkGraph:
        return NetworkGraph(self.g.copy())

    def to_json(self) -> str:
        nodes = [{"id": i, "x": self.g.nodes[i]["pos"][0], "y": self.g.nodes[i]["pos"][1],
                  "mem": self.g.nodes[i]["mem"]} for i in self.nodes]
        edges = [{"u": min(u, v), "v": max(u, v), "weight": d["weight"], "fidelity": d["fidelity"]}
                 for u, v, d in self.g.edges(data=True)]
        edges.sort(key=lambda e: (e["u"], e["v"]))
        return json.dumps({"nodes": nodes, "edges": edges}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> NetworkGraph:
        data = json.loads(text)
        g = nx.Graph()
        for n in data["nodes"]:
            g.add_node(int(n["id"]), pos=(float(n["x"]), float(n["y"])), mem=int(n.get("mem", DEFAULT_MEMORY)))
        out = cls(g)
        for e in data["edges"]:
            out.add_edge(int(e["u"]), int(e["v"]), weight=float(e["weight"]), fidelity=float(e.get("fidelity", 1.0)))
        return out


def edge_probability(length, max_distance, delta, epsilon):
    return delta * np.exp(-np.asarray(length) / (epsilon * max_distance))


def waxman_edges(positions, delta, epsilon, rng) -> list:
    """Sample each node pair independently with the Waxman probability."""
    positions = np.asarray(positions, dtype=float)
    d = pdist(positions)
    L = d.max()
    keep = rng.random(d.size) < edge_probability(d, L, delta, epsilon)
    iu, ju = np.triu_indices(len(positions), k=1)
    return list(zip(iu[keep].tolist(), ju[keep].tolist()))


def waxman_generate(p: WaxmanParams, rng: np.random.Generator, memory=DEFAULT_MEMORY,
                    link_fidelity=1.0) -> NetworkGraph:
    w, h = p.area
    pos = rng.random((p.num_nodes, 2)) * np.array([w, h])
    edges = waxman_edges(pos, p.delta, p.epsilon, rng)
    return NetworkGraph.from_positions(pos, edges, memory=memory, fidelity=link_fidelity)


def randomize_weights(g: NetworkGraph, rng: np.random.Generator, low=1.0, high=10.0) -> NetworkGraph:
    out = g.copy()
    for u, v in sorted(tuple(sorted(e)) for e in out.g.edges):
        out.g.edges[u, v]["weight"] = float(rng.uniform(low, high))
    return out


def demo_graph(seed: int = 0, num_nodes: int = 10) -> NetworkGraph:
    """Small connected demo network; node 0 plays Alice, the last node Bob.

    Redraws with the same seed sequence until the layout is connected.
    """
    params = WaxmanParams(num_nodes, area=(1000.0, 1000.0), delta=0.9, epsilon=0.25)
    for attempt in range(1000):
        rng = np.random.default_rng([seed, attempt])
        g = waxman_generate(params, rng)
        if g.is_connected():
            return randomize_weights(g, rng)
    raise RuntimeError("could not draw a connected demo graph")


def random_small_graph(rng: np.random.Generator, max_nodes=12, min_nodes=2) -> NetworkGraph:
    n = int(rng.integers(min_nodes, max_nodes + 1))
    params = WaxmanParams(n, area=(100.0, 100.0), delta=0.9, epsilon=0.4)
    g = waxman_generate(params, rng)
    return randomize_weights(g, rng)


@dataclass(frozen=True)
class McdmWeights:
    w_distance: float = 1.0
    w_fidelity: float = 0.0
    w_memory: float = 0.0

    def __post_init__(self):
        ws = (self.w_distance, self.w_fidelity, self.w_memory)
        if min(ws) < 0 or abs(sum(ws) - 1) > 1e-12:
            raise ValueError(f"MCDM weights must be non-negative and sum to 1, got {ws}")


def mcdm_cost(edge: dict, weights: McdmWeights, length_norm: float, free_memory_fraction: float = 1.0) -> float:
    """Convex combination of normalized length, infidelity and memory pressure."""
    if length_norm <= 0:
        raise ValueError("length normalizer must be positive")
    return (weights.w_distance * edge["length_km"] / length_norm
            + weights.w_fidelity * (1 - edge["fidelity"])
            + weights.w_memory * (1 - free_memory_fraction))


def mcdm_cost_fn(g: NetworkGraph, weights: McdmWeights, floor: float = 1e-9):
    """Edge-cost callable for the routers. Memory pressure uses the lower free
    fraction of the two endpoints (node attribute 'free', default 1). Costs are
    floored at a tiny positive value so Dijkstra sees strictly positive weights."""
    norm = g.max_pairwise_distance() or 1.0

    def cost(u, v, data):
        free = min(g.g.nodes[u].get("free", 1.0), g.g.nodes[v].get("free", 1.0))
        return max(mcdm_cost(data, weights, norm, free), floor)

    return cost


def weight_cost(u, v, data) -> float:
    return data["weight"]
