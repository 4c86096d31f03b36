from .graph import (McdmWeights, NetworkGraph, WaxmanParams, demo_graph, edge_probability,
                    mcdm_cost, mcdm_cost_fn, random_small_graph, randomize_weights,
                    waxman_edges, waxman_generate, weight_cost)
from .grover import durr_hoyer_min, query_budget
from .paths import (NoPathError, Path, QuantumStats, dijkstra, find_paths_bidirectional,
                    grover_min_dijkstra, path_cost)
from .walk import WalkResult, build_walk_circuit, run_walk, total_variation, walk_state

__all__ = [
    "McdmWeights", "NetworkGraph", "WaxmanParams", "demo_graph", "edge_probability", "mcdm_cost",
    "mcdm_cost_fn", "random_small_graph", "randomize_weights", "waxman_edges", "waxman_generate",
    "weight_cost", "durr_hoyer_min", "query_budget", "NoPathError", "Path", "QuantumStats",
    "dijkstra", "find_paths_bidirectional", "grover_min_dijkstra", "path_cost", "WalkResult",
    "build_walk_circuit", "run_walk", "total_variation", "walk_state",
]
