import json
from math import exp

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qteleroute.routing import (McdmWeights, NetworkGraph, NoPathError, Path, WaxmanParams,
                                demo_graph, dijkstra, edge_probability, find_paths_bidirectional,
                                grover_min_dijkstra, mcdm_cost, mcdm_cost_fn, path_cost,
                                random_small_graph, waxman_edges, waxman_generate)


def brute_force_min(g, s, t):
    if s == t:
        return 0.0
    best = None
    for p in nx.all_simple_paths(g.g, s, t):
        c = sum(g.edge(u, v)["weight"] for u, v in zip(p[:-1], p[1:]))
        best = c if best is None or c < best else best
    return best


def triangle():
    g = NetworkGraph.from_positions([(0, 0), (1, 0), (0, 1)])
    g.add_edge(0, 1, weight=1)
    g.add_edge(1, 2, weight=1)
    g.add_edge(0, 2, weight=3)
    return g


def line():
    g = NetworkGraph.from_positions([(0, 0), (1, 0), (2, 0)])
    g.add_edge(0, 1, weight=1)
    g.add_edge(1, 2, weight=1)
    return g


def test_triangle():
    p = dijkstra(triangle(), 0, 2)
    assert p.nodes == (0, 1, 2) and p.total_cost == 2 and p.hop_count == 2


def test_same_node():
    p = dijkstra(triangle(), 1, 1)
    assert p.nodes == (1,) and p.total_cost == 0
    q, _ = grover_min_dijkstra(triangle(), 1, 1)
    assert q.nodes == (1,)


def test_unreachable():
    g = NetworkGraph.from_positions([(0, 0), (1, 0), (5, 5)])
    g.add_edge(0, 1)
    with pytest.raises(NoPathError):
        dijkstra(g, 0, 2)
    with pytest.raises(NoPathError):
        grover_min_dijkstra(g, 0, 2)


def test_tie_break_prefers_smaller_predecessor():
    # square 0-1-3 and 0-2-3 with equal costs
    g = NetworkGraph.from_positions([(0, 0), (1, 0), (0, 1), (1, 1)])
    for u, v in [(0, 1), (0, 2), (1, 3), (2, 3)]:
        g.add_edge(u, v, weight=1.0)
    assert dijkstra(g, 0, 3).nodes == (0, 1, 3)
    assert dijkstra(g, 3, 0).nodes == (3, 1, 0)


def test_line_bidirectional():
    r = find_paths_bidirectional(line(), 0, 2)
    assert r["forward"].nodes == (0, 1, 2) and r["backward"].nodes == (2, 1, 0)
    with pytest.raises(ValueError):
        find_paths_bidirectional(line(), 1, 1)


def test_dijkstra_matches_enumeration():
    rng = np.random.default_rng(2024)
    checked = 0
    for _ in range(1000):
        g = random_small_graph(rng)
        s, t = (int(x) for x in rng.integers(0, g.num_nodes(), 2))
        expected = brute_force_min(g, s, t)
        if expected is None:
            with pytest.raises(NoPathError):
                dijkstra(g, s, t)
            continue
        p = dijkstra(g, s, t)
        assert abs(p.total_cost - expected) < 1e-9
        assert abs(path_cost(g, p.nodes) - p.total_cost) < 1e-9
        checked += 1
    assert checked > 500


def test_grover_dijkstra_small_corpus():
    rng = np.random.default_rng(5)
    for _ in range(60):
        g = random_small_graph(rng)
        s, t = (int(x) for x in rng.integers(0, g.num_nodes(), 2))
        try:
            ref = dijkstra(g, s, t)
        except NoPathError:
            continue
        p, stats = grover_min_dijkstra(g, s, t, rng=rng)
        assert p.total_cost == ref.total_cost
        assert stats.frontier_extractions >= p.hop_count


def test_frontier_guard_falls_back():
    g = demo_graph(1)
    p, stats = grover_min_dijkstra(g, 0, 9, max_frontier=1)
    assert stats.fallbacks > 0 and stats.oracle_queries == 0
    assert p.total_cost == dijkstra(g, 0, 9).total_cost


def test_demo_graph_paths():
    g = demo_graph(0)
    assert g.num_nodes() == 10 and g.is_connected()
    r = find_paths_bidirectional(g, 0, 9)
    assert abs(r["forward"].total_cost - r["backward"].total_cost) < 1e-12
    assert r["backward"].nodes == tuple(reversed(r["forward"].nodes))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_forward_backward_symmetry(seed):
    rng = np.random.default_rng(seed)
    g = random_small_graph(rng, min_nodes=3)
    try:
        r = find_paths_bidirectional(g, 0, g.num_nodes() - 1, rng=rng)
    except NoPathError:
        return
    assert abs(r["forward"].total_cost - r["backward"].total_cost) < 1e-12
    # continuous random weights make exact ties a probability-zero event
    assert r["backward"].nodes == tuple(reversed(r["forward"].nodes))


def test_waxman_probability_examples():
    assert edge_probability(0.0, 100.0, 0.9, 0.01) == pytest.approx(0.9)
    assert edge_probability(100.0, 100.0, 0.9, 0.01) == pytest.approx(0.9 * exp(-100), rel=1e-12)


def test_waxman_graph_invariants():
    g = waxman_generate(WaxmanParams(60, (100, 200), 0.9, 0.2), np.random.default_rng(3))
    for u, v, d in g.g.edges(data=True):
        assert u != v
        assert abs(d["length_km"] - g.distance(u, v)) < 1e-9
        assert d["weight"] == d["length_km"] > 0
    xs = np.array([g.g.nodes[i]["pos"] for i in g.nodes])
    assert xs[:, 0].max() <= 100 and xs[:, 1].max() <= 200


@pytest.mark.parametrize("d", [5.0, 20.0, 50.0])
def test_waxman_edge_frequency(d):
    # nodes 0-1 at distance d; node 2 sits far enough away to fix L
    L = 100.0
    pos = np.array([(0.0, 0.0), (d, 0.0), (0.0, L)])
    delta, eps = 0.9, 0.1
    rng = np.random.default_rng(int(d))
    trials = 10_000
    hits = sum((0, 1) in waxman_edges(pos, delta, eps, rng) for _ in range(trials))
    L_true = max(L, np.hypot(d, L))
    p = edge_probability(d, L_true, delta, eps)
    assert abs(hits / trials - p) <= 5 * np.sqrt(p * (1 - p) / trials)


def test_waxman_invalid():
    with pytest.raises(ValueError):
        WaxmanParams(1)
    with pytest.raises(ValueError):
        WaxmanParams(10, delta=1.5)


def test_mcdm_examples():
    e = {"length_km": 10.0, "fidelity": 0.9}
    assert mcdm_cost(e, McdmWeights(1, 0, 0), 10.0) == pytest.approx(1)
    assert mcdm_cost({"length_km": 3.0, "fidelity": 1.0}, McdmWeights(0, 1, 0), 10.0) == 0
    assert mcdm_cost(e, McdmWeights(0.5, 0.5, 0), 10.0) == pytest.approx(0.55)
    with pytest.raises(ValueError):
        McdmWeights(0.5, 0.6, 0)


@given(st.floats(0, 1000), st.floats(0, 1000), st.floats(0.01, 1), st.floats(0, 1))
def test_mcdm_monotone_in_length(a, b, fid, wd):
    w = McdmWeights(wd, 1 - wd, 0.0)
    lo, hi = sorted((a, b))
    assert mcdm_cost({"length_km": lo, "fidelity": fid}, w, 100.0) <= \
        mcdm_cost({"length_km": hi, "fidelity": fid}, w, 100.0)


def test_mcdm_routing_prefers_good_links():
    g = NetworkGraph.from_positions([(0, 0), (1, 0), (2, 0), (1, 0.01)])
    g.add_edge(0, 1, fidelity=0.5)
    g.add_edge(1, 2, fidelity=0.5)
    g.add_edge(0, 3, fidelity=1.0)
    g.add_edge(3, 2, fidelity=1.0)
    assert dijkstra(g, 0, 2, mcdm_cost_fn(g, McdmWeights(1, 0, 0))).nodes == (0, 1, 2)
    assert dijkstra(g, 0, 2, mcdm_cost_fn(g, McdmWeights(0.5, 0.5, 0))).nodes == (0, 3, 2)


def test_graph_json_roundtrip():
    g = demo_graph(3)
    back = NetworkGraph.from_json(g.to_json())
    assert back.to_json() == g.to_json()
    data = json.loads(g.to_json())
    assert set(data) == {"nodes", "edges"}
    assert set(data["nodes"][0]) == {"id", "x", "y", "mem"}
    assert set(data["edges"][0]) == {"u", "v", "weight", "fidelity"}


def test_path_validation():
    with pytest.raises(ValueError):
        path_cost(line(), (0, 2))
    assert Path((0, 1, 2), 2.0).reversed().nodes == (2, 1, 0)
