"""
Forward and backward routes on a small network
==============================================

A ten-node Waxman graph, shortest paths in both directions found with a
Dijkstra loop whose frontier minimum comes from simulated Grover search.
"""

import numpy as np

from qteleroute.routing import (Path, demo_graph, dijkstra, find_paths_bidirectional, run_walk,
                                total_variation, walk_state)
from qteleroute.statevec import born_distribution
from qteleroute.svg import bar_chart_svg, graph_svg

g = demo_graph(seed=0)
print(g.num_nodes(), "nodes,", g.num_edges(), "edges")

res = find_paths_bidirectional(g, 0, 9, rng=np.random.default_rng(0))
fwd, bwd = res["forward"], res["backward"]
print("forward ", fwd.nodes, round(fwd.total_cost, 3))
print("backward", bwd.nodes, round(bwd.total_cost, 3))
print("classical", dijkstra(g, 0, 9).total_cost)
print(res["stats"])

with open("demo_graph.svg", "w") as fh:
    fh.write(graph_svg(g, fwd, bwd, title="forward red, backward green"))

# walk along the forward path; without a channel the CNOT chain just copies
# the source bit, with one the end qubits become entangled
p = Path(fwd.nodes, fwd.total_cost)
print(born_distribution(walk_state(p, 1)))
for ch in ("wbell", "ghzbell", "clusterbell"):
    exact = born_distribution(walk_state(p, 1, channel=ch))
    print(ch, {k: round(v, 3) for k, v in exact.items()})

a = born_distribution(walk_state(p, 1, channel="wbell"))
b = born_distribution(walk_state(p, 1, channel="ghzbell"))
print("TV(wbell, ghzbell) =", total_variation(a, b))

r = run_walk(p, 1, 10_000, channel="wbell", rng=np.random.default_rng(3))
keys = sorted(r.exact)
with open("demo_walk.svg", "w") as fh:
    fh.write(bar_chart_svg(keys, [r.histogram.get(k, 0) for k in keys], [10_000 * r.exact[k] for k in keys]))
