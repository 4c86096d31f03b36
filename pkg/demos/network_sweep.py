"""
Throughput and fidelity against network size
============================================

Seeded runs of the link-level simulator at the default Waxman settings,
unidirectional against bidirectional delivery.
"""

import dataclasses

import numpy as np

from qteleroute.netsim import SimConfig, aggregate_runs, sweep_nodes
from qteleroute.routing import WaxmanParams
from qteleroute.svg import line_plot_svg

cfg = SimConfig(runs=50)
print(cfg)

# one configuration, both modes
for mode in ("unidirectional", "bidirectional"):
    m = aggregate_runs(dataclasses.replace(cfg, mode=mode))
    print(f"{mode:15s} throughput {m.throughput_mean:8.1f} +- {m.throughput_ci:.1f}  "
          f"fidelity {m.fidelity_mean:.4f}  memory {m.memutil_mean:.4f}")

# the sweep behind the plots
counts = [20, 50, 100, 150, 200]
rows = sweep_nodes(dataclasses.replace(cfg, runs=20), counts)
for key in ("throughput", "fidelity", "memutil"):
    series = {m: [r[f"{key}_mean"] for r in rows if r["mode"] == m] for m in ("unidirectional", "bidirectional")}
    with open(f"demo_{key}.svg", "w") as fh:
        fh.write(line_plot_svg(counts, series, title=key))
    print(key, {m: np.round(v, 4).tolist() for m, v in series.items()})

# sparse graphs: most demands sit on a single link, which is why the two
# modes deliver almost the same number of qubits
hops = [r.mean_hops for r in aggregate_runs(cfg).per_run if r.reachable]
print("mean hops per demand:", np.mean(hops))

# a denser field gives longer routes and a clearer gap
dense = dataclasses.replace(cfg, topology=WaxmanParams(50, (2000, 4000), 0.9, 0.15), runs=30)
for mode in ("unidirectional", "bidirectional"):
    m = aggregate_runs(dataclasses.replace(dense, mode=mode))
    print(f"dense {mode:15s} throughput {m.throughput_mean:8.1f}  fidelity {m.fidelity_mean:.4f}")
