"""
Seeded discrete-event simulation of multihop entanglement distribution.

Time advances in generation ticks of 1/send_rate seconds. In every tick each
link on an active route makes one generation attempt: the attempt is lost
with probability drop_rate, blocked when either endpoint lacks free memory,
and otherwise stored. Demands are then served round-robin: a delivery takes
one stored pair per hop (per direction in bidirectional mode), swaps at every
intermediate node, and completes after one classical delay per swap. Swap
nodes release their memory at once; the two endpoints hold theirs until
completion, which is queued on a (time, sequence) heap.

Links are Werner pairs; swapping multiplies the Werner parameter w and a
pair's fidelity is (3w + 1) / 4.
"""
from __future__ import annotations

import dataclasses
import heapq
from collections import deque
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from .routing.graph import NetworkGraph, WaxmanParams, waxman_generate
from .routing.paths import NoPathError, Path, dijkstra

MODES = ("unidirectional", "bidirectional")

# init_link_fidelity and memory slots per stored link pair, per channel family
CHANNEL_PRESETS = {
    "werner": (0.95, 1),
    "wbell": (0.95, 2),
    "ghzbell": (0.93, 3),
    "clusterbell": (0.94, 3),
}


def werner_from_fidelity(f: float) -> float:
    return (4 * f - 1) / 3


def fidelity_from_werner(w: float) -> float:
    return (3 * w + 1) / 4


def swap_fidelity(w1: float, w2: float) -> float:
    for w in (w1, w2):
        if not 0 < w <= 1:
            raise ValueError(f"Werner parameter must lie in (0, 1], got {w}")
    return fidelity_from_werner(w1 * w2)


def chain_fidelity(ws) -> float:
    """Fidelity after swapping a chain of Werner pairs."""
    return fidelity_from_werner(float(np.prod(ws)))


@dataclass(frozen=True)
class SimConfig:
    topology: object = field(default_factory=WaxmanParams)   # WaxmanParams or NetworkGraph
    num_sd_pairs: int = 10
    send_rate: float = 1000.0
    classical_delay: float = 0.05
    memory_per_node: int = 50
    drop_rate: float = 0.03
    swap_success: float = 0.98
    init_link_fidelity: float | None = None      # None -> channel preset
    sim_duration: float = 1.0
    mode: str = "unidirectional"
    runs: int = 1
    seed: int = 0
    channel: str = "werner"
    slots_per_pair: int | None = None            # None -> channel preset
    pair_lifetime: float | None = None           # seconds a stored pair survives; None = no expiry
    sd_pairs: tuple | None = None                # explicit demands for a fixed graph

    def __post_init__(self):
        if self.channel not in CHANNEL_PRESETS:
            raise ValueError(f"unknown channel preset {self.channel!r}")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        for name in ("drop_rate", "swap_success"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be a probability")
        if self.send_rate <= 0 or self.sim_duration <= 0 or self.classical_delay < 0:
            raise ValueError("rates and durations must be positive")
        if self.memory_per_node < 1 or self.num_sd_pairs < 1 or self.runs < 1:
            raise ValueError("memory, demand count and runs must be >= 1")
        if not 0.25 < self.link_fidelity <= 1:
            raise ValueError("link fidelity must lie in (0.25, 1]")
        if self.pair_lifetime is not None and self.pair_lifetime < 0:
            raise ValueError("pair lifetime must be >= 0")

    @property
    def link_fidelity(self) -> float:
        if self.init_link_fidelity is not None:
            return self.init_link_fidelity
        return CHANNEL_PRESETS[self.channel][0]

    @property
    def pair_slots(self) -> int:
        if self.slots_per_pair is not None:
            return self.slots_per_pair
        return CHANNEL_PRESETS[self.channel][1]


@dataclass
class RunResult:
    throughput: float               # delivered end-to-end qubits per second
    fidelity: float                 # mean over delivered qubits; nan when nothing arrived
    memory_utilization: float
    generated: int = 0
    consumed: int = 0
    dropped: int = 0
    blocked: int = 0
    in_memory: int = 0
    delivered_qubits: int = 0
    success_events: int = 0         # attempts whose swaps all succeeded (completed or not)
    delivery_attempts: int = 0
    ticks: int = 0
    mean_hops: float = float("nan")
    slots_per_delivery: float = float("nan")
    reachable: bool = True


def _sample_demands(g: NetworkGraph, k: int, rng) -> list:
    comp = {}
    for ci, nodes in enumerate(nx.connected_components(g.g)):
        for n in nodes:
            comp[n] = ci
    nodes = g.nodes
    pairs = [(u, v) for i, u in enumerate(nodes) for v in nodes[i + 1:] if comp[u] == comp[v]]
    if not pairs:
        return []
    idx = rng.choice(len(pairs), size=min(k, len(pairs)), replace=False)
    out = []
    for i in sorted(int(j) for j in idx):
        u, v = pairs[i]
        # random orientation: which end plays source
        out.append((u, v) if rng.random() < 0.5 else (v, u))
    return out


def _topology(cfg: SimConfig, seed: int):
    rng = np.random.default_rng([seed, 0])
    if isinstance(cfg.topology, NetworkGraph):
        g = cfg.topology
    else:
        g = waxman_generate(cfg.topology, rng, memory=cfg.memory_per_node, link_fidelity=cfg.link_fidelity)
    if cfg.sd_pairs is not None:
        demands = [tuple(p) for p in cfg.sd_pairs]
    else:
        demands = _sample_demands(g, cfg.num_sd_pairs, rng)
    return g, demands


def _default_route(g, s, t) -> Path:
    return dijkstra(g, s, t)


@dataclass
class _Demand:
    s: int
    t: int
    hops_fwd: int
    hops_bwd: int
    need: dict          # edge -> pairs per delivery
    nodes: tuple        # swap nodes, excluding s and t
    fidelity: float


def _edge(u, v):
    return (u, v) if u < v else (v, u)


def run_simulation(cfg: SimConfig, route_fn=None, seed: int | None = None) -> RunResult:
    seed = cfg.seed if seed is None else seed
    route_fn = route_fn or _default_route
    g, pairs = _topology(cfg, seed)
    rng = np.random.default_rng([seed, 1])
    bidir = cfg.mode == "bidirectional"
    w0 = werner_from_fidelity(cfg.link_fidelity)

    demands = []
    for s, t in pairs:
        if s == t:
            continue
        try:
            fwd = route_fn(g, s, t)
            bwd = route_fn(g, t, s) if bidir else None
        except NoPathError:
            continue
        need = {}
        for path in (fwd, bwd) if bidir else (fwd,):
            for u, v in path.edges():
                need[_edge(u, v)] = need.get(_edge(u, v), 0) + 1
        inner = set(fwd.nodes[1:-1]) | (set(bwd.nodes[1:-1]) if bidir else set())
        f = chain_fidelity([w0] * fwd.hop_count)
        if bidir:
            # both qubits must arrive intact: joint fidelity of the exchanged pair
            f *= chain_fidelity([w0] * bwd.hop_count)
        demands.append(_Demand(s, t, fwd.hop_count, bwd.hop_count if bidir else 0,
                               need, tuple(sorted(inner - {s, t})), f))
    if not demands:
        return RunResult(0.0, float("nan"), 0.0, reachable=False)

    edges = sorted({e for d in demands for e in d.need})
    eidx = {e: i for i, e in enumerate(edges)}
    route_nodes = sorted({n for e in edges for n in e})
    cap = cfg.memory_per_node
    k = cfg.pair_slots
    used = {n: 0 for n in route_nodes}
    count = [0] * len(edges)                  # stored pairs per link
    ages = [deque() for _ in edges] if cfg.pair_lifetime is not None else None
    n_ticks = int(round(cfg.sim_duration * cfg.send_rate))
    dt = 1.0 / cfg.send_rate
    life = None if cfg.pair_lifetime is None else int(round(cfg.pair_lifetime * cfg.send_rate))
    keep = 1 - cfg.drop_rate
    ps = cfg.swap_success
    delay_s = cfg.classical_delay

    res = RunResult(0.0, float("nan"), 0.0)
    res.ticks = n_ticks
    res.mean_hops = float(np.mean([d.hops_fwd for d in demands]))
    heap, seq = [], 0
    occupancy = 0
    fid_sum, slots_reserved = 0.0, 0
    blocked = consumed_total = attempts = successes = delivered = 0
    needs = [tuple((eidx[e], c) for e, c in sorted(d.need.items())) for d in demands]
    kept = rng.random((n_ticks, len(edges))) < keep
    res.generated = n_ticks * len(edges)
    res.dropped = int(res.generated - kept.sum())
    kept_idx = [np.flatnonzero(row).tolist() for row in kept]
    nd = len(demands)
    qubits = 2 if bidir else 1

    for tick in range(n_ticks):
        now = tick * dt
        while heap and heap[0][0] <= now + 1e-12:
            _, _, s, t, slots, q, f = heapq.heappop(heap)
            used[s] -= slots
            used[t] -= slots
            delivered += q
            fid_sum += f * q
        if life:
            for i, (u, v) in enumerate(edges):
                a = ages[i]
                while a and tick - a[0] > life:
                    a.popleft()
                    count[i] -= 1
                    used[u] -= k
                    used[v] -= k
                    blocked += 1
        # generation
        for i in kept_idx[tick]:
            u, v = edges[i]
            if used[u] + k <= cap and used[v] + k <= cap:
                count[i] += 1
                used[u] += k
                used[v] += k
                if ages is not None:
                    ages[i].append(tick)
            else:
                blocked += 1
        # matching, round-robin from a rotating start
        for j in range(nd):
            di = (tick + j) % nd
            need = needs[di]
            while all(count[i] >= c for i, c in need):
                d = demands[di]
                used_pairs = 0
                for i, c in need:
                    count[i] -= c
                    if ages is not None:
                        for _ in range(c):
                            ages[i].popleft()
                    u, v = edges[i]
                    used[u] -= k * c
                    used[v] -= k * c
                    used_pairs += c
                consumed_total += used_pairs
                attempts += 1
                slots_reserved += 2 * k * used_pairs
                ok = True
                for _ in range(d.hops_fwd - 1 + (d.hops_bwd - 1 if bidir else 0)):
                    if rng.random() >= ps:
                        ok = False
                if not ok:
                    continue
                successes += 1
                delay = max(d.hops_fwd, d.hops_bwd) - 1
                if delay <= 0 or delay_s == 0:
                    delivered += qubits
                    fid_sum += d.fidelity * qubits
                    continue
                # endpoints keep their qubits until the corrections arrive
                ends = qubits * k
                used[d.s] += ends
                used[d.t] += ends
                seq += 1
                heapq.heappush(heap, (now + delay * delay_s, seq, d.s, d.t, ends, qubits, d.fidelity))
        if life == 0:
            for i, (u, v) in enumerate(edges):
                if count[i]:
                    used[u] -= k * count[i]
                    used[v] -= k * count[i]
                    blocked += count[i]
                    count[i] = 0
                    ages[i].clear()
        occupancy += sum(used.values())

    res.blocked, res.consumed, res.delivery_attempts = blocked, consumed_total, attempts
    res.success_events, res.delivered_qubits = successes, delivered
    res.in_memory = sum(count)
    res.throughput = res.delivered_qubits / cfg.sim_duration
    res.fidelity = fid_sum / res.delivered_qubits if res.delivered_qubits else float("nan")
    res.memory_utilization = occupancy / (n_ticks * cap * len(route_nodes))
    if res.success_events:
        res.slots_per_delivery = slots_reserved / res.success_events
    return res


@dataclass(frozen=True)
class SimMetrics:
    runs: int
    throughput_mean: float
    throughput_ci: float
    fidelity_mean: float
    fidelity_ci: float
    memutil_mean: float
    memutil_ci: float
    per_run: tuple = ()

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.per_run], dtype=float)


def _mean_ci(values):
    v = np.asarray(values, dtype=float)
    v = v[~np.isnan(v)]
    if v.size == 0:
        return float("nan"), float("nan")
    if v.size == 1:
        return float(v[0]), 0.0
    return float(v.mean()), float(1.96 * v.std(ddof=1) / np.sqrt(v.size))


def aggregate_runs(cfg: SimConfig, route_fn=None) -> SimMetrics:
    runs = [run_simulation(cfg, route_fn, seed=cfg.seed + i) for i in range(cfg.runs)]
    tm, tc = _mean_ci([r.throughput for r in runs])
    fm, fc = _mean_ci([r.fidelity for r in runs])
    mm, mc = _mean_ci([r.memory_utilization for r in runs])
    return SimMetrics(cfg.runs, tm, tc, fm, fc, mm, mc, tuple(runs))


METRIC_COLUMNS = ("node_count", "mode", "channel", "runs", "throughput_mean", "throughput_ci",
                  "fidelity_mean", "fidelity_ci", "memutil_mean", "memutil_ci", "seed")


def sweep_nodes(cfg: SimConfig, node_counts, modes=MODES, route_fn=None, progress=None) -> list:
    """One row per (node count, mode); both modes see the same seeds."""
    if not node_counts:
        raise ValueError("node_counts must be non-empty")
    if isinstance(cfg.topology, NetworkGraph):
        raise ValueError("a node sweep needs Waxman topology parameters")
    rows = []
    for n in node_counts:
        topo = dataclasses.replace(cfg.topology, num_nodes=int(n))
        for mode in modes:
            m = aggregate_runs(dataclasses.replace(cfg, topology=topo, mode=mode), route_fn)
            rows.append({
                "node_count": int(n), "mode": mode, "channel": cfg.channel, "runs": cfg.runs,
                "throughput_mean": m.throughput_mean, "throughput_ci": m.throughput_ci,
                "fidelity_mean": m.fidelity_mean, "fidelity_ci": m.fidelity_ci,
                "memutil_mean": m.memutil_mean, "memutil_ci": m.memutil_ci,
                "seed": cfg.seed, "_metrics": m,
            })
            if progress:
                progress(n, mode)
    return rows
