"""Command-line entry point.

Exit codes: 0 success, 1 fidelity failure, 2 usage or config error,
3 unreachable target, 4 register-size guard.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import math
import os
import sys
from importlib import resources
from pathlib import Path as FsPath

import numpy as np

from . import channels, netsim, svg
from .protocol import InfeasibleChannelError, derive_correction_table, run_bqt
from .routing import (McdmWeights, NetworkGraph, NoPathError, Path, WaxmanParams, demo_graph,
                      dijkstra, grover_min_dijkstra, mcdm_cost_fn, run_walk, weight_cost)
from .statevec import RegisterSizeError

OK, FIDELITY_FAIL, USAGE, UNREACHABLE, GUARD = 0, 1, 2, 3, 4
BQT_CHANNELS = ("wbell", "ghzbell", "clusterbell")
WALK_CHANNELS = ("none",) + BQT_CHANNELS


class UsageError(Exception):
    pass


# -- config ----------------------------------------------------------------

def _floats(s):
    return [float(x) for x in s.split(",") if x.strip()]


def _ints(s):
    out = [int(x) for x in s.split(",") if x.strip()]
    if not out:
        raise ValueError("empty list")
    return out


def _modes(s):
    out = [x.strip() for x in s.split(",") if x.strip()]
    if not out or any(m not in netsim.MODES for m in out):
        raise ValueError(f"modes must be drawn from {netsim.MODES}")
    return out


def _router(s):
    if s not in ("dijkstra", "grover", "mcdm"):
        raise ValueError("router must be dijkstra, grover or mcdm")
    return s


# key -> (parser, default); a default of None marks the key as required
SCHEMA = {
    "node_counts": (_ints, None),
    "area_x_km": (float, None),
    "area_y_km": (float, None),
    "delta": (float, None),
    "epsilon": (float, None),
    "memory_per_node": (int, None),
    "drop_rate": (float, None),
    "swap_success": (float, None),
    "send_rate": (float, None),
    "classical_delay": (float, None),
    "num_sd_pairs": (int, None),
    "runs": (int, None),
    "sim_duration": (float, None),
    "seed": (int, 0),
    "channel": (str, "werner"),
    "modes": (_modes, list(netsim.MODES)),
    "router": (_router, "dijkstra"),
    "init_link_fidelity": (float, ""),
    "slots_per_pair": (int, ""),
    "pair_lifetime": (float, ""),
    "w_distance": (float, 1.0),
    "w_fidelity": (float, 0.0),
    "w_memory": (float, 0.0),
}


def read_config_text(text: str) -> dict:
    """Parse flat `key = value` text and validate it against SCHEMA."""
    cp = configparser.ConfigParser(interpolation=None, comment_prefixes=("#", ";"))
    try:
        cp.read_string("[cfg]\n" + text)
    except configparser.Error as e:
        raise UsageError(f"malformed config: {e}") from None
    raw = dict(cp["cfg"])
    unknown = sorted(set(raw) - set(SCHEMA))
    missing = sorted(k for k, (_, d) in SCHEMA.items() if d is None and k not in raw)
    bad = []
    out = {}
    for key, (parse, default) in SCHEMA.items():
        if key not in raw:
            out[key] = None if default == "" else default
            continue
        try:
            out[key] = parse(raw[key].strip())
        except ValueError as e:
            bad.append(f"{key} ({e})")
    problems = []
    if unknown:
        problems.append("unknown keys: " + ", ".join(unknown))
    if missing:
        problems.append("missing keys: " + ", ".join(missing))
    if bad:
        problems.append("invalid values: " + ", ".join(bad))
    if problems:
        raise UsageError("; ".join(problems))
    return out


def load_config(source: str) -> dict:
    """A file path, or the name of a bundled preset ("fullscale", "smoke")."""
    p = FsPath(source)
    if p.is_file():
        return read_config_text(p.read_text())
    preset = resources.files("qteleroute") / "data" / f"{source}.cfg"
    if preset.is_file():
        return read_config_text(preset.read_text())
    raise UsageError(f"config file not found: {source}")


def sim_config(c: dict, seed=None) -> netsim.SimConfig:
    try:
        topo = WaxmanParams(c["node_counts"][0], (c["area_x_km"], c["area_y_km"]), c["delta"], c["epsilon"])
        return netsim.SimConfig(
            topology=topo, num_sd_pairs=c["num_sd_pairs"], send_rate=c["send_rate"],
            classical_delay=c["classical_delay"], memory_per_node=c["memory_per_node"],
            drop_rate=c["drop_rate"], swap_success=c["swap_success"],
            init_link_fidelity=c["init_link_fidelity"], sim_duration=c["sim_duration"],
            runs=c["runs"], seed=c["seed"] if seed is None else seed, channel=c["channel"],
            slots_per_pair=c["slots_per_pair"], pair_lifetime=c["pair_lifetime"],
        )
    except ValueError as e:
        raise UsageError(f"invalid config: {e}") from None


def route_function(c: dict, seed: int):
    if c["router"] == "dijkstra":
        return None
    if c["router"] == "grover":
        def route(g, s, t):
            return grover_min_dijkstra(g, s, t, rng=np.random.default_rng([seed, s, t]))[0]
        return route
    try:
        w = McdmWeights(c["w_distance"], c["w_fidelity"], c["w_memory"])
    except ValueError as e:
        raise UsageError(str(e)) from None

    def route(g, s, t):
        return dijkstra(g, s, t, mcdm_cost_fn(g, w))
    return route


# -- output helpers ----------------------------------------------------------

def out_dir(args) -> FsPath:
    d = FsPath(os.environ.get("QTELEROUTE_OUT") or args.out)
    d.mkdir(parents=True, exist_ok=True)
    return d


def write_json(path: FsPath, obj):
    path.write_text(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def write_csv(path: FsPath, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _path_dict(p: Path) -> dict:
    return {"nodes": list(p.nodes), "total_cost": p.total_cost, "hop_count": p.hop_count}


# -- commands ----------------------------------------------------------------

def cmd_protocol(args) -> int:
    rng = np.random.default_rng(args.seed)
    try:
        table = derive_correction_table(args.channel, variant=args.variant)
    except InfeasibleChannelError as e:
        print(f"error: {args.channel} ({args.variant}) cannot teleport both ways: {e}", file=sys.stderr)
        return FIDELITY_FAIL
    out = out_dir(args)
    tdir = out / "traces"
    tdir.mkdir(exist_ok=True)
    (out / "table.json").write_text(table.to_json() + "\n")
    rows, failures = [], 0
    for i in range(args.trials):
        ta = args.theta_a if args.theta_a is not None else float(rng.uniform(0, 4 * math.pi))
        tb = args.theta_b if args.theta_b is not None else float(rng.uniform(0, 4 * math.pi))
        res = run_bqt(args.channel, ta, tb, table, rng)
        tr = res.trace
        failures += not res.success
        rows.append([i, ta, tb, tr.outcomes, tr.corrections[0], tr.corrections[1],
                     tr.fidelity_a_to_b, tr.fidelity_b_to_a, int(res.success)])
        (tdir / f"trial_{i:04d}.json").write_text(tr.to_json() + "\n")
    write_csv(out / "summary.csv", ["trial", "theta_a", "theta_b", "outcomes", "correction_a",
                                    "correction_b", "fidelity_a_to_b", "fidelity_b_to_a", "success"], rows)
    worst = min(min(r[6], r[7]) for r in rows)
    print(f"{args.channel}: {args.trials - failures}/{args.trials} trials recovered both states, "
          f"min fidelity {worst:.12f}")
    if failures:
        print(f"error: {failures} trial(s) below fidelity threshold", file=sys.stderr)
        return FIDELITY_FAIL
    return OK


def cmd_channel(args) -> int:
    rep = channels.verify_channel(args.channel)
    ch = channels.make_channel(args.channel)
    out = out_dir(args)
    amps = ch.state.amplitudes
    nz = {format(i, f"0{ch.state.num_qubits}b"): [float(a.real), float(a.imag)]
          for i, a in enumerate(amps) if abs(a) > 1e-15}
    write_json(out / "channel.json", {
        "kind": ch.kind.value, "holders": list(ch.holders), "amplitudes": nz,
        "max_amplitude_error": rep.max_amplitude_error, "circuit_fidelity": rep.circuit_fidelity,
        "printed_norm": rep.printed_norm,
    })
    print(rep.to_json())
    return OK


def _load_graph(args):
    if args.graph:
        try:
            return NetworkGraph.from_json(FsPath(args.graph).read_text())
        except (OSError, ValueError, KeyError) as e:
            raise UsageError(f"cannot read graph: {e}") from None
    return demo_graph(args.seed, args.nodes)


def cmd_route(args) -> int:
    g = _load_graph(args)
    s = args.source
    t = g.num_nodes() - 1 if args.target is None else args.target
    if s not in g.g or t not in g.g:
        raise UsageError(f"nodes must lie in 0..{g.num_nodes() - 1}")
    cost = weight_cost
    if args.weights:
        try:
            cost = mcdm_cost_fn(g, McdmWeights(*_floats(args.weights)))
        except (TypeError, ValueError) as e:
            raise UsageError(f"bad --weights: {e}") from None
    out = out_dir(args)
    rng = np.random.default_rng(args.seed)
    report = {"source": s, "target": t, "seed": args.seed}
    try:
        fwd, fst = grover_min_dijkstra(g, s, t, cost, rng)
        bwd, bst = grover_min_dijkstra(g, t, s, cost, rng)
    except NoPathError as e:
        report.update(reachable=False, error=str(e))
        write_json(out / "equivalence.json", report)
        (out / "graph.svg").write_text(svg.graph_svg(g, title=f"{s} -> {t}: unreachable"))
        print(f"error: {e}", file=sys.stderr)
        return UNREACHABLE
    cf, cb = dijkstra(g, s, t, cost), dijkstra(g, t, s, cost)
    report.update(
        reachable=True,
        forward={"grover_cost": fwd.total_cost, "classical_cost": cf.total_cost, **fst.as_dict()},
        backward={"grover_cost": bwd.total_cost, "classical_cost": cb.total_cost, **bst.as_dict()},
    )
    report["equal"] = fwd.total_cost == cf.total_cost and bwd.total_cost == cb.total_cost
    write_json(out / "forward.json", _path_dict(fwd))
    write_json(out / "backward.json", _path_dict(bwd))
    write_json(out / "equivalence.json", report)
    (out / "graph.json").write_text(g.to_json() + "\n")
    (out / "graph.svg").write_text(svg.graph_svg(g, fwd, bwd, title=f"{s} -> {t}"))
    print(f"forward {list(fwd.nodes)} cost {fwd.total_cost:.6g}; backward {list(bwd.nodes)} "
          f"cost {bwd.total_cost:.6g}; grover == classical: {report['equal']}")
    return OK


def cmd_walk(args) -> int:
    if args.shots < 1 or args.steps < 1:
        raise UsageError("--shots and --steps must be >= 1")
    if args.path:
        nodes = tuple(int(x) for x in args.path.split(","))
    else:
        nodes = tuple(range(args.nodes))
    if len(nodes) < 2:
        raise UsageError("a walk needs at least two nodes")
    channel = None if args.channel == "none" else args.channel
    path = Path(nodes, float(len(nodes) - 1))
    try:
        r = run_walk(path, args.steps, args.shots, channel=channel, rng=np.random.default_rng(args.seed))
    except RegisterSizeError as e:
        print(f"error: {e}", file=sys.stderr)
        return GUARD
    except ValueError as e:
        raise UsageError(str(e)) from None
    keys = sorted(set(r.histogram) | set(r.exact or {}))
    rows = [[k, r.histogram.get(k, 0), "" if r.exact is None else r.exact.get(k, 0.0)] for k in keys]
    out = out_dir(args)
    write_csv(out / "histogram.csv", ["bitstring", "count", "exact"], rows)
    expected = None if r.exact is None else [args.shots * r.exact.get(k, 0.0) for k in keys]
    (out / "histogram.svg").write_text(svg.bar_chart_svg(
        keys, [r.histogram.get(k, 0) for k in keys], expected,
        title=f"walk over {len(nodes)} nodes, {args.steps} step(s), {args.shots} shots"))
    top = max(r.histogram.items(), key=lambda kv: (kv[1], kv[0]))
    print(f"{len(r.histogram)} distinct outcomes; most frequent {top[0]} ({top[1]}/{args.shots})")
    return OK


def cmd_simulate(args) -> int:
    c = load_config(args.config)
    if args.nodes_list:
        c["node_counts"] = _ints(args.nodes_list)
    if args.mode != "both":
        c["modes"] = [args.mode]
    seed = c["seed"] if args.seed is None else args.seed
    cfg = sim_config(c, seed)
    rows = netsim.sweep_nodes(cfg, c["node_counts"], c["modes"], route_function(c, seed),
                              progress=lambda n, m: print(f"  {n} nodes, {m}: done", file=sys.stderr))
    out = out_dir(args)
    cols = netsim.METRIC_COLUMNS
    write_csv(out / "metrics.csv", cols, [[r[k] for k in cols] for r in rows])
    xs = c["node_counts"]
    for metric, fname, label in (("throughput", "throughput.svg", "qubits / s"),
                                 ("fidelity", "fidelity.svg", "end-to-end fidelity"),
                                 ("memutil", "memory.svg", "memory utilization")):
        series = {m: [r[f"{metric}_mean"] for r in rows if r["mode"] == m] for m in c["modes"]}
        errs = {m: [r[f"{metric}_ci"] for r in rows if r["mode"] == m] for m in c["modes"]}
        (out / fname).write_text(svg.line_plot_svg(xs, series, title=f"{label} vs nodes ({c['channel']})",
                                                   ylabel=label, errors=errs))
    for r in rows:
        print(f"{r['node_count']:>5} {r['mode']:<15} throughput {r['throughput_mean']:.1f} "
              f"fidelity {r['fidelity_mean']:.4f} memutil {r['memutil_mean']:.4f}")
    return OK


# -- argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qteleroute", description="Bidirectional teleportation, routing and network simulation.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", default="out")

    sp = sub.add_parser("protocol", help="run bidirectional teleportation trials")
    common(sp)
    sp.add_argument("--channel", choices=BQT_CHANNELS, default="wbell")
    sp.add_argument("--variant", choices=("repaired", "printed"), default="repaired")
    sp.add_argument("--theta-a", type=float)
    sp.add_argument("--theta-b", type=float)
    sp.add_argument("--trials", type=int, default=1)
    sp.set_defaults(func=cmd_protocol)

    sp = sub.add_parser("channel", help="build a channel state and compare it with the printed one")
    common(sp)
    sp.add_argument("--channel", choices=[k.value for k in channels.Kind], default="wbell")
    sp.set_defaults(func=cmd_channel)

    sp = sub.add_parser("route", help="forward and backward shortest paths")
    common(sp)
    sp.add_argument("--graph", help="graph JSON; default is the seeded demo graph")
    sp.add_argument("--nodes", type=int, default=10)
    sp.add_argument("--source", type=int, default=0)
    sp.add_argument("--target", type=int)
    sp.add_argument("--weights", help="MCDM weights w_distance,w_fidelity,w_memory")
    sp.set_defaults(func=cmd_route)

    sp = sub.add_parser("walk", help="sample the CNOT-chain walk along a path")
    common(sp)
    sp.add_argument("--nodes", type=int, default=5)
    sp.add_argument("--path", help="comma-separated node ids; overrides --nodes")
    sp.add_argument("--steps", type=int, default=1)
    sp.add_argument("--shots", type=int, default=10_000)
    sp.add_argument("--channel", choices=WALK_CHANNELS, default="none")
    sp.set_defaults(func=cmd_walk)

    sp = sub.add_parser("simulate", help="network simulation sweep over node counts")
    sp.add_argument("--config", default="smoke", help="config file or bundled preset name")
    sp.add_argument("--seed", type=int, help="overrides the config seed")
    sp.add_argument("--out", default="out")
    sp.add_argument("--nodes", dest="nodes_list", help="comma-separated node counts")
    sp.add_argument("--mode", choices=("both",) + netsim.MODES, default="both")
    sp.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be >= 1")
        return args.func(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
