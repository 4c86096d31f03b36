"""CNOT-chain walk along a routed path, one qubit per path node."""
from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np

from ..channels import Kind, parse_kind
from ..statevec import (CH, CNOT, MAX_QUBITS, RY, H, RegisterSizeError, X, born_distribution,
                        new_register, run_circuit, sample_all)
from .paths import Path

EXACT_LIMIT = 20


@dataclass(frozen=True)
class WalkResult:
    path: Path
    steps: int
    histogram: dict
    shots: int
    exact: dict | None = None


def endpoint_preparation(channel, k: int) -> list:
    """Entangling gates on the path's end qubits: source a = 0, the next
    node serves as auxiliary, and the destination b = k - 1."""
    kind = parse_kind(channel)
    if k < 3:
        raise ValueError("channel preparation needs a path of at least three nodes")
    a, aux, b = 0, 1, k - 1
    if kind is Kind.WBELL5:
        return [RY(pi / 2, a), CH(a, b), CNOT(b, aux), X(aux), H(a), CNOT(a, b)]
    if kind is Kind.GHZBELL5:
        return [H(a), CNOT(a, aux), CNOT(aux, b), H(a), CNOT(a, b)]
    if kind is Kind.CLUSTERBELL6:
        return [H(a), CNOT(a, aux), H(b), H(a), CNOT(a, b)]
    raise ValueError(f"no walk preparation for {kind.value}")


def build_walk_circuit(path: Path, max_steps: int = 1, source: int = 1, channel=None) -> list:
    k = len(path.nodes)
    if k > MAX_QUBITS:
        raise RegisterSizeError(f"a {k}-node path exceeds the {MAX_QUBITS}-qubit guard")
    if max_steps < 0:
        raise ValueError("steps must be >= 0")
    if channel is not None:
        gates = endpoint_preparation(channel, k)
    else:
        gates = [X(0)] if source else []
    for _ in range(max_steps):
        gates += [CNOT(i, i + 1) for i in range(k - 1)]
    return gates


def walk_state(path: Path, steps: int = 1, source: int = 1, channel=None):
    gates = build_walk_circuit(path, steps, source, channel)
    return run_circuit(new_register(len(path.nodes)), gates)


def run_walk(path: Path, steps: int, shots: int, channel=None, rng=None, source: int = 1) -> WalkResult:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    if len(path.nodes) < 2:
        raise ValueError("a walk needs at least two nodes")
    if rng is None:
        rng = np.random.default_rng(0)
    state = walk_state(path, steps, source, channel)
    hist = sample_all(state, shots, rng)
    exact = born_distribution(state) if state.num_qubits <= EXACT_LIMIT else None
    return WalkResult(path, steps, hist, shots, exact)


def total_variation(p: dict, q: dict) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def histogram_within_bounds(result: WalkResult, sigmas: float = 5.0) -> bool:
    """Every bin within `sigmas` multinomial standard deviations of the exact
    count, and no counts outside the support."""
    if result.exact is None:
        raise ValueError("exact distribution not available")
    n = result.shots
    for bits, c in result.histogram.items():
        if bits not in result.exact:
            return False
    for bits, p in result.exact.items():
        c = result.histogram.get(bits, 0)
        sd = np.sqrt(n * p * (1 - p))
        if abs(c - n * p) > sigmas * sd + 1e-9:
            return False
    return True
