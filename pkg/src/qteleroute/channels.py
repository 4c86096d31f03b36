"""
Entangled resource states, built two ways: direct amplitude assignment
(the reference) and gate circuits run from |0...0>, plus a cross-check.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from math import isfinite, sqrt

import numpy as np

from .statevec import (CH, CNOT, RY, H, StateVector, X, fidelity, fix_global_phase,
                       new_register, run_circuit, tensor)

ALICE, BOB = "alice", "bob"


class Kind(enum.Enum):
    BELL = "bell"
    GHZ3 = "ghz3"
    W3 = "w3"
    WN = "wn"
    CLUSTERN = "clustern"
    WBELL5 = "wbell"
    GHZBELL5 = "ghzbell"
    CLUSTERBELL6 = "clusterbell"


@dataclass(frozen=True)
class Wn:
    """Weighted three-qubit W family with real weight n and two phases."""
    n: float = 1.0
    beta: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        if not all(isfinite(v) for v in (self.n, self.beta, self.eta)):
            raise ValueError("W_n parameters must be finite")
        if self.n < 0:
            raise ValueError(f"W_n weight must be >= 0, got {self.n}")


@dataclass(frozen=True)
class ClusterN:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"cluster size must be an integer >= 2, got {self.n}")


@dataclass(frozen=True)
class ChannelState:
    kind: object
    state: StateVector
    holders: tuple   # holders[i] is ALICE or BOB for qubit i

    def __post_init__(self):
        if len(self.holders) != self.state.num_qubits:
            raise ValueError("holder map must cover every qubit exactly once")
        if any(h not in (ALICE, BOB) for h in self.holders):
            raise ValueError("holders must be 'alice' or 'bob'")

    def qubits_of(self, who: str) -> tuple:
        return tuple(i for i, h in enumerate(self.holders) if h == who)


def parse_kind(name) -> Kind:
    if isinstance(name, Kind):
        return name
    aliases = {"wbell5": Kind.WBELL5, "ghzbell5": Kind.GHZBELL5, "clusterbell6": Kind.CLUSTERBELL6,
               "w-bell": Kind.WBELL5, "ghz-bell": Kind.GHZBELL5, "cluster-bell": Kind.CLUSTERBELL6}
    key = str(name).strip().lower()
    if key in aliases:
        return aliases[key]
    try:
        return Kind(key)
    except ValueError:
        raise ValueError(f"unknown channel {name!r}; choose from "
                         f"{', '.join(k.value for k in Kind)}") from None


def _kind_of(kind):
    if isinstance(kind, Wn):
        return Kind.WN
    if isinstance(kind, ClusterN):
        return Kind.CLUSTERN
    return parse_kind(kind)


def _from_terms(n: int, terms: dict, prefactor: float = 1.0, normalize: bool = True) -> StateVector:
    amps = np.zeros(1 << n, dtype=complex)
    for bits, a in terms.items():
        amps[int(bits, 2)] += a
    amps *= prefactor
    if normalize:
        return StateVector(amps)
    return amps


def make_wn(n: float = 1.0, beta: float = 0.0, eta: float = 0.0) -> StateVector:
    p = Wn(n, beta, eta)
    amps = np.zeros(8, dtype=complex)
    amps[0b100] = 1.0
    amps[0b010] = sqrt(p.n) * np.exp(1j * p.beta)
    amps[0b001] = sqrt(p.n + 1) * np.exp(1j * p.eta)
    return StateVector(amps / sqrt(2 + 2 * p.n))


def bell_pair() -> StateVector:
    return _from_terms(2, {"00": 1, "11": 1}, 1 / sqrt(2))


def ghz3() -> StateVector:
    return _from_terms(3, {"000": 1, "111": 1}, 1 / sqrt(2))


def make_cluster(n: int) -> StateVector:
    """Linear cluster state from a controlled-Z chain on |+>^n."""
    ClusterN(n)
    idx = np.arange(1 << n)
    bits = (idx[:, None] >> np.arange(n - 1, -1, -1)) & 1
    parity = np.sum(bits[:, :-1] & bits[:, 1:], axis=1) & 1
    return StateVector((1 - 2 * parity) / 2 ** (n / 2))


def make_state(kind) -> StateVector:
    k = _kind_of(kind)
    if k is Kind.BELL:
        return bell_pair()
    if k is Kind.GHZ3:
        return ghz3()
    if k is Kind.W3:
        return make_wn(1.0)
    if k is Kind.WN:
        p = kind if isinstance(kind, Wn) else Wn()
        return make_wn(p.n, p.beta, p.eta)
    if k is Kind.CLUSTERN:
        if not isinstance(kind, ClusterN):
            raise ValueError("cluster channel needs an explicit ClusterN(n)")
        return make_cluster(kind.n)
    if k is Kind.WBELL5:
        return tensor(make_wn(1.0), bell_pair())
    if k is Kind.GHZBELL5:
        return tensor(ghz3(), bell_pair())
    if k is Kind.CLUSTERBELL6:
        return tensor(tensor(bell_pair(), bell_pair()), bell_pair())
    raise ValueError(f"unsupported channel {kind!r}")


_HOLDERS = {
    Kind.BELL: (ALICE, BOB),
    Kind.WBELL5: (ALICE, BOB, BOB, BOB, ALICE),
    Kind.GHZBELL5: (ALICE, BOB, BOB, BOB, ALICE),
    Kind.CLUSTERBELL6: (ALICE, BOB, BOB, BOB, BOB, ALICE),
}


def make_channel(kind) -> ChannelState:
    k = _kind_of(kind)
    state = make_state(kind)
    holders = _HOLDERS.get(k)
    if holders is None:
        # no endpoint split is defined for bare multipartite factors; first qubit goes to Alice
        holders = (ALICE,) + (BOB,) * (state.num_qubits - 1)
    return ChannelState(kind if isinstance(kind, (Wn, ClusterN)) else k, state, holders)


_W3_GATES = [RY(np.pi / 2, 0), CH(0, 1), CNOT(1, 2), X(2)]
_BELL_GATES = [H(0), CNOT(0, 1)]
_GHZ3_GATES = [H(0), CNOT(0, 1), CNOT(1, 2)]


def _shift(gates, offset):
    out = []
    for g in gates:
        out.append(type(g)(g.kind, tuple(q + offset for q in g.targets), g.theta))
    return out


def circuit_gates(kind) -> list:
    k = _kind_of(kind)
    if k is Kind.BELL:
        return list(_BELL_GATES)
    if k is Kind.GHZ3:
        return list(_GHZ3_GATES)
    if k is Kind.W3:
        return list(_W3_GATES)
    if k is Kind.WBELL5:
        return list(_W3_GATES) + _shift(_BELL_GATES, 3)
    if k is Kind.GHZBELL5:
        return list(_GHZ3_GATES) + _shift(_BELL_GATES, 3)
    if k is Kind.CLUSTERBELL6:
        return _BELL_GATES + _shift(_BELL_GATES, 2) + _shift(_BELL_GATES, 4)
    raise ValueError(f"no preparation circuit for {kind!r}")


def circuit_prepare(kind) -> tuple[list, StateVector]:
    gates = circuit_gates(kind)
    n = max(q for g in gates for q in g.targets) + 1
    return gates, run_circuit(new_register(n), gates)


# Expansions exactly as printed, including prefactors; deliberately unnormalized.
PRINTED = {
    Kind.BELL: (2, {"00": 1, "11": 1}, 1 / sqrt(2)),
    Kind.GHZ3: (3, {"000": 1, "111": 1}, 1 / sqrt(2)),
    Kind.W3: (3, {"100": 1, "010": 1, "001": sqrt(2)}, 0.5),
    Kind.WBELL5: (5, {"10000": 1, "01000": 1, "00100": sqrt(2),
                      "10011": 1, "01011": 1, "00111": sqrt(2)}, 1 / (2 * sqrt(2))),
    Kind.GHZBELL5: (5, {"00000": 1, "00011": 1, "11100": 1, "11111": 1}, 1 / sqrt(2)),
    Kind.CLUSTERBELL6: (6, {b: 1 for b in ("000000", "001100", "110000", "111100",
                                           "000011", "001111", "110011", "111111")},
                        1 / (2 * sqrt(2))),
}

# the four-qubit factor printed for the cluster channel
PRINTED_CLUSTER4 = (4, {"0000": 1, "0011": 1, "1100": 1, "1111": 1}, 0.5)


def printed_amplitudes(kind) -> np.ndarray:
    n, terms, pref = PRINTED[_kind_of(kind)]
    return _from_terms(n, terms, pref, normalize=False)


@dataclass(frozen=True)
class ChannelReport:
    kind: str
    max_amplitude_error: float
    circuit_fidelity: float | None
    printed_norm: float

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)


def verify_channel(kind) -> ChannelReport:
    """Compare the reference state with the printed expansion (raw, as printed)
    and with the preparation circuit's output."""
    k = _kind_of(kind)
    ref = make_state(kind)
    printed = printed_amplitudes(k)
    err = float(np.max(np.abs(fix_global_phase(ref.amplitudes) - printed)))
    try:
        _, prepared = circuit_prepare(k)
        circ_f = fidelity(ref, prepared)
    except ValueError:
        circ_f = None
    return ChannelReport(k.value, err, circ_f, float(np.linalg.norm(printed)))
