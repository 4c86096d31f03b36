"""
Dense state-vector simulation of small qubit registers.

Qubit ordering: qubit 0 is the most significant bit of the amplitude index,
so the ket |q0 q1 ... q{n-1}> reads directly as the binary index. Particle
numbers used in the protocol docs (1, 2, 3, ...) map to qubit indices
(0, 1, 2, ...).

States are treated as immutable: every operation returns a new StateVector.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import cos, sin, sqrt

import numpy as np

MAX_QUBITS = 24
NORM_TOL = 1e-10
UNITARY_TOL = 1e-12
_ZERO_PROB = 1e-14

QUBIT_ORDER = "qubit 0 is the most significant bit of the amplitude index; amplitudes listed by ascending index"


class RegisterSizeError(ValueError):
    """Raised when a register would exceed the MAX_QUBITS resource guard."""


class StateVector:
    __slots__ = ("_amps",)

    def __init__(self, amplitudes, *, check_norm: bool = True):
        amps = np.array(amplitudes, dtype=complex).reshape(-1)
        n = amps.size.bit_length() - 1
        if amps.size < 2 or amps.size != 1 << n:
            raise ValueError(f"amplitude count {amps.size} is not a power of two >= 2")
        if n > MAX_QUBITS:
            raise RegisterSizeError(f"{n} qubits exceeds the {MAX_QUBITS}-qubit guard")
        if check_norm:
            norm = np.vdot(amps, amps).real
            if abs(norm - 1.0) > NORM_TOL:
                raise ValueError(f"state is not normalized (norm^2 = {norm:.3e})")
        amps.setflags(write=False)
        self._amps = amps

    @property
    def amplitudes(self) -> np.ndarray:
        return self._amps

    @property
    def num_qubits(self) -> int:
        return self._amps.size.bit_length() - 1

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self._amps, self._amps).real))

    def probabilities(self) -> np.ndarray:
        return np.abs(self._amps) ** 2

    def amplitude(self, bits: str) -> complex:
        if len(bits) != self.num_qubits:
            raise ValueError(f"bitstring {bits!r} does not match {self.num_qubits} qubits")
        return complex(self._amps[int(bits, 2)])

    def __len__(self):
        return self._amps.size

    def __repr__(self):
        terms = [f"{a:.4g}|{i:0{self.num_qubits}b}>" for i, a in enumerate(self._amps) if abs(a) > 1e-12]
        return f"StateVector({' + '.join(terms)})"

    def to_json(self) -> str:
        return json.dumps({
            "num_qubits": self.num_qubits,
            "qubit_order": QUBIT_ORDER,
            "amplitudes": [[float(a.real), float(a.imag)] for a in self._amps],
        })

    @classmethod
    def from_json(cls, text: str) -> StateVector:
        data = json.loads(text)
        amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
        state = cls(amps)
        if state.num_qubits != data["num_qubits"]:
            raise ValueError("num_qubits does not match the amplitude count")
        return state


@dataclass(frozen=True)
class GateOp:
    """One gate application. Controls come before the target in `targets`."""
    kind: str
    targets: tuple
    theta: float | None = field(default=None)

    def __post_init__(self):
        kind = self.kind.upper()
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", tuple(int(q) for q in self.targets))
        if kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != _ARITY[kind]:
            raise ValueError(f"{kind} takes {_ARITY[kind]} qubit(s), got {len(self.targets)}")
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate qubit indices in {kind}{self.targets}")
        if kind == "RY" and self.theta is None:
            raise ValueError("RY needs an angle")

    def matrix(self) -> np.ndarray:
        return gate_matrix(self.kind, self.theta)

    def __str__(self):
        args = ",".join(str(q) for q in self.targets)
        if self.theta is not None:
            return f"{self.kind}({self.theta:.6g})[{args}]"
        return f"{self.kind}[{args}]"


_ARITY = {"H": 1, "X": 1, "Z": 1, "RY": 1, "CNOT": 2, "CH": 2, "CCNOT": 3}

_S2 = 1 / sqrt(2)
_H = np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _controlled(u: np.ndarray, controls: int) -> np.ndarray:
    dim = u.shape[0] << controls
    m = np.eye(dim, dtype=complex)
    m[-u.shape[0]:, -u.shape[0]:] = u
    return m


def gate_matrix(kind: str, theta: float | None = None) -> np.ndarray:
    kind = kind.upper()
    if kind == "H":
        return _H.copy()
    if kind == "X":
        return _X.copy()
    if kind == "Z":
        return _Z.copy()
    if kind == "RY":
        c, s = cos(theta / 2), sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "CNOT":
        return _controlled(_X, 1)
    if kind == "CH":
        return _controlled(_H, 1)
    if kind == "CCNOT":
        return _controlled(_X, 2)
    raise ValueError(f"unknown gate kind {kind!r}")


# convenience constructors, used heavily by the protocol and channel modules
def H(q): return GateOp("H", (q,))
def X(q): return GateOp("X", (q,))
def Z(q): return GateOp("Z", (q,))
def RY(theta, q): return GateOp("RY", (q,), theta)
def CNOT(c, t): return GateOp("CNOT", (c, t))
def CH(c, t): return GateOp("CH", (c, t))
def CCNOT(c1, c2, t): return GateOp("CCNOT", (c1, c2, t))


def new_register(num_qubits: int) -> StateVector:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise RegisterSizeError(f"qubit count must be in [1, {MAX_QUBITS}], got {num_qubits}")
    amps = np.zeros(1 << num_qubits, dtype=complex)
    amps[0] = 1.0
    return StateVector(amps)


def qubit_amplitudes(theta: float) -> tuple[float, float]:
    """(cos(theta/4), sin(theta/4)): the single-qubit parametrization."""
    return cos(theta / 4), sin(theta / 4)


def prepare_qubit(theta: float) -> StateVector:
    return StateVector(qubit_amplitudes(theta))


def _check_qubits(state: StateVector, qubits) -> None:
    n = state.num_qubits
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n}-qubit state")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"duplicate qubit indices {tuple(qubits)}")


def apply_unitary(state: StateVector, u: np.ndarray, qubits) -> StateVector:
    """Apply a 2^k x 2^k matrix to the listed qubits (first listed = most significant)."""
    qubits = tuple(qubits)
    _check_qubits(state, qubits)
    n, k = state.num_qubits, len(qubits)
    t = np.moveaxis(state.amplitudes.reshape((2,) * n), qubits, range(k))
    shape = t.shape
    t = (u @ t.reshape(1 << k, -1)).reshape(shape)
    return StateVector(np.moveaxis(t, range(k), qubits).reshape(-1))


def apply_gate(state: StateVector, gate: GateOp) -> StateVector:
    return apply_unitary(state, gate.matrix(), gate.targets)


def run_circuit(state: StateVector, gates) -> StateVector:
    for g in gates:
        state = apply_gate(state, g)
    return state


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Kronecker product; qubits of `a` become the high-order indices."""
    if a.num_qubits + b.num_qubits > MAX_QUBITS:
        raise RegisterSizeError(f"{a.num_qubits + b.num_qubits} qubits exceeds the {MAX_QUBITS}-qubit guard")
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


def _bit_mask(n: int, qubit: int) -> np.ndarray:
    idx = np.arange(1 << n)
    return ((idx >> (n - 1 - qubit)) & 1).astype(bool)


def outcome_probability(state: StateVector, qubit: int, bit: int) -> float:
    _check_qubits(state, (qubit,))
    ones = _bit_mask(state.num_qubits, qubit)
    p1 = float(np.sum(state.probabilities()[ones]))
    return p1 if bit else 1.0 - p1


def project(state: StateVector, qubit: int, bit: int) -> tuple[StateVector, float]:
    """Project `qubit` onto |bit> and renormalize. Returns (collapsed, probability)."""
    _check_qubits(state, (qubit,))
    mask = _bit_mask(state.num_qubits, qubit)
    if not bit:
        mask = ~mask
    amps = np.where(mask, state.amplitudes, 0)
    p = float(np.vdot(amps, amps).real)
    if p < _ZERO_PROB:
        raise ValueError(f"outcome {bit} on qubit {qubit} has zero probability")
    return StateVector(amps / np.sqrt(p)), p


def measure_qubit(state: StateVector, qubit: int, rng: np.random.Generator) -> tuple[int, StateVector, float]:
    _check_qubits(state, (qubit,))
    p1 = outcome_probability(state, qubit, 1)
    p0 = 1.0 - p1
    if p0 < _ZERO_PROB and p1 < _ZERO_PROB:
        raise ValueError("both measurement outcomes have vanishing probability; corrupt state")
    bit = 0 if rng.random() < p0 else 1
    collapsed, p = project(state, qubit, bit)
    return bit, collapsed, p


def remove_qubit(state: StateVector, qubit: int) -> StateVector:
    """Drop a qubit that sits in a definite computational basis state."""
    _check_qubits(state, (qubit,))
    if state.num_qubits == 1:
        raise ValueError("cannot remove the last qubit")
    p1 = outcome_probability(state, qubit, 1)
    if min(p1, 1 - p1) > NORM_TOL:
        raise ValueError(f"qubit {qubit} is not in a basis state (p1={p1:.3g})")
    t = state.amplitudes.reshape((2,) * state.num_qubits)
    rest = np.take(t, int(round(p1)), axis=qubit)
    return StateVector(rest.reshape(-1))


def sample_all(state: StateVector, shots: int, rng: np.random.Generator) -> dict[str, int]:
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = state.probabilities()
    counts = rng.multinomial(shots, probs / probs.sum())
    n = state.num_qubits
    return {format(i, f"0{n}b"): int(c) for i, c in enumerate(counts) if c}


def born_distribution(state: StateVector, tol: float = 1e-15) -> dict[str, float]:
    n = state.num_qubits
    return {format(i, f"0{n}b"): float(p) for i, p in enumerate(state.probabilities()) if p > tol}


def fidelity(ideal: StateVector, actual: StateVector) -> float:
    if ideal.num_qubits != actual.num_qubits:
        raise ValueError(f"dimension mismatch: {ideal.num_qubits} vs {actual.num_qubits} qubits")
    f = abs(np.vdot(ideal.amplitudes, actual.amplitudes)) ** 2
    return float(min(1.0, f))


def reduced_single_qubit(state: StateVector, qubit: int) -> np.ndarray:
    _check_qubits(state, (qubit,))
    t = np.moveaxis(state.amplitudes.reshape((2,) * state.num_qubits), qubit, 0).reshape(2, -1)
    return t @ t.conj().T


def fidelity_with_density(ideal: StateVector, rho: np.ndarray) -> float:
    """<psi|rho|psi> for a pure target and a (possibly mixed) density matrix."""
    psi = ideal.amplitudes
    if rho.shape != (psi.size, psi.size):
        raise ValueError("density matrix does not match the target dimension")
    return float(np.clip(np.vdot(psi, rho @ psi).real, 0.0, 1.0))


def fix_global_phase(amps: np.ndarray) -> np.ndarray:
    """Rotate so the first non-negligible amplitude is real and positive."""
    amps = np.asarray(amps, dtype=complex)
    nz = np.flatnonzero(np.abs(amps) > 1e-12)
    if nz.size == 0:
        return amps.copy()
    a = amps[nz[0]]
    return amps * (abs(a) / a)


def phase_flip(state: StateVector, marked: np.ndarray) -> StateVector:
    """Diagonal oracle: negate amplitudes at the marked basis indices."""
    marked = np.asarray(marked, dtype=bool)
    if marked.size != len(state):
        raise ValueError("mask size does not match the register")
    return StateVector(np.where(marked, -state.amplitudes, state.amplitudes))


def reflect_about_uniform(state: StateVector) -> StateVector:
    """Grover diffusion 2|s><s| - I, with |s> the uniform superposition."""
    a = state.amplitudes
    return StateVector(2 * a.mean() - a)


def uniform_superposition(num_qubits: int) -> StateVector:
    if not 1 <= num_qubits <= MAX_QUBITS:
        raise RegisterSizeError(f"qubit count must be in [1, {MAX_QUBITS}]")
    dim = 1 << num_qubits
    return StateVector(np.full(dim, 1 / np.sqrt(dim), dtype=complex))
