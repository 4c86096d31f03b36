import json
from math import cos, pi, sin, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qteleroute.statevec import (CCNOT, CH, CNOT, MAX_QUBITS, RY, GateOp, H, RegisterSizeError,
                                 StateVector, X, Z, apply_gate, fidelity, fix_global_phase,
                                 gate_matrix, measure_qubit, new_register, prepare_qubit, project,
                                 reduced_single_qubit, remove_qubit, run_circuit, sample_all, tensor)

S = 1 / sqrt(2)


def test_new_register():
    assert np.array_equal(new_register(1).amplitudes, [1, 0])
    assert np.array_equal(new_register(2).amplitudes, [1, 0, 0, 0])
    with pytest.raises(RegisterSizeError):
        new_register(MAX_QUBITS + 1)
    with pytest.raises(RegisterSizeError):
        new_register(0)


@pytest.mark.parametrize("theta, expected", [
    (0.0, [1.0, 0.0]),
    (pi, [0.7071067811865476, 0.7071067811865476]),
    (2 * pi, [0.0, 1.0]),
])
def test_prepare_qubit(theta, expected):
    assert np.allclose(prepare_qubit(theta).amplitudes, expected, atol=1e-12)


@given(st.floats(0, 2 * pi, exclude_max=True))
def test_prepared_qubit_norm(theta):
    assert abs(prepare_qubit(theta).norm() - 1) < 1e-12


def test_gate_examples():
    assert np.allclose(apply_gate(new_register(1), H(0)).amplitudes, [S, S])
    s = StateVector([0, 0, 1, 0])
    assert np.allclose(apply_gate(s, CNOT(0, 1)).amplitudes, [0, 0, 0, 1])
    bell = run_circuit(new_register(2), [H(0), CNOT(0, 1)])
    assert np.allclose(bell.amplitudes, [S, 0, 0, S], atol=1e-15)


def test_ordering_first_qubit_is_high_bit():
    s = apply_gate(new_register(3), X(0))
    assert s.amplitude("100") == 1
    s = apply_gate(new_register(3), X(2))
    assert s.amplitude("001") == 1


def test_cnot_control_order_matters():
    s = StateVector([0, 1, 0, 0])     # |01>
    assert apply_gate(s, CNOT(0, 1)).amplitude("01") == 1
    assert apply_gate(s, CNOT(1, 0)).amplitude("11") == 1


def test_ccnot_truth_table():
    for i in range(8):
        amps = np.zeros(8)
        amps[i] = 1
        out = apply_gate(StateVector(amps), CCNOT(0, 1, 2))
        j = i ^ 1 if i >= 6 else i
        assert abs(out.amplitudes[j] - 1) < 1e-15


def test_controlled_hadamard():
    out = apply_gate(StateVector([0, 0, 1, 0]), CH(0, 1))
    assert np.allclose(out.amplitudes, [0, 0, S, S])
    assert apply_gate(StateVector([0, 1, 0, 0]), CH(0, 1)).amplitude("01") == 1


@pytest.mark.parametrize("kind, theta", [("H", None), ("X", None), ("Z", None), ("RY", 0.37),
                                         ("CNOT", None), ("CH", None), ("CCNOT", None)])
def test_gates_unitary(kind, theta):
    u = gate_matrix(kind, theta)
    assert np.max(np.abs(u.conj().T @ u - np.eye(len(u)))) < 1e-12


def test_gate_validation():
    with pytest.raises(ValueError):
        GateOp("CNOT", (0,))
    with pytest.raises(ValueError):
        GateOp("CNOT", (1, 1))
    with pytest.raises(ValueError):
        GateOp("SWAP", (0, 1))
    with pytest.raises(IndexError):
        apply_gate(new_register(2), CNOT(0, 2))


def test_tensor():
    assert tensor(StateVector([1, 0]), StateVector([0, 1])).amplitude("01") == 1
    bell = StateVector([S, 0, 0, S])
    assert np.allclose(tensor(bell, StateVector([1, 0])).amplitudes, [S, 0, 0, 0, 0, 0, S, 0])
    big = new_register(13)
    with pytest.raises(RegisterSizeError):
        tensor(big, new_register(12))


def _random_state(seed, n):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return StateVector(v / np.linalg.norm(v))


gate_strategy = st.sampled_from([H(0), X(1), Z(2), RY(1.3, 1), CNOT(2, 0), CH(1, 2), CCNOT(0, 2, 1)])


@settings(max_examples=60)
@given(st.integers(0, 10_000), st.lists(gate_strategy, min_size=1, max_size=8))
def test_norm_preserved(seed, gates):
    s = _random_state(seed, 3)
    for g in gates:
        s = apply_gate(s, g)
        assert abs(s.norm() - 1) < 1e-10


@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_tensor_self_fidelity(sa, sb):
    t = tensor(_random_state(sa, 2), _random_state(sb, 1))
    assert fidelity(t, t) == pytest.approx(1, abs=1e-12)
    assert abs(t.norm() - 1) < 1e-10


def test_fidelity_examples():
    zero, one = StateVector([1, 0]), StateVector([0, 1])
    assert fidelity(zero, zero) == pytest.approx(1)
    assert fidelity(zero, one) == 0
    assert fidelity(zero, apply_gate(zero, H(0))) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        fidelity(zero, new_register(2))


def test_measure_deterministic():
    bit, post, p = measure_qubit(StateVector([1, 0]), 0, np.random.default_rng(0))
    assert (bit, p) == (0, 1.0)
    assert np.array_equal(post.amplitudes, [1, 0])


def test_measure_born_statistics():
    # qubit 0 of cos(0.6)|0> + sin(0.6)|1>, tensored with a spectator
    s = tensor(StateVector([cos(0.6), sin(0.6)]), StateVector([S, S]))
    rng = np.random.default_rng(11)
    trials = 20_000
    ones = sum(measure_qubit(s, 0, rng)[0] for _ in range(trials))
    p = sin(0.6) ** 2
    assert abs(ones / trials - p) < 5 * sqrt(p * (1 - p) / trials)


def test_measure_reproducible():
    s = StateVector([S, S])
    a = [measure_qubit(s, 0, np.random.default_rng(5))[0] for _ in range(3)]
    r1, r2 = np.random.default_rng(9), np.random.default_rng(9)
    seq1 = [measure_qubit(s, 0, r1)[0] for _ in range(50)]
    seq2 = [measure_qubit(s, 0, r2)[0] for _ in range(50)]
    assert seq1 == seq2 and len(set(a)) == 1


def test_measure_corrupt_state():
    bad = StateVector.__new__(StateVector)
    object.__setattr__(bad, "_amps", np.zeros(2, dtype=complex))
    with pytest.raises(ValueError):
        measure_qubit(bad, 0, np.random.default_rng(0))


def test_project_and_remove():
    bell = StateVector([S, 0, 0, S])
    post, p = project(bell, 0, 1)
    assert p == pytest.approx(0.5)
    assert np.allclose(remove_qubit(post, 0).amplitudes, [0, 1])
    with pytest.raises(ValueError):
        remove_qubit(bell, 0)


def test_sample_all():
    assert sample_all(StateVector([0, 1, 0, 0]), 100, np.random.default_rng(0)) == {"01": 100}
    bell = StateVector([S, 0, 0, S])
    shots = 10**6
    counts = sample_all(bell, shots, np.random.default_rng(3))
    assert set(counts) == {"00", "11"}
    sigma = sqrt(shots * 0.25)
    assert abs(counts["00"] - shots / 2) < 5 * sigma
    assert sum(counts.values()) == shots


def test_reduced_density():
    assert np.allclose(reduced_single_qubit(StateVector([0, 1, 0, 0]), 0), np.diag([1, 0]))
    bell = StateVector([S, 0, 0, S])
    for q in (0, 1):
        assert np.allclose(reduced_single_qubit(bell, q), np.diag([0.5, 0.5]))
    s = tensor(StateVector([cos(pi / 8), sin(pi / 8)]), StateVector([1, 0]))
    rho = reduced_single_qubit(s, 0)
    assert np.allclose(np.linalg.eigvalsh(rho), [0, 1], atol=1e-12)


@given(st.integers(0, 10_000), st.integers(0, 2))
def test_reduced_density_is_a_state(seed, q):
    rho = reduced_single_qubit(_random_state(seed, 3), q)
    assert np.allclose(rho, rho.conj().T, atol=1e-12)
    assert abs(np.trace(rho) - 1) < 1e-10
    assert np.min(np.linalg.eigvalsh(rho)) > -1e-10


def test_json_roundtrip():
    s = _random_state(4, 3)
    data = json.loads(s.to_json())
    assert data["num_qubits"] == 3 and "qubit_order" in data
    back = StateVector.from_json(s.to_json())
    assert np.array_equal(back.amplitudes, s.amplitudes)


def test_fix_global_phase():
    v = np.array([0, 1j, -1j]) / sqrt(2)
    assert np.allclose(fix_global_phase(v), [0, S, -S])


def test_normalization_enforced():
    with pytest.raises(ValueError):
        StateVector([1, 1])
    with pytest.raises(ValueError):
        StateVector([1, 0, 0])
