import json
from math import sqrt

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qteleroute.channels import (ALICE, BOB, ClusterN, Kind, PRINTED_CLUSTER4, Wn, bell_pair,
                                 circuit_gates, circuit_prepare, ghz3, make_channel, make_cluster,
                                 make_state, make_wn, printed_amplitudes, verify_channel)
from qteleroute.statevec import H, run_circuit, tensor

R2 = sqrt(2)


def test_wbell_amplitudes():
    s = make_channel(Kind.WBELL5).state
    assert abs(s.amplitude("10000") - 1 / (2 * R2)) < 1e-12
    assert abs(s.amplitude("00100") - 0.5) < 1e-12
    assert abs(s.amplitude("00111") - 0.5) < 1e-12
    assert np.count_nonzero(np.abs(s.amplitudes) > 1e-12) == 6


def test_clusterbell_amplitudes():
    s = make_channel(Kind.CLUSTERBELL6).state
    nz = np.abs(s.amplitudes) > 1e-12
    assert nz.sum() == 8
    assert np.allclose(s.amplitudes[nz], 1 / (2 * R2), atol=1e-12)


def test_ghzbell_amplitudes():
    s = make_channel(Kind.GHZBELL5).state
    for bits in ("00000", "00011", "11100", "11111"):
        assert abs(s.amplitude(bits) - 0.5) < 1e-12
    assert np.count_nonzero(np.abs(s.amplitudes) > 1e-12) == 4


def test_holders():
    ch = make_channel("wbell")
    assert ch.qubits_of(ALICE) == (0, 4) and ch.qubits_of(BOB) == (1, 2, 3)
    assert make_channel("ghzbell").qubits_of(ALICE) == (0, 4)
    cl = make_channel("clusterbell")
    assert cl.qubits_of(ALICE) == (0, 5) and cl.qubits_of(BOB) == (1, 2, 3, 4)


def test_wn_examples():
    # index = binary ket, so |001> is index 1 and |100> is index 4
    assert np.allclose(make_wn(1, 0, 0).amplitudes, [0, R2 / 2, 0.5, 0, 0.5, 0, 0, 0], atol=1e-12)
    assert np.allclose(make_wn(0, 0, 0).amplitudes, [0, 1 / R2, 0, 0, 1 / R2, 0, 0, 0], atol=1e-12)
    with pytest.raises(ValueError):
        make_wn(-0.5)
    with pytest.raises(ValueError):
        Wn(float("nan"))


@given(st.floats(0, 1e6), st.floats(-10, 10), st.floats(-10, 10))
def test_wn_normalized(n, beta, eta):
    assert abs(make_wn(n, beta, eta).norm() - 1) < 1e-12


def test_factorizations():
    assert np.max(np.abs(make_state(Kind.WBELL5).amplitudes
                         - tensor(make_wn(1, 0, 0), bell_pair()).amplitudes)) < 1e-12
    assert np.max(np.abs(make_state(Kind.GHZBELL5).amplitudes
                         - tensor(ghz3(), bell_pair()).amplitudes)) < 1e-12
    w_printed = printed_amplitudes(Kind.W3)
    assert np.max(np.abs(make_wn(1).amplitudes - w_printed)) < 1e-12


def test_cluster_chain_signs():
    s = make_cluster(3)
    # (-1)^(x0 x1 + x1 x2) / 2^(3/2)
    expected = np.array([(-1) ** ((i >> 2 & 1) * (i >> 1 & 1) + (i >> 1 & 1) * (i & 1))
                         for i in range(8)]) / 2 ** 1.5
    assert np.allclose(s.amplitudes, expected)
    with pytest.raises(ValueError):
        ClusterN(1)


def test_cluster4_local_form():
    # Hadamards on the chain ends turn the four-qubit chain into the
    # familiar four-term form, with one negative sign
    s = run_circuit(make_cluster(4), [H(0), H(3)])
    nz = {format(i, "04b"): round(a.real * 2, 9) for i, a in enumerate(s.amplitudes) if abs(a) > 1e-12}
    assert nz == {"0000": 1, "0011": 1, "1100": 1, "1111": -1}


def test_cluster4_matches_printed_factor():
    n, terms, pref = PRINTED_CLUSTER4
    printed = np.zeros(1 << n)
    for bits, a in terms.items():
        printed[int(bits, 2)] = a * pref
    assert np.max(np.abs(make_cluster(4).amplitudes - printed)) < 1e-12


@pytest.mark.parametrize("kind", [Kind.BELL, Kind.GHZ3, Kind.W3, Kind.WBELL5, Kind.GHZBELL5, Kind.CLUSTERBELL6])
def test_all_normalized(kind):
    assert abs(make_channel(kind).state.norm() - 1) < 1e-10


def test_circuits():
    gates, s = circuit_prepare(Kind.BELL)
    assert [str(g) for g in gates] == ["H[0]", "CNOT[0,1]"]
    assert np.allclose(s.amplitudes, [1 / R2, 0, 0, 1 / R2])
    _, s = circuit_prepare(Kind.GHZ3)
    assert np.allclose(s.amplitudes, [1 / R2, 0, 0, 0, 0, 0, 0, 1 / R2])
    gates, s = circuit_prepare(Kind.W3)
    assert [g.kind for g in gates] == ["RY", "CH", "CNOT", "X"]
    # hand evaluation of the four-gate list: |001>/sqrt2 + |101>/2 + |110>/2
    assert np.allclose(s.amplitudes, [0, 1 / R2, 0, 0, 0, 0.5, 0.5, 0], atol=1e-12)
    with pytest.raises(ValueError):
        circuit_gates(ClusterN(4))


def test_verify_channel():
    r = verify_channel(Kind.BELL)
    assert r.max_amplitude_error == 0 and r.circuit_fidelity == pytest.approx(1, abs=1e-12)
    assert verify_channel(Kind.CLUSTERBELL6).max_amplitude_error <= 1e-12
    assert verify_channel(Kind.WBELL5).max_amplitude_error <= 1e-12
    w = verify_channel(Kind.WBELL5)
    assert w.circuit_fidelity == pytest.approx(0.25, abs=1e-12)
    g = verify_channel(Kind.GHZBELL5)
    assert g.printed_norm == pytest.approx(R2)
    assert g.max_amplitude_error == pytest.approx(1 / R2 - 0.5, abs=1e-12)
    assert g.circuit_fidelity == pytest.approx(1, abs=1e-12)
    assert json.loads(g.to_json())["kind"] == "ghzbell"


def test_unknown_channel():
    with pytest.raises(ValueError):
        make_channel("tripleghz")
