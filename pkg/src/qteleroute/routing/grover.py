"""
Quantum minimum finding (Durr-Hoyer) over a list of keys, with the Grover
iterations run on the dense simulator. The comparison oracle is the only
classical step and every call to it is counted as one query.
"""
from __future__ import annotations

from math import ceil, log2, sqrt

import numpy as np

from ..statevec import phase_flip, reflect_about_uniform, uniform_superposition

BBHT_LAMBDA = 6 / 5


def query_budget(n_states: int) -> float:
    """Total oracle calls after which the search stops."""
    return 22.5 * sqrt(n_states) + 1.4 * log2(n_states) ** 2


def _bbht_search(marked: np.ndarray, n_qubits: int, rng, budget_left: float):
    """Search with unknown marked count. Returns (index or None, queries used)."""
    N = 1 << n_qubits
    M = 1.0
    used = 0
    while used < budget_left:
        k = int(rng.integers(0, int(M))) if M >= 1 else 0
        state = uniform_superposition(n_qubits)
        for _ in range(k):
            state = reflect_about_uniform(phase_flip(state, marked))
        used += k
        p = state.probabilities()
        j = int(rng.choice(N, p=p / p.sum()))
        used += 1  # checking the measured index
        if marked[j]:
            return j, used
        M = min(BBHT_LAMBDA * M, sqrt(N))
    return None, used


def durr_hoyer_min(keys, rng: np.random.Generator):
    """Index of the smallest key, found with Durr-Hoyer threshold search.

    `keys` are compared with `<`, so tuples like (distance, node id) give a
    strict total order. Returns (index, oracle_queries). The answer is the
    true minimum with probability at least 1/2 by construction and far
    higher in practice; callers that need exactness must tolerate misses.
    """
    m = len(keys)
    if m == 0:
        raise ValueError("empty key list")
    if m == 1:
        return 0, 0
    n_qubits = max(1, ceil(log2(m)))
    N = 1 << n_qubits
    budget = query_budget(N)
    y = int(rng.integers(0, m))
    used = 0
    while used < budget:
        # oracle: indices whose key beats the current threshold; padding never marked
        marked = np.zeros(N, dtype=bool)
        threshold = keys[y]
        marked[:m] = [k < threshold for k in keys]
        j, q = _bbht_search(marked, n_qubits, rng, budget - used)
        used += q
        if j is None:
            break
        y = j
    return y, used
