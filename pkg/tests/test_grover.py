import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qteleroute.routing.grover import _bbht_search, durr_hoyer_min, query_budget


def test_small_frontier():
    idx, q = durr_hoyer_min([5, 2, 8], np.random.default_rng(0))
    assert idx == 1 and q > 0


def test_single_element_is_free():
    assert durr_hoyer_min([(3.0, 7)], np.random.default_rng(0)) == (0, 0)


def test_empty():
    with pytest.raises(ValueError):
        durr_hoyer_min([], np.random.default_rng(0))


def test_ties_resolved_by_key_order():
    keys = [(1.0, 4), (1.0, 2), (3.0, 0)]
    hits = sum(durr_hoyer_min(keys, np.random.default_rng(s))[0] == 1 for s in range(30))
    assert hits == 30


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40, unique=True), st.integers(0, 2**32 - 1))
def test_finds_minimum(values, seed):
    idx, q = durr_hoyer_min(values, np.random.default_rng(seed))
    assert values[idx] == min(values)
    # the last search may overrun the budget by at most one full round
    assert q <= 2 * query_budget(1 << max(1, (len(values) - 1).bit_length()))


def test_bbht_finds_single_marked_item():
    marked = np.zeros(64, dtype=bool)
    marked[37] = True
    rng = np.random.default_rng(1)
    found = [_bbht_search(marked, 6, rng, 1000)[0] for _ in range(20)]
    assert found == [37] * 20


def test_bbht_gives_up_without_marked_items():
    j, used = _bbht_search(np.zeros(16, dtype=bool), 4, np.random.default_rng(0), 50)
    assert j is None and used >= 50


def test_query_scaling_is_sublinear():
    rng = np.random.default_rng(7)
    sizes = [4, 16, 64, 256, 1024]
    means = []
    for m in sizes:
        qs = [durr_hoyer_min(list(rng.random(m)), rng)[1] for _ in range(10)]
        means.append(np.mean(qs))
    slope = np.polyfit(np.log(sizes), np.log(means), 1)[0]
    assert slope < 0.75
