import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graph_and_seeds, graphs
from imkit.errors import CapacityError, ValidationError
from imkit.fixtures import chain_graph, figure1_graph, figure2_graph, random_digraph
from imkit.graph import Graph
from imkit.oracle import (
    LiveEdgeSample,
    Substream,
    estimate_influence_mc,
    exact_influence_enumeration,
    simulate_icm,
)

FIG2_EXACT = {1: 1.0, 2: 0.10009, 3: 0.01099, 4: 0.1, 5: 0.01}


def test_simulate_trivial_cases():
    g = chain_graph(3, 1.0)
    assert simulate_icm(g, [], Substream(0, 0)) == 0
    assert simulate_icm(g, [0], Substream(0, 0)) == 3
    zero = Graph.from_arcs(4, [0, 1, 2], [1, 2, 3], 0.0)
    assert simulate_icm(zero, [0, 2], np.random.default_rng(1)) == 2


def test_simulate_rejects_bad_input():
    g = chain_graph(3, 0.5)
    with pytest.raises(ValidationError):
        simulate_icm(g, [3], Substream(0, 0))
    with pytest.raises(ValidationError):
        simulate_icm(g, [0], 42)


def test_replication_matches_simulate():
    g = figure2_graph(0.5)
    seeds = [0]
    reps = 64
    sizes = [simulate_icm(g, seeds, Substream(7, r)) for r in range(reps)]
    est = estimate_influence_mc(g, seeds, reps, 7)
    assert est.mean == sum(sizes) / reps
    # the same world seen through the live-edge view
    for r in range(8):
        world = LiveEdgeSample.draw(g, 7, r)
        assert world.reachable(g, seeds).sum() == sizes[r]


def test_single_arc_mean():
    g = Graph.from_arcs(2, [0], [1], 0.5)
    est = estimate_influence_mc(g, [0], 100_000, 3)
    assert abs(est.mean - 1.5) <= 3 * est.std_error


def test_all_seeds_exact():
    g = figure2_graph(0.3)
    est = estimate_influence_mc(g, range(g.n), 500, 0)
    assert est.mean == g.n and est.std_error == 0.0


def test_mc_validation():
    g = chain_graph(2, 0.5)
    with pytest.raises(ValidationError):
        estimate_influence_mc(g, [0], 0)
    assert estimate_influence_mc(g, [], 10).mean == 0.0


def test_figure2_mc_matches_exact_sum():
    # The exact column sums to 1.22108; MC converges there.
    g = figure2_graph()
    est = estimate_influence_mc(g, [g.index_of(1)], 200_000, 11)
    assert abs(est.mean - sum(FIG2_EXACT.values())) <= 3 * est.std_error


def test_enumeration_figure2():
    g = figure2_graph()
    res = exact_influence_enumeration(g, [g.index_of(1)])
    for lab, want in FIG2_EXACT.items():
        assert res.probs[g.index_of(lab)] == pytest.approx(want, abs=1e-12)
    assert res.sigma == pytest.approx(1.22108, abs=1e-12)


@pytest.mark.parametrize("p", [0.1, 0.3, 0.5, 1.0])
def test_enumeration_figure1(p):
    res = exact_influence_enumeration(figure1_graph(p), [0])
    np.testing.assert_allclose(res.probs, [1, p, p**2, p**3], rtol=0, atol=1e-15)


def test_enumeration_guards():
    rng = np.random.default_rng(0)
    big = random_digraph(rng, 8, 26)
    with pytest.raises(CapacityError):
        exact_influence_enumeration(big, [0])
    res = exact_influence_enumeration(figure2_graph(), [])
    assert res.sigma == 0.0 and not res.probs.any()


def _brute_force(g, seeds):
    """Straight Python sum over every live-edge world."""
    probs = np.zeros(g.n)
    for bits in itertools.product([0, 1], repeat=g.m):
        w = np.prod([p if b else 1 - p for b, p in zip(bits, g.prob)])
        reach = LiveEdgeSample(np.array(bits, dtype=bool)).reachable(g, seeds)
        probs += w * reach
    return probs


@given(graph_and_seeds(max_n=6, max_m=8))
def test_enumeration_matches_python_reference(case):
    g, seeds = case
    np.testing.assert_allclose(exact_influence_enumeration(g, seeds).probs, _brute_force(g, seeds), atol=1e-12)


@given(graphs(max_n=6, max_m=10), st.data())
def test_exact_sigma_monotone(g, data):
    big = data.draw(st.lists(st.integers(0, g.n - 1), unique=True, min_size=1))
    small = data.draw(st.lists(st.sampled_from(big), unique=True))
    assert exact_influence_enumeration(g, small).sigma <= exact_influence_enumeration(g, big).sigma + 1e-12


@settings(max_examples=20)
@given(graph_and_seeds(max_n=6, max_m=10), st.integers(0, 2**63))
def test_mc_within_bounds_and_seeded(case, master):
    g, seeds = case
    a = estimate_influence_mc(g, seeds, 300, master)
    b = estimate_influence_mc(g, seeds, 300, master)
    assert a == b
    assert len(seeds) <= a.mean <= g.n


def test_mc_thread_count_independent(monkeypatch):
    g = random_digraph(np.random.default_rng(5), 30, 120, 0.0, 0.4)
    results = set()
    for threads in ("1", "3", "7"):
        monkeypatch.setenv("IMKIT_THREADS", threads)
        results.add(estimate_influence_mc(g, [0, 5], 1001, 99).mean)
    assert len(results) == 1


def test_invalid_thread_env(monkeypatch):
    monkeypatch.setenv("IMKIT_THREADS", "zero")
    with pytest.raises(ValidationError):
        estimate_influence_mc(chain_graph(2, 0.5), [0], 10)
