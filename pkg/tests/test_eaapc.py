import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import graphs
from imkit.aapc import activation_probabilities
from imkit.eaapc import (
    PROCESSED,
    UNPROCESSED,
    bfs_propagation,
    combine_multi_seed,
    eaapc_select,
    max_level,
    resolve_max_level,
    single_seed_probs,
)
from imkit.errors import ValidationError
from imkit.fixtures import (
    chain_graph,
    disjoint_stars,
    figure2_graph,
    random_out_forest,
    sparse_random_digraph,
    star_graph,
)
from imkit.graph import Graph
from imkit.oracle import exact_influence_enumeration


@pytest.mark.parametrize("p, eps, want", [(0.1, 1e-3, 3), (0.01, 1e-6, 3), (0.5, 0.01, 7), (0.5, 0.5, 1)])
def test_max_level_examples(p, eps, want):
    assert max_level(p, eps) == want


@given(st.floats(0.001, 0.999), st.floats(1e-9, 0.999))
def test_max_level_is_smallest_exponent(p, eps):
    L = max_level(p, eps)
    assert p**L <= eps * (1 + 1e-9)
    if L > 1:
        assert p ** (L - 1) > eps * (1 - 1e-9)


@pytest.mark.parametrize("p, eps", [(0.0, 0.1), (1.0, 0.1), (0.5, 0.0), (0.5, 1.0)])
def test_max_level_domain(p, eps):
    with pytest.raises(ValidationError):
        max_level(p, eps)


def test_resolve_max_level_degenerate():
    assert resolve_max_level(Graph.from_arcs(3, [0], [1], 0.0)) == 1
    assert resolve_max_level(chain_graph(6, 1.0)) == 6
    assert resolve_max_level(chain_graph(6, 0.1), 1e-3) == 3


def _independent_eq6(g, u, L):
    """Reference: levels from networkx-free BFS, then one pass over arcs by level."""
    level = {u: 0}
    frontier = [u]
    while frontier:
        nxt = []
        for v in frontier:
            for w, _ in g.out_neighbors(v):
                if w not in level:
                    level[w] = level[v] + 1
                    nxt.append(w)
        frontier = nxt
    s = np.zeros(g.n)
    s[u] = 1.0
    q_miss = np.ones(g.n)
    for lev in range(L + 1):
        for v in [x for x, lv in level.items() if lv == lev]:
            if lev >= L:
                continue
            for w, p in g.out_neighbors(v):
                if w == u:
                    continue
                f = 1 - p * s[v]
                if level[w] == lev + 1:
                    s[w] = 1 - (1 - s[w]) * f
                else:
                    q_miss[w] *= f
    probs = 1 - (1 - s) * q_miss
    probs[u] = 1.0
    return probs


def test_figure2_hand_trace():
    g = figure2_graph()
    probs = single_seed_probs(g, g.index_of(1), 6)
    want = {1: 1.0, 2: 0.1009, 3: 0.01099, 4: 0.1, 5: 0.01}
    for lab, v in want.items():
        assert probs[g.index_of(lab)] == pytest.approx(v, abs=1e-12)
    np.testing.assert_allclose(probs, _independent_eq6(g, 0, 6), atol=1e-15)


def test_state_snapshot_figure2():
    g = figure2_graph()
    st_ = bfs_propagation(g, 0, 6)
    assert st_.level.tolist() == [0, 1, 2, 1, 2]
    assert np.all(st_.state == PROCESSED)
    assert np.all(1 - st_.q_comp >= 1 - st_.s_comp)


def test_level_cutoff_finalizes_but_does_not_expand():
    g = chain_graph(5, 0.5)
    st_ = bfs_propagation(g, 0, 2)
    assert st_.state.tolist()[:4] == [PROCESSED, PROCESSED, PROCESSED, UNPROCESSED]
    np.testing.assert_allclose(st_.probs, [1, 0.5, 0.25, 0, 0])


def test_max_level_zero():
    probs = single_seed_probs(figure2_graph(), 0, 0)
    assert probs.tolist() == [1, 0, 0, 0, 0]


def test_blocked_vertices():
    g = figure2_graph()
    probs = single_seed_probs(g, 0, 6, blocked=[g.index_of(2)])
    assert probs[g.index_of(2)] == 0.0
    assert probs[g.index_of(3)] == pytest.approx(0.001, abs=1e-15)
    with pytest.raises(ValidationError):
        single_seed_probs(g, 0, 6, blocked=[0])
    with pytest.raises(ValidationError):
        single_seed_probs(g, 9, 6)


def test_out_forest_matches_exact(rng):
    for _ in range(30):
        g = random_out_forest(rng, 14)
        if g.m > 25:
            continue
        root = int(rng.choice([v for v in range(g.n) if not g.in_neighbors(v)]))
        exact = exact_influence_enumeration(g, [root]).probs
        np.testing.assert_allclose(single_seed_probs(g, root, g.n), exact, atol=1e-12, rtol=0)


@settings(max_examples=80)
@given(graphs(max_n=10, max_m=30), st.data())
def test_bfs_matches_reference_and_bounds(g, data):
    u = data.draw(st.integers(0, g.n - 1))
    L = data.draw(st.integers(0, g.n))
    st_ = bfs_propagation(g, u, L)
    np.testing.assert_allclose(st_.probs, _independent_eq6(g, u, L), atol=1e-12)
    assert np.all((st_.probs >= 0) & (st_.probs <= 1))
    assert np.all(1 - st_.q_comp >= 1 - st_.s_comp - 1e-15)
    assert st_.level[u] == 0


def test_chain_below_aapc():
    g = chain_graph(6, 0.6)
    e = single_seed_probs(g, 0, 10)
    a = activation_probabilities(g, [0], 10).probtill[:, -1]
    assert np.all(e <= a + 1e-12)


def test_combine_examples():
    assert combine_multi_seed([0.3], [0.5])[0] == pytest.approx(0.65)
    np.testing.assert_array_equal(combine_multi_seed(np.zeros(3), [0.1, 0.2, 0.3]), [0.1, 0.2, 0.3])
    np.testing.assert_array_equal(combine_multi_seed(np.ones(2), [0.1, 0.9]), [1, 1])
    with pytest.raises(ValidationError):
        combine_multi_seed(np.zeros(2), np.zeros(3))
    with pytest.raises(ValidationError):
        combine_multi_seed([1.2], [0.1])


@given(st.lists(st.lists(st.floats(0, 1), min_size=6, max_size=6), min_size=5, max_size=5))
def test_combine_order_invariant(vectors):
    vectors = [np.array(v) for v in vectors]
    ref = None
    for perm in itertools.permutations(range(5)):
        acc = np.zeros(6)
        for i in perm:
            acc = combine_multi_seed(acc, vectors[i])
        ref = acc if ref is None else ref
        np.testing.assert_allclose(acc, ref, atol=1e-12, rtol=0)
    np.testing.assert_allclose(ref, 1 - np.prod([1 - v for v in vectors], axis=0), atol=1e-12)


def test_star_and_disjoint_stars():
    assert eaapc_select(star_graph(5, 0.5), 1).seeds == [0]
    g, (c1, c2) = disjoint_stars([6, 4], 0.5)
    res = eaapc_select(g, 2, max_level=3)
    assert res.seeds == [c1, c2]
    assert res.marginal_estimates[-1] == pytest.approx(7.0)


def test_figure2_first_pick():
    g = figure2_graph()
    assert eaapc_select(g, 1).seeds == [g.index_of(1)]


def test_selection_matches_explicit_fold(rng):
    g = sparse_random_digraph(rng, 60, 3, 0.0, 0.3)
    L = 3
    res = eaapc_select(g, 4, max_level=L)
    cum = np.zeros(g.n)
    blocked = []
    for s in res.seeds:
        cands = [u for u in range(g.n) if u not in blocked]
        scores = [combine_multi_seed(cum, single_seed_probs(g, u, L, blocked)).sum() for u in cands]
        assert cands[int(np.argmax(scores))] == s
        cum = combine_multi_seed(cum, single_seed_probs(g, s, L, blocked))
        blocked.append(s)
    assert res.marginal_estimates[-1] == pytest.approx(cum.sum(), abs=1e-9)
    assert np.all(cum[res.seeds] == 1.0)


def test_select_validation():
    with pytest.raises(ValidationError):
        eaapc_select(chain_graph(3, 0.5), 0)
