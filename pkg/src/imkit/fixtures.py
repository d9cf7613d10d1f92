"""Small named graphs and random generators used by tests, scripts and the CLI."""

from __future__ import annotations

import numpy as np

from imkit.errors import ValidationError
from imkit.graph import Graph

# four-vertex fixture with one cycle: u -> v -> w -> x -> v
FIGURE1_NAMES = ("u", "v", "w", "x")
FIGURE2_ARCS = ((1, 2), (2, 3), (3, 2), (1, 4), (4, 5), (5, 3))
FIGURE2_P = 0.1


def _labelled(labels, arcs, p) -> Graph:
    labels = list(labels)
    idx = {lab: i for i, lab in enumerate(labels)}
    src = [idx[a] for a, _ in arcs]
    dst = [idx[b] for _, b in arcs]
    return Graph.from_arcs(len(labels), src, dst, p, labels)


def figure1_graph(p: float) -> Graph:
    """``u->v, v->w, w->x, x->v`` with uniform ``p``; vertices 0..3 are u, v, w, x."""
    if not 0.0 < p <= 1.0:
        raise ValidationError(f"p must be in (0, 1], got {p}")
    return Graph.from_arcs(4, [0, 1, 2, 3], [1, 2, 3, 1], p)


def figure2_graph(p: float = FIGURE2_P) -> Graph:
    """Five-vertex graph (labels 1..5) with the 2 <-> 3 cycle; reproduces the
    accuracy table at ``p = 0.1``."""
    return _labelled(range(1, 6), FIGURE2_ARCS, p)


def chain_graph(n: int, p: float) -> Graph:
    return Graph.from_arcs(n, np.arange(n - 1), np.arange(1, n), p)


def star_graph(leaves: int, p: float) -> Graph:
    """Center 0 with arcs to 1..leaves."""
    return Graph.from_arcs(leaves + 1, np.zeros(leaves, dtype=int), np.arange(1, leaves + 1), p)


def disjoint_stars(leaf_counts, p: float) -> tuple[Graph, list[int]]:
    """Stars laid out one after another; returns the graph and the center ids."""
    src, dst, centers = [], [], []
    base = 0
    for leaves in leaf_counts:
        centers.append(base)
        src += [base] * leaves
        dst += list(range(base + 1, base + 1 + leaves))
        base += leaves + 1
    return Graph.from_arcs(base, src, dst, p), centers


def preferential_attachment_graph(n: int, attach: int, p: float, seed: int = 0) -> Graph:
    """Barabasi-Albert graph with every undirected edge expanded into two arcs."""
    import networkx as nx  # deferred: costs ~0.2 s of CLI startup

    und = nx.barabasi_albert_graph(n, attach, seed=seed)
    edges = np.asarray(sorted(und.edges()), dtype=np.int64).reshape(-1, 2)
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    return Graph.from_arcs(n, src, dst, p)


def random_digraph(rng: np.random.Generator, n: int, m: int, p_low=0.0, p_high=1.0) -> Graph:
    """``m`` distinct random arcs (no self-loops) with probabilities uniform in [p_low, p_high]."""
    pairs = np.array([(a, b) for a in range(n) for b in range(n) if a != b], dtype=np.int64)
    m = min(m, len(pairs))
    pick = pairs[rng.choice(len(pairs), size=m, replace=False)] if m else np.zeros((0, 2), dtype=np.int64)
    prob = rng.uniform(p_low, p_high, size=m)
    return Graph.from_arcs(n, pick[:, 0], pick[:, 1], prob)


def random_out_forest(rng: np.random.Generator, n: int, p_low=0.0, p_high=1.0, root_prob=0.3) -> Graph:
    """Every vertex has at most one parent with a smaller id, so paths are unique."""
    src, dst = [], []
    for v in range(1, n):
        if rng.random() >= root_prob:
            src.append(int(rng.integers(0, v)))
            dst.append(v)
    prob = rng.uniform(p_low, p_high, size=len(src))
    return Graph.from_arcs(n, src, dst, prob)


def sparse_random_digraph(rng: np.random.Generator, n: int, avg_out: float, p_low: float, p_high: float) -> Graph:
    """Erdos-Renyi style digraph for mid-size fuzzing (duplicates dropped by the constructor)."""
    m = int(round(avg_out * n))
    src = rng.integers(0, n, size=m)
    dst = rng.integers(0, n, size=m)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    return Graph.from_arcs(n, src, dst, rng.uniform(p_low, p_high, size=src.size))


def is_out_forest(g: Graph) -> bool:
    """True when every vertex has in-degree <= 1 and there is no directed cycle."""
    if g.m and np.diff(g.in_ptr).max() > 1:
        return False
    import networkx as nx

    dg = nx.DiGraph()
    dg.add_nodes_from(range(g.n))
    dg.add_edges_from(zip(g.src.tolist(), g.dst.tolist()))
    return nx.is_directed_acyclic_graph(dg)
