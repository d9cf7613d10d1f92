"""Comparison selectors: Monte-Carlo greedy hill climbing (CELF) and top out-degree."""

from __future__ import annotations

import numpy as np
from numba import njit, prange

from imkit import _parallel
from imkit._rng import arc_uniform, as_seed, substream_key
from imkit.errors import ValidationError
from imkit.graph import Graph
from imkit.oracle import DEFAULT_REPS, reach_count
from imkit.selection import SeedSelectionResult, Stopwatch, celf_greedy, check_k, eager_greedy

DEFAULT_K = 50


@njit(cache=True, parallel=True)
def _mc_gains(out_ptr, dst, prob, n, base_seeds, candidates, master, reps, n_chunks):
    """Summed cascade sizes of ``base_seeds`` and per-candidate summed extra reach.

    Every candidate sees the same ``reps`` live-edge worlds. The extra reach of
    ``w`` in a world is the part of its reachable set outside the base reach,
    which is closed under live arcs, so the BFS can stop at base vertices.
    """
    out = np.zeros(candidates.size, dtype=np.int64)
    base_tot = np.zeros(n_chunks, dtype=np.int64)
    for c in prange(n_chunks):
        lo = candidates.size * c // n_chunks
        hi = candidates.size * (c + 1) // n_chunks
        base_mark = np.zeros(n, dtype=np.int64)
        mark = np.zeros(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        stamp = 0
        bt = 0
        for r in range(reps):
            key = substream_key(master, r)
            bt += reach_count(out_ptr, dst, prob, base_seeds, key, base_mark, r + 1, queue)
            for i in range(lo, hi):
                w = candidates[i]
                if base_mark[w] == r + 1:
                    continue
                stamp += 1
                out[i] += _extra_reach(out_ptr, dst, prob, w, key, base_mark, r + 1, mark, stamp, queue)
        base_tot[c] = bt
    return base_tot[0], out


@njit(cache=True)
def _extra_reach(out_ptr, dst, prob, w, key, base_mark, base_stamp, mark, stamp, queue):
    mark[w] = stamp
    queue[0] = w
    tail = 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        for a in range(out_ptr[v], out_ptr[v + 1]):
            x = dst[a]
            if mark[x] == stamp or base_mark[x] == base_stamp:
                continue
            if arc_uniform(key, a) < prob[a]:
                mark[x] = stamp
                queue[tail] = x
                tail += 1
    return tail


def greedy_mc_select(
    g: Graph, k: int = DEFAULT_K, reps: int = DEFAULT_REPS, master_seed: int = 0, lazy: bool = True
) -> SeedSelectionResult:
    """Greedy hill climbing with Monte-Carlo marginals.

    All rounds and candidates share the same ``reps`` live-edge worlds (common
    random numbers). The sample-average spread is then exactly monotone and
    submodular, so CELF (``lazy=True``) picks the same seeds as the exhaustive
    loop. Marginals are compared as integer totals, which keeps ties exact.
    """
    k = check_k(k)
    reps = int(reps)
    if reps < 1:
        raise ValidationError("replication count must be >= 1")
    master = as_seed(master_seed)
    n_chunks = _parallel.chunks()
    state = {"base": 0}

    def totals(seeds, candidates):
        base, extra = _mc_gains(g.out_ptr, g.dst, g.prob, g.n, np.asarray(seeds, dtype=np.int64),
                                np.asarray(candidates, dtype=np.int64), master, reps, n_chunks)
        return int(base), extra

    def round_gains(seeds, candidates):
        return totals(seeds, candidates)[1]

    def gain_of(seeds, w):
        return int(totals(seeds, [w])[1][0])

    def commit(seeds, w, gain):
        state["base"] += int(gain)
        return state["base"] / reps

    with Stopwatch() as sw:
        if lazy:
            seeds, est, gains, evals = celf_greedy(g.n, k, lambda c: round_gains([], c), gain_of, commit)
        else:
            seeds, est, gains, evals = eager_greedy(g.n, k, round_gains, commit)
    return SeedSelectionResult(
        seeds=seeds,
        marginal_estimates=est,
        wall_time=sw.elapsed,
        algorithm="greedy-mc",
        config={"k": k, "reps": reps, "master_seed": int(master_seed), "lazy": bool(lazy)},
        gains=[int(x) / reps for x in gains],
        evaluations=evals,
    )


def degree_select(g: Graph, k: int) -> SeedSelectionResult:
    """Top-``k`` out-degree vertices, ties to the lowest id."""
    k = check_k(k)
    with Stopwatch() as sw:
        order = np.lexsort((np.arange(g.n), -g.out_degree()))
        seeds = [int(v) for v in order[: min(k, g.n)]]
    return SeedSelectionResult(seeds=seeds, marginal_estimates=[], wall_time=sw.elapsed,
                               algorithm="degree", config={"k": k})
