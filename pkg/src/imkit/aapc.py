"""Analytic activation-probability computation (AAPC).

Per-step activation probabilities follow the independent-cascade recurrence

    at(v, t)   = (1 - till(v, t-1)) * (1 - prod_{(u,v)} (1 - pp(u,v) * at(u, t-1)))
    till(v, t) = 1 - prod_{tau <= t} (1 - at(v, tau))

with ``at(v, 0) = till(v, 0) = [v in S]``. The influence estimate of ``S`` is
``sum_v till(v, T)``. Also here: the greedy selector built on that estimate and
the steady-state fixed point it is compared against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numba import njit, prange

from imkit import _parallel
from imkit.errors import ValidationError
from imkit.graph import Graph
from imkit.selection import SeedSelectionResult, Stopwatch, celf_greedy, check_k, eager_greedy

DEFAULT_T = 6


@dataclass(frozen=True)
class ProbTable:
    """``probat[v, t]`` and ``probtill[v, t]`` for ``t = 0..T``."""

    T: int
    probat: np.ndarray
    probtill: np.ndarray

    @property
    def n(self) -> int:
        return self.probat.shape[0]


@dataclass(frozen=True)
class SteadyState:
    probs: np.ndarray
    iterations: int
    residual: float
    converged: bool


@njit(cache=True)
def _fill_table(in_ptr, in_src, in_prob, seed_mask, T, probat, probtill):
    n = seed_mask.size
    comp = np.empty(n)
    for v in range(n):
        x = 1.0 if seed_mask[v] else 0.0
        probat[v, 0] = x
        probtill[v, 0] = x
        comp[v] = 1.0 - x
    for t in range(1, T + 1):
        for v in range(n):
            miss = 1.0
            for a in range(in_ptr[v], in_ptr[v + 1]):
                miss *= 1.0 - in_prob[a] * probat[in_src[a], t - 1]
            at = comp[v] * (1.0 - miss)
            comp[v] *= 1.0 - at
            probat[v, t] = at
            probtill[v, t] = 1.0 - comp[v]


@njit(cache=True)
def _gain_one(in_ptr, in_src, in_prob, seed_mask, base_till, w, T, prev, cur, comp):
    """``sum_v till_{S+w}(v, T) - till_S(v, T)`` with O(n) scratch."""
    n = seed_mask.size
    for v in range(n):
        x = 1.0 if (seed_mask[v] or v == w) else 0.0
        prev[v] = x
        comp[v] = 1.0 - x
    for t in range(1, T + 1):
        for v in range(n):
            miss = 1.0
            for a in range(in_ptr[v], in_ptr[v + 1]):
                miss *= 1.0 - in_prob[a] * prev[in_src[a]]
            at = comp[v] * (1.0 - miss)
            comp[v] *= 1.0 - at
            cur[v] = at
        for v in range(n):
            prev[v] = cur[v]
    gain = 0.0
    for v in range(n):
        gain += (1.0 - comp[v]) - base_till[v]
    return gain


@njit(cache=True, parallel=True)
def _gain_batch(in_ptr, in_src, in_prob, seed_mask, base_till, candidates, T, n_chunks):
    n = seed_mask.size
    out = np.empty(candidates.size)
    for c in prange(n_chunks):
        lo = candidates.size * c // n_chunks
        hi = candidates.size * (c + 1) // n_chunks
        prev = np.empty(n)
        cur = np.empty(n)
        comp = np.empty(n)
        for i in range(lo, hi):
            out[i] = _gain_one(in_ptr, in_src, in_prob, seed_mask, base_till, candidates[i], T, prev, cur, comp)
    return out


def activation_probabilities(g: Graph, seeds: Iterable[int], T: int = DEFAULT_T) -> ProbTable:
    T = int(T)
    if T < 0:
        raise ValidationError("T must be >= 0")
    mask = g.seed_mask(seeds)
    probat = np.empty((g.n, T + 1))
    probtill = np.empty((g.n, T + 1))
    _fill_table(g.in_ptr, g.in_src, g.in_prob, mask, T, probat, probtill)
    return ProbTable(T, probat, probtill)


def influence_estimate(table: ProbTable) -> float:
    return float(table.probtill[:, table.T].sum())


def aapc_select(g: Graph, k: int, T: int = DEFAULT_T, lazy: bool = False) -> SeedSelectionResult:
    """Greedy seed selection on the AAPC estimate.

    Each candidate costs a full T-step sweep of the graph. ``lazy`` switches to
    CELF re-evaluation, which returns the same seeds as the exhaustive loop as
    long as the estimate is submodular (true in the small-probability regime;
    the estimate is not submodular in general at high probabilities).
    """
    k = check_k(k)
    T = int(T)
    if T < 1:
        raise ValidationError("T must be >= 1")
    seed_mask = np.zeros(g.n, dtype=np.bool_)
    base = {"till": np.zeros(g.n), "total": 0.0}
    n_chunks = _parallel.chunks()

    def gains_for(candidates):
        return _gain_batch(g.in_ptr, g.in_src, g.in_prob, seed_mask, base["till"],
                           np.asarray(candidates, dtype=np.int64), T, n_chunks)

    def gain_of(seeds, w):
        n = g.n
        return _gain_one(g.in_ptr, g.in_src, g.in_prob, seed_mask, base["till"], w, T,
                         np.empty(n), np.empty(n), np.empty(n))

    def commit(seeds, w, gain):
        seed_mask[w] = True
        table = activation_probabilities(g, np.flatnonzero(seed_mask), T)
        base["till"] = np.ascontiguousarray(table.probtill[:, T])
        base["total"] = float(base["till"].sum())
        return base["total"]

    with Stopwatch() as sw:
        if lazy:
            seeds, est, gains, evals = celf_greedy(g.n, k, gains_for, gain_of, commit)
        else:
            seeds, est, gains, evals = eager_greedy(g.n, k, lambda s, c: gains_for(c), commit)
    return SeedSelectionResult(
        seeds=seeds,
        marginal_estimates=est,
        wall_time=sw.elapsed,
        algorithm="aapc",
        config={"k": k, "T": T, "lazy": bool(lazy)},
        gains=[float(x) for x in gains],
        evaluations=evals,
    )


@njit(cache=True)
def _steady_state(in_ptr, in_src, in_prob, seed_mask, tol, max_iter):
    n = seed_mask.size
    pi = np.empty(n)
    nxt = np.empty(n)
    for v in range(n):
        pi[v] = 1.0 if seed_mask[v] else 0.0
    it = 0
    resid = np.inf
    while it < max_iter:
        it += 1
        resid = 0.0
        for v in range(n):
            if seed_mask[v]:
                nxt[v] = 1.0
                continue
            miss = 1.0
            for a in range(in_ptr[v], in_ptr[v + 1]):
                miss *= 1.0 - in_prob[a] * pi[in_src[a]]
            nxt[v] = 1.0 - miss
            d = abs(nxt[v] - pi[v])
            if d > resid:
                resid = d
        for v in range(n):
            pi[v] = nxt[v]
        if resid < tol:
            break
    return pi, it, resid


def steady_state_probabilities(
    g: Graph, seeds: Iterable[int], tol: float = 1e-9, max_iter: int = 10_000
) -> SteadyState:
    """Jacobi iteration of ``pi(v) = 1 - prod_{(u,v)} (1 - pp(u,v) pi(u))``, seeds pinned at 1."""
    if not tol > 0:
        raise ValidationError("tol must be > 0")
    if max_iter < 1:
        raise ValidationError("max_iter must be >= 1")
    mask = g.seed_mask(seeds)
    pi, it, resid = _steady_state(g.in_ptr, g.in_src, g.in_prob, mask, float(tol), int(max_iter))
    return SteadyState(pi, int(it), float(resid), bool(resid < tol))
