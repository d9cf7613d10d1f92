"""Ground-truth influence: Monte-Carlo cascades and exact live-edge enumeration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numba import njit, prange

from imkit import _parallel
from imkit._rng import arc_uniform, as_seed, substream_key
from imkit.errors import CapacityError, ValidationError
from imkit.graph import Graph

ENUMERATION_MAX_ARCS = 25
DEFAULT_REPS = 5000


@dataclass(frozen=True)
class LiveEdgeSample:
    """One live-edge world: ``included[a]`` says whether arc ``a`` is live."""

    included: np.ndarray

    @classmethod
    def draw(cls, g: Graph, master_seed: int, r: int) -> "LiveEdgeSample":
        """The world used by replication ``r`` of :func:`estimate_influence_mc`."""
        return cls(_live_mask(g.prob, as_seed(master_seed), r))

    def reachable(self, g: Graph, seeds: Iterable[int]) -> np.ndarray:
        if self.included.shape != (g.m,):
            raise ValidationError("mask length must equal the arc count")
        mark = g.seed_mask(seeds)
        stack = list(np.flatnonzero(mark))
        while stack:
            v = stack.pop()
            for a in range(g.out_ptr[v], g.out_ptr[v + 1]):
                w = g.dst[a]
                if self.included[a] and not mark[w]:
                    mark[w] = True
                    stack.append(w)
        return mark


@dataclass(frozen=True)
class SpreadEstimate:
    mean: float
    replications: int
    std_error: float


@dataclass(frozen=True)
class Substream:
    """Replication ``index`` of the stream family keyed by ``master_seed``."""

    master_seed: int
    index: int

    def key(self) -> np.uint64:
        return np.uint64(_key(as_seed(self.master_seed), self.index))


@dataclass(frozen=True)
class ExactInfluence:
    probs: np.ndarray
    sigma: float


@njit(cache=True)
def _key(master, r):
    return substream_key(master, r)


@njit(cache=True)
def _live_mask(prob, master, r):
    key = substream_key(master, r)
    out = np.empty(prob.size, dtype=np.bool_)
    for a in range(prob.size):
        out[a] = arc_uniform(key, a) < prob[a]
    return out


@njit(cache=True)
def reach_count(out_ptr, dst, prob, seeds, key, mark, stamp, queue):
    """Size of the set reachable from ``seeds`` over live arcs of world ``key``.

    ``mark[v] == stamp`` flags visited vertices; callers bump ``stamp`` between
    calls instead of clearing ``mark``.
    """
    tail = 0
    for s in seeds:
        if mark[s] != stamp:
            mark[s] = stamp
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        for a in range(out_ptr[v], out_ptr[v + 1]):
            w = dst[a]
            if mark[w] == stamp:
                continue
            if arc_uniform(key, a) < prob[a]:
                mark[w] = stamp
                queue[tail] = w
                tail += 1
    return tail


@njit(cache=True, parallel=True)
def _mc_sums(out_ptr, dst, prob, n, seeds, master, reps, n_chunks):
    sums = np.zeros(n_chunks, dtype=np.int64)
    sq = np.zeros(n_chunks, dtype=np.int64)
    for c in prange(n_chunks):
        lo = reps * c // n_chunks
        hi = reps * (c + 1) // n_chunks
        mark = np.zeros(n, dtype=np.int64)
        queue = np.empty(n, dtype=np.int64)
        s = 0
        q = 0
        for r in range(lo, hi):
            cnt = reach_count(out_ptr, dst, prob, seeds, substream_key(master, r), mark, r + 1, queue)
            s += cnt
            q += cnt * cnt
        sums[c] = s
        sq[c] = q
    return sums.sum(), sq.sum()


def simulate_icm(g: Graph, seeds: Iterable[int], rng) -> int:
    """Run one independent-cascade diffusion and return the number of active vertices.

    ``rng`` is either a :class:`Substream` or a ``numpy.random.Generator``; a
    generator contributes one 64-bit draw that keys the cascade's arc trials.
    """
    seeds = g.check_vertices(seeds)
    if seeds.size == 0:
        return 0
    if isinstance(rng, Substream):
        key = rng.key()
    elif isinstance(rng, np.random.Generator):
        key = np.uint64(rng.integers(0, 2**64, dtype=np.uint64))
    else:
        raise ValidationError("rng must be a Substream or numpy Generator")
    mark = np.zeros(g.n, dtype=np.int64)
    queue = np.empty(g.n, dtype=np.int64)
    return int(reach_count(g.out_ptr, g.dst, g.prob, seeds, key, mark, 1, queue))


def estimate_influence_mc(
    g: Graph, seeds: Iterable[int], reps: int = DEFAULT_REPS, master_seed: int = 0
) -> SpreadEstimate:
    """Mean cascade size over ``reps`` replications.

    Replication ``r`` is exactly ``simulate_icm(g, seeds, Substream(master_seed, r))``,
    so the result is bit-identical for any thread count.
    """
    reps = int(reps)
    if reps < 1:
        raise ValidationError("replication count must be >= 1")
    seeds = g.check_vertices(seeds)
    if seeds.size == 0:
        return SpreadEstimate(0.0, reps, 0.0)
    total, total_sq = _mc_sums(
        g.out_ptr, g.dst, g.prob, g.n, seeds, as_seed(master_seed), reps, _parallel.chunks()
    )
    mean = total / reps
    if reps > 1:
        var = max(0.0, (total_sq - total * total / reps) / (reps - 1))
        se = math.sqrt(var / reps)
    else:
        se = 0.0
    return SpreadEstimate(float(mean), reps, float(se))


@njit(cache=True)
def _enumerate(out_ptr, dst, prob, n, seeds):
    m = prob.size
    acc = np.zeros(n, dtype=np.float64)
    mark = np.zeros(n, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for mask in range(1 << m):
        w = 1.0
        for a in range(m):
            if (mask >> a) & 1:
                w *= prob[a]
            else:
                w *= 1.0 - prob[a]
        if w == 0.0:
            continue
        stamp = mask + 1
        tail = 0
        for s in seeds:
            if mark[s] != stamp:
                mark[s] = stamp
                queue[tail] = s
                tail += 1
        head = 0
        while head < tail:
            v = queue[head]
            head += 1
            for a in range(out_ptr[v], out_ptr[v + 1]):
                if (mask >> a) & 1 and mark[dst[a]] != stamp:
                    mark[dst[a]] = stamp
                    queue[tail] = dst[a]
                    tail += 1
        for i in range(tail):
            acc[queue[i]] += w
    return acc


def exact_influence_enumeration(g: Graph, seeds: Iterable[int]) -> ExactInfluence:
    """Exact per-vertex activation probabilities by summing over all 2^m live-edge worlds."""
    if g.m > ENUMERATION_MAX_ARCS:
        raise CapacityError(
            f"exact enumeration supports at most {ENUMERATION_MAX_ARCS} arcs, graph has {g.m}"
        )
    seeds = g.check_vertices(seeds)
    if seeds.size == 0:
        return ExactInfluence(np.zeros(g.n), 0.0)
    probs = _enumerate(g.out_ptr, g.dst, g.prob, g.n, seeds)
    np.minimum(probs, 1.0, out=probs)
    probs[seeds] = 1.0
    return ExactInfluence(probs, float(probs.sum()))
