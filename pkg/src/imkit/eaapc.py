"""Efficient AAPC: level-bounded BFS over shortest and Q-path contributions.

For a single candidate ``u`` a BFS assigns levels. An arc ``(v, w)`` scanned
from the dequeued vertex ``v`` carries ``pp(v, w) * s(v)``, where ``s(v)`` is
the shortest-path activation probability of ``v`` (final once ``v`` is
dequeued). If ``w`` sits one level below ``v`` the arc is a shortest-path arc
and feeds ``s(w)``; any other arc feeds only the Q-path probability of ``w``:

    P[q(u, w)] = 1 - prod_{(v, w) scanned} (1 - pp(v, w) * s(v))

Previously chosen seeds are blocked: never entered, never updated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from numba import njit, prange

from imkit import _parallel
from imkit.errors import ValidationError
from imkit.graph import Graph
from imkit.selection import SeedSelectionResult, Stopwatch, check_k

DEFAULT_EPS = 1e-3

UNPROCESSED, IN_PROCESS, PROCESSED = 0, 1, 2


@dataclass(frozen=True)
class BfsPropagationState:
    """Dense snapshot of one single-seed BFS. ``level`` is -1 for unreached vertices."""

    state: np.ndarray
    level: np.ndarray
    s_comp: np.ndarray
    q_comp: np.ndarray

    @property
    def probs(self) -> np.ndarray:
        return 1.0 - self.q_comp


def max_level(p_avg: float, eps: float) -> int:
    """Smallest ``L`` with ``p_avg ** L <= eps``, i.e. ``ceil(log_{p_avg} eps)``."""
    if not 0.0 < p_avg < 1.0:
        raise ValidationError(f"p_avg must be in (0, 1), got {p_avg}")
    if not 0.0 < eps < 1.0:
        raise ValidationError(f"eps must be in (0, 1), got {eps}")
    ratio = math.log(eps) / math.log(p_avg)
    nearest = round(ratio)
    # 0.1**3 vs 1e-3 and friends: treat float noise around an integer as that integer
    if abs(ratio - nearest) <= 1e-9 * max(1.0, abs(ratio)):
        return max(1, int(nearest))
    return max(1, math.ceil(ratio))


def resolve_max_level(g: Graph, eps: float = DEFAULT_EPS) -> int:
    """Depth cutoff from the graph's mean arc probability.

    Degenerate means fall outside the formula's domain: all-zero graphs need
    one level, all-one graphs an unbounded search (``n`` levels).
    """
    p = g.mean_prob()
    if p <= 0.0:
        return 1
    if p >= 1.0:
        return max(1, g.n)
    return max_level(p, eps)


@njit(cache=True)
def _bfs(out_ptr, dst, prob, u, L, blocked, seen, done, level, s_comp, q_extra, queue, stamp):
    seen[u] = stamp
    level[u] = 0
    s_comp[u] = 0.0
    q_extra[u] = 1.0
    queue[0] = u
    tail = 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        sv = 1.0 - s_comp[v]
        if level[v] < L:
            nl = level[v] + 1
            for a in range(out_ptr[v], out_ptr[v + 1]):
                w = dst[a]
                if blocked[w]:
                    continue
                f = 1.0 - prob[a] * sv
                if seen[w] != stamp:
                    seen[w] = stamp
                    level[w] = nl
                    s_comp[w] = f
                    q_extra[w] = 1.0
                    queue[tail] = w
                    tail += 1
                elif done[w] != stamp and level[w] == nl:
                    s_comp[w] *= f
                else:
                    q_extra[w] *= f
        done[v] = stamp
    return tail


@njit(cache=True, parallel=True)
def _gain_batch(out_ptr, dst, prob, n, L, blocked, cum, candidates, n_chunks):
    out = np.empty(candidates.size)
    for c in prange(n_chunks):
        lo = candidates.size * c // n_chunks
        hi = candidates.size * (c + 1) // n_chunks
        seen = np.zeros(n, dtype=np.int64)
        done = np.zeros(n, dtype=np.int64)
        level = np.empty(n, dtype=np.int64)
        s_comp = np.empty(n)
        q_extra = np.empty(n)
        queue = np.empty(n, dtype=np.int64)
        for i in range(lo, hi):
            stamp = i + 1
            tail = _bfs(out_ptr, dst, prob, candidates[i], L, blocked, seen, done, level,
                        s_comp, q_extra, queue, stamp)
            gain = 0.0
            for j in range(tail):
                v = queue[j]
                gain += (1.0 - cum[v]) * (1.0 - s_comp[v] * q_extra[v])
            out[i] = gain
    return out


def _blocked_mask(g: Graph, u: int, blocked: Iterable[int] | np.ndarray | None) -> np.ndarray:
    if not 0 <= u < g.n:
        raise ValidationError(f"vertex {u} out of range 0..{g.n - 1}")
    if blocked is None:
        mask = np.zeros(g.n, dtype=np.bool_)
    elif isinstance(blocked, np.ndarray) and blocked.dtype == np.bool_:
        mask = blocked
    else:
        mask = g.seed_mask(blocked)
    if mask[u]:
        raise ValidationError(f"candidate {u} is blocked")
    return mask


def bfs_propagation(
    g: Graph, u: int, max_level: int, blocked: Iterable[int] | None = None
) -> BfsPropagationState:
    u = int(u)
    if max_level < 0:
        raise ValidationError("max_level must be >= 0")
    mask = _blocked_mask(g, u, blocked)
    n = g.n
    seen = np.zeros(n, dtype=np.int64)
    done = np.zeros(n, dtype=np.int64)
    level = np.full(n, -1, dtype=np.int64)
    s_comp = np.ones(n)
    q_extra = np.ones(n)
    queue = np.empty(n, dtype=np.int64)
    _bfs(g.out_ptr, g.dst, g.prob, u, int(max_level), mask, seen, done, level, s_comp, q_extra, queue, 1)
    state = np.where(done == 1, PROCESSED, np.where(seen == 1, IN_PROCESS, UNPROCESSED)).astype(np.int8)
    return BfsPropagationState(state=state, level=level, s_comp=s_comp, q_comp=s_comp * q_extra)


def single_seed_probs(
    g: Graph, u: int, max_level: int, blocked: Iterable[int] | None = None
) -> np.ndarray:
    """``P[q(u, v)]`` for every vertex ``v`` (zero outside the BFS ball)."""
    return bfs_propagation(g, u, max_level, blocked).probs


def combine_multi_seed(prev: np.ndarray, new_probs: np.ndarray) -> np.ndarray:
    """``P(S_i) = P(S_{i-1}) + (1 - P(S_{i-1})) * P(u_i)``, pointwise."""
    prev = np.asarray(prev, dtype=np.float64)
    new_probs = np.asarray(new_probs, dtype=np.float64)
    if prev.shape != new_probs.shape:
        raise ValidationError(f"length mismatch: {prev.shape} vs {new_probs.shape}")
    for name, arr in (("prev", prev), ("new_probs", new_probs)):
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ValidationError(f"{name} values must lie in [0, 1]")
    return prev + (1.0 - prev) * new_probs


def eaapc_select(
    g: Graph, k: int, max_level: int | None = None, eps: float = DEFAULT_EPS
) -> SeedSelectionResult:
    """Greedy selection on cumulative Q-path probabilities.

    Each round scores every unselected candidate by the total cumulative
    probability after folding in its BFS, with already selected seeds blocked.
    """
    k = check_k(k)
    L = resolve_max_level(g, eps) if max_level is None else int(max_level)
    if L < 0:
        raise ValidationError("max_level must be >= 0")
    n = g.n
    cum = np.zeros(n)
    blocked = np.zeros(n, dtype=np.bool_)
    seeds: list[int] = []
    estimates: list[float] = []
    gains: list[float] = []
    n_chunks = _parallel.chunks()
    with Stopwatch() as sw:
        for _ in range(min(k, n)):
            candidates = np.flatnonzero(~blocked).astype(np.int64)
            scores = _gain_batch(g.out_ptr, g.dst, g.prob, n, L, blocked, cum, candidates, n_chunks)
            best = int(np.argmax(scores))
            w = int(candidates[best])
            cum = combine_multi_seed(cum, single_seed_probs(g, w, L, blocked))
            blocked[w] = True
            seeds.append(w)
            gains.append(float(scores[best]))
            estimates.append(float(cum.sum()))
    return SeedSelectionResult(
        seeds=seeds,
        marginal_estimates=estimates,
        wall_time=sw.elapsed,
        algorithm="eaapc",
        config={"k": k, "max_level": L, "eps": eps if max_level is None else None},
        gains=gains,
        evaluations=int(sum(n - i for i in range(len(seeds)))),
    )
