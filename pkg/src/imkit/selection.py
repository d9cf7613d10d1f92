"""Seed-selection result type and the greedy/CELF drivers shared by the selectors."""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from imkit.errors import ValidationError


@dataclass
class SeedSelectionResult:
    seeds: list[int]
    marginal_estimates: list[float]
    wall_time: float
    algorithm: str
    config: dict = field(default_factory=dict)
    # per-round marginal gain, same length as seeds when the selector has one
    gains: list[float] = field(default_factory=list)
    evaluations: int = 0


class CelfEntry(NamedTuple):
    """Heap entry. ``neg_marginal`` is negated so :mod:`heapq` pops the largest
    marginal first and, on ties, the lowest vertex id."""

    neg_marginal: float
    vertex: int
    round_stamp: int

    @property
    def cached_marginal(self) -> float:
        return -self.neg_marginal


def check_k(k: int) -> int:
    k = int(k)
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    return k


def eager_greedy(
    n: int,
    k: int,
    round_gains: Callable[[list[int], np.ndarray], np.ndarray],
    commit: Callable[[list[int], int, float], float],
) -> tuple[list[int], list[float], list[float], int]:
    """Exhaustive greedy: every round scores all remaining candidates.

    ``round_gains(seeds, candidates)`` returns one gain per candidate;
    ``commit(seeds, winner, gain)`` updates the caller's state and returns the
    estimate after adding ``winner``.
    """
    seeds: list[int] = []
    estimates: list[float] = []
    gains: list[float] = []
    chosen = np.zeros(n, dtype=bool)
    evaluations = 0
    for _ in range(min(k, n)):
        candidates = np.flatnonzero(~chosen)
        g = np.asarray(round_gains(seeds, candidates))
        evaluations += candidates.size
        best = int(np.argmax(g))  # first max, candidates ascending -> lowest id
        w = int(candidates[best])
        estimates.append(commit(seeds, w, g[best]))
        gains.append(g[best])
        seeds.append(w)
        chosen[w] = True
    return seeds, estimates, gains, evaluations


def celf_greedy(
    n: int,
    k: int,
    initial_gains: Callable[[np.ndarray], np.ndarray],
    gain_of: Callable[[list[int], int], float],
    commit: Callable[[list[int], int, float], float],
) -> tuple[list[int], list[float], list[float], int]:
    """Lazy-forward greedy.

    Matches :func:`eager_greedy` whenever the objective is submodular, since a
    stale marginal then upper-bounds the fresh one.
    """
    k = min(k, n)
    if k == 0:
        return [], [], [], 0
    everyone = np.arange(n)
    g0 = np.asarray(initial_gains(everyone))
    heap = [CelfEntry(-g0[v], int(v), 0) for v in range(n)]
    heapq.heapify(heap)
    evaluations = n
    seeds: list[int] = []
    estimates: list[float] = []
    gains: list[float] = []
    while len(seeds) < k:
        top = heapq.heappop(heap)
        current = len(seeds)
        if top.round_stamp == current:
            gain = top.cached_marginal
            estimates.append(commit(seeds, top.vertex, gain))
            gains.append(gain)
            seeds.append(top.vertex)
        else:
            fresh = gain_of(seeds, top.vertex)
            evaluations += 1
            heapq.heappush(heap, CelfEntry(-fresh, top.vertex, current))
    return seeds, estimates, gains, evaluations


class Stopwatch:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
