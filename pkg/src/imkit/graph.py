"""Immutable directed graph with per-arc propagation probabilities.

Arcs are stored sorted by ``(src, dst)`` so the arc index doubles as the
position in the out-adjacency (CSR) arrays. The in-adjacency keeps a parallel
copy ordered by ``(dst, src)``.

Vertices are dense indices ``0..n-1``; ``labels[i]`` is the id the vertex had
in the input file.
"""

from __future__ import annotations

import gzip
import io
import logging
import os
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from imkit.errors import ParseError, ValidationError

log = logging.getLogger(__name__)

_HEADER_RE = re.compile(r"^n=(\d+)\s+arcs=(\d+)\s*$")
_IDS_PREFIX = "ids="


@dataclass(frozen=True)
class LoadOptions:
    undirected: bool = False
    uniform_prob: float | None = None
    comment_prefix: str = "#"

    def __post_init__(self):
        if self.uniform_prob is not None and not (0.0 < self.uniform_prob <= 1.0):
            raise ValidationError(f"uniform_prob must be in (0, 1], got {self.uniform_prob}")


@dataclass(frozen=True)
class LoadReport:
    """Counts gathered while cleaning the raw arc list."""

    input_arcs: int = 0
    self_loops_dropped: int = 0
    duplicates_dropped: int = 0


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    n: int
    src: np.ndarray
    dst: np.ndarray
    prob: np.ndarray
    out_ptr: np.ndarray
    in_ptr: np.ndarray
    in_src: np.ndarray
    in_prob: np.ndarray
    labels: np.ndarray
    report: LoadReport = field(default_factory=LoadReport)

    @classmethod
    def from_arcs(
        cls,
        n: int,
        src: Sequence[int] | np.ndarray,
        dst: Sequence[int] | np.ndarray,
        prob: Sequence[float] | np.ndarray | float,
        labels: Sequence[int] | np.ndarray | None = None,
    ) -> "Graph":
        """Build a graph, dropping self-loops and keeping the first of duplicate arcs."""
        n = int(n)
        if n < 0:
            raise ValidationError("n must be non-negative")
        src = np.asarray(src, dtype=np.int64).ravel()
        dst = np.asarray(dst, dtype=np.int64).ravel()
        prob = np.broadcast_to(np.asarray(prob, dtype=np.float64), src.shape).copy()
        if src.shape != dst.shape:
            raise ValidationError("src and dst must have the same length")
        if src.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
            raise ValidationError(f"arc endpoint outside 0..{n - 1}")
        if np.any(~np.isfinite(prob)) or np.any(prob < 0.0) or np.any(prob > 1.0):
            raise ValidationError("arc probabilities must lie in [0, 1]")

        m_in = int(src.size)
        keep = src != dst
        loops = m_in - int(keep.sum())
        src, dst, prob = src[keep], dst[keep], prob[keep]
        # np.unique returns the first occurrence of each key, in key order
        _, first = np.unique(src * max(n, 1) + dst, return_index=True)
        dups = int(src.size - first.size)
        src, dst, prob = src[first], dst[first], prob[first]
        if loops:
            log.warning("dropped %d self-loop(s)", loops)
        if dups:
            log.warning("dropped %d duplicate arc(s), kept first occurrence", dups)

        out_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=out_ptr[1:])
        order = np.lexsort((src, dst))
        in_ptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(dst, minlength=n), out=in_ptr[1:])

        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        else:
            labels = np.asarray(labels, dtype=np.int64).copy()
            if labels.shape != (n,):
                raise ValidationError("labels must have length n")
            if np.unique(labels).size != n:
                raise ValidationError("labels must be distinct")

        return cls(
            n=n,
            src=_readonly(src),
            dst=_readonly(dst),
            prob=_readonly(prob),
            out_ptr=_readonly(out_ptr),
            in_ptr=_readonly(in_ptr),
            in_src=_readonly(src[order]),
            in_prob=_readonly(prob[order]),
            labels=_readonly(labels),
            report=LoadReport(m_in, loops, dups),
        )

    @property
    def m(self) -> int:
        return int(self.src.size)

    def _check_vertex(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise ValidationError(f"vertex {v} out of range 0..{self.n - 1}")
        return v

    def in_neighbors(self, v: int) -> list[tuple[int, float]]:
        """Arcs ``(u, prob)`` into ``v``, ascending ``u``."""
        v = self._check_vertex(v)
        lo, hi = self.in_ptr[v], self.in_ptr[v + 1]
        return [(int(u), float(p)) for u, p in zip(self.in_src[lo:hi], self.in_prob[lo:hi])]

    def out_neighbors(self, v: int) -> list[tuple[int, float]]:
        v = self._check_vertex(v)
        lo, hi = self.out_ptr[v], self.out_ptr[v + 1]
        return [(int(w), float(p)) for w, p in zip(self.dst[lo:hi], self.prob[lo:hi])]

    def out_degree(self) -> np.ndarray:
        return np.diff(self.out_ptr)

    def mean_prob(self) -> float:
        return float(self.prob.mean()) if self.m else 0.0

    def index_of(self, label: int) -> int:
        hits = np.flatnonzero(self.labels == int(label))
        if hits.size == 0:
            raise ValidationError(f"no vertex labelled {label}")
        return int(hits[0])

    def indices_of(self, labels: Iterable[int]) -> list[int]:
        return [self.index_of(x) for x in labels]

    def label_of(self, v: int) -> int:
        return int(self.labels[self._check_vertex(v)])

    def check_vertices(self, vertices: Iterable[int]) -> np.ndarray:
        """Validate a vertex collection and return it as a sorted unique int64 array."""
        arr = np.unique(np.asarray(list(vertices), dtype=np.int64))
        if arr.size and (arr[0] < 0 or arr[-1] >= self.n):
            raise ValidationError(f"vertex out of range 0..{self.n - 1}")
        return arr

    def seed_mask(self, seeds: Iterable[int]) -> np.ndarray:
        mask = np.zeros(self.n, dtype=np.bool_)
        mask[self.check_vertices(seeds)] = True
        return mask

    def structurally_equal(self, other: "Graph") -> bool:
        return (
            self.n == other.n
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.prob, other.prob)
        )

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.structurally_equal(other)

    __hash__ = None

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"


def _open_text(source) -> IO[str]:
    if isinstance(source, (str, os.PathLike)):
        path = os.fspath(source)
        if path.endswith(".gz"):
            return gzip.open(path, "rt", encoding="utf-8")
        return open(path, "r", encoding="utf-8")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode("utf-8"))
    if isinstance(source, io.TextIOBase):
        return source
    # assume a binary stream
    return io.TextIOWrapper(source, encoding="utf-8")


def _parse_vertex(tok: str, lineno: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(f"non-numeric vertex id {tok!r}", lineno) from None
    if v < 0:
        raise ParseError(f"negative vertex id {v}", lineno)
    return v


def load_edge_list(source, opts: LoadOptions | None = None) -> Graph:
    """Read a whitespace-separated ``src dst [prob]`` edge list.

    ``source`` may be a path (``.gz`` is decompressed), raw bytes, or an open
    text/binary stream. Lines starting with ``opts.comment_prefix`` are skipped,
    except the ``# n=<n> arcs=<m>`` and ``# ids=...`` headers written by
    :func:`serialize`, which pin the vertex set so isolated vertices survive a
    round trip. Without a header, vertex ids are compacted to ``0..n-1`` in
    ascending order and the original ids are kept in ``Graph.labels``.
    """
    opts = opts or LoadOptions()
    src: list[int] = []
    dst: list[int] = []
    prob: list[float] = []
    declared_n: int | None = None
    declared_ids: list[int] | None = None
    prefix = opts.comment_prefix

    fh = _open_text(source)
    try:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith(prefix):
                body = line[len(prefix):].strip()
                hm = _HEADER_RE.match(body)
                if hm and not src:
                    declared_n = int(hm.group(1))
                elif body.startswith(_IDS_PREFIX) and declared_n is not None and not src:
                    ids = body[len(_IDS_PREFIX):]
                    declared_ids = [_parse_vertex(t, lineno) for t in ids.split(",") if t]
                continue
            toks = line.split()
            if len(toks) < 2 or len(toks) > 3:
                raise ParseError(f"expected 'src dst [prob]', got {len(toks)} token(s)", lineno)
            a = _parse_vertex(toks[0], lineno)
            b = _parse_vertex(toks[1], lineno)
            if opts.uniform_prob is not None:
                p = opts.uniform_prob
            elif len(toks) == 3:
                try:
                    p = float(toks[2])
                except ValueError:
                    raise ParseError(f"non-numeric probability {toks[2]!r}", lineno) from None
                if not 0.0 <= p <= 1.0:
                    raise ValidationError(f"line {lineno}: probability {p} outside [0, 1]")
            else:
                raise ValidationError(
                    f"line {lineno}: no probability column and no uniform probability given"
                )
            src.append(a)
            dst.append(b)
            prob.append(p)
            if opts.undirected:
                src.append(b)
                dst.append(a)
                prob.append(p)
    finally:
        if fh is not source:
            fh.close()

    s = np.asarray(src, dtype=np.int64)
    d = np.asarray(dst, dtype=np.int64)
    if declared_n is not None:
        labels = np.asarray(declared_ids if declared_ids is not None else range(declared_n), dtype=np.int64)
        if labels.size != declared_n:
            raise ValidationError(f"ids header lists {labels.size} ids, expected {declared_n}")
    else:
        labels = np.unique(np.concatenate([s, d])) if s.size else np.zeros(0, dtype=np.int64)

    order = np.argsort(labels, kind="stable")
    sorted_labels = labels[order]
    def compact(x):
        pos = np.searchsorted(sorted_labels, x)
        if x.size and (np.any(pos >= labels.size) or np.any(sorted_labels[np.minimum(pos, labels.size - 1)] != x)):
            raise ValidationError("edge references a vertex id missing from the ids header")
        return order[pos]

    g = Graph.from_arcs(labels.size, compact(s), compact(d), np.asarray(prob, dtype=np.float64), labels)
    log.info("loaded graph n=%d arcs=%d (self-loops dropped %d, duplicates dropped %d)",
             g.n, g.m, g.report.self_loops_dropped, g.report.duplicates_dropped)
    return g


def serialize(g: Graph) -> str:
    """Text form readable by :func:`load_edge_list` (labels, exact probabilities)."""
    lines = [f"# n={g.n} arcs={g.m}"]
    if not np.array_equal(g.labels, np.arange(g.n)):
        lines.append("# ids=" + ",".join(str(int(x)) for x in g.labels))
    lab = g.labels
    for a, b, p in zip(g.src, g.dst, g.prob):
        lines.append(f"{lab[a]} {lab[b]} {float(p)!r}")
    return "\n".join(lines) + "\n"


def save_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize(g))
