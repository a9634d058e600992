"""Path-greedy (1+eps)-spanners over complete metrics and unit ball graphs."""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .graph import WeightedGraph
from .metric import MetricInput, MetricKind

__all__ = ["GreedyConfig", "greedy_spanner", "shortest_path_dist", "sorted_candidates"]

_BATCH = 1 << 18


@dataclass(frozen=True)
class GreedyConfig:
    eps: float = 0.5
    tie_break: str = "by_index_pair"

    def __post_init__(self):
        if not (0 < self.eps <= 0.5):
            raise ValueError(f"eps must lie in (0, 1/2], got {self.eps}")
        if self.tie_break != "by_index_pair":
            raise ValueError(f"unknown tie break {self.tie_break!r}")

    @property
    def t(self) -> float:
        return 1.0 + self.eps


def shortest_path_dist(g: WeightedGraph, u: int, v: int, cutoff: float | None = None) -> float:
    """Dijkstra distance from ``u`` to ``v``; ``inf`` if unreachable or beyond ``cutoff``."""
    if u == v:
        return 0.0
    adj = g.adjacency()
    limit = math.inf if cutoff is None else cutoff
    dist = {u: 0.0}
    heap = [(0.0, u)]
    while heap:
        d, x = heapq.heappop(heap)
        if d > limit:
            break
        if x == v:
            return d
        if d > dist[x]:
            continue
        for y, w in adj[x]:
            nd = d + w
            if nd <= limit and nd < dist.get(y, math.inf):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return math.inf


def sorted_candidates(m: MetricInput) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Host edges ordered by weight, ties by the index pair ``(u, v)``."""
    u, v, w = m.host_edges()
    order = np.lexsort((v, u, w))
    return u[order], v[order], w[order]


def greedy_spanner(m: MetricInput, cfg: GreedyConfig = GreedyConfig()) -> WeightedGraph:
    """Greedy ``(1+eps)``-spanner of the host graph of ``m``.

    Candidates are scanned by non-decreasing weight and an edge is kept iff the
    current spanner distance between its endpoints exceeds ``(1+eps) * w``.
    The decision is always taken on an exact Dijkstra distance; a matrix of
    upper bounds on spanner distances (refreshed by every Dijkstra run) lets
    most candidates be rejected without a search.
    """
    n = m.n
    t = cfg.t
    cu, cv, cw = sorted_candidates(m)
    flags = {}
    if m.kind is MetricKind.UNIT_BALL and n > 1:
        host = csr_matrix((np.ones(len(cu)), (cu, cv)), shape=(n, n))
        ncomp, _ = connected_components(host, directed=False)
        if ncomp > 1:
            flags["disconnected_host"] = True
            flags["host_components"] = int(ncomp)

    upper = np.full((n, n), np.inf)
    np.fill_diagonal(upper, 0.0)
    eu: list[int] = []
    ev: list[int] = []
    ew: list[float] = []
    csr = None
    dirty = True

    for start in range(0, len(cu), _BATCH):
        bu, bv, bw = cu[start : start + _BATCH], cv[start : start + _BATCH], cw[start : start + _BATCH]
        # upper bounds only shrink, so a rejection here stays valid for the whole batch
        live = np.flatnonzero(upper[bu, bv] > t * bw)
        for k in live.tolist():
            a, b, w = int(bu[k]), int(bv[k]), float(bw[k])
            limit = t * w
            if upper[a, b] <= limit:
                continue
            if eu:
                if dirty:
                    csr = csr_matrix(
                        (np.concatenate([ew, ew]), (np.concatenate([eu, ev]), np.concatenate([ev, eu]))),
                        shape=(n, n),
                    )
                    dirty = False
                row = dijkstra(csr, directed=False, indices=a)
                np.minimum(upper[a], row, out=upper[a])
                upper[:, a] = upper[a]
                if row[b] <= limit:
                    continue
            eu.append(a)
            ev.append(b)
            ew.append(w)
            dirty = True
            upper[a, b] = upper[b, a] = min(upper[a, b], w)

    return WeightedGraph(n, np.array(eu, dtype=np.intp), np.array(ev, dtype=np.intp), np.array(ew), flags)
