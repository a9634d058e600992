"""Bounded-degree spanner for doubling metrics via cross edges and rerouting.

Step 1 adds every pair of level-``i`` net points within ``gamma * r_i`` (at
the first level where it qualifies) and orients edges towards the endpoint
that survives higher in the net tree.  Step 2 caps in-degrees: for a vertex
``w`` whose in-neighbours occupy levels ``i_1 < ... < i_m``, in-edges at rank
``j > ell`` are redirected to a fixed in-neighbour of ``w`` at level
``i_{j-ell}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph
from .metric import MetricInput, NetHierarchy, build_net_tree

__all__ = ["CgmzConfig", "OrientedSpanner", "RerouteLog", "cgmz_step1", "cgmz_step2", "cgmz_spanner"]


@dataclass(frozen=True)
class CgmzConfig:
    eps: float = 0.5

    def __post_init__(self):
        if not (0 < self.eps <= 0.5):
            raise ValueError(f"eps must lie in (0, 1/2], got {self.eps}")

    @property
    def gamma(self) -> float:
        return 4.0 + 32.0 / self.eps

    @property
    def ell(self) -> int:
        return math.ceil(1.0 / self.eps) + 1


@dataclass
class RerouteLog:
    """Parallel arrays: in-edge ``(v -> w)`` at ``level`` was redirected to ``u``."""

    v: np.ndarray
    w: np.ndarray
    u: np.ndarray
    level: np.ndarray

    def __len__(self) -> int:
        return int(len(self.v))

    def records(self) -> list[dict]:
        return [
            {"v": int(a), "w": int(b), "u": int(c), "level": int(d)}
            for a, b, c, d in zip(self.v, self.w, self.u, self.level)
        ]


@dataclass
class OrientedSpanner:
    """Step-1 graph with orientation and levels, plus the step-2 result.

    Edge ``k`` of step 1 is directed ``tail[k] -> head[k]`` and belongs to
    ``E_{level[k]}``.
    """

    n: int
    tail: np.ndarray
    head: np.ndarray
    level: np.ndarray
    weight: np.ndarray
    g1: WeightedGraph
    metric: MetricInput
    g2: WeightedGraph | None = None
    reroute_log: RerouteLog | None = None
    g2_tail: np.ndarray | None = None
    g2_head: np.ndarray | None = None

    def in_neighbors(self, w: int, level: int) -> np.ndarray:
        sel = (self.head == w) & (self.level == level)
        return np.sort(self.tail[sel])

    def max_in_level_count(self) -> int:
        """Largest ``|N_i^in(w)|`` over all ``(w, i)``."""
        if len(self.head) == 0:
            return 0
        key = self.head.astype(np.int64) * (int(self.level.max()) + 1) + self.level
        return int(np.unique(key, return_counts=True)[1].max())

    def out_degrees(self) -> np.ndarray:
        return np.bincount(self.tail, minlength=self.n)


def cgmz_step1(m: MetricInput, tree: NetHierarchy, cfg: CgmzConfig = CgmzConfig()) -> OrientedSpanner:
    n = m.n
    if n < 2:
        empty = np.zeros(0, dtype=np.intp)
        g1 = WeightedGraph(n, empty, empty, np.zeros(0))
        return OrientedSpanner(n, empty, empty, empty, np.zeros(0), g1, m)
    gamma = cfg.gamma
    u, v = np.triu_indices(n, k=1)
    d = m.matrix()[u, v]
    both = np.minimum(tree.istar[u], tree.istar[v])
    radii = tree.r0 * 2.0 ** np.arange(tree.top + 1)
    # first level i with d <= gamma * r_i, located by search on the exact thresholds
    level = np.searchsorted(gamma * radii, d, side="left")
    keep = level <= both
    u, v, d, level = u[keep], v[keep], d[keep], level[keep]

    iu, iv = tree.istar[u], tree.istar[v]
    # lower i* points at higher i*; equal i* points at the larger id (v > u)
    forward = iu <= iv
    tail = np.where(forward, u, v).astype(np.intp)
    head = np.where(forward, v, u).astype(np.intp)
    g1 = WeightedGraph(n, u, v, d)
    return OrientedSpanner(n, tail, head, level.astype(np.intp), d, g1, m)


def cgmz_step2(os: OrientedSpanner, cfg: CgmzConfig = CgmzConfig()) -> OrientedSpanner:
    ell = cfg.ell
    n = os.n
    tail, head, level = os.tail, os.head, os.level
    if len(tail) == 0:
        empty = np.zeros(0, dtype=np.intp)
        os.g2 = WeightedGraph(n, empty, empty, np.zeros(0))
        os.reroute_log = RerouteLog(empty, empty, empty, empty)
        os.g2_tail, os.g2_head = empty, empty
        return os

    order = np.lexsort((tail, level, head))
    t_s, h_s, l_s = tail[order], head[order], level[order]
    # rank of each (head, level) group among the head's occupied levels, 1-based
    new_group = np.ones(len(h_s), dtype=bool)
    new_group[1:] = (h_s[1:] != h_s[:-1]) | (l_s[1:] != l_s[:-1])
    new_head = np.ones(len(h_s), dtype=bool)
    new_head[1:] = h_s[1:] != h_s[:-1]
    group_id = np.cumsum(new_group) - 1
    head_first_group = np.maximum.accumulate(np.where(new_head, group_id, 0))
    rank = group_id - head_first_group + 1

    # smallest in-neighbour of each group: first element, since tails are sorted within groups
    group_min_tail = t_s[new_group]
    rerouted = rank > ell
    target_group = group_id[rerouted] - ell
    new_head_vals = h_s.copy()
    new_head_vals[rerouted] = group_min_tail[target_group]

    log = RerouteLog(
        v=t_s[rerouted].astype(np.intp),
        w=h_s[rerouted].astype(np.intp),
        u=new_head_vals[rerouted].astype(np.intp),
        level=l_s[rerouted].astype(np.intp),
    )
    a, b = t_s, new_head_vals
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    key = np.unique(lo.astype(np.int64) * n + hi)
    gu = (key // n).astype(np.intp)
    gv = (key % n).astype(np.intp)
    dm = os.metric.matrix()
    gw = np.asarray(dm[gu, gv], dtype=float)
    os.g2 = WeightedGraph(n, gu, gv, gw)
    os.reroute_log = log
    os.g2_tail, os.g2_head = a.astype(np.intp), b.astype(np.intp)
    return os


def cgmz_spanner(m: MetricInput, cfg: CgmzConfig = CgmzConfig(), tree: NetHierarchy | None = None) -> WeightedGraph:
    tree = tree or build_net_tree(m)
    return cgmz_step2(cgmz_step1(m, tree, cfg), cfg).g2
