"""Undirected weighted graphs on vertices ``0..n-1`` and a union-find."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix

__all__ = ["WeightedGraph", "UnionFind"]


@dataclass(eq=False)
class WeightedGraph:
    """Edge list with ``u < v``, positive weights and no duplicates.

    ``flags`` carries construction notes, e.g. ``{"disconnected_host": True}``.
    """

    n: int
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    flags: dict = field(default_factory=dict)

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=np.intp)
        self.v = np.asarray(self.v, dtype=np.intp)
        self.w = np.asarray(self.w, dtype=float)
        if not (len(self.u) == len(self.v) == len(self.w)):
            raise ValueError("edge arrays must have equal length")
        if len(self.u):
            if np.any(self.u >= self.v):
                raise ValueError("edges must satisfy u < v (no self-loops)")
            if self.u.min() < 0 or self.v.max() >= self.n:
                raise ValueError("edge endpoint out of range")
            if np.any(self.w <= 0):
                raise ValueError("edge weights must be positive")
            key = self.u.astype(np.int64) * self.n + self.v
            if len(np.unique(key)) != len(key):
                raise ValueError("duplicate edges")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int, float]], **flags) -> "WeightedGraph":
        rows = [(min(a, b), max(a, b), float(w)) for a, b, w in edges]
        if not rows:
            return cls(n, np.zeros(0), np.zeros(0), np.zeros(0), dict(flags))
        u, v, w = zip(*rows)
        return cls(n, np.array(u), np.array(v), np.array(w), dict(flags))

    @property
    def m(self) -> int:
        return int(len(self.u))

    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(c)) for a, b, c in zip(self.u, self.v, self.w)]

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self.u.tolist(), self.v.tolist()))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.u, minlength=self.n) + np.bincount(self.v, minlength=self.n)

    def max_degree(self) -> int:
        return int(self.degrees().max()) if self.n else 0

    def adjacency(self) -> list[list[tuple[int, float]]]:
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.n)]
        for a, b, c in zip(self.u.tolist(), self.v.tolist(), self.w.tolist()):
            adj[a].append((b, c))
            adj[b].append((a, c))
        return adj

    def to_csr(self) -> csr_matrix:
        rows = np.concatenate([self.u, self.v])
        cols = np.concatenate([self.v, self.u])
        data = np.concatenate([self.w, self.w])
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def induced(self, ids) -> tuple["WeightedGraph", np.ndarray]:
        """Subgraph induced by ``ids``, renumbered; also returns the id map."""
        ids = np.asarray(sorted(set(int(i) for i in ids)), dtype=np.intp)
        local = np.full(self.n, -1, dtype=np.intp)
        local[ids] = np.arange(len(ids))
        keep = (local[self.u] >= 0) & (local[self.v] >= 0)
        sub = WeightedGraph(len(ids), local[self.u[keep]], local[self.v[keep]], self.w[keep])
        return sub, ids

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )


class UnionFind:
    """Union by size with path halving."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.count -= 1
        return True

    def groups(self, members: Iterable[int] | None = None) -> list[list[int]]:
        """Components as sorted id lists, ordered by smallest member."""
        out: dict[int, list[int]] = {}
        for x in members if members is not None else range(len(self.parent)):
            out.setdefault(self.find(x), []).append(x)
        return sorted((sorted(g) for g in out.values()), key=lambda g: g[0])
