"""Metric spaces, balls, nets, the net tree and well-separated pairs.

Every other module talks to a point set through :class:`MetricInput`.  Three
kinds are supported: Euclidean coordinates, an explicit symmetric distance
matrix, and a unit ball graph overlay on Euclidean points (balls of radius
``mu``; two points are adjacent when their balls intersect, i.e. when they are
within ``2 * mu``).

Conventions used throughout the package:

* balls are closed: ``ball(m, c, r) = {v : d(c, v) <= r}``;
* nets are strictly separated: two net points are at distance ``> r``;
* after :func:`load_and_normalize` the smallest positive distance is 1.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

__all__ = [
    "MetricError",
    "MetricKind",
    "MetricInput",
    "PackingParams",
    "NetHierarchy",
    "WspdPair",
    "euclidean",
    "matrix",
    "unit_ball",
    "load_and_normalize",
    "ball",
    "build_net",
    "build_net_tree",
    "build_wspd",
    "is_separated_pair",
    "set_distance",
    "diameter",
    "estimate_fractal_dimension",
    "packing_violations",
]

REL_TOL = 1e-9
TRIANGLE_EXACT_LIMIT = 2000
TRIANGLE_SAMPLES = 100_000


class MetricError(ValueError):
    """Raised when an input is not a valid (normalizable) metric.

    ``witness`` holds the offending index pair or triple.
    """

    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message)
        self.witness = witness


class MetricKind(str, enum.Enum):
    EUCLIDEAN = "euclidean"
    MATRIX = "matrix"
    UNIT_BALL = "unit_ball"


@dataclass(frozen=True, eq=False)
class MetricInput:
    """A finite metric on vertices ``0..n-1``.

    ``points`` is set for the Euclidean and unit-ball kinds, ``dist`` for the
    matrix kind.  ``scale`` is the factor applied by normalization and
    ``spread`` the maximum pairwise distance once normalized (``None`` before).
    """

    kind: MetricKind
    points: np.ndarray | None = None
    dist: np.ndarray | None = None
    mu: float | None = None
    scale: float = 1.0
    spread: float | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        if self.points is not None:
            return int(self.points.shape[0])
        return int(self.dist.shape[0])

    @property
    def dim(self) -> int | None:
        if self.points is None:
            return None
        return int(self.points.shape[1])

    @property
    def normalized(self) -> bool:
        return self.spread is not None

    def distance(self, u: int, v: int) -> float:
        if self.points is None:
            return float(self.dist[u, v])
        return float(np.linalg.norm(self.points[u] - self.points[v]))

    def distances_from(self, u: int) -> np.ndarray:
        """Distances from ``u`` to every vertex, as a length-``n`` array."""
        if self.points is None:
            return self.dist[u]
        if "matrix" in self._cache:
            return self._cache["matrix"][u]
        return cdist(self.points[u : u + 1], self.points)[0]

    def matrix(self) -> np.ndarray:
        """Full ``n x n`` distance matrix (computed once, then cached)."""
        if self.points is None:
            return self.dist
        if "matrix" not in self._cache:
            d = cdist(self.points, self.points)
            d.setflags(write=False)
            self._cache["matrix"] = d
        return self._cache["matrix"]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        rows = np.asarray(rows, dtype=np.intp)
        cols = np.asarray(cols, dtype=np.intp)
        if self.points is None or "matrix" in self._cache:
            return self.matrix()[np.ix_(rows, cols)]
        return cdist(self.points[rows], self.points[cols])

    def subset(self, ids: Sequence[int]) -> "MetricInput":
        """Restriction to ``ids`` (renumbered ``0..k-1``), without rescaling."""
        ids = np.asarray(ids, dtype=np.intp)
        if self.points is None:
            sub = self.dist[np.ix_(ids, ids)]
            spread = float(sub.max()) if len(ids) > 1 else 1.0
            return MetricInput(MetricKind.MATRIX, dist=sub, scale=self.scale, spread=spread)
        pts = self.points[ids]
        spread = _max_pairwise(pts) if len(ids) > 1 else 1.0
        return MetricInput(self.kind, points=pts, mu=self.mu, scale=self.scale, spread=spread)

    def host_edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Candidate edges ``(u, v, w)`` with ``u < v`` of the host graph.

        Complete graph for Euclidean/matrix kinds; pairs within ``2 * mu`` for
        the unit-ball kind.
        """
        n = self.n
        if self.kind is MetricKind.UNIT_BALL:
            tree = cKDTree(self.points)
            pairs = tree.query_pairs(2.0 * self.mu * (1 + 1e-12), output_type="ndarray")
            if len(pairs) == 0:
                empty = np.zeros(0, dtype=np.intp)
                return empty, empty, np.zeros(0)
            u = pairs.min(axis=1).astype(np.intp)
            v = pairs.max(axis=1).astype(np.intp)
            w = np.linalg.norm(self.points[u] - self.points[v], axis=1)
            keep = w <= 2.0 * self.mu
            return u[keep], v[keep], w[keep]
        u, v = np.triu_indices(n, k=1)
        w = self.matrix()[u, v]
        return u.astype(np.intp), v.astype(np.intp), np.asarray(w, dtype=float)


@dataclass(frozen=True)
class PackingParams:
    """Packing dimension ``d``, packing constant ``eta``, doubling constant ``lam``."""

    d: float = 2.0
    eta: float | None = None
    lam: float | None = None

    def __post_init__(self):
        if self.eta is None:
            object.__setattr__(self, "eta", 3.0**self.d)
        if self.lam is None:
            object.__setattr__(self, "lam", 4.0 * 2.0**self.d)
        if self.d < 1:
            raise ValueError(f"packing dimension must be >= 1, got {self.d}")
        if self.eta < 1:
            raise ValueError(f"packing constant must be >= 1, got {self.eta}")
        if self.lam < 2:
            raise ValueError(f"doubling constant must be >= 2, got {self.lam}")


@dataclass
class NetHierarchy:
    """Nested nets ``N_0 ⊇ N_1 ⊇ ... ⊇ N_top`` with radii ``r_i = 2**i * r0``.

    ``parent[i]`` maps each vertex of ``N_i`` to its closest point of
    ``N_{i+1}``; ``istar[x]`` is the highest level containing ``x``.
    """

    r0: float
    levels: list[np.ndarray]
    parent: list[dict[int, int]]
    istar: np.ndarray

    @property
    def top(self) -> int:
        return len(self.levels) - 1

    def radius(self, i: int) -> float:
        return (2.0**i) * self.r0

    def children(self, x: int, i: int) -> list[int]:
        """Vertices ``y`` of ``N_{i-1}`` whose parent is ``x`` (level ``i >= 1``)."""
        return self._children()[i].get(x, [])

    def _children(self) -> list[dict[int, list[int]]]:
        if not hasattr(self, "_child_index"):
            index: list[dict[int, list[int]]] = [dict()]
            for i in range(1, len(self.levels)):
                ch: dict[int, list[int]] = {}
                for y, p in self.parent[i - 1].items():
                    ch.setdefault(p, []).append(y)
                for lst in ch.values():
                    lst.sort()
                index.append(ch)
            self._child_index = index
        return self._child_index

    def descendants(self, x: int, i: int) -> np.ndarray:
        """All level-0 points below node ``(x, i)``, sorted."""
        frontier = [x]
        for lvl in range(i, 0, -1):
            nxt = []
            for y in frontier:
                nxt.extend(self.children(y, lvl))
            frontier = nxt
        return np.array(sorted(frontier), dtype=np.intp)


@dataclass(frozen=True)
class WspdPair:
    a: np.ndarray
    b: np.ndarray
    s: float

    def __len__(self) -> int:
        return len(self.a) * len(self.b)


def euclidean(points) -> MetricInput:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return MetricInput(MetricKind.EUCLIDEAN, points=pts)


def matrix(dist) -> MetricInput:
    return MetricInput(MetricKind.MATRIX, dist=np.asarray(dist, dtype=float))


def unit_ball(points, mu: float) -> MetricInput:
    if mu <= 0:
        raise ValueError(f"ball radius must be positive, got {mu}")
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    return MetricInput(MetricKind.UNIT_BALL, points=pts, mu=float(mu))


def _max_pairwise(pts: np.ndarray, chunk: int = 1024) -> float:
    best = 0.0
    for s in range(0, len(pts), chunk):
        best = max(best, float(cdist(pts[s : s + chunk], pts).max()))
    return best


def _validate_matrix(d: np.ndarray, rng: np.random.Generator | None = None) -> None:
    n = d.shape[0]
    if d.shape != (n, n):
        raise MetricError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise MetricError(f"non-finite distance at ({i}, {j})", (int(i), int(j)))
    if np.any(d < 0):
        i, j = np.argwhere(d < 0)[0]
        raise MetricError(f"negative distance at ({i}, {j})", (int(i), int(j)))
    diag = np.flatnonzero(np.diag(d) != 0)
    if len(diag):
        i = int(diag[0])
        raise MetricError(f"non-zero self distance at {i}", (i, i))
    scale = float(d.max()) if n else 0.0
    asym = np.abs(d - d.T) > REL_TOL * max(scale, 1.0)
    if asym.any():
        i, j = np.argwhere(asym)[0]
        raise MetricError(f"asymmetric distances at ({i}, {j})", (int(i), int(j)))
    tol = REL_TOL * max(scale, 1.0)
    if n <= TRIANGLE_EXACT_LIMIT:
        for k in range(n):
            # d[i, j] <= d[i, k] + d[k, j] for all i, j
            bad = d > d[:, k : k + 1] + d[k : k + 1, :] + tol
            if bad.any():
                i, j = np.argwhere(bad)[0]
                raise MetricError(
                    f"triangle inequality violated by ({i}, {k}, {j})",
                    (int(i), int(k), int(j)),
                )
    else:
        rng = rng or np.random.default_rng(0)
        i, j, k = rng.integers(0, n, size=(3, TRIANGLE_SAMPLES))
        bad = d[i, j] > d[i, k] + d[k, j] + tol
        if bad.any():
            t = int(np.flatnonzero(bad)[0])
            raise MetricError(
                f"triangle inequality violated by ({i[t]}, {k[t]}, {j[t]})",
                (int(i[t]), int(k[t]), int(j[t])),
            )


def load_and_normalize(raw: MetricInput) -> MetricInput:
    """Rescale so the smallest positive distance is 1 and record the spread.

    Raises :class:`MetricError` on coincident points or an invalid matrix.
    A single point keeps its coordinates and gets spread 1.
    """
    n = raw.n
    if n < 1:
        raise MetricError("metric must contain at least one point")
    if raw.points is not None:
        pts = raw.points
        if not np.all(np.isfinite(pts)):
            raise MetricError("non-finite coordinate")
        if n == 1:
            return replace(raw, spread=1.0, _cache={})
        dd, ii = cKDTree(pts).query(pts, k=2)
        nn = dd[:, 1]
        zero = np.flatnonzero(nn == 0)
        if len(zero):
            a = int(zero[0])
            b = int(ii[a, 1]) if ii[a, 1] != a else int(ii[a, 0])
            raise MetricError(f"duplicate points {min(a, b)} and {max(a, b)}", (min(a, b), max(a, b)))
        dmin = float(nn.min())
        factor = 1.0 if abs(dmin - 1.0) <= 1e-12 else 1.0 / dmin
        new_pts = pts * factor if factor != 1.0 else pts
        mu = raw.mu * factor if raw.mu is not None else None
        spread = _max_pairwise(new_pts)
        return MetricInput(raw.kind, points=new_pts, mu=mu, scale=raw.scale * factor, spread=spread)

    d = np.asarray(raw.dist, dtype=float)
    _validate_matrix(d)
    if n == 1:
        return replace(raw, spread=1.0, _cache={})
    off = d[~np.eye(n, dtype=bool)]
    if np.any(off == 0):
        i, j = np.argwhere((d == 0) & ~np.eye(n, dtype=bool))[0]
        raise MetricError(f"duplicate points {i} and {j}", (int(i), int(j)))
    dmin = float(off.min())
    factor = 1.0 if abs(dmin - 1.0) <= 1e-12 else 1.0 / dmin
    new_d = d * factor if factor != 1.0 else d.copy()
    new_d = 0.5 * (new_d + new_d.T)
    new_d.setflags(write=False)
    return MetricInput(MetricKind.MATRIX, dist=new_d, scale=raw.scale * factor, spread=float(new_d.max()))


def ball(m: MetricInput, center: int, r: float) -> np.ndarray:
    """Sorted ids of the closed ball of radius ``r`` around ``center``."""
    return np.flatnonzero(m.distances_from(center) <= r)


def build_net(m: MetricInput, points: Iterable[int], r: float) -> np.ndarray:
    """Greedy ``r``-net of ``points``, scanning ids in ascending order."""
    pts = np.unique(np.fromiter(points, dtype=np.intp))
    if len(pts) == 0:
        raise ValueError("cannot build a net of an empty set")
    covered = np.zeros(len(pts), dtype=bool)
    net = []
    pos = 0
    while pos < len(pts):
        c = int(pts[pos])
        net.append(c)
        d = m.submatrix([c], pts)[0]
        covered |= d <= r
        rest = np.flatnonzero(~covered[pos + 1 :])
        if len(rest) == 0:
            break
        pos = pos + 1 + int(rest[0])
    return np.array(net, dtype=np.intp)


def build_net_tree(m: MetricInput, r0: float = 0.25) -> NetHierarchy:
    """Net tree with levels ``0..ceil(log2(spread)) + 2``."""
    spread = m.spread if m.spread is not None else load_and_normalize(m).spread
    top = int(math.ceil(math.log2(spread))) + 2 if spread > 1 else 2
    n = m.n
    levels = [np.arange(n, dtype=np.intp)]
    for i in range(1, top + 1):
        levels.append(build_net(m, levels[-1], (2.0**i) * r0))
    parent: list[dict[int, int]] = []
    for i in range(top):
        lo, hi = levels[i], levels[i + 1]
        d = m.submatrix(lo, hi)
        # argmin returns the first minimum; hi is sorted so ties go to the smallest id
        idx = np.argmin(d, axis=1)
        parent.append({int(x): int(hi[j]) for x, j in zip(lo, idx)})
    istar = np.zeros(n, dtype=np.intp)
    for i, lvl in enumerate(levels):
        istar[lvl] = i
    return NetHierarchy(r0=r0, levels=levels, parent=parent, istar=istar)


def diameter(m: MetricInput, ids: Sequence[int]) -> float:
    if len(ids) < 2:
        return 0.0
    return float(m.submatrix(ids, ids).max())


def set_distance(m: MetricInput, a: Sequence[int], b: Sequence[int]) -> float:
    return float(m.submatrix(a, b).min())


def is_separated_pair(m: MetricInput, a: Sequence[int], b: Sequence[int], c: float) -> bool:
    """True iff ``d(a, b) >= c * max(diam a, diam b)``."""
    if len(a) == 0 or len(b) == 0:
        raise ValueError("separated pair needs non-empty sets")
    if set(np.asarray(a).tolist()) & set(np.asarray(b).tolist()):
        raise ValueError("separated pair needs disjoint sets")
    return set_distance(m, a, b) >= c * max(diameter(m, a), diameter(m, b))


def build_wspd(m: MetricInput, tree: NetHierarchy, s: float = 1.0) -> list[WspdPair]:
    """``s``-well-separated pair decomposition by recursive splitting on the net tree.

    Every unordered pair of distinct vertices lands in exactly one returned
    pair.  Separation is tested on exact set distances and diameters, so each
    returned pair is ``s``-separated.
    """
    if s < 1:
        raise ValueError(f"separation must be >= 1, got {s}")
    dm = m.matrix()

    # compress chains of single-child nodes; a node is (vertex, level)
    def descend(x: int, i: int) -> tuple[int, int]:
        while i > 0 and len(tree.children(x, i)) == 1:
            i -= 1
        return x, i

    members: dict[tuple[int, int], np.ndarray] = {}
    diams: dict[tuple[int, int], float] = {}

    def info(node):
        if node not in members:
            ids = tree.descendants(*node)
            members[node] = ids
            diams[node] = float(dm[np.ix_(ids, ids)].max()) if len(ids) > 1 else 0.0
        return members[node], diams[node]

    def kids(node):
        x, i = node
        return [descend(y, i - 1) for y in tree.children(x, i)]

    pairs: list[WspdPair] = []
    root = descend(int(tree.levels[-1][0]), tree.top)
    stack_nodes = [root]
    stack_pairs: list[tuple] = []
    while stack_nodes:
        node = stack_nodes.pop()
        if node[1] == 0:
            continue
        ch = kids(node)
        stack_nodes.extend(ch)
        for a_idx in range(len(ch)):
            for b_idx in range(a_idx + 1, len(ch)):
                stack_pairs.append((ch[a_idx], ch[b_idx]))
        while stack_pairs:
            na, nb = stack_pairs.pop()
            ia, da = info(na)
            ib, db = info(nb)
            sep = float(dm[np.ix_(ia, ib)].min())
            if sep >= s * max(da, db):
                pairs.append(WspdPair(ia, ib, s))
                continue
            # split the node with the larger diameter; singletons never split
            if (da, na[1]) >= (db, nb[1]):
                stack_pairs.extend((c, nb) for c in kids(na))
            else:
                stack_pairs.extend((na, c) for c in kids(nb))
    return pairs


def estimate_fractal_dimension(m: MetricInput, radii: Sequence[tuple[float, float]]) -> float:
    """Slope of log(max net points in a ball) against log(R / r).

    For each ``(r, R)`` an ``r``-net ``N`` of the whole set is built and the
    largest ``|N ∩ B(p, R)|`` over ``p ∈ N`` is recorded.  This is a regression
    diagnostic, not a certified bound.
    """
    if m.kind is MetricKind.MATRIX:
        raise ValueError("fractal dimension is defined for Euclidean point sets")
    if len(radii) < 2:
        raise ValueError("need at least two (r, R) pairs")
    xs, ys = [], []
    everyone = np.arange(m.n)
    for r, R in radii:
        if R < 2 * r:
            raise ValueError(f"need R >= 2r, got r={r}, R={R}")
        net = build_net(m, everyone, r)
        counts = (m.submatrix(net, net) <= R).sum(axis=1)
        xs.append(math.log(R / r))
        ys.append(math.log(int(counts.max())))
    if max(ys) == 0.0:
        raise ValueError("every ball holds a single net point; slope undefined")
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def packing_violations(
    m: MetricInput, params: PackingParams, samples: Iterable[tuple[int, float, float]]
) -> list[tuple[int, float, float, int]]:
    """Check ``|P| <= eta * (R / r)**d`` on greedy ``r``-nets inside sampled balls.

    ``samples`` yields ``(center, R, r)``.  Returns the violating samples with
    the observed count; an empty list means no violation.
    """
    out = []
    for c, R, r in samples:
        inside = ball(m, c, R)
        # a greedy net is (strictly) r-separated
        net = build_net(m, inside, r)
        bound = params.eta * (R / r) ** params.d
        if len(net) > bound:
            out.append((int(c), float(R), float(r), int(len(net))))
    return out
