"""Brute-force verifiers for spanner and separator properties.

Each verifier recomputes what it needs from the raw metric and edge list; none
reuses bookkeeping produced by the construction it checks.  Results come back
as :class:`CheckReport` records.
"""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra, floyd_warshall

from .graph import UnionFind, WeightedGraph
from .metric import MetricInput, MetricKind, NetHierarchy, PackingParams, build_net_tree, build_wspd

__all__ = [
    "CheckReport",
    "measure_lankiness",
    "measure_lankiness_dense",
    "measure_weak_lankiness",
    "measure_thinness",
    "verify_stretch",
    "verify_greedy_edge_property",
    "verify_separator",
    "verify_cone_property",
    "count_edges",
    "kruskal_mst",
    "verify_mst_containment",
    "verify_reroute_claims",
    "verify_long_edge_endpoints",
    "separated_pair_edge_counts",
    "wspd_edge_counts",
]

EXACT_LIMIT = 500
REL_TOL = 1e-9


@dataclass
class CheckReport:
    check_name: str
    passed: bool
    measured: float
    bound: float | None = None
    witness: Any = None
    notes: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(_plain(asdict(self)), sort_keys=True)


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    return x


def _centers(n: int, exact_limit: int, samples: int, seed: int) -> np.ndarray:
    if n <= exact_limit:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=min(samples, n), replace=False))


def _max_overlap(starts: np.ndarray, ends: np.ndarray, radii: np.ndarray) -> tuple[int, float]:
    """Max over ``radii`` of the number of half-open intervals ``[start, end)`` containing r."""
    if len(starts) == 0 or len(radii) == 0:
        return 0, 0.0
    s = np.sort(starts)
    e = np.sort(ends)
    counts = np.searchsorted(s, radii, side="right") - np.searchsorted(e, radii, side="right")
    k = int(np.argmax(counts))
    return int(counts[k]), float(radii[k])


def _candidate_radii(dx: np.ndarray, w: np.ndarray) -> np.ndarray:
    base = np.unique(np.concatenate([dx, w]))
    mids = 0.5 * (base[1:] + base[:-1])
    return np.concatenate([base, mids])


def _lanky_intervals(g: WeightedGraph, dx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # cut iff lo <= r < hi; counted iff also r <= w
    da, db = dx[g.u], dx[g.v]
    lo = np.minimum(da, db)
    hi = np.maximum(da, db)
    end = np.minimum(hi, np.nextafter(g.w, np.inf))
    ok = lo < end
    return lo[ok], end[ok]


def measure_lankiness(
    g: WeightedGraph,
    m: MetricInput,
    exact_limit: int = EXACT_LIMIT,
    samples: int = 512,
    seed: int = 0,
    bound: float | None = None,
) -> CheckReport:
    """Largest number of edges of length >= r cut by a ball B(x, r), x a vertex."""
    best, wit = 0, None
    centers = _centers(m.n, exact_limit, samples, seed)
    for x in centers.tolist():
        dx = np.asarray(m.distances_from(x), dtype=float)
        lo, end = _lanky_intervals(g, dx)
        cnt, r = _max_overlap(lo, end, _candidate_radii(dx, g.w))
        if cnt > best:
            best, wit = cnt, {"center": x, "radius": r}
    passed = bound is None or best <= bound
    return CheckReport("lankiness", passed, float(best), bound, wit, {"centers": int(len(centers))})


def measure_lankiness_dense(g: WeightedGraph, m: MetricInput, factor: int = 10, chunk: int = 4096) -> CheckReport:
    """Lankiness by direct ball membership on a radius grid ``factor`` times denser than the breakpoints.

    Every gap between consecutive breakpoints (distances from the centre and
    edge weights) is split into ``factor`` equal steps; each radius is then
    evaluated by scanning all edges.
    """
    best, wit = 0, None
    for x in range(m.n):
        dx = np.asarray(m.distances_from(x), dtype=float)
        base = np.unique(np.concatenate([dx, g.w]))
        steps = np.arange(factor) / factor
        grid = (base[:-1, None] + (base[1:] - base[:-1])[:, None] * steps).ravel()
        grid = np.concatenate([grid, base[-1:], base[-1:] + 1.0])
        for s in range(0, len(grid), chunk):
            r = grid[s : s + chunk]
            inside = dx[:, None] <= r[None, :]
            cut = inside[g.u] != inside[g.v]
            counted = cut & (g.w[:, None] >= r[None, :])
            cnt = counted.sum(axis=0)
            k = int(np.argmax(cnt)) if len(cnt) else 0
            if len(cnt) and cnt[k] > best:
                best, wit = int(cnt[k]), {"center": x, "radius": float(r[k])}
    return CheckReport("lankiness_dense", True, float(best), None, wit, {"factor": factor})


def measure_weak_lankiness(
    g: WeightedGraph,
    m: MetricInput,
    exact_limit: int = EXACT_LIMIT,
    samples: int = 512,
    seed: int = 0,
    bound: float | None = None,
) -> CheckReport:
    """Largest number of vertices inside B(x, r) incident to a cut edge of length >= r."""
    best, wit = 0, None
    centers = _centers(m.n, exact_limit, samples, seed)
    for x in centers.tolist():
        dx = np.asarray(m.distances_from(x), dtype=float)
        wplus = np.nextafter(g.w, np.inf)
        # vertex a counts on [dx[a], max over cut-able edges of min(dx[b], w+))
        end = np.full(m.n, -np.inf)
        np.maximum.at(end, g.u, np.minimum(dx[g.v], wplus))
        np.maximum.at(end, g.v, np.minimum(dx[g.u], wplus))
        ok = dx < end
        cnt, r = _max_overlap(dx[ok], end[ok], _candidate_radii(dx, g.w))
        if cnt > best:
            best, wit = cnt, {"center": x, "radius": r}
    passed = bound is None or best <= bound
    return CheckReport("weak_lankiness", passed, float(best), bound, wit, {"centers": int(len(centers))})


def _pair_index(m: MetricInput, pairs) -> np.ndarray:
    idx = np.full((m.n, m.n), -1, dtype=np.int64)
    for k, p in enumerate(pairs):
        idx[np.ix_(p.a, p.b)] = k
        idx[np.ix_(p.b, p.a)] = k
    return idx


def wspd_edge_counts(g: WeightedGraph, m: MetricInput, pairs) -> np.ndarray:
    """Number of ``g`` edges between the two sides of each pair."""
    if len(pairs) == 0:
        return np.zeros(0, dtype=np.int64)
    idx = _pair_index(m, pairs)
    ids = idx[g.u, g.v]
    if np.any(ids < 0):
        raise ValueError("pairs do not cover every edge")
    return np.bincount(ids, minlength=len(pairs))


def separated_pair_edge_counts(g: WeightedGraph, pairs: Iterable[tuple[Sequence[int], Sequence[int]]]) -> list[int]:
    out = []
    for a, b in pairs:
        ina = np.zeros(g.n, dtype=bool)
        inb = np.zeros(g.n, dtype=bool)
        ina[np.asarray(a, dtype=np.intp)] = True
        inb[np.asarray(b, dtype=np.intp)] = True
        out.append(int(np.count_nonzero((ina[g.u] & inb[g.v]) | (inb[g.u] & ina[g.v]))))
    return out


def _random_separated_balls(m: MetricInput, count: int, c: float, rng: np.random.Generator):
    dm = m.matrix()
    n = m.n
    made = 0
    tries = 0
    while made < count and tries < 20 * count:
        tries += 1
        a, b = rng.choice(n, size=2, replace=False)
        rho = dm[a, b] * rng.uniform(0.05, 0.25)
        A = np.flatnonzero(dm[a] <= rho)
        B = np.flatnonzero(dm[b] <= rho)
        if np.intersect1d(A, B).size:
            continue
        sub = dm[np.ix_(A, B)]
        diam = max(dm[np.ix_(A, A)].max(), dm[np.ix_(B, B)].max())
        if sub.min() >= c * diam:
            made += 1
            yield A, B


def measure_thinness(
    g: WeightedGraph,
    m: MetricInput,
    tree: NetHierarchy | None = None,
    s: float = 1.0,
    random_pairs: int = 10_000,
    seed: int = 0,
    bound: float | None = None,
) -> CheckReport:
    """Max number of edges across an ``s``-separated pair.

    Pairs come from an ``s``-WSPD plus ``random_pairs`` sampled ball pairs
    that are verified to be ``s``-separated.  A sampled surrogate: the maximum
    over all separated pairs is not computed.
    """
    tree = tree or build_net_tree(m)
    pairs = build_wspd(m, tree, s)
    counts = wspd_edge_counts(g, m, pairs)
    best = int(counts.max()) if len(counts) else 0
    wit = None
    if best:
        k = int(np.argmax(counts))
        wit = {"a": pairs[k].a.tolist(), "b": pairs[k].b.tolist(), "source": "wspd"}
    rng = np.random.default_rng(seed)
    sampled = 0
    for A, B in _random_separated_balls(m, random_pairs, s, rng):
        sampled += 1
        (cnt,) = separated_pair_edge_counts(g, [(A, B)])
        if cnt > best:
            best, wit = cnt, {"a": A.tolist(), "b": B.tolist(), "source": "random"}
    passed = bound is None or best <= bound
    return CheckReport(
        "thinness", passed, float(best), bound, wit, {"s": s, "wspd_pairs": len(pairs), "random_pairs": sampled}
    )


def _host_distances(host, n: int, sources: np.ndarray | None) -> np.ndarray:
    if isinstance(host, WeightedGraph):
        csr = host.to_csr()
        if sources is None:
            return floyd_warshall(csr, directed=False)
        return dijkstra(csr, directed=False, indices=sources)
    if host.kind is MetricKind.UNIT_BALL:
        u, v, w = host.host_edges()
        return _host_distances(WeightedGraph(n, u, v, w), n, sources)
    dm = host.matrix()
    return dm if sources is None else dm[sources]


def verify_stretch(
    g: WeightedGraph, host, t: float, exact_limit: int = EXACT_LIMIT, samples: int = 10_000, seed: int = 0
) -> CheckReport:
    """Max over vertex pairs of spanner distance / host distance, against ``t``."""
    n = g.n
    if n < 2:
        return CheckReport("stretch", True, 1.0, t)
    if n <= exact_limit:
        sources = None
        dh = floyd_warshall(g.to_csr(), directed=False)
    else:
        rng = np.random.default_rng(seed)
        sources = np.sort(rng.choice(n, size=min(n, max(1, samples // n)), replace=False))
        dh = dijkstra(g.to_csr(), directed=False, indices=sources)
    dg = _host_distances(host, n, sources)
    mask = np.isfinite(dg) & (dg > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(mask, dh / np.where(mask, dg, 1.0), 0.0)
    k = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
    worst = float(ratio[k])
    a = int(k[0]) if sources is None else int(sources[k[0]])
    wit = {"pair": [a, int(k[1])], "spanner": float(dh[k]), "host": float(dg[k])}
    passed = worst <= t * (1 + REL_TOL)
    return CheckReport("stretch", passed, worst, t, wit, {"exact": sources is None})


def _dijkstra_without(adj, src: int, dst: int, skip: tuple[int, int], cutoff: float) -> float:
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, x = heapq.heappop(heap)
        if x == dst:
            return d
        if d > dist[x]:
            continue
        for y, w in adj[x]:
            if (x, y) == skip or (y, x) == skip:
                continue
            nd = d + w
            if nd <= cutoff and nd < dist.get(y, math.inf):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return math.inf


def verify_greedy_edge_property(g: WeightedGraph, m: MetricInput | None = None, t: float = 1.5, strict: bool = True) -> CheckReport:
    """Every edge must satisfy dist_{H - e}(x, y) > t * w(e) (``>=`` if not strict).

    ``measured`` is the smallest ratio dist_{H-e} / w found (inf for bridges
    that are the only connection within the cutoff).
    """
    adj: list[list[tuple[int, float]]] = [[] for _ in range(g.n)]
    for a, b, w in zip(g.u.tolist(), g.v.tolist(), g.w.tolist()):
        adj[a].append((b, w))
        adj[b].append((a, w))
    worst, wit = math.inf, None
    for a, b, w in zip(g.u.tolist(), g.v.tolist(), g.w.tolist()):
        d = _dijkstra_without(adj, a, b, (a, b), t * w * (1 + 1e-12))
        ratio = d / w
        if ratio < worst:
            worst, wit = ratio, {"edge": [a, b, w], "detour": d}
    passed = worst > t if strict else worst >= t
    return CheckReport("greedy_edge_property", passed, worst, t, None if passed else wit)


def verify_separator(res, g: WeightedGraph, m: MetricInput, params: PackingParams) -> CheckReport:
    """Radius law, separation and balance, recomputed from scratch."""
    n = m.n
    problems = []
    r, rs = res.base_radius, res.final_radius
    if not (r <= rs <= 2 * r):
        problems.append({"radius_law": [r, rs]})
    dv = np.asarray(m.distances_from(int(res.center)), dtype=float)
    inside = dv <= rs
    in_s = np.zeros(n, dtype=bool)
    in_s[np.asarray(res.s, dtype=np.intp)] = True
    live = ~(in_s[g.u] | in_s[g.v])
    crossing = live & (inside[g.u] != inside[g.v])
    if crossing.any():
        k = int(np.flatnonzero(crossing)[0])
        problems.append({"crossing_edge": [int(g.u[k]), int(g.v[k]), float(g.w[k])]})
    keep = np.flatnonzero(~in_s)
    largest = 0
    sizes: list[int] = []
    if len(keep):
        sub_mask = live
        local = np.full(n, -1)
        local[keep] = np.arange(len(keep))
        csr = csr_matrix(
            (np.ones(int(sub_mask.sum())), (local[g.u[sub_mask]], local[g.v[sub_mask]])), shape=(len(keep), len(keep))
        )
        _, labels = connected_components(csr, directed=False)
        sizes = sorted(np.bincount(labels).tolist(), reverse=True)
        largest = sizes[0]
    cap = n - math.ceil(n / (2.0 * params.lam))
    if largest > cap:
        problems.append({"largest_component": largest, "cap": cap})
    if list(res.components) != sizes:
        problems.append({"reported_components": list(res.components)[:10], "actual": sizes[:10]})
    count = int(inside.sum())
    if not (count >= n / (2.0 * params.lam) and count <= n / 2.0):
        problems.append({"inside_count": count})
    return CheckReport(
        "separator",
        not problems,
        float(largest) / n if n else 0.0,
        cap / n if n else None,
        problems or None,
        {"size": int(in_s.sum()), "inside": count},
    )


def verify_cone_property(
    g: WeightedGraph, m: MetricInput, eps: float, trials: int = 100, seed: int = 0, tree: NetHierarchy | None = None
) -> CheckReport:
    """At most one X-Y edge per angular sector of width eps/8 around any apex in X.

    X is the point set under a sampled net-tree node, R = max(12 diam(X)/eps,
    r_i) and Y is every point at distance >= R from X, so diam(X) <= eps R / 12.
    """
    if m.dim != 2 or m.kind is MetricKind.MATRIX:
        raise ValueError("cone check needs planar points")
    tree = tree or build_net_tree(m)
    rng = np.random.default_rng(seed)
    theta = eps / 8.0
    nbins = math.ceil(2 * math.pi / theta)
    dm = m.matrix()
    pts = m.points
    violations = []
    worst = 0
    nontrivial = 0
    for _ in range(trials):
        i = int(rng.integers(0, max(1, tree.top - 1)))
        x = int(rng.choice(tree.levels[i]))
        X = tree.descendants(x, i)
        diam = float(dm[np.ix_(X, X)].max()) if len(X) > 1 else 0.0
        R = max(12.0 * diam / eps, tree.radius(i))
        in_x = np.zeros(m.n, dtype=bool)
        in_x[X] = True
        in_y = dm[X].min(axis=0) >= R
        fwd = in_x[g.u] & in_y[g.v]
        bwd = in_y[g.u] & in_x[g.v]
        ys = np.concatenate([g.v[fwd], g.u[bwd]])
        if len(ys) >= 2:
            nontrivial += 1
        for apex in X.tolist():
            vec = pts[ys] - pts[apex]
            ang = np.mod(np.arctan2(vec[:, 1], vec[:, 0]), 2 * math.pi)
            bins = np.minimum((ang // theta).astype(np.int64), nbins - 1)
            cnt = np.bincount(bins, minlength=nbins) if len(bins) else np.zeros(1, dtype=np.int64)
            worst = max(worst, int(cnt.max()))
            if cnt.max() > 1:
                violations.append({"level": i, "node": x, "apex": apex, "R": R, "sector": int(np.argmax(cnt))})
                break
    return CheckReport(
        "cone_property",
        not violations,
        float(worst),
        1.0,
        violations[:5] or None,
        {"trials": trials, "configs_with_two_or_more_edges": nontrivial},
    )


def count_edges(g: WeightedGraph, bound: float | None = None) -> CheckReport:
    """Edges per vertex; complete graphs on more than three vertices are flagged."""
    n = g.n
    ratio = g.m / n if n else 0.0
    complete = n > 3 and g.m == n * (n - 1) // 2
    passed = not complete and (bound is None or ratio <= bound)
    return CheckReport("edge_count", passed, ratio, bound, {"complete": True} if complete else None, {"edges": g.m})


def kruskal_mst(m: MetricInput) -> set[tuple[int, int]]:
    """Kruskal over the host graph, ties broken by the index pair."""
    n = m.n
    if m.kind is MetricKind.UNIT_BALL:
        u, v, w = m.host_edges()
    else:
        u, v = np.triu_indices(n, k=1)
        w = m.matrix()[u, v]
    order = np.lexsort((v, u, w))
    uf = UnionFind(n)
    out = set()
    for k in order.tolist():
        a, b = int(u[k]), int(v[k])
        if uf.union(a, b):
            out.add((a, b))
            if len(out) == n - 1:
                break
    return out


def verify_mst_containment(g: WeightedGraph, m: MetricInput) -> CheckReport:
    mst = kruskal_mst(m)
    missing = sorted(mst - g.edge_set())
    total = float(sum(m.distance(a, b) for a, b in mst))
    return CheckReport("mst_containment", not missing, total, None, missing[:10] or None, {"mst_edges": len(mst)})


def verify_reroute_claims(m: MetricInput, log, eps: float) -> CheckReport:
    """Each rerouted (v->w) to u needs d(u,w) <= eps d(v,w) and d(v,w) >= d(v,u)/(1+eps)."""
    dm = m.matrix()
    v, w, u = np.asarray(log.v), np.asarray(log.w), np.asarray(log.u)
    if len(v) == 0:
        return CheckReport("reroute_claim", True, 0.0, eps, None, {"entries": 0})
    dvw, duw, dvu = dm[v, w], dm[u, w], dm[v, u]
    first = duw <= eps * dvw * (1 + REL_TOL)
    second = dvw >= dvu / (1 + eps) * (1 - REL_TOL)
    ok = first & second
    worst = float(np.max(duw / dvw))
    wit = None
    if not ok.all():
        k = int(np.flatnonzero(~ok)[0])
        wit = {"v": int(v[k]), "w": int(w[k]), "u": int(u[k])}
    return CheckReport("reroute_claim", bool(ok.all()), worst, eps, wit, {"entries": int(len(v)), "holding": int(ok.sum())})


def verify_long_edge_endpoints(
    g1: WeightedGraph, m: MetricInput, gamma: float, centers: Sequence[int] | None = None
) -> CheckReport:
    """Any ball B(p, r) holds at most one point incident to an edge of length >= 4 gamma r.

    For a fixed centre the count is maximised exactly: vertex x is counted for
    r in [d(p, x), L(x) / (4 gamma)], L(x) being its longest incident edge.
    """
    longest = np.zeros(m.n)
    np.maximum.at(longest, g1.u, g1.w)
    np.maximum.at(longest, g1.v, g1.w)
    reach = longest / (4.0 * gamma)
    best, wit = 0, None
    for p in (range(m.n) if centers is None else centers):
        dp = np.asarray(m.distances_from(int(p)), dtype=float)
        ok = (longest > 0) & (dp <= reach)
        if not ok.any():
            continue
        starts = dp[ok]
        ends = np.nextafter(reach[ok], np.inf)
        cnt, r = _max_overlap(starts, ends, np.unique(starts))
        if cnt > best:
            best, wit = cnt, {"center": int(p), "radius": r}
    return CheckReport("long_edge_endpoints", best <= 1, float(best), 1.0, wit if best > 1 else None)
