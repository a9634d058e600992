"""Random ball-cut separators.

A centre ``v`` and radius ``r`` are chosen so that ``B(v, r)`` holds at least
``n / (2 lam)`` vertices while ``B(v, 2r)`` holds at most ``n / 2``.  The ball
radius is then drawn uniformly from ``[r, 2r)`` and the edges cut by the ball
give the separator: all their endpoints (``lanky``) or just the endpoints
inside the ball (``thin``).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .graph import UnionFind, WeightedGraph
from .metric import MetricInput, PackingParams

__all__ = [
    "Variant",
    "SeparatorConfig",
    "SeparatorResult",
    "InfeasibleCenterError",
    "DecompositionNode",
    "find_center",
    "extract_separator",
    "recursive_decompose",
    "child_seed",
]


class Variant(str, enum.Enum):
    LANKY = "lanky"
    THIN = "thin"


class InfeasibleCenterError(RuntimeError):
    """No ``(v, r)`` meets both ball-size conditions; ``lam`` is too small.

    ``near_miss`` is ``(v, r, inside, outer)`` for the candidate with the
    largest inner ball whose outer ball overflowed the least.
    """

    def __init__(self, message: str, near_miss: tuple):
        super().__init__(message)
        self.near_miss = near_miss


@dataclass(frozen=True)
class SeparatorConfig:
    params: PackingParams = field(default_factory=PackingParams)
    variant: Variant = Variant.LANKY
    resample_budget: int = 16
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.resample_budget < 1:
            raise ValueError("resample_budget must be >= 1")


@dataclass
class SeparatorResult:
    s: np.ndarray
    center: int
    base_radius: float
    final_radius: float
    cut_edges: list[tuple[int, int, float]]
    short_cut_edges: list[tuple[int, int, float]]
    inside_count: int
    components: list[int]
    variant: Variant = Variant.LANKY

    def to_json(self) -> dict:
        return {
            "center": int(self.center),
            "r": float(self.base_radius),
            "r_star": float(self.final_radius),
            "separator": [int(x) for x in self.s],
            "components": [int(c) for c in self.components],
            "cut_edges": [[int(a), int(b), float(w)] for a, b, w in self.cut_edges],
        }


def find_center(g: WeightedGraph, m: MetricInput, params: PackingParams) -> tuple[int, float]:
    """Exhaustive search for ``(v, r)`` with the two ball-size conditions.

    Candidate radii for ``v`` are its distances to all vertices.  Among the
    feasible pairs the one with the most vertices in ``B(v, r)`` wins; ties go
    to the smallest ``v``, then the smallest ``r``.
    """
    n = m.n
    if n < 2:
        raise ValueError("need at least two vertices")
    lo_need = n / (2.0 * params.lam)
    hi_cap = n / 2.0
    best = None  # (inside, -v, -r)
    miss = None  # (outer overflow, -inside, v, r)
    for v in range(n):
        d = np.sort(m.distances_from(v))
        inside = np.searchsorted(d, d, side="right")
        outer = np.searchsorted(d, 2.0 * d, side="right")
        ok = (inside >= lo_need) & (outer <= hi_cap)
        if ok.any():
            k = int(np.flatnonzero(ok & (inside == inside[ok].max()))[0])
            cand = (int(inside[k]), -v, -float(d[k]))
            if best is None or cand > best:
                best = cand
        elif best is None:
            # among radii meeting the inner condition, the least overflowing outer ball
            big = np.flatnonzero(inside >= lo_need)
            k = int(big[np.argmin(outer[big])])
            cand = (int(outer[k] - hi_cap), -int(inside[k]), v, float(d[k]))
            if miss is None or cand < miss:
                miss = cand
    if best is None:
        _, neg_in, v, r = miss
        raise InfeasibleCenterError(
            f"no centre satisfies both ball conditions with lam={params.lam}; "
            f"best near miss v={v}, r={r}",
            (v, r, -neg_in, int(miss[0] + hi_cap)),
        )
    return -best[1], -best[2]


def _cut_mask(g: WeightedGraph, dv: np.ndarray, radius: float) -> tuple[np.ndarray, np.ndarray]:
    inside = dv <= radius
    cut = inside[g.u] != inside[g.v]
    return inside, cut


def _components(n: int, g: WeightedGraph, removed: np.ndarray) -> list[int]:
    uf = UnionFind(n)
    keep = ~(removed[g.u] | removed[g.v])
    for a, b in zip(g.u[keep].tolist(), g.v[keep].tolist()):
        uf.union(a, b)
    alive = np.flatnonzero(~removed).tolist()
    return sorted((len(c) for c in uf.groups(alive)), reverse=True)


def extract_separator(g: WeightedGraph, m: MetricInput, cfg: SeparatorConfig = SeparatorConfig()) -> SeparatorResult:
    n = m.n
    if g.n != n:
        raise ValueError("graph and metric disagree on the vertex count")
    v, r = find_center(g, m, cfg.params)
    dv = np.asarray(m.distances_from(v), dtype=float)
    if r == 0.0:
        # keep the ball non-degenerate: r* then stays below the nearest neighbour
        r = 0.5 * float(dv[dv > 0].min())

    rng = np.random.default_rng(cfg.rng_seed)
    best = None
    for _ in range(cfg.resample_budget):
        sigma = rng.random()
        rstar = (1.0 + sigma) * r
        _, cut = _cut_mask(g, dv, rstar)
        n_short = int(np.count_nonzero(cut & (g.w <= rstar)))
        if best is None or n_short < best[0]:
            best = (n_short, rstar)
    rstar = best[1]

    inside, cut = _cut_mask(g, dv, rstar)
    cu, cv, cw = g.u[cut], g.v[cut], g.w[cut]
    if cfg.variant is Variant.LANKY:
        s = np.unique(np.concatenate([cu, cv]))
    else:
        ends = np.concatenate([cu, cv])
        s = np.unique(ends[inside[ends]])
    removed = np.zeros(n, dtype=bool)
    removed[s] = True
    cut_edges = [(int(a), int(b), float(w)) for a, b, w in zip(cu, cv, cw)]
    return SeparatorResult(
        s=s.astype(np.intp),
        center=int(v),
        base_radius=float(r),
        final_radius=float(rstar),
        cut_edges=cut_edges,
        short_cut_edges=[e for e in cut_edges if e[2] <= rstar],
        inside_count=int(np.count_nonzero(inside)),
        components=_components(n, g, removed),
        variant=cfg.variant,
    )


def child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index]).generate_state(1, np.uint64)[0])


@dataclass
class DecompositionNode:
    """A node of the separator tree; ``vertices`` are ids in the root graph."""

    vertices: np.ndarray
    separator: SeparatorResult | None = None
    separator_ids: np.ndarray | None = None
    children: list["DecompositionNode"] = field(default_factory=list)

    @property
    def is_leaf(self) -> bool:
        return self.separator is None

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def to_json(self) -> dict:
        out = {"vertices": [int(x) for x in self.vertices]}
        if self.separator is not None:
            out["separator"] = self.separator.to_json()
            out["separator_ids"] = [int(x) for x in self.separator_ids]
        out["children"] = [c.to_json() for c in self.children]
        return out


def recursive_decompose(
    g: WeightedGraph, m: MetricInput, cfg: SeparatorConfig = SeparatorConfig(), leaf_size: int = 2
) -> DecompositionNode:
    """Separate recursively until every piece has at most ``leaf_size`` vertices.

    Children are the connected components left after removing the separator;
    each child is separated with its own seed derived from the parent's.
    """
    if leaf_size < 2:
        raise ValueError("leaf_size must be >= 2")

    def solve(ids: np.ndarray, seed: int) -> DecompositionNode:
        node = DecompositionNode(vertices=ids)
        if len(ids) <= leaf_size:
            return node
        sub_g, _ = g.induced(ids)
        sub_m = m.subset(ids)
        res = extract_separator(sub_g, sub_m, SeparatorConfig(cfg.params, cfg.variant, cfg.resample_budget, seed))
        node.separator = res
        node.separator_ids = ids[res.s]
        removed = np.zeros(len(ids), dtype=bool)
        removed[res.s] = True
        uf = UnionFind(len(ids))
        keep = ~(removed[sub_g.u] | removed[sub_g.v])
        for a, b in zip(sub_g.u[keep].tolist(), sub_g.v[keep].tolist()):
            uf.union(a, b)
        for k, comp in enumerate(uf.groups(np.flatnonzero(~removed).tolist())):
            node.children.append(solve(ids[np.array(comp, dtype=np.intp)], child_seed(seed, k)))
        return node

    return solve(np.arange(m.n, dtype=np.intp), cfg.rng_seed)
