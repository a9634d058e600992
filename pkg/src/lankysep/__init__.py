"""Greedy and bounded-degree spanners with ball-cut separators in doubling metrics."""
from .cgmz import CgmzConfig, OrientedSpanner, RerouteLog, cgmz_spanner, cgmz_step1, cgmz_step2
from .graph import UnionFind, WeightedGraph
from .greedy import GreedyConfig, greedy_spanner
from .metric import (
    MetricError,
    MetricInput,
    MetricKind,
    NetHierarchy,
    PackingParams,
    WspdPair,
    build_net,
    build_net_tree,
    build_wspd,
    euclidean,
    is_separated_pair,
    load_and_normalize,
    matrix,
    unit_ball,
)
from .oracle import CheckReport
from .separator import (
    InfeasibleCenterError,
    SeparatorConfig,
    SeparatorResult,
    Variant,
    extract_separator,
    find_center,
    recursive_decompose,
)

__all__ = [
    "CgmzConfig",
    "CheckReport",
    "GreedyConfig",
    "InfeasibleCenterError",
    "MetricError",
    "MetricInput",
    "MetricKind",
    "NetHierarchy",
    "OrientedSpanner",
    "PackingParams",
    "RerouteLog",
    "SeparatorConfig",
    "SeparatorResult",
    "UnionFind",
    "Variant",
    "WeightedGraph",
    "WspdPair",
    "build_net",
    "build_net_tree",
    "build_wspd",
    "cgmz_spanner",
    "cgmz_step1",
    "cgmz_step2",
    "euclidean",
    "extract_separator",
    "find_center",
    "greedy_spanner",
    "is_separated_pair",
    "load_and_normalize",
    "matrix",
    "recursive_decompose",
    "unit_ball",
]
