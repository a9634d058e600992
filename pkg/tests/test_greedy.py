import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lankysep.graph import WeightedGraph
from lankysep.greedy import GreedyConfig, greedy_spanner, shortest_path_dist, sorted_candidates
from lankysep.metric import euclidean, load_and_normalize, matrix, unit_ball
from lankysep.oracle import kruskal_mst, verify_greedy_edge_property, verify_stretch

from conftest import norm_points, point_sets

GRID3_EDGES = [(0, 1), (0, 3), (1, 2), (1, 4), (2, 5), (3, 4), (3, 6), (4, 5), (4, 7), (5, 8), (6, 7), (7, 8)]


def naive_greedy(m, t):
    """Textbook path-greedy: fresh label-setting search per candidate, no caching."""
    u, v, w = m.host_edges()
    order = sorted(range(len(u)), key=lambda k: (w[k], u[k], v[k]))
    adj = [[] for _ in range(m.n)]
    kept = []
    for k in order:
        a, b, c = int(u[k]), int(v[k]), float(w[k])
        dist = [math.inf] * m.n
        dist[a] = 0.0
        done = [False] * m.n
        for _ in range(m.n):
            x = min((i for i in range(m.n) if not done[i]), key=lambda i: dist[i])
            if dist[x] == math.inf:
                break
            done[x] = True
            for y, wy in adj[x]:
                dist[y] = min(dist[y], dist[x] + wy)
        if dist[b] > t * c:
            kept.append((a, b))
            adj[a].append((b, c))
            adj[b].append((a, c))
    return sorted(kept)


def test_three_collinear_points():
    g = greedy_spanner(norm_points([[0.0], [1.0], [2.0]]), GreedyConfig(0.5))
    assert sorted(g.edge_set()) == [(0, 1), (1, 2)]


def test_unit_square_small_eps_keeps_diagonals():
    m = norm_points([[0, 0], [1, 0], [0, 1], [1, 1]])
    g = greedy_spanner(m, GreedyConfig(0.05))
    assert g.m == 6


def test_grid3_edge_set(grid3):
    g = greedy_spanner(grid3, GreedyConfig(0.5))
    assert sorted(g.edge_set()) == GRID3_EDGES
    mst = kruskal_mst(grid3)
    assert mst <= g.edge_set()
    assert sum(grid3.distance(a, b) for a, b in mst) == 8.0


def test_candidate_order_breaks_ties_by_index(grid3):
    u, v, w = sorted_candidates(grid3)
    keys = list(zip(w.tolist(), u.tolist(), v.tolist()))
    assert keys == sorted(keys)


def test_shortest_path_dist():
    g = WeightedGraph.from_edges(4, [(0, 1, 1.0), (1, 2, 1.0)])
    assert shortest_path_dist(g, 0, 2) == 2.0
    assert shortest_path_dist(g, 0, 3) == math.inf
    assert shortest_path_dist(g, 0, 2, cutoff=1.5) == math.inf
    assert shortest_path_dist(g, 1, 1) == 0.0


def test_eps_range():
    with pytest.raises(ValueError):
        GreedyConfig(0.0)
    with pytest.raises(ValueError):
        GreedyConfig(0.75)
    assert GreedyConfig(0.5).t == 1.5


@given(point_sets(max_n=18), st.sampled_from([0.1, 0.25, 0.5]))
def test_matches_naive_greedy(pts, eps):
    m = load_and_normalize(euclidean(pts))
    g = greedy_spanner(m, GreedyConfig(eps))
    assert sorted(g.edge_set()) == naive_greedy(m, 1 + eps)


@given(point_sets(max_n=30), st.sampled_from([0.1, 0.5]))
def test_greedy_output_is_spanner_with_edge_property(pts, eps):
    m = load_and_normalize(euclidean(pts))
    g = greedy_spanner(m, GreedyConfig(eps))
    assert verify_stretch(g, m, 1 + eps).passed
    assert verify_greedy_edge_property(g, m, 1 + eps).passed
    assert kruskal_mst(m) <= g.edge_set()


def test_matrix_metric_matches_naive():
    rng = np.random.default_rng(3)
    x = rng.random((20, 3))
    d = np.abs(x[:, None, :] - x[None, :, :]).sum(axis=2)  # l1 metric
    m = load_and_normalize(matrix(d))
    g = greedy_spanner(m, GreedyConfig(0.3))
    assert sorted(g.edge_set()) == naive_greedy(m, 1.3)


def test_unit_ball_matches_naive_and_stays_in_host():
    rng = np.random.default_rng(5)
    m = load_and_normalize(unit_ball(rng.random((40, 2)) * 6, 0.6))
    g = greedy_spanner(m, GreedyConfig(0.5))
    assert sorted(g.edge_set()) == naive_greedy(m, 1.5)
    assert np.all(g.w <= 2 * m.mu)
    assert verify_stretch(g, m, 1.5).passed


def test_disconnected_unit_ball_flagged():
    m = load_and_normalize(unit_ball([[0, 0], [1, 0], [10, 0], [11, 0]], 0.5))
    g = greedy_spanner(m)
    assert g.flags == {"disconnected_host": True, "host_components": 2}
    assert sorted(g.edge_set()) == [(0, 1), (2, 3)]
    assert verify_stretch(g, m, 1.5).passed


def test_single_point_and_pair():
    assert greedy_spanner(norm_points([[0.0, 0.0]])).m == 0
    g = greedy_spanner(norm_points([[0.0, 0.0], [3.0, 4.0]]))
    assert g.edges() == [(0, 1, 1.0)]


def test_grid_spanner_is_grid_graph():
    m = load_and_normalize(euclidean([[i, j] for i in range(10) for j in range(10)]))
    g = greedy_spanner(m)
    assert g.m == 2 * 10 * 9
    assert np.all(g.w == 1.0)
