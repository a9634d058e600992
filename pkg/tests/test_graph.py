import numpy as np
import pytest

from lankysep.graph import UnionFind, WeightedGraph


def test_edges_are_validated():
    with pytest.raises(ValueError):
        WeightedGraph(3, [1], [0], [1.0])
    with pytest.raises(ValueError):
        WeightedGraph(3, [0], [1], [0.0])
    with pytest.raises(ValueError):
        WeightedGraph(3, [0, 0], [1, 1], [1.0, 1.0])
    with pytest.raises(ValueError):
        WeightedGraph(2, [0], [2], [1.0])


def test_from_edges_orders_endpoints():
    g = WeightedGraph.from_edges(3, [(2, 0, 1.5), (1, 2, 1.0)])
    assert g.edges() == [(0, 2, 1.5), (1, 2, 1.0)]
    assert g.degrees().tolist() == [1, 1, 2]
    assert g.max_degree() == 2


def test_induced_renumbers():
    g = WeightedGraph.from_edges(5, [(0, 1, 1.0), (1, 3, 2.0), (3, 4, 3.0)])
    sub, ids = g.induced([4, 1, 3])
    assert ids.tolist() == [1, 3, 4]
    assert sub.edges() == [(0, 1, 2.0), (1, 2, 3.0)]


def test_csr_symmetric():
    g = WeightedGraph.from_edges(3, [(0, 1, 2.0)])
    a = g.to_csr().toarray()
    assert np.array_equal(a, a.T) and a[0, 1] == 2.0


def test_union_find_groups():
    uf = UnionFind(6)
    assert uf.union(4, 5) and uf.union(1, 4)
    assert not uf.union(5, 1)
    assert uf.count == 4
    assert uf.groups() == [[0], [1, 4, 5], [2], [3]]
    assert uf.groups([5, 2]) == [[2], [5]]
