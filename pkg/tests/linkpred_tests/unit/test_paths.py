from itertools import permutations

import networkx as nx
import pytest

from tests.linkpred_tests.unit import BaseUnitTest
from tests.graphs import c4, from_nx, k4, karate
from ecne.linkpred import PathBundle, build_bundle, find_paths


def brute_force_paths(g, u, v, l):
    """ Every node sequence of length l + 1 from u to v, checked edge by edge """
    others = [x for x in range(g.node_count) if x not in (u, v)]
    found = set()
    for middle in permutations(others, l - 1):
        nodes = (u,) + middle + (v,)
        if all(g.has_edge(a, b) for a, b in zip(nodes[:-1], nodes[1:])):
            found.add(nodes)
    return found


class TestFindPaths(BaseUnitTest):
    def test_cycle(self):
        paths = find_paths(c4(), 0, 1, 3)
        assert [p.nodes for p in paths] == [(0, 3, 2, 1)]
        g = c4()
        assert paths[0].edges == (g.edge_id(0, 3), g.edge_id(2, 3), g.edge_id(1, 2))

    def test_complete_graph(self):
        paths = find_paths(k4(), 0, 1, 2)
        assert [p.nodes for p in paths] == [(0, 2, 1), (0, 3, 1)]

    def test_direct_edge_never_returned(self):
        assert find_paths(k4(), 0, 1, 1) == []

    @pytest.mark.parametrize('l', [2, 3, 4])
    def test_exhaustive_agreement(self, l):
        for seed in range(5):
            g = from_nx(nx.gnp_random_graph(8, 0.45, seed=seed))
            for u, v in [(0, 7), (1, 2), (3, 5)]:
                paths = find_paths(g, u, v, l, max_paths=10 ** 6)
                assert {p.nodes for p in paths} == brute_force_paths(g, u, v, l)

    def test_reservoir_sampling(self):
        g = from_nx(nx.complete_graph(8))
        total = len(brute_force_paths(g, 0, 1, 4))
        assert total == 6 * 5 * 4
        paths = find_paths(g, 0, 1, 4, max_paths=100, seed=3)
        assert len(paths) == min(total, 100)
        assert len({p.nodes for p in paths}) == len(paths)
        assert [p.nodes for p in paths] == sorted(p.nodes for p in paths)
        assert paths == find_paths(g, 0, 1, 4, max_paths=100, seed=3)
        assert paths != find_paths(g, 0, 1, 4, max_paths=100, seed=4)

    def test_paths_are_simple_and_adjacent(self):
        g = karate()
        for path in find_paths(g, 0, 33, 4, max_paths=50):
            assert len(set(path.nodes)) == 5
            assert (path.u, path.v) == (0, 33)
            assert len(path) == 4
            for (a, b), e in zip(zip(path.nodes[:-1], path.nodes[1:]), path.edges):
                assert g.edge_id(a, b) == e

    def test_errors(self):
        with pytest.raises(ValueError):
            find_paths(k4(), 0, 1, 0)
        with pytest.raises(ValueError):
            find_paths(k4(), 2, 2, 3)
        with pytest.raises(ValueError):
            find_paths(k4(), 0, 1, 3, max_paths=0)


class TestBuildBundle(BaseUnitTest):
    def test_lengths(self):
        bundle = build_bundle(karate(), 0, 33, lengths=(3, 4), max_paths=20)
        assert isinstance(bundle, PathBundle)
        assert bundle.lengths == (3, 4)
        assert bundle.edge_array(3).shape[1] == 3
        assert bundle.edge_array(4).shape == (20, 4)
        assert bundle.edge_ids() == {e for l in (3, 4) for e in bundle.edge_array(l).ravel().tolist()}

    def test_no_paths(self):
        g = from_nx(nx.path_graph(3))
        bundle = build_bundle(g, 0, 2, lengths=(3,))
        assert bundle.paths[3] == []
        assert bundle.edge_array(3).shape == (0, 3)
