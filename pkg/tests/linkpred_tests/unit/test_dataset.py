import json

import numpy as np
import pytest

from tests.linkpred_tests.unit import BaseUnitTest
from tests.graphs import k4, karate
from ecne.linkpred import build_dataset, split_ratio_for
from ecne.linkpred.dataset import SPLITS, sample_negatives


@pytest.fixture(scope='module')
def karate_dataset():
    return build_dataset(karate(), seed=2, max_paths=20)


class TestSplitRatio(BaseUnitTest):
    def test_policy(self):
        assert split_ratio_for(332) == 0.9
        assert split_ratio_for(4000) == 0.9
        assert split_ratio_for(18772) == 0.5


class TestSampleNegatives(BaseUnitTest):
    def test_negatives_are_non_edges(self):
        g = karate()
        neg = sample_negatives(g, 78, np.random.default_rng(0))
        assert neg.shape == (78, 2)
        assert np.all(neg[:, 0] < neg[:, 1])
        assert not any(g.has_edge(u, v) for u, v in neg.tolist())
        assert len({tuple(p) for p in neg.tolist()}) == 78

    def test_dense_graph_enumerates(self):
        g = k4().without_edges([0, 5])
        neg = sample_negatives(g, 2, np.random.default_rng(0))
        assert sorted(map(tuple, neg.tolist())) == [(0, 1), (2, 3)]

    def test_too_dense(self):
        with pytest.raises(ValueError, match="too dense"):
            sample_negatives(k4(), 1, np.random.default_rng(0))


class TestBuildDataset(BaseUnitTest):
    def test_counts(self, karate_dataset):
        ds = karate_dataset
        assert ds.split_ratio == 0.9
        n_train = round(0.9 * 78)
        n_val = round(0.1 * n_train)
        assert ds.count('test', 1) == ds.count('test', 0) == 78 - n_train
        assert ds.count('val', 1) == ds.count('val', 0) == n_val
        assert ds.count('train', 1) == ds.count('train', 0) == n_train - n_val

    def test_negatives_disjoint_and_absent(self, karate_dataset):
        ds = karate_dataset
        seen = set()
        for split in SPLITS:
            neg = ds.pairs[split][ds.labels[split] == 0]
            pairs = {tuple(p) for p in neg.tolist()}
            assert not pairs & seen
            seen |= pairs
            assert not any(ds.graph.has_edge(u, v) for u, v in pairs)

    def test_test_positives_removed_from_path_graph(self, karate_dataset):
        ds = karate_dataset
        test_pos = ds.pairs['test'][ds.labels['test'] == 1]
        assert ds.train_graph.edge_count == ds.graph.edge_count - len(test_pos)
        held_out = {tuple(p) for p in test_pos.tolist()}
        for split in SPLITS:
            for bundle in ds.bundles[split]:
                for e in bundle.edge_ids():
                    assert tuple(ds.train_graph.edges[e].tolist()) not in held_out

    def test_bundles_align_with_pairs(self, karate_dataset):
        ds = karate_dataset
        for split in SPLITS:
            assert len(ds.bundles[split]) == len(ds.pairs[split])
            for bundle, (u, v) in zip(ds.bundles[split], ds.pairs[split].tolist()):
                assert (bundle.u, bundle.v) == (u, v)
                assert bundle.lengths == (3, 4)
                assert all(len(ps) <= 20 for ps in bundle.paths.values())

    def test_reproducible_manifest(self, karate_dataset, tmp_path):
        again = build_dataset(karate(), seed=2, max_paths=20)
        assert again.manifest() == karate_dataset.manifest()
        other = build_dataset(karate(), seed=3, max_paths=20)
        assert other.manifest()['negatives_sha256'] != karate_dataset.manifest()['negatives_sha256']

        path = tmp_path / 'ds.manifest.json'
        karate_dataset.write_manifest(str(path))
        manifest = json.loads(path.read_text())
        assert manifest['split_ratio'] == 0.9
        assert manifest['lengths'] == [3, 4]
        assert manifest['counts']['test']['positive'] == karate_dataset.count('test', 1)

    def test_process_pool_gives_same_bundles(self, karate_dataset):
        parallel = build_dataset(karate(), seed=2, max_paths=20, workers=2)
        for split in SPLITS:
            assert [b.paths for b in parallel.bundles[split]] == [b.paths for b in karate_dataset.bundles[split]]

    def test_invalid_split(self):
        with pytest.raises(ValueError):
            build_dataset(karate(), split_ratio=1.)
        with pytest.raises(ValueError):
            build_dataset(k4(), split_ratio=0.9)
