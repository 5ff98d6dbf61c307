from types import SimpleNamespace

import numpy as np
import pytest

from tests.embed_tests.unit import BaseUnitTest
from tests.graphs import karate, p3
from ecne.embed import WalkConfig, choose_dimension, deepwalk_pipeline, ecne_pipeline, run_ecne
from ecne.embed.io import read_embeddings, write_embeddings
from ecne.embed.skipgram import EmbeddingMatrix
from ecne.exceptions import InputError

SMALL = WalkConfig(walks_per_node=4, walk_length=20, window=3, negative=5, epochs=2)


def sized(nodes, edges):
    return SimpleNamespace(node_count=nodes, edge_count=edges)


class TestChooseDimension(BaseUnitTest):
    def test_matched_examples(self):
        assert choose_dimension(sized(6100, 9939), 'matched') == 80
        assert choose_dimension(sized(100, 200), 'matched') == 64

    def test_fixed(self):
        assert choose_dimension(sized(6100, 9939), 'fixed') == 128
        assert choose_dimension(sized(3, 2), 'fixed', d_fixed=16) == 16

    @pytest.mark.parametrize('nodes,edges', [(34, 78), (332, 2126), (10, 9), (1000, 1001), (5, 2000)])
    def test_matched_budget(self, nodes, edges):
        d = choose_dimension(sized(nodes, edges), 'matched')
        assert d % 8 == 0 or d == 128
        assert d <= 128
        if d < 128:
            assert edges * d >= nodes * 128

    def test_errors(self):
        with pytest.raises(ValueError):
            choose_dimension(sized(3, 0), 'matched')
        with pytest.raises(ValueError):
            choose_dimension(sized(3, 2), 'balanced')


class TestPipeline(BaseUnitTest):
    def test_path_shape(self):
        E = ecne_pipeline(p3(), cfg=SMALL, d_fixed=16)
        assert E.vectors.shape == (2, 16)

    def test_karate_fixed(self):
        result = run_ecne(karate(), cfg=SMALL)
        assert result.embeddings.vectors.shape == (78, 128)
        assert result.dimension == 128
        assert result.line_graph.node_count == 78
        assert set(result.timings) == {'centrality', 'line_graph', 'walks', 'skipgram'}

    def test_karate_matched(self):
        # 34 * 128 / 78 = 55.8, rounded up to 56
        result = run_ecne(karate(), mode='matched', cfg=SMALL)
        assert result.embeddings.dim == 56

    def test_uniform_weighting(self):
        result = run_ecne(p3(), cfg=SMALL, d_fixed=8, weighting='uniform')
        np.testing.assert_array_equal(result.line_graph.weights, [1.])
        with pytest.raises(ValueError):
            run_ecne(p3(), cfg=SMALL, weighting='harmonic')

    def test_deterministic(self):
        a = ecne_pipeline(karate(), cfg=SMALL, d_fixed=16)
        b = ecne_pipeline(karate(), cfg=SMALL, d_fixed=16)
        assert np.array_equal(a.vectors, b.vectors)

    def test_deepwalk_node_embeddings(self):
        E = deepwalk_pipeline(karate(), SMALL, d=16)
        assert E.kind == 'node'
        assert E.vectors.shape == (34, 16)


class TestEmbeddingFile(BaseUnitTest):
    def test_write_read(self, tmp_path):
        E = EmbeddingMatrix(vectors=np.array([[0.5, -1.25], [3., 1e-3]], dtype=np.float32))
        path = str(tmp_path / 'x.emb')
        write_embeddings(E, ['0_1', '1_2'], path)
        with open(path) as f:
            assert f.readline() == "2 2\n"
            assert f.readline() == "0_1 0.5 -1.25\n"
        names, F = read_embeddings(path)
        assert names == ['0_1', '1_2']
        np.testing.assert_array_equal(F.vectors, E.vectors)

    def test_name_count_mismatch(self, tmp_path):
        with pytest.raises(ValueError):
            write_embeddings(EmbeddingMatrix(vectors=np.zeros((2, 2))), ['a'], str(tmp_path / 'x.emb'))

    @pytest.mark.parametrize('text', ["two 2\n", "1 2\na 0.1\n", "2 1\na 0.1\n", "1 1\na 0.1\nb 0.2\n"])
    def test_malformed(self, tmp_path, text):
        path = tmp_path / 'bad.emb'
        path.write_text(text)
        with pytest.raises(InputError):
            read_embeddings(str(path))
