import json
import os

import pytest

from tests.cli_tests.unit import BaseUnitTest
from tests.graphs import barbell, karate
from ecne.cli import main
from ecne.evaluate.report import read_metric_report
from ecne.graph.graph import write_edge_list

try:
    import torch
    TORCH_AVAILABLE = True
except (ImportError, NameError, AttributeError, OSError):
    TORCH_AVAILABLE = False

FAST = ['--walks', '5', '--walk-len', '40', '--window', '5', '--neg', '5']


@pytest.fixture
def karate_file(tmp_path, monkeypatch):
    monkeypatch.delenv('ECNE_THREADS', raising=False)
    path = str(tmp_path / 'karate.edges')
    write_edge_list(karate(), path)
    return path


@pytest.fixture
def barbell_file(tmp_path, monkeypatch):
    monkeypatch.delenv('ECNE_THREADS', raising=False)
    path = str(tmp_path / 'barbell.edges')
    write_edge_list(barbell(), path)
    return path


class TestEmbedCommand(BaseUnitTest):
    def test_karate(self, karate_file, tmp_path):
        out = str(tmp_path / 'out')
        assert main(['embed', '--input', karate_file, '--out', out, '--dump-centrality'] + FAST) == 0
        with open(os.path.join(out, 'karate.manifest.json')) as f:
            manifest = json.load(f)
        assert (manifest['nodes'], manifest['edges'], manifest['line_nodes']) == (34, 78, 78)
        assert manifest['line_edges'] == 528
        assert manifest['dim'] == 128
        assert manifest['method'] == 'ECNE'
        assert len(manifest['skipgram_loss']) == 5
        with open(os.path.join(out, 'karate.emb')) as f:
            assert f.readline().split() == ['78', '128']
        with open(os.path.join(out, 'karate.timings.json')) as f:
            assert {'centrality', 'line_graph', 'walks', 'skipgram'} <= set(json.load(f))
        assert os.path.exists(os.path.join(out, 'karate.remap.tsv'))
        assert os.path.exists(os.path.join(out, 'karate.cb.tsv'))
        assert not os.path.exists(os.path.join(out, 'karate.linegraph.tsv'))

    def test_reruns_are_byte_identical(self, karate_file, tmp_path):
        contents = []
        for run in ('a', 'b'):
            out = str(tmp_path / run)
            assert main(['embed', '--input', karate_file, '--out', out, '--dim', '16', '--seed', '3'] + FAST) == 0
            with open(os.path.join(out, 'karate.emb'), 'rb') as f:
                contents.append(f.read())
        assert contents[0] == contents[1]

    def test_config_file_and_dataset_name(self, karate_file, tmp_path):
        config = tmp_path / 'run.yaml'
        config.write_text("input: {}\nmode: ecne-d\ndim: 32\nwalks: 2\nwalk-len: 20\nneg: 2\n".format(karate_file))
        out = str(tmp_path / 'out')
        assert main(['embed', '--config', str(config), '--out', out, '--dataset', 'club']) == 0
        with open(os.path.join(out, 'club.manifest.json')) as f:
            manifest = json.load(f)
        assert manifest['method'] == 'ECNEd'
        assert manifest['dim'] == 16

    def test_inspect(self, karate_file, tmp_path):
        out = str(tmp_path / 'out')
        assert main(['inspect', '--input', karate_file, '--out', out]) == 0
        with open(os.path.join(out, 'karate.inspect.json')) as f:
            summary = json.load(f)
        assert summary == {'nodes': 34, 'edges': 78, 'components': 1, 'line_nodes': 78, 'line_edges': 528,
                           'dim_ecne': 128, 'dim_ecne_d': 56}

    def test_missing_input_file(self, tmp_path):
        assert main(['embed', '--input', str(tmp_path / 'nope.edges'), '--out', str(tmp_path)]) == 2

    def test_no_input(self, tmp_path):
        assert main(['embed', '--out', str(tmp_path)]) == 2

    def test_no_input_is_logged(self, tmp_path, caplog):
        with caplog.at_level('ERROR', logger='ecne'):
            assert main(['inspect', '--out', str(tmp_path)]) == 2
        assert 'no input edge list' in caplog.text

    def test_bad_thread_count(self, karate_file, tmp_path, monkeypatch, caplog):
        monkeypatch.setenv('ECNE_THREADS', 'abc')
        with caplog.at_level('ERROR', logger='ecne'):
            assert main(['embed', '--input', karate_file, '--out', str(tmp_path)] + FAST) == 2
        assert 'ECNE_THREADS' in caplog.text

    def test_invalid_utf8_edge_list(self, tmp_path, caplog):
        path = tmp_path / 'latin1.edges'
        path.write_bytes(b"0 1\n1 \xe9\n")
        with caplog.at_level('ERROR', logger='ecne'):
            assert main(['inspect', '--input', str(path), '--out', str(tmp_path)]) == 2
        assert ':2:' in caplog.text

    def test_malformed_edge_list(self, tmp_path):
        path = tmp_path / 'bad.edges'
        path.write_text("0 1\n1\n")
        assert main(['embed', '--input', str(path), '--out', str(tmp_path)]) == 2

    def test_bad_config(self, karate_file, tmp_path):
        config = tmp_path / 'run.yaml'
        config.write_text("colour: red\n")
        assert main(['embed', '--config', str(config), '--input', karate_file]) == 2

    def test_unknown_task_is_usage_error(self):
        with pytest.raises(SystemExit) as excinfo:
            main(['eval', 'rank'])
        assert excinfo.value.code == 2


class TestEvalCommand(BaseUnitTest):
    def test_classify(self, karate_file, tmp_path):
        out = str(tmp_path / 'out')
        argv = ['eval', 'classify', '--input', karate_file, '--out', out, '--dim', '16',
                '--train-fractions', '0.3,0.7', '--seeds', '1,2'] + FAST
        assert main(argv) == 0
        rows = read_metric_report(os.path.join(out, 'karate.classify.tsv'))
        assert [(r.task, r.metric) for r in rows] == [('classify@0.3', 'micro-F1'), ('classify@0.3', 'macro-F1'),
                                                      ('classify@0.7', 'micro-F1'), ('classify@0.7', 'macro-F1')]
        assert all(r.method == 'ECNE' and r.dataset == 'karate' and r.runs == 2 for r in rows)
        assert all(0. <= r.value <= 1. for r in rows)

    def test_cluster_two_cliques(self, barbell_file, tmp_path):
        out = str(tmp_path / 'out')
        argv = ['eval', 'cluster', '--input', barbell_file, '--out', out, '--dim', '16', '--walks', '20',
                '--walk-len', '40', '--window', '5', '--neg', '5']
        assert main(argv) == 0
        rows = read_metric_report(os.path.join(out, 'barbell.cluster.tsv'))
        assert len(rows) == 1
        assert (rows[0].task, rows[0].metric, rows[0].runs) == ('cluster', 'NMI', 5)
        assert rows[0].value >= 0.99

    def test_saved_embeddings_and_baseline(self, karate_file, tmp_path):
        out = str(tmp_path / 'out')
        assert main(['embed', '--input', karate_file, '--out', out, '--dim', '16'] + FAST) == 0
        argv = ['eval', 'cluster', '--input', karate_file, '--out', out, '--dim', '16', '--seeds', '1',
                '--embeddings', os.path.join(out, 'karate.emb'), '--baseline'] + FAST
        assert main(argv) == 0
        rows = read_metric_report(os.path.join(out, 'karate.cluster.tsv'))
        assert [r.method for r in rows] == ['ECNE', 'DeepWalk-average', 'DeepWalk-hadamard', 'DeepWalk-weighted-L1',
                                            'DeepWalk-weighted-L2']

    def test_embeddings_missing_rows(self, karate_file, barbell_file, tmp_path):
        out = str(tmp_path / 'out')
        assert main(['embed', '--input', barbell_file, '--out', out, '--dim', '8'] + FAST) == 0
        argv = ['eval', 'cluster', '--input', karate_file, '--out', out,
                '--embeddings', os.path.join(out, 'barbell.emb')]
        assert main(argv) == 2


@pytest.mark.skipif(not TORCH_AVAILABLE, reason="PyTorch is not used as a backend")
class TestLinkpredCommand(BaseUnitTest):
    def test_karate(self, karate_file, tmp_path):
        out = str(tmp_path / 'out')
        argv = ['linkpred', '--input', karate_file, '--out', out, '--agg', 'avg', '--dim', '16', '--epochs', '2',
                '--max-paths', '5', '--seeds', '1'] + FAST
        assert main(argv) == 0
        rows = read_metric_report(os.path.join(out, 'karate.linkpred.tsv'))
        assert [(r.task, r.method, r.metric, r.runs) for r in rows] == [('linkpred', 'ECNE-LP-AVG', 'AUC', 1)]
        for suffix in ('manifest.json', 'ckpt', 'predictions.tsv'):
            assert os.path.exists(os.path.join(out, 'karate.seed1.' + suffix))

    def test_reruns_are_byte_identical(self, karate_file, tmp_path):
        contents = []
        for run in ('a', 'b'):
            out = str(tmp_path / run)
            argv = ['linkpred', '--input', karate_file, '--out', out, '--agg', 'lstm', '--dim', '16',
                    '--epochs', '2', '--max-paths', '5', '--seeds', '1'] + FAST
            assert main(argv) == 0
            files = {}
            for name in ('karate.seed1.ckpt', 'karate.seed1.predictions.tsv', 'karate.seed1.manifest.json',
                         'karate.linkpred.tsv'):
                with open(os.path.join(out, name), 'rb') as f:
                    files[name] = f.read()
            contents.append(files)
        assert contents[0] == contents[1]


class TestLinkpredWithoutTorch(BaseUnitTest):
    def test_missing_backend_fails_cleanly(self, karate_file, tmp_path, mocker, caplog):
        # a None entry makes the import raise ImportError
        mocker.patch.dict('sys.modules', {'ecne.torch_linkpred.experiment': None})
        with caplog.at_level('ERROR', logger='ecne'):
            assert main(['linkpred', '--input', karate_file, '--out', str(tmp_path)]) == 1
        assert 'needs torch' in caplog.text
