import pytest

from tests.cli_tests.unit import BaseUnitTest
from ecne.exceptions import ConfigError, ConvergenceError, EdgeListError, MissingEmbeddingError
from ecne.utils import AverageAggregator, Stopwatch, cast_tuple, derive_seed, resolve_threads


class TestThreads(BaseUnitTest):
    def test_explicit_wins(self, monkeypatch):
        monkeypatch.setenv('ECNE_THREADS', '4')
        assert resolve_threads(2) == 2
        assert resolve_threads() == 4

    def test_default(self, monkeypatch):
        monkeypatch.delenv('ECNE_THREADS', raising=False)
        assert resolve_threads() == 1

    @pytest.mark.parametrize('env', ['zero', 'abc', '0', '-2'])
    def test_invalid_env(self, monkeypatch, env):
        monkeypatch.setenv('ECNE_THREADS', env)
        with pytest.raises(ConfigError):
            resolve_threads()


class TestHelpers(BaseUnitTest):
    def test_average_aggregator(self):
        agg = AverageAggregator()
        assert agg.get() == 0
        agg.update(1.)
        agg.update(4., weight=3)
        assert agg.get() == pytest.approx(3.25)
        # reset after get
        assert agg.get() == 0

    def test_cast_tuple(self):
        assert cast_tuple(None) == ()
        assert cast_tuple('auc') == ('auc',)
        assert cast_tuple([1, 2]) == (1, 2)
        assert cast_tuple(3) == (3,)

    def test_stopwatch_accumulates(self):
        sw = Stopwatch()
        with sw('walks'):
            pass
        with sw('walks'):
            pass
        with sw('skipgram'):
            pass
        assert set(sw.timings) == {'walks', 'skipgram'}
        assert all(t >= 0 for t in sw.timings.values())

    def test_derive_seed(self):
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3)
        assert derive_seed(1, 2, 3) != derive_seed(1, 3, 2)
        assert 0 <= derive_seed(7) < 2 ** 32


class TestExceptions(BaseUnitTest):
    def test_edge_list_error_location(self):
        e = EdgeListError("bad line", 'g.edges', 3)
        assert isinstance(e, ValueError)
        assert 'g.edges' in str(e) and '3' in str(e)

    def test_convergence_residual(self):
        assert ConvergenceError("no convergence", residual=0.5).residual == 0.5

    def test_missing_embedding_message(self):
        assert str(MissingEmbeddingError("Edge 0_1 has no row")) == "Edge 0_1 has no row"
