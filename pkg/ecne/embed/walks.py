from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from gensim.models.word2vec import MAX_WORDS_IN_BATCH

from ..formatter import getLogger
from ..utils import resolve_threads

logger = getLogger(__name__)

# start nodes walked in lockstep with one random stream
CHUNK_SIZE = 1024
# gensim silently truncates longer sentences
MAX_WALK_LENGTH = MAX_WORDS_IN_BATCH


@dataclass(frozen=True)
class WalkConfig:
    """
    Random walk and skip-gram parameters.

    :param walks_per_node: Walks started from every node (n)
    :param walk_length: Maximum number of nodes in a walk (L), at most :data:`MAX_WALK_LENGTH`
    :param window: Skip-gram context window (w)
    :param negative: Negative samples per positive pair
    :param seed: Seed of the walks and of the skip-gram initialization
    :param epochs: Skip-gram passes over the walks
    :param lr_start: Initial skip-gram learning rate, decays linearly to `lr_end`
    :param workers: Skip-gram worker threads, 1 is the deterministic mode
    """
    walks_per_node: int = 10
    walk_length: int = 100
    window: int = 10
    negative: int = 100
    seed: int = 1
    epochs: int = 5
    lr_start: float = 0.025
    lr_end: float = 0.0001
    workers: int = 1

    def __post_init__(self):
        for name in ('walks_per_node', 'walk_length', 'window', 'negative', 'epochs', 'workers'):
            if getattr(self, name) < 1:
                raise ValueError("{} must be >= 1, got {}".format(name, getattr(self, name)))
        if self.walk_length > MAX_WALK_LENGTH:
            raise ValueError("walk_length must be <= {}, got {}".format(MAX_WALK_LENGTH, self.walk_length))
        if self.seed < 0:
            raise ValueError("seed must be >= 0, got {}".format(self.seed))
        if not self.lr_start >= self.lr_end > 0:
            raise ValueError("Learning rates must satisfy lr_start >= lr_end > 0, got {} and {}".format(
                self.lr_start, self.lr_end))


class AliasTable:
    """
    Vose alias tables for every row of a weighted CSR adjacency. Entry k of :attr:`prob` and :attr:`alias`
    belongs to the row owning position k of `indices`; the alias is an offset inside that row. Drawing a
    neighbor costs two uniforms regardless of the degree.

    :param adjacency: Weighted adjacency, indices sorted within each row
    :type adjacency: `scipy.sparse.csr_matrix`
    """

    def __init__(self, adjacency):
        self.indptr = adjacency.indptr.astype(np.int64)
        self.indices = adjacency.indices.astype(np.int64)
        weights = np.asarray(adjacency.data, dtype=np.float64)
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise ValueError("Walk weights must be finite and positive")
        self.prob = np.ones(len(weights))
        self.alias = np.zeros(len(weights), dtype=np.int64)
        for row in range(len(self.indptr) - 1):
            start, end = self.indptr[row], self.indptr[row + 1]
            if end - start > 1:
                self._init_row(start, weights[start:end])

    @property
    def degrees(self):
        return np.diff(self.indptr)

    def _init_row(self, start, w):
        n = len(w)
        norm_prob = w * (n / w.sum())
        prob, alias = np.ones(n), np.zeros(n, dtype=np.int64)
        small, large = [], []
        for i, p in enumerate(norm_prob):
            if p > 1.0:
                large.append(i)
            else:
                small.append(i)
        while small and large:
            small_index, large_index = small.pop(), large.pop()
            prob[small_index] = norm_prob[small_index]
            alias[small_index] = large_index
            norm_prob[large_index] = norm_prob[large_index] - (1.0 - norm_prob[small_index])
            if norm_prob[large_index] > 1.0:
                large.append(large_index)
            else:
                small.append(large_index)
        # leftovers only differ from 1 by rounding
        self.prob[start:start + n] = prob
        self.alias[start:start + n] = alias

    def transition_probabilities(self, row):
        """ Exact neighbor distribution encoded by the table of `row`, aligned with its sorted neighbors """
        start, end = self.indptr[row], self.indptr[row + 1]
        n = end - start
        prob, alias = self.prob[start:end], self.alias[start:end]
        dist = prob / n
        np.add.at(dist, alias, (1. - prob) / n)
        return dist

    def draw(self, rows, rng):
        """ One neighbor for each entry of `rows` (all rows must have a neighbor) """
        start = self.indptr[rows]
        deg = self.indptr[rows + 1] - start
        k = start + np.minimum((rng.random(len(rows)) * deg).astype(np.int64), deg - 1)
        keep = rng.random(len(rows)) < self.prob[k]
        pos = np.where(keep, k, start + self.alias[k])
        return self.indices[pos]


def _walk_chunk(table, starts, walk_length, rng):
    walks = np.full((len(starts), walk_length), -1, dtype=np.int64)
    walks[:, 0] = starts
    alive = np.flatnonzero(table.degrees[starts] > 0)
    lengths = np.where(table.degrees[starts] > 0, walk_length, 1)
    cur = starts[alive]
    for step in range(1, walk_length):
        if not len(alive):
            break
        cur = table.draw(cur, rng)
        walks[alive, step] = cur
    return [w[:n] for w, n in zip(walks, lengths)]


def generate_walks(graph, cfg, threads=None):
    """
    Weighted truncated random walks. Every node starts `cfg.walks_per_node` walks, one per round, in an
    order shuffled independently for every round. Each step moves to a neighbor with probability proportional
    to the edge weight; a walk holds at most `cfg.walk_length` nodes and a node without neighbors yields a
    walk of length 1.

    Start nodes are processed in fixed chunks, each with its own random stream derived from
    (seed, round, chunk), so the output does not depend on the number of threads.

    :param graph: Anything exposing `node_count` and a weighted `adjacency()`, typically a
        :class:`~ecne.graph.linegraph.WeightedLineGraph` or, for node walks, a :class:`~ecne.graph.graph.Graph`
    :param cfg: Walk parameters
    :type cfg: :class:`WalkConfig`
    :param threads: Worker threads, defaults to ECNE_THREADS or 1
    :type threads: `int`, optional

    :return: Walks, as arrays of node ids, round by round
    :rtype: `list` of `numpy.ndarray`
    """
    threads = resolve_threads(threads)
    table = AliasTable(graph.adjacency())
    n = graph.node_count
    jobs = []
    for r in range(cfg.walks_per_node):
        order = np.random.default_rng([cfg.seed, r]).permutation(n)
        for c, start in enumerate(range(0, n, CHUNK_SIZE)):
            jobs.append((order[start:start + CHUNK_SIZE], (cfg.seed, r, c)))

    def run(job):
        starts, key = job
        return _walk_chunk(table, starts, cfg.walk_length, np.random.default_rng(list(key)))

    if threads > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            chunks = list(executor.map(run, jobs))
    else:
        chunks = [run(job) for job in jobs]
    walks = [w for chunk in chunks for w in chunk]
    logger.debug("Generated {} walks over {} nodes".format(len(walks), n))
    return walks
