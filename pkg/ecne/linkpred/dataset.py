import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .paths import DEFAULT_LENGTHS, DEFAULT_MAX_PATHS, build_bundle
from ..formatter import getLogger

logger = getLogger(__name__)

SMALL_GRAPH_NODES = 4000
SPLITS = ('train', 'val', 'test')


def split_ratio_for(node_count):
    """ Fraction of the edges used for training: 0.9 up to 4,000 nodes, 0.5 above """
    return 0.9 if node_count <= SMALL_GRAPH_NODES else 0.5


@dataclass
class LinkDataset:
    """
    Positive edges (label 1) and sampled non-edges (label 0), split in train, validation and test. Paths of
    every example are extracted from `train_graph`, the input graph without its test positives, and their edge
    ids refer to that graph.
    """
    graph: object
    train_graph: object
    split_ratio: float
    seed: int
    lengths: tuple
    max_paths: int
    pairs: dict = field(default_factory=dict)
    labels: dict = field(default_factory=dict)
    bundles: dict = field(default_factory=dict)

    def count(self, split, label=None):
        labels = self.labels[split]
        return len(labels) if label is None else int(np.count_nonzero(labels == label))

    def negatives(self):
        rows = [self.pairs[s][self.labels[s] == 0] for s in SPLITS]
        neg = np.concatenate(rows)
        return neg[np.lexsort((neg[:, 1], neg[:, 0]))]

    def manifest(self):
        digest = hashlib.sha256()
        for u, v in self.negatives().tolist():
            digest.update("{}\t{}\n".format(u, v).encode('utf-8'))
        return {
            'split_ratio': self.split_ratio,
            'seed': self.seed,
            'lengths': list(self.lengths),
            'max_paths': self.max_paths,
            'nodes': self.graph.node_count,
            'edges': self.graph.edge_count,
            'counts': {s: {'positive': self.count(s, 1), 'negative': self.count(s, 0)} for s in SPLITS},
            'negatives_sha256': digest.hexdigest(),
        }

    def write_manifest(self, path):
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(self.manifest(), f, indent=2, sort_keys=True)
            f.write('\n')


def sample_negatives(g, count, rng):
    """
    `count` distinct canonical non-edges, uniformly at random.

    :raises ValueError: the graph has fewer than `count` non-edges
    """
    n = g.node_count
    non_edges = n * (n - 1) // 2 - g.edge_count
    if non_edges < count:
        raise ValueError("Graph too dense: {} negative pairs requested but only {} non-edges exist".format(
            count, non_edges))
    edge_keys = g.edges[:, 0] * n + g.edges[:, 1]

    if non_edges <= 4 * count:
        # dense graph, enumerate instead of rejecting
        iu, ju = np.triu_indices(n, k=1)
        keys = iu * n + ju
        keys = keys[~np.isin(keys, edge_keys)]
        keys = keys[rng.permutation(len(keys))[:count]]
        return np.stack([keys // n, keys % n], axis=1)

    chosen = []
    seen = set()
    while len(chosen) < count:
        batch = rng.integers(0, n, size=(2 * (count - len(chosen)) + 16, 2))
        batch = batch[batch[:, 0] != batch[:, 1]]
        batch.sort(axis=1)
        keys = batch[:, 0] * n + batch[:, 1]
        keys = keys[~np.isin(keys, edge_keys)]
        for k in keys.tolist():
            if k not in seen:
                seen.add(k)
                chosen.append(k)
                if len(chosen) == count:
                    break
    keys = np.array(chosen, dtype=np.int64)
    return np.stack([keys // n, keys % n], axis=1)


def _bundles_for(g, pairs, lengths, max_paths, seed):
    return [build_bundle(g, u, v, lengths=lengths, max_paths=max_paths, seed=seed) for u, v in pairs]


def build_dataset(g, seed=1, lengths=DEFAULT_LENGTHS, max_paths=DEFAULT_MAX_PATHS, split_ratio=None,
                  val_fraction=0.1, workers=1):
    """
    Link prediction examples of `g`. A `split_ratio` share of the edges are training positives, the rest are
    test positives and get removed from the graph paths are extracted from. Negatives are non-edges, as many as
    positives in every split, never shared between splits. A `val_fraction` share of the training examples is
    held out for early stopping.

    :param split_ratio: Training share of the edges, defaults to :func:`split_ratio_for`
    :type split_ratio: `float`, optional
    :param workers: Processes extracting the paths
    :type workers: `int`, optional

    :raises ValueError: too few edges to split, or too dense to sample the negatives

    :rtype: :class:`LinkDataset`
    """
    if split_ratio is None:
        split_ratio = split_ratio_for(g.node_count)
    if not 0 < split_ratio < 1:
        raise ValueError("split_ratio must be in (0, 1), got {}".format(split_ratio))
    rng = np.random.default_rng(seed)
    m = g.edge_count
    n_train = int(round(split_ratio * m))
    n_val = int(round(val_fraction * n_train))
    if n_train - n_val < 1 or n_train >= m:
        raise ValueError("{} edges cannot be split with ratio {}".format(m, split_ratio))

    perm = rng.permutation(m)
    positives = g.edges[perm]
    negatives = sample_negatives(g, m, rng)
    train_graph = g.without_edges(perm[n_train:])

    def examples(pos, neg):
        pairs = np.concatenate([pos, neg])
        labels = np.concatenate([np.ones(len(pos)), np.zeros(len(neg))]).astype(np.int64)
        order = rng.permutation(len(pairs))
        return pairs[order], labels[order]

    bounds = {'val': (0, n_val), 'train': (n_val, n_train), 'test': (n_train, m)}
    dataset = LinkDataset(graph=g, train_graph=train_graph, split_ratio=split_ratio, seed=seed,
                          lengths=tuple(lengths), max_paths=max_paths)
    for split in SPLITS:
        a, b = bounds[split]
        dataset.pairs[split], dataset.labels[split] = examples(positives[a:b], negatives[a:b])

    for split in SPLITS:
        pairs = dataset.pairs[split].tolist()
        if workers > 1 and len(pairs) > workers:
            chunks = np.array_split(np.arange(len(pairs)), workers)
            with ProcessPoolExecutor(max_workers=workers) as executor:
                futures = [executor.submit(_bundles_for, train_graph, [pairs[i] for i in c], dataset.lengths,
                                           max_paths, seed) for c in chunks]
                dataset.bundles[split] = [b for f in futures for b in f.result()]
        else:
            dataset.bundles[split] = _bundles_for(train_graph, pairs, dataset.lengths, max_paths, seed)
        empty = sum(1 for b in dataset.bundles[split] if not any(b.paths.values()))
        logger.debug("{}: {} examples, {} without any path".format(split, len(pairs), empty))

    logger.info("Link dataset: {} train / {} val / {} test examples, split ratio {}".format(
        dataset.count('train'), dataset.count('val'), dataset.count('test'), split_ratio))
    return dataset
