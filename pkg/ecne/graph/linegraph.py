from dataclasses import dataclass, replace

import numpy as np
from scipy import sparse

from .centrality import CentralityVector
from ..formatter import getLogger

logger = getLogger(__name__)

WEIGHTINGS = ('current-flow', 'uniform')


@dataclass(frozen=True)
class WeightedLineGraph:
    """
    Line graph of a :class:`~ecne.graph.graph.Graph`: line-node p is the original edge p, and line-nodes
    p < q are joined when the original edges share a node. Line-edges are stored in canonical order.

    :param node_count: Number of line-nodes, equal to the number of original edges
    :param pairs: Line-edges (p, q), p < q, shape (k, 2), lexsorted
    :param shared: Original node j common to both original edges of each line-edge
    :param outer: Original nodes (i, k), the non-shared endpoints of p and q respectively
    :param weights: Positive weight of each line-edge
    """
    node_count: int
    pairs: np.ndarray
    shared: np.ndarray
    outer: np.ndarray
    weights: np.ndarray

    @property
    def edge_count(self):
        return len(self.pairs)

    def adjacency(self):
        """ Symmetric weighted adjacency as a scipy CSR matrix with sorted indices """
        p, q = self.pairs[:, 0], self.pairs[:, 1]
        A = sparse.coo_matrix(
            (np.concatenate([self.weights, self.weights]), (np.concatenate([p, q]), np.concatenate([q, p]))),
            shape=(self.node_count, self.node_count)).tocsr()
        A.sort_indices()
        return A

    def __repr__(self):
        return "WeightedLineGraph(nodes={}, edges={})".format(self.node_count, self.edge_count)


def size_estimate(g):
    """
    Line graph size from the degree sequence: (|E|, 1/2 * sum(d^2) - |E|).
    """
    d = g.degrees().astype(np.int64)
    return g.edge_count, int((d * (d - 1)).sum() // 2)


def build_line_graph(g):
    """
    Every original node v emits the clique over its incident edges, deg(v)*(deg(v)-1)/2 line-edges. Weights
    are set to 1.0; see :func:`weight_edges`.

    :return: The line graph with unit weights
    :rtype: :class:`WeightedLineGraph`
    """
    chunks_p, chunks_q, chunks_j = [], [], []
    degrees = g.degrees()
    for v in np.flatnonzero(degrees >= 2):
        inc = g.incident_edges(v)
        iu, ju = np.triu_indices(len(inc), k=1)
        a, b = inc[iu], inc[ju]
        chunks_p.append(np.minimum(a, b))
        chunks_q.append(np.maximum(a, b))
        chunks_j.append(np.full(len(a), v, dtype=np.int64))

    if chunks_p:
        p, q, j = np.concatenate(chunks_p), np.concatenate(chunks_q), np.concatenate(chunks_j)
    else:
        p = q = j = np.empty(0, dtype=np.int64)
    order = np.lexsort((q, p))
    p, q, j = p[order], q[order], j[order]
    # two original edges sharing both endpoints would be parallel edges
    assert not np.any((p[1:] == p[:-1]) & (q[1:] == q[:-1])), "parallel edges in line graph construction"

    ends_p, ends_q = g.edges[p], g.edges[q]
    outer_i = np.where(ends_p[:, 0] == j, ends_p[:, 1], ends_p[:, 0])
    outer_k = np.where(ends_q[:, 0] == j, ends_q[:, 1], ends_q[:, 0])

    L = WeightedLineGraph(
        node_count=g.edge_count,
        pairs=np.stack([p, q], axis=1),
        shared=j,
        outer=np.stack([outer_i, outer_k], axis=1),
        weights=np.ones(len(p)))
    logger.debug("Built {}".format(L))
    return L


def weight_edges(L, cb):
    """
    w(p, q) = 1/cb(i) + 1/cb(j) + 1/cb(k) for p = (i, j), q = (j, k).

    :param cb: Clamped centralities, every value must be > 0
    :type cb: :class:`~ecne.graph.centrality.CentralityVector` or `numpy.ndarray`

    :raises ValueError: a centrality is zero or negative (not clamped)
    """
    values = cb.values if isinstance(cb, CentralityVector) else np.asarray(cb, dtype=np.float64)
    if np.any(~np.isfinite(values)) or np.any(values <= 0):
        raise ValueError("Line graph weighting needs strictly positive centralities, clamp them first")
    inv = 1. / values
    weights = inv[L.outer[:, 0]] + inv[L.shared] + inv[L.outer[:, 1]]
    return replace(L, weights=weights)


def write_line_graph(L, g, path):
    names = g.edge_names()
    with open(path, 'w', encoding='utf-8') as f:
        for (p, q), w in zip(L.pairs.tolist(), L.weights.tolist()):
            f.write("{}\t{}\t{!r}\n".format(names[p], names[q], w))
