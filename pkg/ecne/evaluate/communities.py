import heapq
from dataclasses import dataclass, field

import numpy as np

from ..formatter import getLogger

logger = getLogger(__name__)


@dataclass
class CommunityPartition:
    """
    :param labels: Community of every node, numbered 0..c-1 by smallest member
    :param modularity: Modularity of the partition
    :param history: Modularity after every merge, starting with the singleton partition
    """
    labels: np.ndarray
    modularity: float
    history: list = field(default_factory=list)

    @property
    def community_count(self):
        return int(self.labels.max()) + 1 if len(self.labels) else 0


@dataclass
class EdgeLabeling:
    """
    Intra-community edges with the community of their endpoints; inter-community edges are excluded.
    """
    edge_ids: np.ndarray
    labels: np.ndarray
    excluded: np.ndarray

    @property
    def class_count(self):
        return len(np.unique(self.labels))


def modularity(g, labels):
    """ Newman modularity of a node partition, computed directly from the edges """
    m = g.edge_count
    if m == 0:
        return 0.
    labels = np.asarray(labels)
    u, v = g.edges[:, 0], g.edges[:, 1]
    c = int(labels.max()) + 1
    internal = np.bincount(labels[u][labels[u] == labels[v]], minlength=c)
    degree_sums = np.bincount(labels, weights=g.degrees(), minlength=c)
    return float((internal / m).sum() - ((degree_sums / (2 * m)) ** 2).sum())


def _relabel(roots):
    mapping = {}
    return np.array([mapping.setdefault(r, len(mapping)) for r in roots.tolist()], dtype=np.int64)


def detect_communities(g):
    """
    Greedy modularity agglomeration. Starting from singletons, the pair of adjacent communities with the
    largest modularity gain is merged until no merge has a positive gain. Ties go to the smallest
    (i, j) community pair and the merged community keeps the smaller id.

    :rtype: :class:`CommunityPartition`
    """
    n, m = g.node_count, g.edge_count
    if m == 0:
        return CommunityPartition(labels=np.arange(n, dtype=np.int64), modularity=0., history=[0.])

    a = (g.degrees() / (2. * m)).tolist()
    dq = [dict() for _ in range(n)]
    for u, v in g.edges.tolist():
        gain = 2 * (1. / (2 * m) - a[u] * a[v])
        dq[u][v] = gain
        dq[v][u] = gain
    heap = [(-gain, u, v) for u, v, gain in ((u, v, dq[u][v]) for u, v in g.edges.tolist())]
    heapq.heapify(heap)

    roots = np.arange(n)
    members = {i: [i] for i in range(n)}
    q = -sum(x * x for x in a)
    history = [q]

    while heap:
        neg, i, j = heapq.heappop(heap)
        if dq[j] is None or dq[i] is None or dq[i].get(j) != -neg:
            continue
        gain = -neg
        if gain <= 0:
            break
        # merge j into i, i < j
        row_i, row_j = dq[i], dq[j]
        for k in set(row_i) | set(row_j):
            if k in (i, j):
                continue
            if k in row_i and k in row_j:
                new = row_i[k] + row_j[k]
            elif k in row_i:
                new = row_i[k] - 2 * a[j] * a[k]
            else:
                new = row_j[k] - 2 * a[i] * a[k]
            row_i[k] = new
            dq[k][i] = new
            dq[k].pop(j, None)
            heapq.heappush(heap, (-new, min(i, k), max(i, k)))
        row_i.pop(j, None)
        dq[j] = None
        a[i] += a[j]
        a[j] = 0.
        for node in members.pop(j):
            roots[node] = i
            members[i].append(node)
        q += gain
        history.append(q)

    labels = _relabel(roots)
    logger.debug("Found {} communities, modularity {:.4f}".format(labels.max() + 1, q))
    return CommunityPartition(labels=labels, modularity=q, history=history)


def label_edges(g, partition):
    labels = getattr(partition, 'labels', partition)
    cu, cv = labels[g.edges[:, 0]], labels[g.edges[:, 1]]
    inside = cu == cv
    return EdgeLabeling(edge_ids=np.flatnonzero(inside), labels=cu[inside], excluded=np.flatnonzero(~inside))
