import numpy as np
from sklearn.cluster import KMeans
from sklearn.linear_model import LogisticRegression
from sklearn.metrics import f1_score, normalized_mutual_info_score, roc_auc_score
from sklearn.multiclass import OneVsRestClassifier

from ..embed.skipgram import EmbeddingMatrix
from ..exceptions import MissingEmbeddingError
from ..formatter import getLogger

logger = getLogger(__name__)

COMBINE_OPERATORS = ('average', 'hadamard', 'weighted-L1', 'weighted-L2')
# where link prediction takes its edge vectors from
EDGE_SOURCES = ('ecne',) + tuple('deepwalk-' + op for op in COMBINE_OPERATORS)
DEFAULT_L2 = 1e-4
DEFAULT_MAX_ITER = 300
TRAIN_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


def _combine(x, y, op):
    if op == 'average':
        return (x + y) / 2
    if op == 'hadamard':
        return x * y
    if op == 'weighted-L1':
        return np.abs(x - y)
    if op == 'weighted-L2':
        return (x - y) ** 2
    raise ValueError("Unknown operator '{}' (valid := {})".format(op, COMBINE_OPERATORS))


def combine_node_embeddings(node_vectors, edge, op):
    """
    Edge vector from the vectors of its endpoints.

    :raises MissingEmbeddingError: an endpoint has no row
    """
    node_vectors = getattr(node_vectors, 'vectors', node_vectors)
    u, v = edge
    for x in (u, v):
        if not 0 <= x < len(node_vectors):
            raise MissingEmbeddingError("Node {} has no embedding row".format(x))
    return _combine(node_vectors[u], node_vectors[v], op)


def edge_embeddings_from_nodes(node_embeddings, edges, op):
    """ :func:`combine_node_embeddings` for every edge, row i for edge i """
    vectors = getattr(node_embeddings, 'vectors', node_embeddings)
    edges = np.asarray(edges)
    if len(edges) and edges.max() >= len(vectors):
        raise MissingEmbeddingError("Node {} has no embedding row".format(int(edges.max())))
    return EmbeddingMatrix(vectors=_combine(vectors[edges[:, 0]], vectors[edges[:, 1]], op), kind='edge')


def _stratified_split(y, train_fraction, rng):
    train, test = [], []
    for c in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == c))
        n_train = int(np.clip(round(train_fraction * len(idx)), 1, len(idx) - 1))
        train.append(idx[:n_train])
        test.append(idx[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def classify_edges(embeddings, labeling, train_fraction=0.5, seed=1, l2=DEFAULT_L2, max_iter=DEFAULT_MAX_ITER):
    """
    One-vs-rest logistic regression from edge vectors to community labels, trained on a stratified
    `train_fraction` share of every class and scored on the rest. Classes with a single edge cannot be split
    and are dropped with a warning.

    :param embeddings: Edge embeddings, row i for edge i
    :param labeling: Labels of the intra-community edges
    :type labeling: :class:`~ecne.evaluate.communities.EdgeLabeling`

    :return: micro and macro F1 on the test edges
    :rtype: `dict` of `str` to `float`
    """
    if not 0 < train_fraction < 1:
        raise ValueError("train_fraction must be in (0, 1), got {}".format(train_fraction))
    vectors = getattr(embeddings, 'vectors', embeddings)
    X, y = np.asarray(vectors)[labeling.edge_ids], np.asarray(labeling.labels)
    classes, counts = np.unique(y, return_counts=True)
    small = classes[counts < 2]
    if len(small):
        logger.warning("Dropping {} class(es) with fewer than 2 edges".format(len(small)))
        keep = ~np.isin(y, small)
        X, y = X[keep], y[keep]
    if len(np.unique(y)) < 2:
        # a single class is always predicted right
        return {'micro_f1': 1., 'macro_f1': 1.}

    train, test = _stratified_split(y, train_fraction, np.random.default_rng(seed))
    clf = OneVsRestClassifier(LogisticRegression(C=1. / (l2 * len(train)), max_iter=max_iter))
    clf.fit(X[train], y[train])
    return f1_scores(y[test], clf.predict(X[test]))


def f1_scores(truth, pred):
    """ micro F1 (pooled counts, equal to the accuracy) and macro F1 (unweighted mean over the classes) """
    return {'micro_f1': float(f1_score(truth, pred, average='micro')),
            'macro_f1': float(f1_score(truth, pred, average='macro'))}


def cluster_edges(embeddings, k, seed=1, rows=None):
    """
    k-means++ / Lloyd clustering of the edge vectors (Euclidean).

    :param rows: Restrict the clustering to these rows, defaults to every row
    :raises ValueError: `k` < 1 or more clusters than items
    :return: Cluster of every clustered row
    """
    vectors = np.asarray(getattr(embeddings, 'vectors', embeddings))
    if rows is not None:
        vectors = vectors[rows]
    if not 1 <= k <= len(vectors):
        raise ValueError("k must be in [1, {}], got {}".format(len(vectors), k))
    km = KMeans(n_clusters=k, init='k-means++', n_init=10, max_iter=300, tol=1e-6, algorithm='lloyd',
                random_state=seed)
    return km.fit_predict(vectors.astype(np.float64))


def nmi(pred, truth):
    """ Normalized mutual information, arithmetic mean of the entropies, natural logs """
    pred, truth = np.asarray(pred), np.asarray(truth)
    if pred.shape != truth.shape:
        raise ValueError("Partitions of different sizes: {} and {}".format(len(pred), len(truth)))
    return float(normalized_mutual_info_score(truth, pred, average_method='arithmetic'))


def auc(scores, labels):
    """
    Area under the ROC curve, ties counted as half.

    :raises ValueError: only one class among the labels
    """
    labels = np.asarray(labels)
    if len(np.unique(labels)) < 2:
        raise ValueError("AUC needs at least one positive and one negative example")
    return float(roc_auc_score(labels, np.asarray(scores, dtype=np.float64)))
