import math
from dataclasses import dataclass, field, replace

from .skipgram import train_skipgram
from .walks import WalkConfig, generate_walks
from ..formatter import getLogger
from ..graph.centrality import (DEFAULT_DENSE_THRESHOLD, DEFAULT_EPSILON, clamp, current_flow_betweenness)
from ..graph.linegraph import WEIGHTINGS, build_line_graph, size_estimate, weight_edges
from ..utils import Stopwatch

logger = getLogger(__name__)

DIMENSION_MODES = ('fixed', 'matched')
DEFAULT_DIMENSION = 128


def choose_dimension(g, mode='fixed', d_fixed=DEFAULT_DIMENSION):
    """
    'fixed' keeps `d_fixed`. 'matched' spends the parameter budget of `d_fixed`-dimensional node embeddings
    on the edges: the smallest multiple of 8 with |E| * d >= |V| * d_fixed, capped at `d_fixed`.
    """
    if mode not in DIMENSION_MODES:
        raise ValueError("Unknown dimension mode '{}' (valid := {})".format(mode, DIMENSION_MODES))
    if g.edge_count < 1:
        raise ValueError("Cannot choose an edge embedding dimension for a graph without edges")
    if mode == 'fixed':
        return d_fixed
    needed = -(-g.node_count * d_fixed // g.edge_count)
    return min(8 * math.ceil(needed / 8), d_fixed)


@dataclass
class EcneResult:
    embeddings: object
    centrality: object
    line_graph: object
    dimension: int
    timings: dict = field(default_factory=dict)


def run_ecne(g, mode='fixed', cfg=WalkConfig(), d_fixed=DEFAULT_DIMENSION, epsilon=DEFAULT_EPSILON,
             weighting='current-flow', dense_threshold=DEFAULT_DENSE_THRESHOLD, threads=None):
    """
    Edge embeddings of `g`: centrality, clamping, weighted line graph, dimension policy, walks and skip-gram.
    The intermediate products are kept on the result so the command line can dump them.

    :param weighting: 'current-flow' weights line-edges from the centralities, 'uniform' keeps them at 1.0
    :type weighting: `str`, optional

    :return: Embeddings (one row per edge id) and intermediate products
    :rtype: :class:`EcneResult`
    """
    if weighting not in WEIGHTINGS:
        raise ValueError("Unknown weighting '{}' (valid := {})".format(weighting, WEIGHTINGS))
    sw = Stopwatch()
    with sw('centrality'):
        cb = clamp(current_flow_betweenness(g, dense_threshold=dense_threshold, threads=threads), epsilon)
    with sw('line_graph'):
        L = build_line_graph(g)
        if weighting == 'current-flow':
            L = weight_edges(L, cb)
    expected = size_estimate(g)
    if (L.node_count, L.edge_count) != expected:
        raise AssertionError("Line graph size {} differs from {}".format((L.node_count, L.edge_count), expected))
    d = choose_dimension(g, mode, d_fixed)
    logger.info("Line graph: {} nodes, {} edges, dimension {}".format(L.node_count, L.edge_count, d))
    with sw('walks'):
        walks = generate_walks(L, cfg, threads=threads)
    with sw('skipgram'):
        E = train_skipgram(walks, d, cfg, item_count=L.node_count)
    logger.info("Embedded {} edges in {:.2f}s".format(g.edge_count, sum(sw.timings.values())))
    return EcneResult(embeddings=E, centrality=cb, line_graph=L, dimension=d, timings=sw.timings)


def ecne_pipeline(g, mode='fixed', cfg=WalkConfig(), **kwargs):
    """ Edge :class:`~ecne.embed.skipgram.EmbeddingMatrix` of `g`, see :func:`run_ecne` """
    return run_ecne(g, mode=mode, cfg=cfg, **kwargs).embeddings


def deepwalk_pipeline(g, cfg=WalkConfig(), d=DEFAULT_DIMENSION, threads=None):
    """
    Node embeddings from uniform first-order walks on `g` itself, the indirect baseline whose node vectors
    get combined into edge vectors.
    """
    walks = generate_walks(g, cfg, threads=threads)
    E = train_skipgram(walks, d, cfg, item_count=g.node_count)
    return replace(E, kind='node')
