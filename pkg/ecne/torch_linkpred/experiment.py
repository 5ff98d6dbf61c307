import os
from dataclasses import dataclass, field, replace

import numpy as np
import torch

from .model import LinkModel, predict_many, save_checkpoint
from .train import TrainConfig, train
from ..embed.pipeline import DEFAULT_DIMENSION, deepwalk_pipeline, run_ecne
from ..embed.walks import WalkConfig
from ..evaluate.report import MetricReport
from ..evaluate.tasks import EDGE_SOURCES, auc, edge_embeddings_from_nodes
from ..formatter import getLogger
from ..linkpred.dataset import build_dataset
from ..linkpred.paths import DEFAULT_LENGTHS, DEFAULT_MAX_PATHS

logger = getLogger(__name__)


@dataclass(frozen=True)
class LinkPredictionConfig:
    """
    :param agg: Aggregator, one of 'avg', 'max', 'lstm'
    :param mode: Dimension policy of the edge embeddings, 'fixed' or 'matched'
    :param edge_source: 'ecne' or 'deepwalk-<operator>' to combine node embeddings instead
    """
    agg: str = 'lstm'
    mode: str = 'fixed'
    d_fixed: int = DEFAULT_DIMENSION
    lengths: tuple = DEFAULT_LENGTHS
    max_paths: int = DEFAULT_MAX_PATHS
    hidden: int = 64
    seeds: tuple = (1, 2, 3, 4, 5)
    edge_source: str = 'ecne'
    walk: WalkConfig = field(default_factory=WalkConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    weighting: str = 'current-flow'
    epsilon: float = 1e-6
    threads: int = 1

    def __post_init__(self):
        if self.edge_source not in EDGE_SOURCES:
            raise ValueError("Unknown edge source '{}' (valid := {})".format(self.edge_source, EDGE_SOURCES))
        if not self.seeds:
            raise ValueError("At least one seed is needed")

    @property
    def method(self):
        if self.edge_source == 'ecne':
            prefix = 'ECNEd' if self.mode == 'matched' else 'ECNE'
        else:
            prefix = 'DeepWalk-' + self.edge_source.split('-', 1)[1]
        return "{}-LP-{}".format(prefix, self.agg.upper())


@dataclass
class SeedRun:
    seed: int
    auc: float
    history: list
    dataset: object
    model: object = None
    scores: np.ndarray = None


def edge_embeddings(graph, config, seed):
    """ Edge embeddings of `graph` according to the configured edge source """
    walk_cfg = replace(config.walk, seed=seed)
    if config.edge_source == 'ecne':
        return run_ecne(graph, mode=config.mode, cfg=walk_cfg, d_fixed=config.d_fixed, epsilon=config.epsilon,
                        weighting=config.weighting, threads=config.threads).embeddings
    nodes = deepwalk_pipeline(graph, walk_cfg, d=config.d_fixed, threads=config.threads)
    return edge_embeddings_from_nodes(nodes, graph.edges, config.edge_source.split('-', 1)[1])


def write_predictions(pairs, labels, scores, path):
    with open(path, 'w', encoding='utf-8') as f:
        f.write("u\tv\tlabel\teta\n")
        for (u, v), label, eta in zip(pairs.tolist(), labels.tolist(), scores.tolist()):
            f.write("{}\t{}\t{}\t{:.9g}\n".format(u, v, label, eta))


def run_seed(g, config, seed, out_prefix=None):
    dataset = build_dataset(g, seed=seed, lengths=config.lengths, max_paths=config.max_paths,
                            workers=config.threads)
    E = edge_embeddings(dataset.train_graph, config, seed)
    torch.manual_seed(seed)
    model = LinkModel(config.agg, E.dim, config.lengths, hidden=config.hidden)
    model, history = train(model, dataset, E, replace(config.train, seed=seed))
    scores = predict_many(model, dataset.bundles['test'], E)
    value = auc(scores, dataset.labels['test'])
    logger.info("Seed {}: AUC {:.4f} after {} epoch(s)".format(seed, value, len(history)))

    if out_prefix is not None:
        dataset.write_manifest(out_prefix + '.manifest.json')
        save_checkpoint(model, out_prefix + '.ckpt', seed=seed, method=config.method)
        write_predictions(dataset.pairs['test'], dataset.labels['test'], scores, out_prefix + '.predictions.tsv')
    return SeedRun(seed=seed, auc=value, history=history, dataset=dataset, model=model, scores=scores)


def run_link_prediction(g, config=LinkPredictionConfig(), dataset_name='graph', out_dir=None, stem=None):
    """
    Link prediction over every seed: dataset, edge embeddings of the training graph, training and AUC on the
    test pairs. With `out_dir`, every seed writes `<stem>.seed<k>.manifest.json`, `.ckpt` and
    `.predictions.tsv` there.

    :return: The AUC report row and the per-seed runs
    :rtype: `tuple` of (:class:`~ecne.evaluate.report.MetricReport`, `list` of :class:`SeedRun`)
    """
    runs = []
    for seed in config.seeds:
        prefix = None
        if out_dir is not None:
            prefix = os.path.join(out_dir, "{}.seed{}".format(stem or dataset_name, seed))
        runs.append(run_seed(g, config, seed, out_prefix=prefix))
    report = MetricReport.from_runs('linkpred', dataset_name, config.method, 'AUC', [r.auc for r in runs])
    logger.info("{} on {}: AUC {:.4f} +/- {:.4f} over {} run(s)".format(
        config.method, dataset_name, report.value, report.stddev, report.runs))
    return report, runs
