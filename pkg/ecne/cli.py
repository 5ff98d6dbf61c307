"""
Command line entry point.

    ecne embed --input karate.edges --out results
    ecne linkpred --config usair.yaml --agg lstm
    ecne eval classify --input karate.edges --baseline
    ecne inspect --input karate.edges --mode ecne-d

Exit codes: 0 on success, 2 for unusable input (missing file, malformed edge list, bad config or usage), 1 for
any other failure.
"""
import argparse
import json
import logging
import os
import sys
from contextlib import contextmanager

from .config import build_run_config, load_config
from .embed.io import read_embeddings, write_embeddings
from .embed.pipeline import choose_dimension, deepwalk_pipeline, run_ecne
from .embed.skipgram import EmbeddingMatrix
from .embed.walks import WalkConfig
from .evaluate.communities import detect_communities, label_edges
from .evaluate.evaluator import ClassifyEdges, ClusterEdges, Evaluator, ExternalTaskFunction
from .evaluate.metrics import AUC
from .evaluate.report import write_metric_report
from .evaluate.tasks import COMBINE_OPERATORS, edge_embeddings_from_nodes
from .exceptions import ConfigError, InputError, MissingEmbeddingError
from .formatter import getLogger
from .graph.centrality import write_centrality
from .graph.graph import connected_components, load_edge_list, write_remap_table
from .graph.linegraph import size_estimate, write_line_graph
from .utils import resolve_threads

logger = getLogger(__name__)

EVAL_TASKS = ('classify', 'cluster')
LOG_FORMAT = '%(asctime)s %(levelname)s %(message)s'


@contextmanager
def stage(name):
    """ Logs which stage failed before letting the exception through """
    try:
        yield
    except Exception as e:
        logger.error("{} stage failed: {}".format(name, e))
        logger.debug("Traceback of the {} stage".format(name), exc_info=True)
        raise


def _int_list(text):
    return [int(x) for x in text.replace(',', ' ').split()]


def _float_list(text):
    return [float(x) for x in text.replace(',', ' ').split()]


def _flag(parser, *names, **kwargs):
    parser.add_argument(*names, action='store_const', const=True, default=None, **kwargs)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help="flat YAML file of run parameters, flags take precedence")
    common.add_argument('--input', help="edge list file")
    common.add_argument('--dataset', help="dataset name in reports, defaults to the input file name")
    common.add_argument('--out', help="output directory")
    common.add_argument('--mode', choices=('ecne', 'ecne-d'), help="fixed or parameter-matched dimension")
    common.add_argument('--dim', type=int, help="embedding dimension (upper bound with ecne-d)")
    common.add_argument('--weighting', choices=('current-flow', 'uniform'), help="line graph weights")
    common.add_argument('--epsilon', type=float, help="centrality floor before inversion")
    common.add_argument('--walks', type=int, help="walks per line-node")
    common.add_argument('--walk-len', type=int, help="maximum walk length")
    common.add_argument('--window', type=int, help="skip-gram window")
    common.add_argument('--neg', type=int, help="negative samples")
    common.add_argument('--seed', type=int, help="seed of the embeddings")
    common.add_argument('--seeds', type=_int_list, help="seeds of the repeated runs, ex.: 1,2,3,4,5")
    common.add_argument('--threads', type=int, help="worker threads, defaults to $ECNE_THREADS or 1")
    common.add_argument('-v', '--verbose', action='store_true', help="debug logging")
    _flag(common, '--dump-centrality', help="also write <stem>.cb.tsv")
    _flag(common, '--dump-line-graph', help="also write <stem>.linegraph.tsv")

    parser = argparse.ArgumentParser(prog='ecne', description="Edge embeddings from weighted line graphs")
    sub = parser.add_subparsers(dest='command', required=True)

    sub.add_parser('embed', parents=[common], help="embed the edges of a graph")
    sub.add_parser('inspect', parents=[common], help="graph, line graph and dimension summary")

    linkpred = sub.add_parser('linkpred', parents=[common], help="path based link prediction")
    linkpred.add_argument('--agg', choices=('avg', 'max', 'lstm'), help="path aggregator")
    linkpred.add_argument('--lengths', type=_int_list, help="path lengths, ex.: 3,4")
    linkpred.add_argument('--max-paths', type=int, help="paths kept per length")
    linkpred.add_argument('--lr', type=float, help="Adam learning rate")
    linkpred.add_argument('--epochs', type=int, help="maximum training epochs")
    linkpred.add_argument('--edge-source', help="'ecne' or 'deepwalk-<operator>'")

    evaluate = sub.add_parser('eval', parents=[common], help="edge classification or clustering")
    evaluate.add_argument('task', choices=EVAL_TASKS)
    evaluate.add_argument('--embeddings', help="reuse an embedding file instead of training")
    evaluate.add_argument('--train-fractions', type=_float_list, help="labeled shares, ex.: 0.1,0.5,0.9")
    _flag(evaluate, '--baseline', help="also evaluate combined DeepWalk node embeddings")
    return parser


def _overrides(args):
    skip = {'command', 'task', 'config', 'verbose'}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _stem(cfg):
    if cfg.dataset:
        return cfg.dataset
    return os.path.splitext(os.path.basename(cfg.input))[0]


def _walk_config(cfg, threads):
    return WalkConfig(walks_per_node=cfg.walks, walk_length=cfg.walk_len, window=cfg.window, negative=cfg.neg,
                      seed=cfg.seed, epochs=cfg.sg_epochs, lr_start=cfg.sg_lr_start, lr_end=cfg.sg_lr_end,
                      workers=threads)


def _load_graph(cfg):
    if cfg.input is None:
        raise ConfigError("no input edge list given (--input or 'input' in the config file)")
    with stage('load'):
        return load_edge_list(cfg.input)


def _embed(g, cfg, threads):
    with stage('embed'):
        return run_ecne(g, mode=cfg.dimension_mode, cfg=_walk_config(cfg, threads), d_fixed=cfg.dim,
                        epsilon=cfg.epsilon, weighting=cfg.weighting, dense_threshold=cfg.dense_threshold,
                        threads=threads)


def _write_json(obj, path):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(obj, f, indent=2, sort_keys=True)
        f.write('\n')


def cmd_embed(cfg):
    """
    Writes <stem>.emb, <stem>.remap.tsv, <stem>.manifest.json and <stem>.timings.json in the output directory.
    """
    threads = resolve_threads(cfg.threads)
    g = _load_graph(cfg)
    result = _embed(g, cfg, threads)
    stem = os.path.join(cfg.out, _stem(cfg))
    with stage('write'):
        os.makedirs(cfg.out, exist_ok=True)
        write_embeddings(result.embeddings, g.edge_names(), stem + '.emb')
        write_remap_table(g, stem + '.remap.tsv')
        _write_json({
            'config_digest': cfg.digest(),
            'config': cfg.model_dump(mode='json'),
            'method': cfg.method,
            'seed': cfg.seed,
            'nodes': g.node_count,
            'edges': g.edge_count,
            'line_nodes': result.line_graph.node_count,
            'line_edges': result.line_graph.edge_count,
            'dim': result.dimension,
            'weighting': cfg.weighting,
            'epsilon': cfg.epsilon,
            'clamped_centralities': result.centrality.clamped_count,
            'skipgram_loss': [float(x) for x in result.embeddings.loss_history],
        }, stem + '.manifest.json')
        _write_json(result.timings, stem + '.timings.json')
        if cfg.dump_centrality:
            write_centrality(result.centrality, stem + '.cb.tsv')
        if cfg.dump_line_graph:
            write_line_graph(result.line_graph, g, stem + '.linegraph.tsv')
    logger.info("Wrote {} edge embeddings of dimension {} to {}.emb".format(
        g.edge_count, result.dimension, stem))
    return result


def cmd_inspect(cfg):
    """
    Sizes of the graph and of its line graph, component count and the embedding dimension of both modes,
    logged and written to <stem>.inspect.json. Nothing is trained.
    """
    g = _load_graph(cfg)
    components, _ = connected_components(g)
    line_nodes, line_edges = size_estimate(g)
    summary = {
        'nodes': g.node_count,
        'edges': g.edge_count,
        'components': components,
        'line_nodes': line_nodes,
        'line_edges': line_edges,
        'dim_ecne': choose_dimension(g, 'fixed', cfg.dim),
        'dim_ecne_d': choose_dimension(g, 'matched', cfg.dim),
    }
    for key, value in summary.items():
        logger.info("{:>12}: {}".format(key, value))
    with stage('write'):
        os.makedirs(cfg.out, exist_ok=True)
        _write_json(summary, os.path.join(cfg.out, _stem(cfg) + '.inspect.json'))
    return summary


def cmd_linkpred(cfg):
    """
    Writes <stem>.linkpred.tsv plus a manifest, a checkpoint and the test predictions of every seed.
    """
    try:
        from .torch_linkpred.experiment import LinkPredictionConfig, run_link_prediction
        from .torch_linkpred.train import TrainConfig
    except ImportError as e:
        raise RuntimeError("link prediction needs torch, install ecne-toolkit[torch] ({})".format(e)) from e

    threads = resolve_threads(cfg.threads)
    g = _load_graph(cfg)
    config = LinkPredictionConfig(
        agg=cfg.agg, mode=cfg.dimension_mode, d_fixed=cfg.dim, lengths=tuple(cfg.lengths),
        max_paths=cfg.max_paths, hidden=cfg.hidden, seeds=tuple(cfg.seeds), edge_source=cfg.edge_source,
        walk=_walk_config(cfg, threads),
        train=TrainConfig(lr=cfg.lr, epochs=cfg.epochs, patience=cfg.patience, batch_size=cfg.batch_size),
        weighting=cfg.weighting, epsilon=cfg.epsilon, threads=threads)
    stem = _stem(cfg)
    with stage('linkpred'):
        os.makedirs(cfg.out, exist_ok=True)
        report, runs = run_link_prediction(g, config, dataset_name=stem, out_dir=cfg.out, stem=stem)

    evaluator = Evaluator(None, {'runs': runs}, name=config.method, dataset=stem)
    evaluator.register_task_function(ExternalTaskFunction(lambda embeddings, data: [r.auc for r in data['runs']],
                                                          AUC()))
    evaluator.compute_all(print_mode='info')
    with stage('write'):
        write_metric_report([report], os.path.join(cfg.out, stem + '.linkpred.tsv'))
    return report


def _load_embeddings(path, g):
    names, E = read_embeddings(path)
    rows = {name: i for i, name in enumerate(names)}
    try:
        order = [rows[name] for name in g.edge_names()]
    except KeyError as e:
        raise MissingEmbeddingError("Edge {} has no row in {}".format(e.args[0], path))
    return EmbeddingMatrix(vectors=E.vectors[order])


def _evaluators(g, cfg, embeddings, data, threads, task_function):
    main = Evaluator(embeddings, data, name=cfg.method, dataset=_stem(cfg))
    main.register_task_function(task_function)
    baselines = []
    if cfg.baseline:
        with stage('baseline'):
            nodes = deepwalk_pipeline(g, _walk_config(cfg, threads), d=cfg.dim, threads=threads)
        for op in COMBINE_OPERATORS:
            baselines.append(main.clone(embeddings=edge_embeddings_from_nodes(nodes, g.edges, op),
                                        name='DeepWalk-' + op))
    return main, baselines


def _run_evaluators(evaluators, task, key, **kwargs):
    rows = []
    for ev in evaluators:
        ev.compute_all(recompute=True, **kwargs)
        ev.display_status(print_mode='info')
        rows.extend(ev.to_reports(task))
    main, baselines = evaluators[0], evaluators[1:]
    if baselines:
        best = max(baselines, key=lambda ev: ev.status_to_dict(to_value=False)[key].get_value())
        main.display_status(other=best, print_mode='info')
    return rows


def cmd_eval(cfg, task):
    """
    Edge labels come from the greedy modularity communities of the graph. 'classify' writes
    <stem>.classify.tsv with one 'classify@<fraction>' task per train fraction, 'cluster' writes
    <stem>.cluster.tsv.
    """
    if task not in EVAL_TASKS:
        raise ConfigError("Unknown eval task '{}' (valid := {})".format(task, EVAL_TASKS))
    threads = resolve_threads(cfg.threads)
    g = _load_graph(cfg)
    with stage('communities'):
        partition = detect_communities(g)
        labeling = label_edges(g, partition)
    logger.info("{} communities, modularity {:.4f}, {} intra-community edges out of {}".format(
        partition.community_count, partition.modularity, len(labeling.edge_ids), g.edge_count))

    if cfg.embeddings:
        with stage('load'):
            embeddings = _load_embeddings(cfg.embeddings, g)
    else:
        embeddings = _embed(g, cfg, threads).embeddings
    task_function = ClassifyEdges() if task == 'classify' else ClusterEdges()
    main, baselines = _evaluators(g, cfg, embeddings, {'labeling': labeling}, threads, task_function)
    evaluators = [main] + baselines

    rows = []
    with stage(task):
        if task == 'classify':
            for fraction in cfg.train_fractions:
                rows.extend(_run_evaluators(evaluators, 'classify@{:g}'.format(fraction), 'micro_f1',
                                            train_fraction=fraction, seeds=cfg.seeds))
        else:
            rows.extend(_run_evaluators(evaluators, 'cluster', 'nmi', seeds=cfg.seeds))

    with stage('write'):
        os.makedirs(cfg.out, exist_ok=True)
        write_metric_report(rows, os.path.join(cfg.out, "{}.{}.tsv".format(_stem(cfg), task)))
    return rows


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT)

    try:
        with stage('config'):
            file_values = load_config(args.config) if args.config else {}
            cfg = build_run_config(file_values, _overrides(args))
        if args.command == 'embed':
            cmd_embed(cfg)
        elif args.command == 'inspect':
            cmd_inspect(cfg)
        elif args.command == 'linkpred':
            cmd_linkpred(cfg)
        else:
            cmd_eval(cfg, args.task)
    except (InputError, FileNotFoundError, MissingEmbeddingError) as e:
        logger.error("ecne {} failed on its input: {}".format(args.command, e))
        logger.debug("Traceback of ecne {}".format(args.command), exc_info=True)
        return 2
    except Exception as e:
        logger.error("ecne {} failed: {}: {}".format(args.command, type(e).__name__, e))
        logger.debug("Traceback of ecne {}".format(args.command), exc_info=True)
        return 1
    return 0


if __name__ == '__main__':
    sys.exit(main())
