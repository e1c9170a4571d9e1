"""
Subcommand handlers
===================

Exit codes:

=====  ==============================================================
0      success
2      usage error, unreadable/malformed input, invalid argument
3      a coupling run hit its depth cap (``n_max``) before coalescing
=====  ==============================================================

Results go to stdout (or ``--out``); log records go to stderr.
"""

import itertools
import json
import os
import sys

from bench.generators import LfrParams, SbmParams, gen_lfr_lite, gen_sbm
from bench.harness import compare_costs, params_from_preset, parse_sizes, reports_to_csv, reports_to_json
from bench.pivot import cc_pivot_best
from cli.parser import build_parser
from core.cftp import sample_stationary
from core.detector import DetectorConfig, detect_communities
from core.graph import (
    cluster_editing_cost,
    format_edge_list,
    format_partition,
    parse_edge_list,
    parse_partition,
    read_labeled_edge_list,
)
from core.markov import MarkovChain, WalkConfig, build_community_walk
from utils.config_loader import ConfigLoader
from utils.exceptions import CommunityDetectionError, InvalidArgumentError, NotCoalescedError
from utils.logger import logger, set_logger

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NOT_COALESCED = 3


# --- Helpers ---

def _read_text(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            return f.read()
    except UnicodeDecodeError as e:
        raise InvalidArgumentError(f"{path} is not UTF-8 text (byte {e.start}: {e.reason}).") from None


def _emit(text, out=None):
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _load_graph(path, reindex=False):
    """Returns ``(graph, labels)``; ``labels`` is None unless ``reindex`` is set."""
    text = _read_text(path)
    if reindex:
        return read_labeled_edge_list(text)
    return parse_edge_list(text), None


def _seed(args, settings):
    return args.seed if args.seed is not None else settings['seed']


def _detector_settings(args, settings):
    """Preset (with env overrides) updated by explicit flags."""
    detector = dict(settings['detector'] or {})
    walk = dict(detector.get('walk') or {})
    for flag, key in (('r_exp', 'r_exp'), ('epsilon', 'epsilon'), ('laziness', 'laziness')):
        value = getattr(args, flag, None)
        if value is not None:
            walk[key] = value
    detector['walk'] = walk
    for flag, key in (('n_max', 'n_max'), ('delta_t', 'delta_t_factor'), ('workers', 'workers')):
        value = getattr(args, flag, None)
        if value is not None:
            detector[key] = value
    return detector


# --- Commands ---

def cmd_generate(args, settings):
    seed = _seed(args, settings)
    if args.model == 'sbm':
        params = SbmParams(parse_sizes(args.sizes), args.p, args.q, seed=seed, relabel=args.relabel)
        graph, truth = gen_sbm(params)
    else:
        params = LfrParams(
            n=args.n, tau1=args.tau1, tau2=args.tau2, mu=args.mu, avg_deg=args.avg_deg,
            min_degree=args.min_degree, max_degree=args.max_degree,
            min_community=args.min_community, max_community=args.max_community, seed=seed,
        )
        graph, truth = gen_lfr_lite(params)

    prefix = args.out or 'graph'
    _emit(format_edge_list(graph), f"{prefix}.el")
    _emit(format_partition(truth, model=params.describe(), seed=seed), f"{prefix}.truth.json")
    logger.info(f"Generated {graph.n} nodes, {graph.num_edges} edges, {len(truth)} communities.")
    return EXIT_OK


def cmd_detect(args, settings):
    graph, labels = _load_graph(args.graph, args.reindex)
    cfg = DetectorConfig.from_dict(_detector_settings(args, settings), seed=_seed(args, settings))
    result = detect_communities(graph, cfg)
    _emit(json.dumps(result.to_dict(labels=labels), indent=2) + "\n", args.out)
    if result.failed_components:
        logger.warning(f"{len(result.failed_components)} component(s) did not coalesce within n_max={cfg.n_max}.")
        return EXIT_NOT_COALESCED
    return EXIT_OK


def cmd_cost(args, settings):
    graph, _ = _load_graph(args.graph)
    partition = parse_partition(_read_text(args.partition))
    if not partition.covers(graph.n):
        extra = sorted(partition.nodes - frozenset(range(graph.n)))
        missing = sorted(frozenset(range(graph.n)) - partition.nodes)
        raise InvalidArgumentError(
            f"Partition nodes do not match the graph's {graph.n} nodes "
            f"(missing {missing[:10]}, unknown {extra[:10]})."
        )
    _emit(f"{cluster_editing_cost(graph, partition)}\n", args.out)
    return EXIT_OK


def cmd_pivot(args, settings):
    graph, labels = _load_graph(args.graph, args.reindex)
    partition, cost = cc_pivot_best(graph, _seed(args, settings), args.runs)
    extra = {'cost': int(cost)}
    if labels is not None:
        extra['labels'] = labels
    _emit(format_partition(partition, **extra), args.out)
    return EXIT_OK


def _bench_params(args, settings, seed):
    preset = dict(settings['bench'] or {})
    model = args.model or preset.get('model', 'sbm')
    if model != preset.get('model', 'sbm'):
        preset = {'model': model}

    if model == 'sbm':
        if args.sizes is not None:
            preset['sizes'] = args.sizes
        if args.p is not None or args.q is not None:
            rows = preset.get('rows') or [[0.9, 0.05]]
            ps = args.p or sorted({row[0] for row in rows})
            qs = args.q or sorted({row[1] for row in rows})
            preset['rows'] = [[p, q] for p, q in itertools.product(ps, qs) if q < p]
            if not preset['rows']:
                raise InvalidArgumentError("No (p, q) combination satisfies q < p.")
        if args.relabel:
            preset['relabel'] = True
    else:
        for key in ('n', 'tau1', 'tau2', 'mu', 'avg_deg'):
            value = getattr(args, key)
            if value is not None:
                preset[key] = value
        if 'n' not in preset:
            raise InvalidArgumentError("bench lfr needs --n (or an LFR preset).")
    return params_from_preset(preset, seed), preset


def cmd_bench(args, settings):
    seed = _seed(args, settings)
    rows, preset = _bench_params(args, settings, seed)
    runs = args.runs or int(preset.get('runs', 10))
    cfg = DetectorConfig.from_dict(_detector_settings(args, settings), seed=seed)
    reports = [
        compare_costs(params, runs, cfg, seed=seed, workers=cfg.workers, pivot_runs=args.pivot_runs)
        for params in rows
    ]
    text = reports_to_csv(reports) if args.format == 'csv' else reports_to_json(reports)
    _emit(text, args.out)
    return EXIT_OK


def _parse_subset(raw, chain):
    by_name = {str(state): state for state in chain.states}
    subset = []
    for token in raw.split(','):
        token = token.strip()
        if not token:
            continue
        if token not in by_name:
            raise InvalidArgumentError(f"Unknown state {token!r} in --subset.")
        subset.append(by_name[token])
    if not subset:
        raise InvalidArgumentError("--subset names no states.")
    return subset


def cmd_sample(args, settings):
    if args.chain:
        chain = MarkovChain.from_json(_read_text(args.chain))
    else:
        graph, _ = _load_graph(args.graph)
        walk = WalkConfig.from_dict(_detector_settings(args, settings)['walk'])
        chain = build_community_walk(graph, walk)
    n_max = args.n_max or int((settings['detector'] or {}).get('n_max', DetectorConfig().n_max))
    subset = _parse_subset(args.subset, chain) if args.subset else None
    samples = sample_stationary(chain, args.count, _seed(args, settings), n_max, args.schedule, subset)
    _emit("".join(f"{s}\n" for s in samples), args.out)
    return EXIT_OK


COMMANDS = {
    'generate': cmd_generate,
    'detect': cmd_detect,
    'cost': cmd_cost,
    'pivot': cmd_pivot,
    'bench': cmd_bench,
    'sample': cmd_sample,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    set_logger(os.getenv('LOG_FILE') or None, args.log_level or os.getenv('LOG_LEVEL', 'INFO'))
    loader = ConfigLoader()
    if args.command == 'detect':
        detector_preset, bench_preset = args.preset, None
    elif args.command == 'bench':
        detector_preset, bench_preset = args.detector_preset, args.preset
    else:
        detector_preset, bench_preset = None, None
    settings = loader.load_all(detector_preset=detector_preset, bench_preset=bench_preset)

    try:
        return COMMANDS[args.command](args, settings)
    except NotCoalescedError as e:
        logger.error(str(e))
        return EXIT_NOT_COALESCED
    except (CommunityDetectionError, OSError, json.JSONDecodeError) as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
