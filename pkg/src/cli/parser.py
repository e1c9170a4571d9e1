import argparse


def seed_type(value):
    """Seeds accept decimal or 0x-prefixed integers."""
    try:
        return int(str(value), 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid seed {value!r}") from None


def _positive_int(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}") from None
    if number < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value!r}")
    return number


def _common(parser, out_help="Write output to this file instead of stdout."):
    parser.add_argument('--seed', type=seed_type, default=None,
                        help="Master seed. Defaults to the CFTP_SEED env var, then 0.")
    parser.add_argument('--out', type=str, default=None, help=out_help)
    parser.add_argument('--log-level', type=str, default=None,
                        help="Logging level (DEBUG, INFO, WARNING, ...). Defaults to the LOG_LEVEL env var.")


def _walk_flags(parser):
    group = parser.add_argument_group('community walk')
    group.add_argument('--r-exp', type=_positive_int, default=None, help="Exponent on common-neighbour counts.")
    group.add_argument('--epsilon', type=float, default=None, help="Additive edge weight.")
    group.add_argument('--laziness', type=float, default=None, help="Self-loop probability of every state.")


def _detector_flags(parser):
    _walk_flags(parser)
    group = parser.add_argument_group('detector')
    group.add_argument('--n-max', type=_positive_int, default=None, help="Backward depth cap per component.")
    group.add_argument('--delta-t', type=float, default=None,
                       help="Stop once the gap since the last critical time exceeds this factor "
                            "times the largest earlier gap.")
    group.add_argument('--workers', type=_positive_int, default=None, help="Threads for independent work items.")


def build_parser():
    parser = argparse.ArgumentParser(
        prog='cftp-communities',
        description="Community detection from partial coalescence of coupled random walks.",
    )
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    commands.required = True

    # --- generate ---
    generate = commands.add_parser('generate', help="Sample a ground-truthed benchmark graph.")
    models = generate.add_subparsers(dest='model', metavar='MODEL')
    models.required = True

    sbm = models.add_parser('sbm', help="Planted-partition stochastic block model.")
    sbm.add_argument('--sizes', type=str, required=True, help="Cluster sizes: '15,15,15,15' or '15x4'.")
    sbm.add_argument('--p', type=float, required=True, help="Within-cluster edge probability.")
    sbm.add_argument('--q', type=float, required=True, help="Cross-cluster edge probability.")
    sbm.add_argument('--relabel', action='store_true', help="Randomly permute node ids.")
    _common(sbm, out_help="Output prefix; writes <prefix>.el and <prefix>.truth.json (default: graph).")

    lfr = models.add_parser('lfr', help="Simplified LFR benchmark.")
    lfr.add_argument('--n', type=_positive_int, required=True, help="Number of nodes.")
    lfr.add_argument('--tau1', type=float, default=2.0, help="Community-size exponent.")
    lfr.add_argument('--tau2', type=float, default=3.0, help="Degree exponent.")
    lfr.add_argument('--mu', type=float, default=0.25, help="Mixing fraction.")
    lfr.add_argument('--avg-deg', type=float, default=30.0, help="Target mean degree.")
    lfr.add_argument('--min-degree', type=_positive_int, default=None)
    lfr.add_argument('--max-degree', type=_positive_int, default=None)
    lfr.add_argument('--min-community', type=_positive_int, default=None)
    lfr.add_argument('--max-community', type=_positive_int, default=None)
    _common(lfr, out_help="Output prefix; writes <prefix>.el and <prefix>.truth.json (default: graph).")

    # --- detect ---
    detect = commands.add_parser('detect', help="Detect communities in an edge-list graph.")
    detect.add_argument('--graph', type=str, required=True, help="Edge-list file.")
    detect.add_argument('--preset', type=str, default=None,
                        help="Detector preset from conf_detector.json. Defaults to DETECTOR_PRESET, then 'default'.")
    detect.add_argument('--reindex', action='store_true',
                        help="Re-index arbitrary node labels densely and report the label map.")
    _detector_flags(detect)
    _common(detect)

    # --- cost ---
    cost = commands.add_parser('cost', help="Cluster-editing cost of a partition.")
    cost.add_argument('--graph', type=str, required=True, help="Edge-list file.")
    cost.add_argument('--partition', type=str, required=True, help="Partition JSON file.")
    cost.add_argument('--out', type=str, default=None, help="Write output to this file instead of stdout.")
    cost.add_argument('--log-level', type=str, default=None, help="Logging level.")

    # --- pivot ---
    pivot = commands.add_parser('pivot', help="CC-PIVOT baseline partition.")
    pivot.add_argument('--graph', type=str, required=True, help="Edge-list file.")
    pivot.add_argument('--runs', type=_positive_int, default=1, help="Keep the cheapest of this many runs.")
    pivot.add_argument('--reindex', action='store_true', help="Re-index arbitrary node labels densely.")
    _common(pivot)

    # --- bench ---
    bench = commands.add_parser('bench', help="Compare detector and CC-PIVOT costs on generated graphs.")
    bench.add_argument('model', nargs='?', choices=['sbm', 'lfr'], default=None,
                       help="Generator; defaults to the preset's model.")
    bench.add_argument('--preset', type=str, default=None,
                       help="Bench preset from conf_bench.json. Defaults to BENCH_PRESET, then 'default'.")
    bench.add_argument('--detector-preset', type=str, default=None, help="Detector preset for the runs.")
    bench.add_argument('--sizes', type=str, default=None, help="SBM cluster sizes: '15,15,15,15' or '15x4'.")
    bench.add_argument('--p', type=float, nargs='+', default=None, help="One or more within probabilities.")
    bench.add_argument('--q', type=float, nargs='+', default=None, help="One or more cross probabilities.")
    bench.add_argument('--relabel', action='store_true', help="Randomly permute SBM node ids.")
    bench.add_argument('--n', type=_positive_int, default=None)
    bench.add_argument('--tau1', type=float, default=None)
    bench.add_argument('--tau2', type=float, default=None)
    bench.add_argument('--mu', type=float, default=None)
    bench.add_argument('--avg-deg', type=float, default=None)
    bench.add_argument('--runs', type=_positive_int, default=None, help="Graphs per parameter row.")
    bench.add_argument('--pivot-runs', type=_positive_int, default=1, help="CC-PIVOT runs per graph (best kept).")
    bench.add_argument('--format', choices=['csv', 'json'], default='csv')
    _detector_flags(bench)
    _common(bench)

    # --- sample ---
    sample = commands.add_parser('sample', help="Exact stationary samples by coupling from the past.")
    source = sample.add_mutually_exclusive_group(required=True)
    source.add_argument('--graph', type=str, help="Edge-list file; samples from its community walk.")
    source.add_argument('--chain', type=str, help='Chain JSON file {"states": [...], "rows": [[...]]}.')
    sample.add_argument('--count', type=_positive_int, default=1, help="Number of samples.")
    sample.add_argument('--subset', type=str, default=None,
                        help="Comma-separated states; sample the chain watched on this subset.")
    sample.add_argument('--schedule', choices=['unit', 'doubling'], default='unit')
    sample.add_argument('--n-max', type=_positive_int, default=None, help="Backward depth cap per sample.")
    _walk_flags(sample)
    _common(sample)

    return parser
