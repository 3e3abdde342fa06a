"""Command line front end: ``search``, ``trace`` and ``bench``.

Locations in the reference are 0-based. Matrix rows and columns in traces
are 1-based, row/column 0 being the borders.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import kernels
from .io import emit_stats, load_series, write_trace_csv
from .search import SUPPORTED_RATIOS, Algorithm, SearchConfig, similarity_search

_ALGOS = [a.value for a in Algorithm]


def _ratio(text):
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid ratio {text!r}") from None


def _ub(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid threshold {text!r}") from None
    if math.isnan(v) or v < 0:
        raise argparse.ArgumentTypeError("threshold must be >= 0 or inf")
    return v


def _int_list(text):
    try:
        return [int(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer list {text!r}") from None


def _float_list(text):
    try:
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number list {text!r}") from None


def _is_supported_ratio(r):
    return any(abs(r - s) < 1e-9 for s in SUPPORTED_RATIOS)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="eapdtw",
        description="Exact DTW similarity search with EAPrunedDTW.",
        epilog="Search locations are 0-based; trace rows/cols are 1-based matrix cells.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("search", help="nearest subsequence of a reference series")
    p.add_argument("--data", required=True, help="reference series file")
    p.add_argument("--query", required=True, help="query series file")
    p.add_argument("--query-len", type=int, help="use this prefix of the query (default: all)")
    p.add_argument("--window-ratio", type=_ratio, required=True,
                   help="warping window as a fraction of the query length")
    p.add_argument("--algo", choices=_ALGOS, default="eap")
    p.add_argument("--no-lb", action="store_true", help="disable the lower-bound cascade")
    p.add_argument("--no-tighten", action="store_true", help="disable threshold tightening")
    p.add_argument("--stats", help="write run statistics (JSON) here")
    p.add_argument("--seed", type=int, default=0,
                   help="accepted for grid scripts; the search draws no random numbers")
    p.add_argument("--allow-any-ratio", action="store_true",
                   help=f"accept ratios outside {SUPPORTED_RATIOS}")

    p = sub.add_parser("trace", help="dump the evaluated DTW matrix cells as CSV")
    p.add_argument("--a", required=True, help="first series file (matrix rows on ties)")
    p.add_argument("--b", required=True, help="second series file")
    p.add_argument("--ub", type=_ub, default=math.inf, help="threshold, a number or inf")
    p.add_argument("--algo", choices=_ALGOS, default="eap")
    p.add_argument("--window", type=int, help="warping window in cells (default: none)")
    p.add_argument("--out", required=True, help="CSV output path")

    p = sub.add_parser("bench", help="run searches over a grid of lengths, ratios and algorithms")
    p.add_argument("--grid-lengths", type=_int_list, default=[128, 256, 512, 1024])
    p.add_argument("--grid-ratios", type=_float_list, default=list(SUPPORTED_RATIOS))
    p.add_argument("--algos", default="full,lp,eap",
                   help="comma separated; suffix -nolb disables lower bounds, e.g. eap-nolb")
    p.add_argument("--stats-dir", required=True)
    p.add_argument("--data", help="reference series file")
    p.add_argument("--query", help="query series file")
    p.add_argument("--synthetic", type=int, help="generate a random-walk reference of this length")
    p.add_argument("--seed", type=int, default=0)
    return parser


def _print_result(bsf, report, out):
    print(f"Location: {bsf.location}", file=out)
    print(f"Distance: {bsf.distance!r}", file=out)
    print(f"Distance_sq: {bsf.distance_sq!r}", file=out)
    for key, value in report.as_dict().items():
        print(f"{key}: {value}", file=out)


def run_search_command(args, out=None):
    out = out or sys.stdout
    if not args.allow_any_ratio and not _is_supported_ratio(args.window_ratio):
        raise UsageError(
            f"--window-ratio {args.window_ratio} not in {SUPPORTED_RATIOS} (use --allow-any-ratio)"
        )
    reference = load_series(args.data)
    query = load_series(args.query)
    m = args.query_len if args.query_len is not None else query.shape[0]
    use_lb = not args.no_lb
    cfg = SearchConfig(m, args.window_ratio, args.algo, use_lb, use_lb and not args.no_tighten)
    bsf, report = similarity_search(reference, query, cfg)
    _print_result(bsf, report, out)
    if args.stats:
        emit_stats(bsf, report, args.stats)
    return 0


def run_trace_command(args, out=None):
    out = out or sys.stdout
    a = load_series(args.a)
    b = load_series(args.b)
    trace = kernels.KernelTrace()
    if args.algo == "full":
        value = kernels.dtw_windowed(a, b, args.window, trace=trace)
    elif args.algo == "lp":
        value = kernels.dtw_left_prune_windowed(a, b, args.window, args.ub, trace=trace)
    else:
        value = kernels.ea_pruned_dtw_windowed(a, b, args.window, args.ub, trace=trace)
    write_trace_csv(trace, args.out)
    print(f"Result: {value!r}", file=out)
    print(f"cells_evaluated: {trace.cells_evaluated}", file=out)
    return 0


def _parse_algos(text):
    configs = []
    for name in text.split(","):
        name = name.strip()
        if not name:
            continue
        base, _, flag = name.partition("-")
        if base not in _ALGOS or flag not in ("", "nolb"):
            raise UsageError(f"unknown algorithm {name!r}")
        configs.append((name, base, flag != "nolb"))
    return configs


def run_bench_command(args, out=None):
    out = out or sys.stdout
    configs = _parse_algos(args.algos)
    for r in args.grid_ratios:
        if not _is_supported_ratio(r):
            raise UsageError(f"grid ratio {r} not in {SUPPORTED_RATIOS}")
    rng = np.random.default_rng(args.seed)
    if args.data:
        reference = load_series(args.data)
    elif args.synthetic:
        reference = np.cumsum(rng.standard_normal(args.synthetic))
    else:
        raise UsageError("bench needs --data or --synthetic")
    if args.query:
        query = load_series(args.query)
    else:
        query = np.cumsum(rng.standard_normal(max(args.grid_lengths)))
    os.makedirs(args.stats_dir, exist_ok=True)
    print("algo\tlength\tratio\tlocation\tdistance_sq\tdtw_calls\tcells\tseconds", file=out)
    for m in args.grid_lengths:
        for ratio in args.grid_ratios:
            for name, base, use_lb in configs:
                cfg = SearchConfig(m, ratio, base, use_lb, use_lb)
                bsf, report = similarity_search(reference, query, cfg)
                emit_stats(bsf, report, os.path.join(args.stats_dir, f"{name}_m{m}_r{ratio:g}.json"))
                print(
                    f"{name}\t{m}\t{ratio:g}\t{bsf.location}\t{bsf.distance_sq!r}\t"
                    f"{report.dtw_calls}\t{report.dp_cells_evaluated}\t{report.elapsed:.3f}",
                    file=out,
                )
    return 0


class UsageError(Exception):
    pass


_COMMANDS = {
    "search": run_search_command,
    "trace": run_trace_command,
    "bench": run_bench_command,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        parser.error(str(exc))
    except (OSError, ValueError) as exc:
        print(f"eapdtw: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
