"""Series files, statistics objects and trace CSVs."""

import csv
import json
import math

import numpy as np

STATS_KEYS = (
    "candidates_total",
    "pruned_kim",
    "pruned_keogh_eq",
    "pruned_keogh_ec",
    "dtw_calls",
    "dtw_abandoned",
    "dp_cells_evaluated",
    "elapsed_seconds",
    "best_location",
    "best_distance_sq",
)


class SeriesFormatError(ValueError):
    pass


def parse_series(text, source="<string>"):
    """Parse whitespace-separated reals; token numbers in errors are 1-based."""
    tokens = text.split()
    if not tokens:
        raise SeriesFormatError(f"{source}: no samples")
    values = np.empty(len(tokens))
    for k, tok in enumerate(tokens):
        try:
            v = float(tok)
        except ValueError:
            raise SeriesFormatError(f"{source}: token {k + 1} ({tok!r}) is not a number") from None
        if not math.isfinite(v):
            raise SeriesFormatError(f"{source}: token {k + 1} ({tok!r}) is not finite")
        values[k] = v
    return values


def load_series(path):
    """Load one series from a text file of whitespace-delimited reals."""
    with open(path) as fh:
        return parse_series(fh.read(), str(path))


def save_series(path, series):
    with open(path, "w") as fh:
        fh.write("\n".join(repr(float(v)) for v in series))
        fh.write("\n")


def stats_dict(bsf, report):
    return {
        "candidates_total": report.candidates_total,
        "pruned_kim": report.pruned_kim,
        "pruned_keogh_eq": report.pruned_keogh_eq,
        "pruned_keogh_ec": report.pruned_keogh_ec,
        "dtw_calls": report.dtw_calls,
        "dtw_abandoned": report.dtw_abandoned,
        "dp_cells_evaluated": report.dp_cells_evaluated,
        "elapsed_seconds": report.elapsed,
        "best_location": bsf.location,
        "best_distance_sq": bsf.distance_sq,
    }


def emit_stats(bsf, report, path):
    """Write the run statistics as one JSON object."""
    with open(path, "w") as fh:
        json.dump(stats_dict(bsf, report), fh, indent=2)
        fh.write("\n")


def trace_rows(trace):
    """Rows ``(row, col, value, kind)`` in evaluation order.

    Each evaluated cell appears once, its kind being the most specific of
    abandon, pruning_point, discard_point, cell. A pruning point on the top
    border, or an abandon position that was never evaluated, is listed with
    value ``inf``.
    """
    discards = set(trace.discard_points)
    pruning = set(trace.pruning_points)
    evaluated = {(r, c) for r, c, _ in trace.matrix_cells}
    rows = []
    for r, c in trace.pruning_points:
        if (r, c) not in evaluated:
            rows.append((r, c, math.inf, "pruning_point"))
    for r, c, v in trace.matrix_cells:
        if (r, c) == trace.abandon_cell:
            kind = "abandon"
        elif (r, c) in pruning:
            kind = "pruning_point"
        elif (r, c) in discards:
            kind = "discard_point"
        else:
            kind = "cell"
        rows.append((r, c, v, kind))
    if trace.abandon_cell is not None and trace.abandon_cell not in evaluated:
        rows.append((*trace.abandon_cell, math.inf, "abandon"))
    rows.sort(key=lambda row: (row[0], row[1]))
    return rows


def write_trace_csv(trace, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "col", "value", "kind"])
        for r, c, v, kind in trace_rows(trace):
            writer.writerow([r, c, repr(float(v)), kind])
