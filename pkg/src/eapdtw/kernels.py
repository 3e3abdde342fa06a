"""Exact DTW kernels: full scan, pruning from the left, and EAPrunedDTW.

All kernels use two row buffers sized by the shorter series. The longer
series indexes matrix rows, the shorter one columns; on equal lengths the
first argument is the row series. Matrix coordinates reported in traces are
1-based ``(row, col)`` with row/column 0 being the borders.

A kernel that can prove the distance strictly exceeds its threshold returns
:data:`PRUNED` (``+inf``). A distance equal to the threshold is never
abandoned.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from numba import njit

PRUNED = math.inf

# Tightened thresholds are loosened by this fraction of ub. The bound and the
# accumulated cost are sums of the same terms in different orders; without
# slack a tie at ub can be lost to rounding.
TIGHTEN_SLACK = 1e-10

# cell kinds recorded in trace mode
_CELL = 1
_DISCARD = 2

_EMPTY_CB = np.zeros(0, dtype=np.float64)
_NO_VALUES = np.zeros((1, 1), dtype=np.float64)
_NO_KINDS = np.zeros((1, 1), dtype=np.int8)
_NO_PP = np.zeros(1, dtype=np.int64)


def is_pruned(value):
    """Return True if a kernel outcome is the PRUNED sentinel."""
    return value == PRUNED


def squared_cost(a, b):
    """Squared difference between two samples."""
    d = a - b
    return d * d


def as_series(x, name="series"):
    """Validate ``x`` as a non-empty 1D series of finite floats.

    Returns a C-contiguous float64 array; raises ValueError otherwise.
    """
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise ValueError(f"{name} has a non-finite sample at index {bad}")
    return arr


@dataclass
class KernelTrace:
    """Instrumentation sink filled by the ``trace=`` argument of a kernel.

    Coordinates are 1-based matrix cells ``(row, col)``. ``pruning_points``
    starts with the top-border point ``(0, 1)`` for the pruned kernels.
    ``matrix_cells`` is only populated when ``capture_matrix`` is True.
    """

    capture_matrix: bool = True
    cells_evaluated: int = 0
    discard_points: list = field(default_factory=list)
    pruning_points: list = field(default_factory=list)
    abandon_cell: tuple | None = None
    matrix_cells: list = field(default_factory=list)
    result: float = math.nan

    def value_at(self, row, col):
        for r, c, v in self.matrix_cells:
            if r == row and c == col:
                return v
        raise KeyError((row, col))

    def max_value(self):
        return max(v for _, _, v in self.matrix_cells)


def _orient(s, t):
    """Return (rows, cols, swapped): rows is the longer series."""
    s = as_series(s, "S")
    t = as_series(t, "T")
    if t.shape[0] > s.shape[0]:
        return t, s, True
    return s, t, False


def _window_cells(window, rows, cols):
    if window is None:
        return max(rows.shape[0], cols.shape[0])
    window = int(window)
    if window < 0:
        raise ValueError(f"window must be >= 0, got {window}")
    return window


def _threshold(ub):
    ub = float(ub)
    if math.isnan(ub) or ub < 0:
        raise ValueError(f"threshold must be >= 0 or +inf, got {ub}")
    return ub


def check_cumulative_bound(cb, length):
    """Validate a cumulative bound for a kernel whose longer series has ``length``."""
    if cb is None:
        return _EMPTY_CB
    cb = np.ascontiguousarray(cb, dtype=np.float64)
    if cb.ndim != 1 or cb.shape[0] != length:
        raise ValueError(f"cumulative bound must have length {length}, got shape {cb.shape}")
    if not np.all(np.isfinite(cb)) or np.any(cb < 0):
        raise ValueError("cumulative bound must be finite and non-negative")
    if np.any(np.diff(cb) > 0):
        raise ValueError("cumulative bound must be non-increasing")
    if cb[-1] != 0.0:
        raise ValueError("cumulative bound must end with 0")
    return cb


@njit(cache=True)
def _row_threshold(ub, cb, i, w, m):
    """Threshold for 1-based row ``i``, tightened by the remaining-cost bound."""
    if cb.shape[0] == 0:
        return ub
    k = i + w
    if k > m:
        k = m
    rest = cb[k - 1]
    if rest == 0.0:
        return ub
    thr = ub - rest + ub * TIGHTEN_SLACK
    if thr < 0.0:
        thr = 0.0
    return thr


@njit(inline="always")
def _min2(a, b):
    return a if a < b else b


@njit(cache=True)
def _full_core(li, co, w, record, values, kinds):
    m = li.shape[0]
    n = co.shape[0]
    if m - n > w:
        return np.inf, 0
    prev = np.full(n + 1, np.inf)
    curr = np.full(n + 1, np.inf)
    curr[0] = 0.0
    cells = 0
    for i in range(1, m + 1):
        prev, curr = curr, prev
        lo = max(1, i - w)
        hi = min(n, i + w)
        curr[lo - 1] = np.inf
        x = li[i - 1]
        left = np.inf
        for j in range(lo, hi + 1):
            d = x - co[j - 1]
            left = d * d + _min2(left, _min2(prev[j], prev[j - 1]))
            curr[j] = left
            if record:
                values[i, j] = left
                kinds[i, j] = _CELL
        cells += hi - lo + 1
        if hi < n:
            curr[hi + 1] = np.inf
    return curr[n], cells


@njit(cache=True)
def _left_prune_core(li, co, w, ub, cb, record, values, kinds):
    """Pruning from the left. Returns (value, cells, abandon_row, abandon_col)."""
    m = li.shape[0]
    n = co.shape[0]
    if m - n > w:
        return np.inf, 0, 0, 0
    prev = np.full(n + 1, np.inf)
    curr = np.full(n + 1, np.inf)
    curr[0] = 0.0
    cells = 0
    next_start = 1
    for i in range(1, m + 1):
        prev, curr = curr, prev
        thr = _row_threshold(ub, cb, i, w, m)
        lo = max(1, i - w)
        hi = min(n, i + w)
        if next_start < lo:
            next_start = lo
        j = next_start
        curr[j - 1] = np.inf
        x = li[i - 1]
        v = np.inf
        # discard points: continuous run of cells above threshold from the left border
        while j == next_start and j <= hi:
            d = x - co[j - 1]
            v = d * d + _min2(prev[j], prev[j - 1])
            curr[j] = v
            cells += 1
            if record:
                values[i, j] = v
                kinds[i, j] = _CELL
            if v > thr:
                next_start += 1
                if record:
                    kinds[i, j] = _DISCARD
            j += 1
        if next_start > hi:
            return np.inf, cells, i, hi
        while j <= hi:
            d = x - co[j - 1]
            v = d * d + _min2(v, _min2(prev[j], prev[j - 1]))
            curr[j] = v
            cells += 1
            if record:
                values[i, j] = v
                kinds[i, j] = _CELL
            j += 1
        if hi < n:
            curr[hi + 1] = np.inf
    if curr[n] > ub:
        return np.inf, cells, m, n
    return curr[n], cells, 0, 0


@njit(cache=True)
def _ea_pruned_core(li, co, w, ub, cb, record, values, kinds, prune_cols):
    """EAPrunedDTW. Returns (value, cells, abandon_row, abandon_col).

    ``prune_cols[i]`` receives the pruning point of each completed row in
    trace mode.
    """
    m = li.shape[0]
    n = co.shape[0]
    if m - n > w:
        return np.inf, 0, 0, 0
    prev = np.full(n + 1, np.inf)
    curr = np.full(n + 1, np.inf)
    curr[0] = 0.0
    cells = 0
    next_start = 1
    prev_pp = 1
    pp = 0
    for i in range(1, m + 1):
        prev, curr = curr, prev
        thr = _row_threshold(ub, cb, i, w, m)
        lo = max(1, i - w)
        hi = min(n, i + w)
        if next_start < lo:
            next_start = lo
        if next_start > prev_pp:
            # left border already inside the pruned area
            return np.inf, cells, i, next_start
        j = next_start
        curr[j - 1] = np.inf
        x = li[i - 1]
        v = np.inf
        # stage 1: discard points, the left neighbour is known to exceed thr
        while j == next_start and j < prev_pp:
            d = x - co[j - 1]
            v = d * d + _min2(prev[j], prev[j - 1])
            curr[j] = v
            cells += 1
            if record:
                values[i, j] = v
                kinds[i, j] = _CELL
            if v <= thr:
                pp = j + 1
            else:
                next_start += 1
                if record:
                    kinds[i, j] = _DISCARD
            j += 1
        # stage 2: standard cells up to the previous pruning point
        while j < prev_pp:
            d = x - co[j - 1]
            v = d * d + _min2(v, _min2(prev[j], prev[j - 1]))
            curr[j] = v
            cells += 1
            if record:
                values[i, j] = v
                kinds[i, j] = _CELL
            if v <= thr:
                pp = j + 1
            j += 1
        # stage 3: the column of the previous pruning point, top is pruned
        if j <= hi:
            d = x - co[j - 1]
            if j == next_start:
                v = d * d + prev[j - 1]
                curr[j] = v
                cells += 1
                if record:
                    values[i, j] = v
                    kinds[i, j] = _CELL
                if v <= thr:
                    pp = j + 1
                else:
                    return np.inf, cells, i, j
            else:
                v = d * d + _min2(v, prev[j - 1])
                curr[j] = v
                cells += 1
                if record:
                    values[i, j] = v
                    kinds[i, j] = _CELL
                if v <= thr:
                    pp = j + 1
            j += 1
        elif j == next_start:
            return np.inf, cells, i, j - 1
        # stage 4: past the previous pruning point only the left neighbour exists
        while j == pp and j <= hi:
            d = x - co[j - 1]
            v = d * d + v
            curr[j] = v
            cells += 1
            if record:
                values[i, j] = v
                kinds[i, j] = _CELL
            if v <= thr:
                pp = j + 1
            j += 1
        prev_pp = pp
        if record:
            prune_cols[i] = pp
    if prev_pp > n:
        return curr[n], cells, 0, 0
    return np.inf, cells, m, n


def _trace_buffers(rows, cols, trace):
    if trace is None:
        return False, _NO_VALUES, _NO_KINDS, _NO_PP
    m, n = rows.shape[0], cols.shape[0]
    values = np.full((m + 1, n + 1), np.nan)
    kinds = np.zeros((m + 1, n + 1), dtype=np.int8)
    prune_cols = np.full(m + 1, -1, dtype=np.int64)
    return True, values, kinds, prune_cols


def _fill_trace(trace, result, cells, values, kinds, w, abandon=None, prune_cols=None):
    trace.result = result
    trace.cells_evaluated = int(cells)
    rows, cols = np.nonzero(kinds)
    trace.discard_points = [
        (int(r), int(c)) for r, c in zip(rows, cols) if kinds[r, c] == _DISCARD
    ]
    if trace.capture_matrix:
        trace.matrix_cells = [(int(r), int(c), float(values[r, c])) for r, c in zip(rows, cols)]
    else:
        trace.matrix_cells = []
    trace.pruning_points = []
    if prune_cols is not None:
        n = kinds.shape[1] - 1
        trace.pruning_points.append((0, 1))
        for i in range(1, prune_cols.shape[0]):
            pp = int(prune_cols[i])
            if 0 < pp <= min(n, i + w):
                trace.pruning_points.append((i, pp))
    trace.abandon_cell = abandon
    return trace


def dtw_full(s, t, *, trace=None):
    """DTW distance (squared cost, no window) in O(min(len)) space.

    Parameters
    ----------
    s, t : array-like
        Non-empty series of finite values.
    trace : KernelTrace, optional
        Filled with every evaluated cell.

    Returns
    -------
    float
        The accumulated squared cost of the optimal warping path.
    """
    return dtw_windowed(s, t, None, trace=trace)


def dtw_windowed(s, t, window=None, *, trace=None):
    """DTW restricted to cells with ``|row - col| <= window``.

    ``window=None`` means no constraint. Returns PRUNED when the length
    difference exceeds the window, since no warping path fits in the band.
    """
    rows, cols, _ = _orient(s, t)
    w = _window_cells(window, rows, cols)
    record, values, kinds, _ = _trace_buffers(rows, cols, trace)
    value, cells = _full_core(rows, cols, w, record, values, kinds)
    if trace is not None:
        _fill_trace(trace, value, cells, values, kinds, w)
    return float(value)


def _run_left_prune(s, t, window, ub, cb, trace):
    rows, cols, _ = _orient(s, t)
    w = _window_cells(window, rows, cols)
    ub = _threshold(ub)
    cb = check_cumulative_bound(cb, rows.shape[0])
    record, values, kinds, _ = _trace_buffers(rows, cols, trace)
    value, cells, ai, aj = _left_prune_core(rows, cols, w, ub, cb, record, values, kinds)
    if trace is not None:
        abandon = (int(ai), int(aj)) if ai > 0 else None
        _fill_trace(trace, value, cells, values, kinds, w, abandon)
    return float(value)


def dtw_left_prune(s, t, ub=math.inf, *, trace=None):
    """DTW with pruning and early abandoning from the left border.

    Cells strictly above ``ub`` forming a run from the left border are
    discard points; the next row starts after the last of them, and the
    computation is abandoned when they cover a whole row.

    Returns the exact distance if it is ``<= ub``, PRUNED otherwise.
    """
    return _run_left_prune(s, t, None, ub, None, trace)


def dtw_left_prune_windowed(s, t, window=None, ub=math.inf, cb=None, *, trace=None):
    """Windowed :func:`dtw_left_prune` with optional per-row threshold tightening."""
    return _run_left_prune(s, t, window, ub, cb, trace)


def ea_pruned_dtw(s, t, ub=math.inf, *, trace=None):
    """EAPrunedDTW: prunes from both borders, abandons when they collide.

    Returns the exact distance if it is ``<= ub``, PRUNED otherwise. With
    ``ub=inf`` the result is bit-identical to :func:`dtw_full`.
    """
    return ea_pruned_dtw_windowed(s, t, None, ub, None, trace=trace)


def ea_pruned_dtw_windowed(s, t, window=None, ub=math.inf, cb=None, *, trace=None):
    """Windowed EAPrunedDTW with optional cumulative-bound tightening.

    Parameters
    ----------
    s, t : array-like
        Non-empty series.
    window : int or None
        Band radius in cells; None for unconstrained.
    ub : float
        Abandoning threshold, ``>= 0`` or ``inf``.
    cb : array-like, optional
        Non-increasing bound on the cost still to be accumulated after each
        row, length of the longer series, last element 0. Row ``i`` (1-based)
        uses threshold ``ub - cb[min(i + window, len) - 1]``.
    trace : KernelTrace, optional

    Returns
    -------
    float
        Exact windowed DTW if ``<= ub``, else PRUNED.
    """
    rows, cols, _ = _orient(s, t)
    w = _window_cells(window, rows, cols)
    ub = _threshold(ub)
    cb = check_cumulative_bound(cb, rows.shape[0])
    record, values, kinds, prune_cols = _trace_buffers(rows, cols, trace)
    value, cells, ai, aj = _ea_pruned_core(
        rows, cols, w, ub, cb, record, values, kinds, prune_cols
    )
    if trace is not None:
        abandon = (int(ai), int(aj)) if ai > 0 else None
        _fill_trace(trace, value, cells, values, kinds, w, abandon, prune_cols)
    return float(value)
