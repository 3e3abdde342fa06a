"""Lower bounds on windowed DTW: LB_Kim (first/last), LB_Keogh and the
reverse-cumulative bound used to tighten kernel thresholds."""

from dataclasses import dataclass
import math

import numpy as np
from numba import njit

from .kernels import as_series


@dataclass(frozen=True)
class Envelope:
    upper: np.ndarray
    lower: np.ndarray
    window: int

    def __len__(self):
        return self.upper.shape[0]


@dataclass(frozen=True)
class BoundResult:
    """LB_Keogh outcome.

    ``contributions`` is indexed by position. When ``abandoned`` is True the
    accumulation stopped once ``total`` exceeded the caller's best-so-far, and
    positions not yet visited hold 0.
    """

    total: float
    contributions: np.ndarray
    abandoned: bool = False


@njit(cache=True)
def _envelope(x, w, upper, lower):
    # monotonic deques of indices, stored in fixed arrays
    n = x.shape[0]
    du = np.empty(n, dtype=np.int64)
    dl = np.empty(n, dtype=np.int64)
    uh = 0
    ut = 0
    lh = 0
    lt = 0
    for k in range(n + w):
        if k < n:
            v = x[k]
            while ut > uh and x[du[ut - 1]] <= v:
                ut -= 1
            du[ut] = k
            ut += 1
            while lt > lh and x[dl[lt - 1]] >= v:
                lt -= 1
            dl[lt] = k
            lt += 1
        j = k - w
        if j < 0:
            continue
        while du[uh] < j - w:
            uh += 1
        while dl[lh] < j - w:
            lh += 1
        upper[j] = x[du[uh]]
        lower[j] = x[dl[lh]]


def compute_envelope(s, window):
    """Running max/min of ``s`` over ``[j - window, j + window]`` clamped to the series.

    O(len(s)) via a monotonic-deque sweep.
    """
    s = as_series(s)
    if window is None:
        window = s.shape[0]
    window = int(window)
    if window < 0:
        raise ValueError(f"window must be >= 0, got {window}")
    w = min(window, s.shape[0])
    upper = np.empty_like(s)
    lower = np.empty_like(s)
    _envelope(s, w, upper, lower)
    return Envelope(upper, lower, window)


@njit(cache=True)
def _kim_fl(q, c):
    n = q.shape[0]
    d = q[0] - c[0]
    lb = d * d
    if n > 1:
        d = q[n - 1] - c[n - 1]
        lb += d * d
    return lb


def lb_kim_fl(q, c):
    """Squared cost of the first pair plus that of the last pair.

    Both extremities are always aligned by a warping path, so this bounds
    DTW from below. Intended for z-normalized series of equal length. A
    length-1 pair contributes its single alignment once.
    """
    q = as_series(q, "Q")
    c = as_series(c, "C")
    if q.shape[0] != c.shape[0]:
        raise ValueError(f"length mismatch: {q.shape[0]} != {c.shape[0]}")
    return float(_kim_fl(q, c))


@njit(cache=True)
def _keogh(upper, lower, c, order, bsf, contributions):
    """Accumulate LB_Keogh in ``order``; stop once the total exceeds ``bsf``.

    Returns (total, abandoned).
    """
    total = 0.0
    for k in range(order.shape[0]):
        j = order[k]
        x = c[j]
        if x > upper[j]:
            d = x - upper[j]
            e = d * d
        elif x < lower[j]:
            d = lower[j] - x
            e = d * d
        else:
            e = 0.0
        contributions[j] = e
        total += e
        if total > bsf:
            return total, True
    return total, False


def lb_keogh(envelope, c, *, order=None, best_so_far=math.inf, window=None):
    """LB_Keogh of series ``c`` against an envelope.

    Parameters
    ----------
    envelope : Envelope
        Envelope of the other series, built with the DTW window.
    c : array-like
        Series of the same length as the envelope.
    order : array-like of int, optional
        Permutation giving the accumulation order; natural order by default.
    best_so_far : float
        Accumulation stops once the partial total strictly exceeds it.
    window : int, optional
        If given, must match ``envelope.window``.
    """
    c = as_series(c, "C")
    if c.shape[0] != len(envelope):
        raise ValueError(f"length mismatch: {c.shape[0]} != {len(envelope)}")
    if window is not None and int(window) != envelope.window:
        raise ValueError(f"envelope built for window {envelope.window}, not {window}")
    if order is None:
        order = np.arange(c.shape[0], dtype=np.int64)
    else:
        order = np.ascontiguousarray(order, dtype=np.int64)
        if order.shape[0] != c.shape[0] or not np.array_equal(np.sort(order), np.arange(c.shape[0])):
            raise ValueError("order must be a permutation of the positions")
    contributions = np.zeros(c.shape[0])
    total, abandoned = _keogh(
        envelope.upper, envelope.lower, c, order, float(best_so_far), contributions
    )
    return BoundResult(float(total), contributions, bool(abandoned))


@njit(cache=True)
def _cumulative(contributions, out):
    n = contributions.shape[0]
    out[n - 1] = 0.0
    for i in range(n - 2, -1, -1):
        out[i] = out[i + 1] + contributions[i + 1]


def cumulative_bound(contributions):
    """Reverse cumulative sum excluding the current position.

    ``cb[i] = sum(contributions[i+1:])``; ``cb[-1] == 0``.

    >>> cumulative_bound([1.0, 2.0, 3.0])
    array([5., 3., 0.])
    """
    contributions = np.ascontiguousarray(contributions, dtype=np.float64)
    if contributions.ndim != 1 or contributions.shape[0] == 0:
        raise ValueError("contributions must be a non-empty 1D sequence")
    if np.any(contributions < 0) or not np.all(np.isfinite(contributions)):
        raise ValueError("contributions must be finite and non-negative")
    out = np.empty_like(contributions)
    _cumulative(contributions, out)
    return out
