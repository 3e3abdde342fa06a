"""Subsequence nearest-neighbour search under windowed DTW.

The scan follows the UCR Suite layout: streaming z-normalization, a
three-tier lower-bound cascade (LB_Kim, LB_Keogh on the query envelope,
LB_Keogh on the candidate envelope), then one of the DTW kernels with the
best-so-far distance as threshold.
"""

from dataclasses import dataclass, asdict
import enum
import math
import time

import numpy as np
from numba import njit

from .bounds import Envelope, _cumulative, _envelope, _keogh, _kim_fl, compute_envelope
from .kernels import (
    _ea_pruned_core,
    _full_core,
    _left_prune_core,
    as_series,
)

STD_EPSILON = 1e-12
RESET_INTERVAL = 100_000
SUPPORTED_RATIOS = (0.1, 0.2, 0.3, 0.4, 0.5)


class Algorithm(enum.Enum):
    FULL = "full"
    LEFT_PRUNE = "lp"
    EA_PRUNED = "eap"


_ALGO_CODE = {Algorithm.FULL: 0, Algorithm.LEFT_PRUNE: 1, Algorithm.EA_PRUNED: 2}

# cascade tiers, as returned by the compiled cascade
COMPUTE = 0
TIER_KIM = 1
TIER_KEOGH_EQ = 2
TIER_KEOGH_EC = 3
_TIER_NAMES = {TIER_KIM: "kim", TIER_KEOGH_EQ: "keogh_eq", TIER_KEOGH_EC: "keogh_ec"}


@dataclass
class RunningStats:
    """Sum and sum of squares over a window of ``count`` samples."""

    sum: float
    sum_of_squares: float
    count: int

    @classmethod
    def from_window(cls, x):
        x = np.asarray(x, dtype=np.float64)
        return cls(float(np.sum(x)), float(np.sum(x * x)), int(x.shape[0]))

    def slide(self, incoming, outgoing):
        self.sum += incoming - outgoing
        self.sum_of_squares += incoming * incoming - outgoing * outgoing

    @property
    def mean(self):
        return self.sum / self.count

    @property
    def std(self):
        mean = self.mean
        var = self.sum_of_squares / self.count - mean * mean
        return math.sqrt(var) if var > 0.0 else 0.0


def znormalize(x, stats=None):
    """Map ``x`` to ``(x - mean) / std``; a (near-)constant window maps to zeros."""
    x = np.asarray(x, dtype=np.float64)
    if stats is None:
        stats = RunningStats.from_window(x)
    std = stats.std
    if std < STD_EPSILON:
        return np.zeros_like(x)
    return (x - stats.mean) / std


@dataclass
class BestSoFar:
    location: int = -1
    distance_sq: float = math.inf
    found: bool = False

    @property
    def distance(self):
        return math.sqrt(self.distance_sq)


@dataclass(frozen=True)
class SearchConfig:
    query_length: int
    window_ratio: float
    algorithm: Algorithm = Algorithm.EA_PRUNED
    use_lower_bounds: bool = True
    tighten_ub: bool = True

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        if self.query_length < 1:
            raise ValueError(f"query_length must be >= 1, got {self.query_length}")
        if not 0.0 <= self.window_ratio <= 1.0:
            raise ValueError(f"window_ratio must lie in [0, 1], got {self.window_ratio}")
        if self.tighten_ub and not self.use_lower_bounds:
            raise ValueError("tighten_ub requires use_lower_bounds")

    @property
    def window_cells(self):
        return max(0, int(math.floor(self.window_ratio * self.query_length)))


@dataclass
class SearchReport:
    candidates_total: int = 0
    pruned_kim: int = 0
    pruned_keogh_eq: int = 0
    pruned_keogh_ec: int = 0
    dtw_calls: int = 0
    dtw_abandoned: int = 0
    dp_cells_evaluated: int = 0
    elapsed: float = 0.0

    def proportions(self):
        """Fraction of candidates settled by each tier and by DTW."""
        total = max(self.candidates_total, 1)
        return {
            "kim": self.pruned_kim / total,
            "keogh_eq": self.pruned_keogh_eq / total,
            "keogh_ec": self.pruned_keogh_ec / total,
            "dtw": self.dtw_calls / total,
        }

    def as_dict(self):
        return asdict(self)


@dataclass
class CascadeDecision:
    """Either a pruning tier name or ``None`` (compute DTW) plus the bound to use."""

    tier: str | None
    cb: np.ndarray

    @property
    def pruned(self):
        return self.tier is not None


@njit(cache=True)
def _cascade(qn, order, uq, lq, zc, bsf, w, use_lb, tighten, cont_eq, cont_ec, cu, cl, cb):
    """Return the first tier whose bound strictly exceeds ``bsf``, or COMPUTE.

    On COMPUTE with ``tighten``, ``cb`` receives the cumulative bound built
    from the larger of the two LB_Keogh contribution vectors.
    """
    if not use_lb:
        return 0
    if _kim_fl(qn, zc) > bsf:
        return 1
    eq, abandoned = _keogh(uq, lq, zc, order, bsf, cont_eq)
    if abandoned or eq > bsf:
        return 2
    m = zc.shape[0]
    _envelope(zc, min(w, m), cu, cl)
    ec, abandoned = _keogh(cu, cl, qn, order, bsf, cont_ec)
    if abandoned or ec > bsf:
        return 3
    if tighten:
        if eq > ec:
            _cumulative(cont_eq, cb)
        else:
            _cumulative(cont_ec, cb)
    return 0


@njit(cache=True)
def _scan(ref, qn, order, uq, lq, w, algo, use_lb, tighten, reset_every, counters):
    """Scan every start position; returns (location, distance_sq).

    counters: candidates, kim, keogh_eq, keogh_ec, dtw_calls, abandoned, cells.
    """
    m = qn.shape[0]
    n_pos = ref.shape[0] - m + 1
    zc = np.empty(m)
    cont_eq = np.zeros(m)
    cont_ec = np.zeros(m)
    cu = np.empty(m)
    cl = np.empty(m)
    cb = np.zeros(m)
    no_cb = np.zeros(0)
    no_values = np.zeros((1, 1))
    no_kinds = np.zeros((1, 1), dtype=np.int8)
    no_pp = np.zeros(1, dtype=np.int64)
    bsf = np.inf
    loc = -1
    ex = 0.0
    ex2 = 0.0
    for p in range(n_pos):
        if p % reset_every == 0:
            ex = 0.0
            ex2 = 0.0
            for k in range(p, p + m):
                ex += ref[k]
                ex2 += ref[k] * ref[k]
        else:
            a = ref[p + m - 1]
            b = ref[p - 1]
            ex += a - b
            ex2 += a * a - b * b
        mean = ex / m
        var = ex2 / m - mean * mean
        std = np.sqrt(var) if var > 0.0 else 0.0
        if std < 1e-12:
            for k in range(m):
                zc[k] = 0.0
        else:
            for k in range(m):
                zc[k] = (ref[p + k] - mean) / std
        counters[0] += 1
        tier = _cascade(qn, order, uq, lq, zc, bsf, w, use_lb, tighten,
                        cont_eq, cont_ec, cu, cl, cb)
        if tier != 0:
            counters[tier] += 1
            continue
        counters[4] += 1
        tcb = cb if tighten else no_cb
        if algo == 0:
            d, cells = _full_core(zc, qn, w, False, no_values, no_kinds)
        elif algo == 1:
            d, cells, _, _ = _left_prune_core(zc, qn, w, bsf, tcb, False, no_values, no_kinds)
        else:
            d, cells, _, _ = _ea_pruned_core(zc, qn, w, bsf, tcb, False, no_values,
                                             no_kinds, no_pp)
        counters[6] += cells
        if d == np.inf:
            counters[5] += 1
        elif d < bsf:
            bsf = d
            loc = p
    return loc, bsf


def query_order(qn):
    """Positions sorted by decreasing |value|, the LB_Keogh accumulation order."""
    return np.argsort(-np.abs(qn), kind="stable").astype(np.int64)


def tighten_threshold(bsf, cb, row, w):
    """Threshold for 1-based ``row``: best-so-far minus the bound still to come.

    Never negative; a zero bound leaves the best-so-far unchanged.
    """
    d = bsf.distance_sq if isinstance(bsf, BestSoFar) else float(bsf)
    if math.isinf(d):
        return math.inf
    cb = np.asarray(cb, dtype=np.float64)
    k = min(row + w, cb.shape[0])
    return max(d - float(cb[k - 1]), 0.0)


def cascade_decision(qn, env_q, c_window, stats, bsf, cfg, order=None):
    """Decide whether a raw candidate window is pruned by a lower bound.

    Parameters
    ----------
    qn : array
        Normalized query of length m.
    env_q : Envelope
        Envelope of ``qn`` for the configured window.
    c_window : array
        Raw candidate window of length m.
    stats : RunningStats
        Statistics of ``c_window``.
    bsf : BestSoFar or float
    cfg : SearchConfig
    order : array of int, optional
        LB_Keogh accumulation order; defaults to :func:`query_order`.
    """
    qn = as_series(qn, "query")
    m = qn.shape[0]
    c_window = np.asarray(c_window, dtype=np.float64)
    if c_window.shape[0] != m:
        raise ValueError(f"candidate window has length {c_window.shape[0]}, expected {m}")
    ub = bsf.distance_sq if isinstance(bsf, BestSoFar) else float(bsf)
    if order is None:
        order = query_order(qn)
    zc = np.ascontiguousarray(znormalize(c_window, stats))
    cb = np.zeros(m)
    tier = _cascade(
        qn, np.ascontiguousarray(order, dtype=np.int64), env_q.upper, env_q.lower, zc, ub,
        cfg.window_cells, cfg.use_lower_bounds, cfg.tighten_ub,
        np.zeros(m), np.zeros(m), np.empty(m), np.empty(m), cb,
    )
    return CascadeDecision(_TIER_NAMES.get(tier), cb)


def similarity_search(reference, query, cfg):
    """Locate the subsequence of ``reference`` nearest to the query under DTW.

    The query is truncated to ``cfg.query_length`` (prefix). Ties keep the
    earliest location.

    Returns
    -------
    (BestSoFar, SearchReport)
    """
    reference = as_series(reference, "reference")
    query = as_series(query, "query")
    m = cfg.query_length
    if query.shape[0] < m:
        raise ValueError(f"query has {query.shape[0]} samples, fewer than query_length={m}")
    if reference.shape[0] < m:
        raise ValueError(f"query_length={m} exceeds reference length {reference.shape[0]}")
    start = time.perf_counter()
    qn = np.ascontiguousarray(znormalize(query[:m]))
    w = cfg.window_cells
    env = compute_envelope(qn, w)
    counters = np.zeros(7, dtype=np.int64)
    loc, dist = _scan(
        reference, qn, query_order(qn), env.upper, env.lower, w,
        _ALGO_CODE[cfg.algorithm], cfg.use_lower_bounds, cfg.tighten_ub,
        RESET_INTERVAL, counters,
    )
    report = SearchReport(*(int(c) for c in counters), elapsed=time.perf_counter() - start)
    bsf = BestSoFar(int(loc), float(dist), loc >= 0)
    return bsf, report
