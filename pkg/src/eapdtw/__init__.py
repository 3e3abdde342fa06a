"""Exact dynamic time warping with early-abandoning pruning.

Kernels (:mod:`eapdtw.kernels`), lower bounds (:mod:`eapdtw.bounds`) and a
UCR-Suite-style subsequence search (:mod:`eapdtw.search`).
"""

from .bounds import (
    BoundResult,
    Envelope,
    compute_envelope,
    cumulative_bound,
    lb_keogh,
    lb_kim_fl,
)
from .kernels import (
    PRUNED,
    KernelTrace,
    dtw_full,
    dtw_left_prune,
    dtw_left_prune_windowed,
    dtw_windowed,
    ea_pruned_dtw,
    ea_pruned_dtw_windowed,
    is_pruned,
    squared_cost,
)
from .search import (
    Algorithm,
    BestSoFar,
    RunningStats,
    SearchConfig,
    SearchReport,
    cascade_decision,
    similarity_search,
    tighten_threshold,
    znormalize,
)

__version__ = "0.1.0"
