"""
Nearest subsequence search
==========================

Scan a long random walk for the window closest to a query under
z-normalized, windowed DTW. The lower-bound cascade discards most windows
before any DTW work; the kernel choice only changes how much work the
remaining windows cost.
"""

import numpy as np

from eapdtw import SearchConfig, similarity_search

rng = np.random.default_rng(7)
reference = np.cumsum(rng.standard_normal(50_000))
query = np.cumsum(rng.standard_normal(256))

# warm the compiled code so timings below are meaningful
similarity_search(reference[:2000], query, SearchConfig(32, 0.1))

###############################################################################
# All configurations find the same window.

print(f"{'algo':5} {'bounds':6} {'location':>8} {'distance':>10} {'dtw calls':>9} "
      f"{'abandoned':>9} {'cells':>12} {'seconds':>7}")
for algo in ("full", "lp", "eap"):
    for lb in (True, False):
        cfg = SearchConfig(256, 0.2, algo, use_lower_bounds=lb, tighten_ub=lb)
        bsf, r = similarity_search(reference, query, cfg)
        print(f"{algo:5} {str(lb):6} {bsf.location:8d} {bsf.distance:10.5f} {r.dtw_calls:9d} "
              f"{r.dtw_abandoned:9d} {r.dp_cells_evaluated:12d} {r.elapsed:7.2f}")

###############################################################################
# Where candidates are settled: share pruned by each bound and share that
# reached the DTW kernel.

bsf, r = similarity_search(reference, query, SearchConfig(256, 0.2))
for tier, share in r.proportions().items():
    print(f"{tier:9} {share:6.1%}")

###############################################################################
# Widening the window makes full DTW linearly more expensive. EAPrunedDTW
# without lower bounds absorbs most of the growth.

for ratio in (0.1, 0.3, 0.5):
    full = similarity_search(reference, query, SearchConfig(256, ratio, "full", False, False))[1]
    eap = similarity_search(reference, query, SearchConfig(256, ratio, "eap", False, False))[1]
    print(f"ratio {ratio}: full {full.dp_cells_evaluated:>12d} cells, "
          f"eap {eap.dp_cells_evaluated:>12d} cells")
