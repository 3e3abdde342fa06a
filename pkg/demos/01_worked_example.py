"""
The DTW cost matrix on a tiny example
=====================================

Two series of six samples, aligned with squared cost. We print the whole
matrix so the recurrence can be checked by hand.
"""

import numpy as np

from eapdtw import KernelTrace, dtw_full, dtw_windowed

S = [3, 1, 4, 4, 1, 1]
T = [1, 3, 2, 1, 2, 2]

# capture every evaluated cell; rows follow S, columns follow T
trace = KernelTrace()
d = dtw_full(S, T, trace=trace)
print("DTW(S, T) =", d)

matrix = np.full((len(S), len(T)), np.nan)
for row, col, value in trace.matrix_cells:
    matrix[row - 1, col - 1] = value
print(matrix.astype(int))

# each cell adds the squared difference to the cheapest of its three
# predecessors, so (2,2) = (1-3)^2 + min(4, 8, 4) = 8
print("cell (2,2):", trace.value_at(2, 2), " largest cell:", trace.max_value())

###############################################################################
# A Sakoe-Chiba band restricts |i - j| to w. The distance can only grow as
# the band narrows; w = 0 is the pointwise squared distance.

for w in (0, 1, 2, 6):
    print(f"w={w}: {dtw_windowed(S, T, w)}")
