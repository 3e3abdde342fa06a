"""
Early abandoning with a threshold
=================================

Given an upper bound ``ub`` (in a search, the best distance found so far),
the pruned kernels skip cells that cannot lie on a path cheaper than ``ub``
and give up as soon as no such path is left.
"""

from eapdtw import KernelTrace, dtw_full, dtw_left_prune, ea_pruned_dtw

S = [3, 1, 4, 4, 1, 1]
T = [1, 3, 2, 1, 2, 2]


def show(name, kernel, ub):
    trace = KernelTrace()
    value = kernel(S, T, ub, trace=trace)
    grid = [["  ." for _ in T] for _ in S]
    for row, col, v in trace.matrix_cells:
        grid[row - 1][col - 1] = f"{v:3.0f}" if v < 1e300 else "inf"
    print(f"{name}, ub={ub}: result {value}, {trace.cells_evaluated} cells")
    for line in grid:
        print(" ".join(line))
    if trace.abandon_cell:
        print("abandoned at", trace.abandon_cell)
    print()


###############################################################################
# Without a threshold all 36 cells are computed.

print("full:", dtw_full(S, T))
print()

###############################################################################
# With ub = 9, the true distance, both pruned kernels still return 9: a cell
# is only discarded when it strictly exceeds the threshold.

show("left pruning", dtw_left_prune, 9)
show("EAPrunedDTW", ea_pruned_dtw, 9)

###############################################################################
# With ub = 6 no path qualifies. Left pruning only trims the start of each
# row and notices on row 5; EAPrunedDTW also trims the end of each row
# (the pruning point) and stops earlier, at cell (5, 3).

show("left pruning", dtw_left_prune, 6)
show("EAPrunedDTW", ea_pruned_dtw, 6)

trace = KernelTrace()
ea_pruned_dtw(S, T, 6, trace=trace)
print("pruning points per row:", trace.pruning_points)
