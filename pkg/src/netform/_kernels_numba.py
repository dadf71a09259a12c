"""Jit-compiled kernels: component labeling on a masked CSR graph and the
3-dimensional subset-selection table fill.

Both functions must stay signature-compatible with the numpy lane in
_kernels_numpy.py; the dispatcher in kernels.py picks one of the two.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def label_components(indptr, indices, active):
    """Label connected components of the subgraph induced on active nodes.

    Returns (labels, count); labels[i] = -1 for inactive nodes.  Nodes are
    seeded in ascending id order, so label k's smallest member is increasing
    in k (callers rely on this for deterministic region ordering).
    """
    n = active.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    count = 0
    for s in range(n):
        if active[s] and labels[s] < 0:
            labels[s] = count
            stack[0] = s
            top = 1
            while top > 0:
                top -= 1
                u = stack[top]
                for k in range(indptr[u], indptr[u + 1]):
                    v = indices[k]
                    if active[v] and labels[v] < 0:
                        labels[v] = count
                        stack[top] = v
                        top += 1
            count += 1
    return labels, count


@njit(cache=True)
def knapsack_fill(sizes, y_max, z_max):
    """Fill M[x, y, z] = max total size <= z choosable from the first x items
    with at most y picks, plus take markers for reconstruction.

    Ties between taking and skipping item x keep the skip (take stays False),
    so reconstruction prefers fewer picks.
    """
    m = sizes.shape[0]
    M = np.zeros((m + 1, y_max + 1, z_max + 1), dtype=np.int64)
    take = np.zeros((m + 1, y_max + 1, z_max + 1), dtype=np.bool_)
    for x in range(1, m + 1):
        c = sizes[x - 1]
        for y in range(y_max + 1):
            for z in range(z_max + 1):
                best = M[x - 1, y, z]
                took = False
                if y >= 1 and c <= z:
                    cand = c + M[x - 1, y - 1, z - c]
                    if cand > best:
                        best = cand
                        took = True
                M[x, y, z] = best
                take[x, y, z] = took
    return M, take
