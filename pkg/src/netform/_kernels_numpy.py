"""Pure numpy/scipy kernels, signature-compatible with _kernels_numba.py.

Component labeling goes through scipy's sparse connected_components on the
masked subgraph; the table fill vectorizes the (y, z) plane per item.
"""

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components


def label_components(indptr, indices, active):
    """Label connected components of the subgraph induced on active nodes.

    Returns (labels, count); labels[i] = -1 for inactive nodes.  Labels are
    renumbered by first occurrence in id order to match the jit lane.
    """
    n = active.shape[0]
    labels = np.full(n, -1, dtype=np.int64)
    keep = np.flatnonzero(active)
    if keep.size == 0:
        return labels, 0
    remap = np.full(n, -1, dtype=np.int64)
    remap[keep] = np.arange(keep.size)
    node_of_entry = np.repeat(np.arange(n), np.diff(indptr))
    entry_ok = active[node_of_entry] & active[indices]
    sub_rows = remap[node_of_entry[entry_ok]]
    sub_cols = remap[indices[entry_ok]]
    graph = csr_matrix(
        (np.ones(sub_rows.size, dtype=np.int8), (sub_rows, sub_cols)),
        shape=(keep.size, keep.size),
    )
    _count, sub_labels = connected_components(graph, directed=False)
    # renumber to first-occurrence order over ascending node ids
    first_idx = np.full(_count, keep.size, dtype=np.int64)
    np.minimum.at(first_idx, sub_labels, np.arange(keep.size))
    order = np.argsort(first_idx, kind="stable")
    rank = np.empty(_count, dtype=np.int64)
    rank[order] = np.arange(_count)
    labels[keep] = rank[sub_labels]
    return labels, int(_count)


def knapsack_fill(sizes, y_max, z_max):
    """Fill M[x, y, z] = max total size <= z choosable from the first x items
    with at most y picks, plus take markers for reconstruction.

    Ties between taking and skipping keep the skip, matching the jit lane.
    """
    m = int(sizes.shape[0])
    M = np.zeros((m + 1, y_max + 1, z_max + 1), dtype=np.int64)
    take = np.zeros((m + 1, y_max + 1, z_max + 1), dtype=np.bool_)
    for x in range(1, m + 1):
        c = int(sizes[x - 1])
        M[x] = M[x - 1]
        if 0 < c <= z_max and y_max >= 1:
            cand = M[x - 1, : y_max, : z_max + 1 - c] + c
            cur = M[x, 1:, c:]
            took = cand > cur
            M[x, 1:, c:] = np.where(took, cand, cur)
            take[x, 1:, c:] = took
        elif c == 0:
            # zero-size item: taking never beats skipping (strict compare)
            pass
    return M, take
