"""Pure-Python/numpy fallback for the hot kernels.

Both backends must return bit-identical results. The split scanner achieves
this by keeping every floating-point expression to exact-integer operands
followed by the same two divisions and one addition, evaluated in the same
order as the C loop in `_speedups.pyx`.
"""

from collections import deque

import numpy as np

BACKEND = "pure"


def bfs_bounded(indptr, indices, source, max_depth):
    """Hop distances from `source` over a CSR adjacency, capped at `max_depth`.

    Returns an int32 array with -1 for nodes beyond the cap.
    """
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    if max_depth == 0:
        return dist
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du == max_depth:
            continue
        for v in indices[indptr[u]:indptr[u + 1]]:
            if dist[v] < 0:
                dist[v] = du + 1
                queue.append(v)
    return dist


def best_split(x, y, n_classes):
    """Best binary split of one feature column under the Gini criterion.

    Maximizes sum_c nL_c^2 / nL + sum_c nR_c^2 / nR over split positions
    (equivalent to minimizing the weighted child Gini impurity). Ties keep
    the first position in stable sorted order, hence the lowest threshold.

    Returns (score, threshold); score is -inf when no valid split exists.
    The parent's score is sum_c n_c^2 / n: a split improves purity iff
    score > parent score.
    """
    n = x.shape[0]
    if n < 2:
        return -np.inf, 0.0
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]

    onehot = np.zeros((n, n_classes), dtype=np.int64)
    onehot[np.arange(n), ys] = 1
    left = np.cumsum(onehot, axis=0)[:-1]  # class counts left of each cut
    right = left[-1] + onehot[-1] - left

    n_left = np.arange(1, n, dtype=np.int64)
    sumsq_left = np.einsum("ij,ij->i", left, left)
    sumsq_right = np.einsum("ij,ij->i", right, right)
    score = sumsq_left / n_left + sumsq_right / (n - n_left)

    valid = xs[1:] > xs[:-1]
    if not valid.any():
        return -np.inf, 0.0
    score[~valid] = -np.inf
    best = int(np.argmax(score))

    lo, hi = xs[best], xs[best + 1]
    threshold = (lo + hi) / 2.0
    if threshold >= hi:  # midpoint rounded up to the right value
        threshold = lo
    return float(score[best]), float(threshold)
