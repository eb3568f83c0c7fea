"""Compiled kernels: bounded BFS over CSR adjacency and Gini split scanning.

Must stay bit-identical to `pure.py`: integer bookkeeping, then the same
float64 divisions and addition per candidate split, scanned in the same
stable-sorted order.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


def bfs_bounded(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                Py_ssize_t source, Py_ssize_t max_depth):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0, u, v, k
    cdef cnp.int32_t du

    dist[source] = 0
    if max_depth == 0:
        return dist_arr
    queue[tail] = source
    tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        du = dist[u]
        if du == max_depth:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if dist[v] < 0:
                dist[v] = du + 1
                queue[tail] = v
                tail += 1
    return dist_arr


def best_split(cnp.float64_t[::1] x, cnp.int64_t[::1] y, Py_ssize_t n_classes):
    cdef Py_ssize_t n = x.shape[0]
    if n < 2:
        return -np.inf, 0.0

    order_arr = np.argsort(np.asarray(x), kind="stable")
    cdef cnp.int64_t[::1] order = order_arr
    left_arr = np.zeros(n_classes, dtype=np.int64)
    total_arr = np.zeros(n_classes, dtype=np.int64)
    cdef cnp.int64_t[::1] left = left_arr
    cdef cnp.int64_t[::1] total = total_arr

    cdef Py_ssize_t i, c, best = -1
    cdef cnp.int64_t n_left, sumsq_left, sumsq_right, cnt
    cdef double score, best_score = -np.inf
    cdef double lo, hi, threshold

    for i in range(n):
        total[y[order[i]]] += 1

    for i in range(n - 1):
        c = y[order[i]]
        left[c] += 1
        if x[order[i + 1]] <= x[order[i]]:
            continue
        n_left = i + 1
        sumsq_left = 0
        sumsq_right = 0
        for c in range(n_classes):
            cnt = left[c]
            sumsq_left += cnt * cnt
            cnt = total[c] - cnt
            sumsq_right += cnt * cnt
        score = <double>sumsq_left / <double>n_left \
            + <double>sumsq_right / <double>(n - n_left)
        if score > best_score:
            best_score = score
            best = i

    if best < 0:
        return -np.inf, 0.0
    lo = x[order[best]]
    hi = x[order[best + 1]]
    threshold = (lo + hi) / 2.0
    if threshold >= hi:
        threshold = lo
    return best_score, threshold
