#!/usr/bin/env python3
"""Compare the compiled kernels against the pure-Python fallback.

Times the two hot paths behind tree training and graph traversal: the Gini
split scan over one sorted feature column, and bounded BFS over a CSR
adjacency. Both backends are bit-identical (the test suite asserts it), so
this script only reports wall-clock ratios.

Run from a checkout with the package installed:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --rows 20000 --nodes 100000
"""

import argparse
import time

import numpy as np

from sdgscore.kernels import pure

try:
    from sdgscore.kernels import _speedups as compiled
except ImportError:
    compiled = None


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def split_inputs(rng, rows):
    x = rng.normal(size=rows)
    y = rng.integers(0, 7, size=rows).astype(np.int64)
    return np.sort(x), y


def bfs_inputs(rng, nodes, avg_degree):
    n_edges = nodes * avg_degree // 2
    u = rng.integers(0, nodes, size=n_edges)
    v = rng.integers(0, nodes, size=n_edges)
    keep = u != v
    u, v = u[keep], v[keep]
    heads = np.concatenate([u, v])
    tails = np.concatenate([v, u])
    order = np.lexsort((tails, heads))
    heads, tails = heads[order], tails[order]
    indptr = np.zeros(nodes + 1, dtype=np.int64)
    np.add.at(indptr, heads + 1, 1)
    indptr = np.cumsum(indptr)
    return indptr, tails.astype(np.int64)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=10000,
                        help="feature column length for the split scan")
    parser.add_argument("--nodes", type=int, default=50000,
                        help="node count for the BFS graph")
    parser.add_argument("--degree", type=int, default=8,
                        help="average degree for the BFS graph")
    parser.add_argument("--repeats", type=int, default=5,
                        help="repetitions; the best time wins")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    x, y = split_inputs(rng, args.rows)
    indptr, indices = bfs_inputs(rng, args.nodes, args.degree)
    source = int(rng.integers(args.nodes))

    cases = [
        (f"best_split ({args.rows} rows)",
         lambda impl: impl.best_split(x, y, 7)),
        (f"bfs_bounded ({args.nodes} nodes, depth 4)",
         lambda impl: impl.bfs_bounded(indptr, indices, source, 4)),
    ]

    print(f"{'kernel':<36} {'pure':>10} {'compiled':>10} {'speedup':>8}")
    for name, call in cases:
        t_pure = best_of(lambda: call(pure), args.repeats)
        if compiled is None:
            print(f"{name:<36} {t_pure * 1e3:>8.2f}ms {'absent':>10} {'':>8}")
            continue
        t_fast = best_of(lambda: call(compiled), args.repeats)
        ratio = t_pure / t_fast if t_fast > 0 else float("inf")
        print(f"{name:<36} {t_pure * 1e3:>8.2f}ms {t_fast * 1e3:>8.2f}ms "
              f"{ratio:>7.1f}x")
    if compiled is None:
        print("\ncompiled extension not importable; build it with "
              "`pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
