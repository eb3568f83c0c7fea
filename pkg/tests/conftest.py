"""Shared test fixtures: independent oracles and planted-signal generators.

The oracles here deliberately avoid the library's own graph code: distance
checks go through a dense Floyd-Warshall, split scoring through a brute
force scan, so agreement means two independent derivations match.
"""

import numpy as np
import pytest

from sdgscore.graph import Entity, KnowledgeGraph, SummaryGraph, TypedEdge

RELATIONS = ("industry", "country", "produces", "supplier-of", "partner-of")


def fw_distances(n, pairs):
    """Dense all-pairs hop counts; unreachable stays at a large sentinel."""
    inf = n + 10
    dist = np.full((n, n), inf, dtype=np.int64)
    np.fill_diagonal(dist, 0)
    for a, b in pairs:
        if a != b:
            dist[a, b] = 1
            dist[b, a] = 1
    for k in range(n):
        dist = np.minimum(dist, dist[:, k, None] + dist[None, k, :])
    return dist, inf


def random_kg(rng, max_nodes=50, p_low=0.1, p_high=0.5):
    """Random typed graph plus the integer pair set behind it."""
    n = int(rng.integers(2, max_nodes + 1))
    p = float(rng.uniform(p_low, p_high))
    ids = [f"n{i:03d}" for i in range(n)]
    pairs = set()
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                pairs.add((i, j))
                rel = RELATIONS[int(rng.integers(len(RELATIONS)))]
                if rng.random() < 0.5:
                    edges.append(TypedEdge(ids[i], rel, ids[j]))
                else:
                    edges.append(TypedEdge(ids[j], rel, ids[i]))
    g = KnowledgeGraph([Entity(id=i) for i in ids], edges)
    return g, ids, pairs, n


def planted_text_dataset(seed, n_companies=500, terms_per_class=6,
                         n_background=18, boost=4.0):
    """Bag-of-words rows whose active columns identify the class.

    Every class owns a block of indicative terms drawn with a higher rate
    than the shared background block, giving a learnable but noisy signal.
    """
    rng = np.random.default_rng(seed)
    n_classes = 7
    width = n_classes * terms_per_class + n_background
    y = rng.integers(0, n_classes, size=n_companies)
    X = rng.poisson(1.0, size=(n_companies, width)).astype(np.float64)
    for i in range(n_companies):
        block = slice(y[i] * terms_per_class, (y[i] + 1) * terms_per_class)
        X[i, block] += rng.poisson(boost, size=terms_per_class)
    return X, y.astype(np.int64)


def two_block_graph(seed, n_per_block=20, p_in=0.5, p_out=0.02):
    """Homophilous planted partition with block-indicative noisy features."""
    rng = np.random.default_rng(seed)
    n = 2 * n_per_block
    ids = [f"c{i:03d}" for i in range(n)]
    block = np.array([0] * n_per_block + [1] * n_per_block)
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if block[i] == block[j] else p_out
            if rng.random() < p:
                edges.add((ids[i], ids[j]))
    sg = SummaryGraph(nodes=frozenset(ids), edges=frozenset(edges))
    X = rng.normal(0.0, 1.0, size=(n, 8))
    X[:, 0] += np.where(block == 0, 2.0, -2.0)
    return sg, ids, block, X


def planted_star_graph(seed, n_stars=12, signal=4.0):
    """Disjoint stars whose focal-node class is copied from one neighbor.

    Each star has focal f, informative neighbor a (feature column 0 carries
    the class sign), distractors b and c, and second-hop noise nodes. Returns
    (summary graph, feature rows over sorted nodes, focal labels, trials),
    where each trial is (focal node, informative edge pair).
    """
    rng = np.random.default_rng(seed)
    nodes = set()
    edges = set()
    labels = {}
    trials = []
    rows = {}
    for i in range(n_stars):
        f, a, b, c = (f"{p}{i:02d}" for p in "fabc")
        x, y, z = (f"{p}{i:02d}" for p in "xyz")
        star_nodes = [f, a, b, c, x, y, z]
        nodes.update(star_nodes)
        for pair in [(f, a), (f, b), (f, c), (a, x), (b, y), (c, z), (b, c)]:
            edges.add(tuple(sorted(pair)))
        sign = 1.0 if i % 2 == 0 else -1.0
        for node in star_nodes:
            row = np.zeros(4)
            row[1:] = rng.normal(0.0, 0.3, size=3)
            rows[node] = row
        rows[a][0] = sign * signal
        labels[f] = 6 if sign > 0 else 0
        trials.append((f, tuple(sorted((f, a)))))
    sg = SummaryGraph(nodes=frozenset(nodes), edges=frozenset(edges))
    ids = sorted(nodes)
    X = np.vstack([rows[n] for n in ids])
    return sg, X, labels, trials


def labeled_subset(rng, ids, fraction=0.3):
    k = max(2, int(round(len(ids) * fraction)))
    picked = rng.choice(len(ids), size=k, replace=False)
    return sorted(ids[i] for i in picked)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
