"""Deterministic greedy-modularity clustering and cluster-label smoothing.

Agglomeration starts from singletons and repeatedly merges the connected
pair with the largest modularity gain until exactly K clusters remain, so
the partition is a pure function of the graph. Label smoothing assigns each
cluster the rounded mean score of its labeled members and falls back to a
node classifier for clusters without any.
"""

import math
from dataclasses import dataclass, field

from .. import decode_class, encode_score
from ..errors import DataRangeError
from ..features import LabelVector
from .gcn import predict_gcn


@dataclass
class ClusterAssignment:
    assignment: dict  # node id -> cluster id (the smallest member id)
    k: int
    cluster_means: dict = field(default_factory=dict)  # filled by propagation

    def clusters(self):
        byid = {}
        for node, cid in self.assignment.items():
            byid.setdefault(cid, []).append(node)
        return {cid: sorted(members) for cid, members in byid.items()}


def cluster_graph(sg, k=50, seed=0):
    """Partition the summary graph into exactly k clusters.

    Merge order: maximal modularity gain first, then smallest combined
    cluster size, then lexicographically smallest id pair. Gains compare
    exactly via the integer 2*m*e_ab - deg_a*deg_b (a positive monotone
    rescaling of the gain). Once no two remaining clusters share an edge,
    the smallest clusters merge pairwise until k is reached. `seed` is
    accepted for interface parity; the procedure is deterministic.
    """
    nodes = sorted(sg.nodes)
    if k < 1:
        raise DataRangeError(f"cluster count {k} must be >= 1")
    if k > len(nodes):
        raise DataRangeError(f"cluster count {k} exceeds node count {len(nodes)}")

    m = len(sg.edges)
    members = {n: {n} for n in nodes}
    degsum = {n: sg.degree(n) for n in nodes}
    between = {n: {} for n in nodes}
    for u, v in sg.edges:
        between[u][v] = between[u].get(v, 0) + 1
        between[v][u] = between[v].get(u, 0) + 1

    while len(members) > k:
        best = None
        best_key = None
        for a in members:
            for b, e_ab in between[a].items():
                if b <= a:
                    continue
                gain = 2 * m * e_ab - degsum[a] * degsum[b]
                key = (-gain, len(members[a]) + len(members[b]), a, b)
                if best_key is None or key < best_key:
                    best_key = key
                    best = (a, b)
        if best is None:
            order = sorted(members, key=lambda c: (len(members[c]), c))
            best = tuple(sorted(order[:2]))
        a, b = best

        members[a] |= members.pop(b)
        degsum[a] += degsum.pop(b)
        moved = between.pop(b)
        for c, e_bc in moved.items():
            if c == a:
                continue
            between[a][c] = between[a].get(c, 0) + e_bc
            del between[c][b]
            between[c][a] = between[a][c]
        between[a].pop(b, None)

    assignment = {}
    for cid, group in members.items():
        root = min(group)
        for node in group:
            assignment[node] = root
    return ClusterAssignment(assignment=assignment, k=k)


def round_half_away_from_zero(x):
    return int(math.floor(x + 0.5)) if x >= 0 else int(math.ceil(x - 0.5))


def propagate_cluster_labels(assign, y, fallback):
    """Smooth labels across clusters.

    Every member of a cluster with labeled members receives the cluster's
    rounded mean score; members of fully unlabeled clusters each keep their
    own `fallback` model prediction. Returns labels over all clustered
    companies.
    """
    values = {}
    means = {}
    for cid, group in sorted(assign.clusters().items()):
        scores = [decode_class(y.values[n]) for n in group if n in y.mask]
        if scores:
            label = round_half_away_from_zero(sum(scores) / len(scores))
            means[cid] = label
            for node in group:
                values[node] = encode_score(label)
        else:
            means[cid] = None
            classes, _ = predict_gcn(fallback, group)
            for node, cls in zip(group, classes):
                values[node] = int(cls)
    assign.cluster_means = means
    return LabelVector(sdg=y.sdg, values=values, mask=set(values))
