"""Typed knowledge graph storage, bounded reachability, and the company summary graph.

The graph is loaded from a UTF-8 TSV edge list (`subject<TAB>relation<TAB>object`,
`#` comments allowed). Distance-style operations treat edges as undirected,
ignore relation types, collapse parallel edges, and skip self-loops; the
stored multigraph keeps everything for relation-aware models.

All structures are immutable after construction and safe to share across
threads; traversals from distinct sources share no mutable state.
"""

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import DataError, DataMissingError


@dataclass(frozen=True)
class Entity:
    id: str
    label: str = ""
    is_company: bool = False


@dataclass(frozen=True)
class TypedEdge:
    subject: str
    relation: str
    object: str


class KnowledgeGraph:
    """Directed typed multigraph with an undirected index for distance queries."""

    def __init__(self, entities, edges):
        self.entities = {}
        for ent in entities:
            if not ent.id:
                raise DataError("entity with empty id")
            if ent.id in self.entities:
                raise DataError(f"duplicate entity id {ent.id!r}")
            self.entities[ent.id] = ent
        self.edges = list(edges)
        for e in self.edges:
            if e.subject not in self.entities or e.object not in self.entities:
                raise DataError(f"edge endpoint not in entity set: {e}")
        self.relation_types = {e.relation for e in self.edges}
        self._ids = sorted(self.entities)
        self._index = {eid: i for i, eid in enumerate(self._ids)}
        self._indptr, self._indices = self._build_csr(self.edges)

    def _build_csr(self, edges):
        """Undirected, deduplicated, loop-free CSR over the sorted entity ids."""
        n = len(self._ids)
        pairs = set()
        for e in edges:
            if e.subject == e.object:
                continue
            a, b = self._index[e.subject], self._index[e.object]
            pairs.add((a, b))
            pairs.add((b, a))
        if pairs:
            arr = np.array(sorted(pairs), dtype=np.int64)
            indices = arr[:, 1].copy()
            indptr = np.zeros(n + 1, dtype=np.int64)
            np.add.at(indptr, arr[:, 0] + 1, 1)
            indptr = np.cumsum(indptr)
        else:
            indices = np.empty(0, dtype=np.int64)
            indptr = np.zeros(n + 1, dtype=np.int64)
        return indptr, indices

    @property
    def n_entities(self):
        return len(self.entities)

    @property
    def n_edges(self):
        return len(self.edges)

    def company_ids(self):
        return {eid for eid, ent in self.entities.items() if ent.is_company}

    def neighbors(self, entity_id):
        i = self._require(entity_id)
        return [self._ids[j] for j in self._indices[self._indptr[i]:self._indptr[i + 1]]]

    def _require(self, entity_id):
        try:
            return self._index[entity_id]
        except KeyError:
            raise DataMissingError(f"unknown entity id {entity_id!r}") from None


@dataclass(frozen=True)
class SummaryGraph:
    """Undirected company-only graph; edge pairs stored canonically ordered."""

    nodes: frozenset
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        for a, b in self.edges:
            if a == b:
                raise DataError(f"self-pair {a!r} in summary graph")
            if (a, b) != tuple(sorted((a, b))):
                raise DataError(f"edge pair ({a!r}, {b!r}) not canonically ordered")
            if a not in self.nodes or b not in self.nodes:
                raise DataError(f"edge endpoint outside node set: ({a!r}, {b!r})")

    def degree(self, node):
        return sum(1 for pair in self.edges if node in pair)

    def neighbors_of(self, node):
        out = set()
        for a, b in self.edges:
            if a == node:
                out.add(b)
            elif b == node:
                out.add(a)
        return out


def load_edge_list(path):
    """Read a TSV edge list into a KnowledgeGraph.

    Empty files yield an empty graph. Malformed lines report their 1-based
    line number. Entities are deduplicated; parallel edges are preserved.
    """
    entities = {}
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3 or not all(p.strip() for p in parts):
                raise DataError(f"{path}:{lineno}: expected 3 tab-separated fields, got {line!r}")
            subject, relation, obj = (p.strip() for p in parts)
            for eid in (subject, obj):
                if eid not in entities:
                    entities[eid] = Entity(id=eid)
            edges.append(TypedEdge(subject, relation, obj))
    return KnowledgeGraph(entities.values(), edges)


def write_edge_list(g, path):
    with open(path, "w", encoding="utf-8") as fh:
        for e in g.edges:
            fh.write(f"{e.subject}\t{e.relation}\t{e.object}\n")


def bounded_bfs(g, source, max_depth):
    """Undirected hop distances from `source`, capped at `max_depth`.

    Returns {entity id: distance}; entities beyond the cap are absent.
    """
    if max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    src = g._require(source)
    dist = kernels.bfs_bounded(g._indptr, g._indices, src, max_depth)
    return {g._ids[i]: int(d) for i, d in enumerate(dist) if d >= 0}


def extract_subgraph(g, seeds, relation_filter=None):
    """Node-induced subgraph of everything within 2 hops of any seed.

    Two seeds that are both within 2 hops of a shared node end up within
    4 edges of each other inside the output, which is the expansion's end
    condition. When `relation_filter` is given, both the expansion and the
    retained edges are restricted to those relation types. Seeds are always
    kept, even when isolated.
    """
    seeds = sorted(seeds)
    if not seeds:
        raise ValueError("at least one seed required")
    for s in seeds:
        g._require(s)

    if relation_filter is None:
        indptr, indices = g._indptr, g._indices
        edges = g.edges
    else:
        edges = [e for e in g.edges if e.relation in relation_filter]
        indptr, indices = g._build_csr(edges)

    keep = set()
    for s in seeds:
        dist = kernels.bfs_bounded(indptr, indices, g._index[s], 2)
        keep.update(np.flatnonzero(dist >= 0).tolist())
    keep_ids = {g._ids[i] for i in keep} | set(seeds)

    sub_entities = [g.entities[eid] for eid in sorted(keep_ids)]
    sub_edges = [e for e in edges if e.subject in keep_ids and e.object in keep_ids]
    return KnowledgeGraph(sub_entities, sub_edges)


def build_summary_graph(g, companies, step_threshold=2):
    """Company graph with an edge wherever two companies are within
    `step_threshold` undirected hops in `g`."""
    if step_threshold < 1:
        raise ValueError("step_threshold must be >= 1")
    companies = sorted(companies)
    for c in companies:
        g._require(c)
    company_set = set(companies)
    pairs = set()
    for c in companies:
        dist = bounded_bfs(g, c, step_threshold)
        for other, d in dist.items():
            if other != c and other in company_set:
                pairs.add(tuple(sorted((c, other))))
    return SummaryGraph(nodes=frozenset(companies), edges=frozenset(pairs))


def reachability_share(g, companies, step_threshold=2):
    """Fraction of company pairs within `step_threshold` hops.

    Exposed as a measurement only; the value depends entirely on the seed set.
    """
    companies = sorted(companies)
    n = len(companies)
    if n < 2:
        return 0.0
    sg = build_summary_graph(g, companies, step_threshold)
    return len(sg.edges) / (n * (n - 1) / 2)


def degree_histogram(sg):
    """Map degree -> node count; counts sum to the number of nodes."""
    deg = Counter()
    for node in sg.nodes:
        deg[node] = 0
    for a, b in sg.edges:
        deg[a] += 1
        deg[b] += 1
    hist = Counter(deg.values()) if deg else Counter()
    return dict(hist)


def write_summary_graph(sg, path):
    """TSV pair list, canonically ordered within pairs and sorted overall."""
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in sorted(sg.edges):
            fh.write(f"{a}\t{b}\n")


def load_summary_graph(path, nodes):
    edges = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected 2 tab-separated fields")
            edges.add(tuple(sorted((parts[0], parts[1]))))
    return SummaryGraph(nodes=frozenset(nodes), edges=frozenset(edges))


def write_degree_histogram(sg, path):
    """CSV `degree,count`, sorted ascending by degree."""
    hist = degree_histogram(sg)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("degree,count\n")
        for degree in sorted(hist):
            fh.write(f"{degree},{hist[degree]}\n")
