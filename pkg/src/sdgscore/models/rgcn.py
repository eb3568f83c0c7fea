"""Relational graph convolution over the typed knowledge graph.

Each layer computes relu(X Wself + sum_r M_r X Wr) where M_r is the
mean-aggregation matrix of relation r: row i holds 1/|N_r(i)| at the
columns of i's undirected r-neighbors (self loops dropped). Rare relations
are pooled into a single catch-all so parameter count stays bounded.
Company nodes carry bag-of-words features; every other node contributes a
learned embedding row trained jointly with the weights.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .. import N_CLASSES
from ..errors import DataError, DataMissingError, NumericError
from .gcn import AdamState, glorot, softmax_rows, masked_cross_entropy

OTHER_RELATION = "__other__"


@dataclass(frozen=True)
class RgcnConfig:
    hidden: int = 16
    epochs: int = 5000
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0
    min_relation_count: int = 10


@dataclass
class RgcnParams:
    embeddings: np.ndarray
    wself1: np.ndarray
    wrel1: list
    wself2: np.ndarray
    wrel2: list

    def tensors(self):
        return [self.embeddings, self.wself1, *self.wrel1,
                self.wself2, *self.wrel2]


@dataclass
class RgcnModel:
    node_ids: list
    relations: list
    matrices: list
    features: np.ndarray
    embed_rows: np.ndarray
    params: RgcnParams
    config: RgcnConfig
    loss_history: list = field(default_factory=list)

    def node_index(self, node_id):
        try:
            return self._index[node_id]
        except AttributeError:
            self._index = {n: i for i, n in enumerate(self.node_ids)}
            return self.node_index(node_id)
        except KeyError:
            raise DataMissingError(f"unknown node id {node_id!r}") from None

    def input_matrix(self):
        x = self.features.copy()
        x[self.embed_rows] = self.params.embeddings
        return x


def build_relation_matrices(graph, node_ids, min_count=10):
    """Mean-aggregation CSR matrix per kept relation, rare ones pooled.

    Relations seen on fewer than `min_count` edges share one catch-all
    bucket. Neighborhoods are undirected, deduplicated, and never include
    the node itself.
    """
    index = {n: i for i, n in enumerate(node_ids)}
    n = len(node_ids)
    counts = {}
    for e in graph.edges:
        counts[e.relation] = counts.get(e.relation, 0) + 1
    kept = sorted(r for r, c in counts.items() if c >= min_count)
    rename = {r: (r if r in kept else OTHER_RELATION) for r in counts}

    pairs = {}
    for e in graph.edges:
        if e.subject == e.object:
            continue
        i, j = index[e.subject], index[e.object]
        pairs.setdefault(rename[e.relation], set()).update({(i, j), (j, i)})

    relations = [r for r in kept if r in pairs]
    if OTHER_RELATION in pairs:
        relations.append(OTHER_RELATION)

    matrices = []
    for rel in relations:
        rows = np.array([p[0] for p in sorted(pairs[rel])], dtype=np.int64)
        cols = np.array([p[1] for p in sorted(pairs[rel])], dtype=np.int64)
        deg = np.bincount(rows, minlength=n).astype(np.float64)
        weights = 1.0 / deg[rows]
        matrices.append(sp.csr_matrix((weights, (rows, cols)), shape=(n, n)))
    return relations, matrices


def rgcn_forward(matrices, X, params):
    """Returns (pre-activation H1, hidden A1, probabilities)."""
    h1 = X @ params.wself1
    for m, w in zip(matrices, params.wrel1):
        h1 = h1 + (m @ X) @ w
    a1 = np.maximum(h1, 0.0)
    logits = a1 @ params.wself2
    for m, w in zip(matrices, params.wrel2):
        logits = logits + (m @ a1) @ w
    return h1, a1, softmax_rows(logits)


def rgcn_loss_and_grads(matrices, X, y, mask_idx, params, embed_rows):
    """Analytic gradients for every tensor in `params`, embeddings included."""
    h1, a1, probs = rgcn_forward(matrices, X, params)
    loss = masked_cross_entropy(probs, y, mask_idx)

    d_logits = np.zeros_like(probs)
    d_logits[mask_idx] = probs[mask_idx]
    d_logits[mask_idx, y[mask_idx]] -= 1.0
    d_logits /= len(mask_idx)

    d_wself2 = a1.T @ d_logits
    d_wrel2 = [(m @ a1).T @ d_logits for m in matrices]
    d_a1 = d_logits @ params.wself2.T
    for m, w in zip(matrices, params.wrel2):
        d_a1 = d_a1 + m.T @ (d_logits @ w.T)

    d_h1 = d_a1 * (h1 > 0.0)
    d_wself1 = X.T @ d_h1
    d_wrel1 = [(m @ X).T @ d_h1 for m in matrices]
    d_x = d_h1 @ params.wself1.T
    for m, w in zip(matrices, params.wrel1):
        d_x = d_x + m.T @ (d_h1 @ w.T)

    grads = RgcnParams(embeddings=d_x[embed_rows], wself1=d_wself1,
                       wrel1=d_wrel1, wself2=d_wself2, wrel2=d_wrel2)
    return loss, grads


def init_params(rng, n_embed, input_dim, relations, config):
    emb = rng.uniform(-0.05, 0.05, size=(n_embed, input_dim))
    wself1 = glorot(rng, input_dim, config.hidden)
    wrel1 = [glorot(rng, input_dim, config.hidden) for _ in relations]
    wself2 = glorot(rng, config.hidden, N_CLASSES)
    wrel2 = [glorot(rng, config.hidden, N_CLASSES) for _ in relations]
    return RgcnParams(emb, wself1, wrel1, wself2, wrel2)


def train_rgcn(graph, company_features, y, mask, config=None):
    """Train on the knowledge graph.

    `company_features` maps company node id to its feature row; all other
    graph nodes receive trained embedding rows of the same width.
    """
    config = config or RgcnConfig()
    ids = sorted(graph.entities)
    if not ids:
        raise DataError("empty graph: nothing to train on")
    widths = {np.asarray(v).shape for v in company_features.values()}
    if len(widths) > 1:
        raise DataError(f"inconsistent feature widths: {sorted(widths)}")
    if not widths:
        raise DataError("no company features supplied")
    (input_dim,) = widths.pop()

    index = {n: i for i, n in enumerate(ids)}
    for node in sorted(mask):
        if node not in index:
            raise DataMissingError(f"labeled node {node!r} not in graph")
    embed_rows = np.array(
        [i for i, n in enumerate(ids) if n not in company_features],
        dtype=np.int64)
    X = np.zeros((len(ids), input_dim))
    for node, row in company_features.items():
        if node in index:
            X[index[node]] = np.asarray(row, dtype=np.float64)

    mask_idx = np.array(sorted(index[m] for m in mask), dtype=np.int64)
    if mask_idx.size == 0:
        raise DataError("empty label mask: nothing to train on")
    y_arr = np.zeros(len(ids), dtype=np.int64)
    for node, cls in y.items():
        if node in index:
            y_arr[index[node]] = cls

    relations, matrices = build_relation_matrices(
        graph, ids, min_count=config.min_relation_count)
    rng = np.random.default_rng(config.seed)
    params = init_params(rng, len(embed_rows), input_dim, relations, config)
    slots = [AdamState(t.shape) for t in params.tensors()]

    history = []
    for epoch in range(config.epochs):
        X[embed_rows] = params.embeddings
        loss, grads = rgcn_loss_and_grads(
            matrices, X, y_arr, mask_idx, params, embed_rows)
        if not np.isfinite(loss):
            raise NumericError(f"non-finite loss at epoch {epoch}: loss={loss}")
        for slot, tensor, grad in zip(slots, params.tensors(), grads.tensors()):
            slot.step(tensor, grad, config)
        for tensor in params.tensors():
            if not np.isfinite(tensor).all():
                raise NumericError(f"non-finite parameters after epoch {epoch}")
        history.append(loss)

    X[embed_rows] = params.embeddings
    return RgcnModel(node_ids=ids, relations=relations, matrices=matrices,
                     features=X, embed_rows=embed_rows, params=params,
                     config=config, loss_history=history)


def predict_rgcn(model, node_ids=None):
    """Class index and probability vector per requested node."""
    _, _, probs = rgcn_forward(model.matrices, model.input_matrix(),
                               model.params)
    if node_ids is None:
        node_ids = model.node_ids
    rows = np.array([model.node_index(n) for n in node_ids], dtype=np.int64)
    picked = probs[rows]
    return np.argmax(picked, axis=1), picked
