"""Two-layer graph convolutional network over the company summary graph.

Forward pass: softmax(A_hat . relu(A_hat X W1) . W2) with the symmetric
normalization A_hat = D^-1/2 (A + I) D^-1/2. Training is full batch with a
masked cross-entropy loss and Adam. Everything is float64 and hand-written
backprop, so gradients can be checked against finite differences and runs
are bit-reproducible for a given seed.
"""

from dataclasses import dataclass, field

import numpy as np

from .. import N_CLASSES
from ..errors import DataError, DataMissingError, NumericError


@dataclass(frozen=True)
class GcnConfig:
    hidden: int = 16
    epochs: int = 5000
    lr: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0


@dataclass
class GcnModel:
    node_ids: list
    a_hat: np.ndarray
    features: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    config: GcnConfig
    loss_history: list = field(default_factory=list)

    def node_index(self, node_id):
        try:
            return self._index[node_id]
        except AttributeError:
            self._index = {n: i for i, n in enumerate(self.node_ids)}
            return self.node_index(node_id)
        except KeyError:
            raise DataMissingError(f"unknown node id {node_id!r}") from None


def normalized_adjacency(sg, node_ids=None):
    """Symmetric D^-1/2 (A + I) D^-1/2 over the summary graph."""
    ids = list(node_ids) if node_ids is not None else sorted(sg.nodes)
    index = {n: i for i, n in enumerate(ids)}
    n = len(ids)
    a = np.eye(n)
    for u, v in sg.edges:
        a[index[u], index[v]] = 1.0
        a[index[v], index[u]] = 1.0
    d_inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    return a * d_inv_sqrt[:, None] * d_inv_sqrt[None, :], ids


def mean_adjacency(sg, node_ids=None):
    """Row-normalized D^-1 A without self-loops (zero rows for isolated nodes)."""
    ids = list(node_ids) if node_ids is not None else sorted(sg.nodes)
    index = {n: i for i, n in enumerate(ids)}
    n = len(ids)
    a = np.zeros((n, n))
    for u, v in sg.edges:
        a[index[u], index[v]] = 1.0
        a[index[v], index[u]] = 1.0
    deg = a.sum(axis=1)
    deg[deg == 0.0] = 1.0
    return a / deg[:, None], ids


def softmax_rows(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def gcn_forward(a_hat, X, W1, W2):
    """Returns (pre-activation H1, hidden A1, probabilities)."""
    h1 = a_hat @ X @ W1
    a1 = np.maximum(h1, 0.0)
    logits = a_hat @ a1 @ W2
    return h1, a1, softmax_rows(logits)


def masked_cross_entropy(probs, y, mask_idx):
    picked = probs[mask_idx, y[mask_idx]]
    return -float(np.mean(np.log(picked)))


def gcn_loss_and_grads(a_hat, X, y, mask_idx, W1, W2):
    """Analytic gradients of the masked cross-entropy w.r.t. W1 and W2."""
    h1, a1, probs = gcn_forward(a_hat, X, W1, W2)
    loss = masked_cross_entropy(probs, y, mask_idx)

    n = X.shape[0]
    d_logits = np.zeros_like(probs)
    d_logits[mask_idx] = probs[mask_idx]
    d_logits[mask_idx, y[mask_idx]] -= 1.0
    d_logits /= len(mask_idx)

    at_d = a_hat.T @ d_logits
    dW2 = a1.T @ at_d
    d_a1 = at_d @ W2.T
    d_h1 = d_a1 * (h1 > 0.0)
    dW1 = X.T @ (a_hat.T @ d_h1)
    return loss, dW1, dW2


def glorot(rng, fan_in, fan_out):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class AdamState:
    """One optimizer slot per parameter tensor."""

    def __init__(self, shape):
        self.m = np.zeros(shape)
        self.v = np.zeros(shape)
        self.t = 0

    def step(self, param, grad, cfg):
        self.t += 1
        self.m = cfg.beta1 * self.m + (1.0 - cfg.beta1) * grad
        self.v = cfg.beta2 * self.v + (1.0 - cfg.beta2) * grad * grad
        m_hat = self.m / (1.0 - cfg.beta1 ** self.t)
        v_hat = self.v / (1.0 - cfg.beta2 ** self.t)
        param -= cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.eps)


def train_gcn(sg, X, y, mask, config=None):
    """Train on the summary graph; X rows follow sorted(sg.nodes).

    `y` maps node id to class index for labeled nodes; `mask` is the set of
    node ids the loss sees.
    """
    config = config or GcnConfig()
    a_hat, ids = normalized_adjacency(sg)
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != len(ids):
        raise DataError(f"feature rows {X.shape[0]} != node count {len(ids)}")
    index = {n: i for i, n in enumerate(ids)}
    mask_idx = np.array(sorted(index[m] for m in mask), dtype=np.int64)
    if mask_idx.size == 0:
        raise DataError("empty label mask: nothing to train on")
    y_arr = np.zeros(len(ids), dtype=np.int64)
    for node, cls in y.items():
        y_arr[index[node]] = cls

    rng = np.random.default_rng(config.seed)
    W1 = glorot(rng, X.shape[1], config.hidden)
    W2 = glorot(rng, config.hidden, N_CLASSES)
    adam1, adam2 = AdamState(W1.shape), AdamState(W2.shape)

    history = []
    for epoch in range(config.epochs):
        loss, dW1, dW2 = gcn_loss_and_grads(a_hat, X, y_arr, mask_idx, W1, W2)
        if not np.isfinite(loss):
            raise NumericError(
                f"non-finite loss at epoch {epoch}: loss={loss}, "
                f"|W1|max={np.abs(W1).max()}, |W2|max={np.abs(W2).max()}"
            )
        adam1.step(W1, dW1, config)
        adam2.step(W2, dW2, config)
        if not (np.isfinite(W1).all() and np.isfinite(W2).all()):
            raise NumericError(f"non-finite parameters after epoch {epoch}")
        history.append(loss)

    return GcnModel(node_ids=ids, a_hat=a_hat, features=X, W1=W1, W2=W2,
                    config=config, loss_history=history)


def predict_gcn(model, node_ids=None):
    """Class index and probability vector per requested node."""
    _, _, probs = gcn_forward(model.a_hat, model.features, model.W1, model.W2)
    if node_ids is None:
        node_ids = model.node_ids
    rows = np.array([model.node_index(n) for n in node_ids], dtype=np.int64)
    picked = probs[rows]
    return np.argmax(picked, axis=1), picked
