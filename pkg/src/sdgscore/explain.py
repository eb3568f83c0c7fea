"""Per-prediction explanations: term attributions and edge-mask subgraphs.

Term attributions fit a ridge-weighted linear surrogate to the classifier's
predicted-class probability under random term dropout, so a weight says how
much keeping that term moves the probability. Edge explanations learn a
sigmoid mask over the normalized adjacency entries inside the focal node's
two-layer computation subgraph and keep the edges the mask retains.
"""

import json
from dataclasses import dataclass
from importlib import resources

import numpy as np

from . import N_CLASSES, decode_class
from .errors import DataError, NumericError
from .models.gcn import gcn_forward, normalized_adjacency, softmax_rows

LIME_KERNEL_WIDTH = 0.25
LIME_KEEP_PROB = 0.5
RIDGE_LAMBDA = 1e-3
MASK_REPORT_THRESHOLD = 0.5
MASK_LEARNING_RATE = 0.1


@dataclass
class TermAttribution:
    company_id: str
    sdg: int
    predicted_class: int
    probabilities: np.ndarray
    weighted_terms: list  # (term, weight), |weight| descending
    r2: float

    def weight_of(self, term):
        for t, w in self.weighted_terms:
            if t == term:
                return w
        return 0.0


@dataclass
class EdgeExplanation:
    company_id: str
    sdg: int
    predicted_class: int
    edges: list  # ((u, v), mask weight), weight descending
    fidelity: float


def _as_sparse_row(x):
    if isinstance(x, dict):
        return dict(x)
    arr = np.asarray(x)
    return {int(c): float(arr[c]) for c in np.nonzero(arr)[0]}


def lime_explain(predict_fn, x, vocab, n_samples=1000, m=10, seed=0,
                 company_id="", sdg=0):
    """Linear surrogate attribution for one feature row.

    Keeps each nonzero term with probability 0.5 per sample, weights samples
    by closeness to the unperturbed row, then solves a ridge-regularized
    weighted least squares for the predicted class probability. Terms not
    present in the row are never perturbed and carry weight exactly 0.
    """
    if n_samples < 10:
        raise DataError(f"n_samples {n_samples} must be >= 10")
    row = _as_sparse_row(x)
    cols = sorted(row)
    if not cols:
        raise DataError("feature row has no nonzero terms to explain")
    k = len(cols)

    rng = np.random.default_rng(seed)
    masks = (rng.random((n_samples, k)) < LIME_KEEP_PROB).astype(np.float64)
    for i in range(n_samples):
        while not masks[i].any():
            masks[i] = (rng.random(k) < LIME_KEEP_PROB).astype(np.float64)

    width = len(vocab)
    X = np.zeros((n_samples, width))
    base = np.array([row[c] for c in cols], dtype=np.float64)
    X[:, cols] = masks * base

    full = np.asarray(predict_fn(_dense_row(row, width)),
                      dtype=np.float64).reshape(-1)
    if full.size != N_CLASSES:
        raise DataError(f"predict_fn returned {full.size} probabilities, "
                        f"expected {N_CLASSES}")
    probs = np.asarray(predict_fn(X), dtype=np.float64)
    if probs.shape != (n_samples, N_CLASSES):
        raise DataError(
            f"predict_fn returned shape {probs.shape}, "
            f"expected {(n_samples, N_CLASSES)}")
    cls = int(np.argmax(full))
    target = probs[:, cls]

    cosine = np.sqrt(masks.sum(axis=1) / k)
    weights = np.exp(-((1.0 - cosine) ** 2) / LIME_KERNEL_WIDTH)

    design = np.hstack([np.ones((n_samples, 1)), masks])
    wd = design * weights[:, None]
    gram = design.T @ wd
    gram[1:, 1:] += RIDGE_LAMBDA * np.eye(k)
    coefs = np.linalg.solve(gram, wd.T @ target)
    if not np.isfinite(coefs).all():
        raise NumericError("surrogate coefficients are not finite")

    fitted = design @ coefs
    total = float(np.sum(weights * (target - np.average(target, weights=weights)) ** 2))
    resid = float(np.sum(weights * (target - fitted) ** 2))
    r2 = 1.0 - resid / total if total > 0 else 1.0

    ranked = sorted(zip(cols, coefs[1:]), key=lambda t: (-abs(t[1]), t[0]))[:m]
    terms = [(vocab.terms[c], float(w)) for c, w in ranked]
    return TermAttribution(company_id=company_id, sdg=sdg, predicted_class=cls,
                           probabilities=full, weighted_terms=terms, r2=r2)


def _dense_row(row, width):
    x = np.zeros((1, width))
    for c, v in row.items():
        x[0, c] = v
    return x


def _computation_subgraph(sg, node):
    """Nodes within two hops plus the edges a two-layer forward can use.

    Edges joining two distance-2 nodes never influence the focal output, so
    they are excluded from the maskable set.
    """
    one_hop = set(sg.neighbors_of(node))
    inner = one_hop | {node}
    nodes = set(inner)
    for n in sorted(one_hop):
        nodes.update(sg.neighbors_of(n))
    edges = [e for e in sg.edges
             if e[0] in nodes and e[1] in nodes and (e[0] in inner or e[1] in inner)]
    return sorted(nodes), sorted(edges)


def _masked_forward(a_hat, X, W1, W2, entries, sigmas):
    masked = a_hat.copy()
    for (i, j), s in zip(entries, sigmas):
        masked[i, j] = a_hat[i, j] * s
        masked[j, i] = a_hat[j, i] * s
    h1 = masked @ X @ W1
    a1 = np.maximum(h1, 0.0)
    probs = softmax_rows(masked @ a1 @ W2)
    return masked, h1, a1, probs


def gnn_explain(model, sg, node, steps=200, sparsity=0.05, seed=0, sdg=0):
    """Edge-mask explanation of one node's GCN prediction.

    Maximizes log-probability of the model's predicted class minus a
    sparsity penalty over sigmoid edge masks, then reports edges whose mask
    stays at or above 0.5 (all maskable edges when none do). Fidelity is the
    predicted-class probability when only the reported edges remain.
    """
    focal = model.node_index(node)
    _, _, full_probs = gcn_forward(model.a_hat, model.features, model.W1,
                                   model.W2)
    cls = int(np.argmax(full_probs[focal]))

    nodes, edges = _computation_subgraph(sg, node)
    sub = _SubView(nodes, edges)
    a_hat, ids = normalized_adjacency(sub)
    index = {n: i for i, n in enumerate(ids)}
    r = index[node]
    X = model.features[[model.node_index(n) for n in ids]]
    W1, W2 = model.W1, model.W2

    if not edges:
        _, _, _, probs = _masked_forward(a_hat, X, W1, W2, [], [])
        return EdgeExplanation(company_id=node, sdg=sdg, predicted_class=cls,
                               edges=[], fidelity=float(probs[r, cls]))

    entries = [(index[u], index[v]) for u, v in edges]
    rng = np.random.default_rng(seed)
    logits = rng.normal(0.0, 0.1, size=len(edges))
    adam_m = np.zeros_like(logits)
    adam_v = np.zeros_like(logits)

    xw1 = X @ W1
    for t in range(1, steps + 1):
        sigmas = 1.0 / (1.0 + np.exp(-logits))
        masked, h1, a1, probs = _masked_forward(a_hat, X, W1, W2, entries, sigmas)

        g2 = np.zeros_like(probs)
        g2[r] = -probs[r]
        g2[r, cls] += 1.0
        d_masked = g2 @ (a1 @ W2).T
        d_a1 = masked.T @ (g2 @ W2.T)
        g1 = d_a1 * (h1 > 0.0)
        d_masked += g1 @ xw1.T

        grad = np.array([
            d_masked[i, j] * a_hat[i, j] + d_masked[j, i] * a_hat[j, i]
            for i, j in entries])
        grad = (grad - sparsity) * sigmas * (1.0 - sigmas)
        if not np.isfinite(grad).all():
            raise NumericError(f"non-finite mask gradient at step {t}")

        adam_m = 0.9 * adam_m + 0.1 * grad
        adam_v = 0.999 * adam_v + 0.001 * grad * grad
        m_hat = adam_m / (1.0 - 0.9 ** t)
        v_hat = adam_v / (1.0 - 0.999 ** t)
        logits += MASK_LEARNING_RATE * m_hat / (np.sqrt(v_hat) + 1e-8)

    sigmas = 1.0 / (1.0 + np.exp(-logits))
    keep = [i for i, s in enumerate(sigmas) if s >= MASK_REPORT_THRESHOLD]
    if not keep:
        keep = list(range(len(edges)))
    reported = sorted(((edges[i], float(sigmas[i])) for i in keep),
                      key=lambda t: (-t[1], t[0]))

    hard = np.zeros(len(edges))
    for i in keep:
        hard[i] = 1.0
    _, _, _, probs = _masked_forward(a_hat, X, W1, W2, entries, hard)
    return EdgeExplanation(company_id=node, sdg=sdg, predicted_class=cls,
                           edges=reported, fidelity=float(probs[r, cls]))


class _SubView:
    """Minimal stand-in exposing the summary-graph surface the GCN needs."""

    def __init__(self, nodes, edges):
        self.nodes = tuple(nodes)
        self.edges = tuple(edges)


def load_report_schema():
    ref = resources.files("sdgscore").joinpath("data/report.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def render_report(attributions, edge_explanations, evidence=None):
    """Merge explanations into one report document.

    Returns (report dict, markdown text). `evidence` maps (company, sdg) to
    the filtered sentences backing the terms.
    """
    evidence = evidence or {}
    merged = {}
    for att in attributions:
        merged.setdefault((att.company_id, att.sdg), {})["terms"] = att
    for ee in edge_explanations:
        merged.setdefault((ee.company_id, ee.sdg), {})["edges"] = ee

    entries = []
    lines = []
    for (company, sdg), parts in sorted(merged.items()):
        att = parts.get("terms")
        ee = parts.get("edges")
        cls = att.predicted_class if att else ee.predicted_class
        probs = att.probabilities if att is not None else None
        sentences = list(evidence.get((company, sdg), []))

        entry = {
            "company_id": company,
            "sdg": sdg,
            "predicted_class": cls,
            "predicted_score": decode_class(cls),
            "probabilities": (
                [{"score": decode_class(c), "probability": float(p)}
                 for c, p in enumerate(probs)] if probs is not None else []),
            "terms": ([{"term": t, "weight": w} for t, w in att.weighted_terms]
                      if att else []),
            "edges": ([{"source": u, "target": v, "weight": w}
                       for (u, v), w in ee.edges] if ee else []),
            "fidelity": ee.fidelity if ee else None,
            "evidence": sentences,
        }
        entries.append(entry)

        lines.append(f"## {company} / SDG {sdg}")
        lines.append(f"Predicted score: {decode_class(cls)}")
        if probs is not None:
            bars = "  ".join(
                f"{decode_class(c)}:{p:.2f}" for c, p in enumerate(probs))
            lines.append(f"Probabilities: {bars}")
        if not entry["terms"] and not entry["edges"]:
            lines.append("no explanation available")
        if entry["terms"]:
            lines.append("Top terms:")
            for item in entry["terms"]:
                lines.append(f"- {item['term']}: {item['weight']:+.4f}")
        if entry["edges"]:
            lines.append("Influential connections:")
            for item in entry["edges"]:
                lines.append(
                    f"- {item['source']} -- {item['target']}"
                    f" (mask {item['weight']:.3f})")
            lines.append(f"Fidelity: {ee.fidelity:.4f}")
        if sentences:
            lines.append("Evidence:")
            for s in sentences:
                lines.append(f"> {s}")
        lines.append("")

    report = {"entries": entries}
    return report, "\n".join(lines)
