"""Self-describing JSON containers for trained models.

Every file carries the model kind, the SDG it was trained for, the training
config and seed, and the sha256 of the vocabulary it expects, so prediction
can refuse mismatched features instead of silently misaligning columns.
Floats survive the JSON round trip exactly (shortest-repr encoding).
"""

import json
from dataclasses import asdict

import numpy as np

from ..errors import DataError
from .brf import BalancedRandomForest
from .gcn import GcnConfig, GcnModel, normalized_adjacency
from .rgcn import (RgcnConfig, RgcnModel, RgcnParams,
                   build_relation_matrices)

FORMAT = "sdgscore-model-v1"


def save_model(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"format": FORMAT, **payload}, fh, sort_keys=True,
                  separators=(",", ":"))
        fh.write("\n")


def load_model(path):
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format") != FORMAT:
        raise DataError(f"{path}: not a {FORMAT} file")
    if payload.get("kind") not in {"brf", "gcn", "rgcn"}:
        raise DataError(f"{path}: unknown model kind {payload.get('kind')!r}")
    return payload


def check_vocab(payload, vocab):
    if payload["vocab_sha256"] != vocab.sha256():
        raise DataError(
            "vocabulary mismatch: model was trained on a different "
            "vocabulary than the one supplied")


def brf_payload(model, sdg, vocab):
    return {"kind": "brf", "sdg": sdg, "vocab_sha256": vocab.sha256(),
            "model": model.to_dict()}


def brf_from_payload(payload):
    return BalancedRandomForest.from_dict(payload["model"])


def gcn_payload(model, sdg, vocab):
    return {
        "kind": "gcn",
        "sdg": sdg,
        "vocab_sha256": vocab.sha256(),
        "config": asdict(model.config),
        "node_ids": list(model.node_ids),
        "W1": model.W1.tolist(),
        "W2": model.W2.tolist(),
        "final_loss": model.loss_history[-1] if model.loss_history else None,
    }


def gcn_from_payload(payload, sg, X):
    """Rebuild a usable GCN from its weights plus the stage artifacts."""
    a_hat, ids = normalized_adjacency(sg)
    if ids != payload["node_ids"]:
        raise DataError("summary graph nodes differ from the trained model's")
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] != len(ids):
        raise DataError(f"feature rows {X.shape[0]} != node count {len(ids)}")
    return GcnModel(node_ids=ids, a_hat=a_hat, features=X,
                    W1=np.array(payload["W1"]), W2=np.array(payload["W2"]),
                    config=GcnConfig(**payload["config"]))


def rgcn_payload(model, sdg, vocab):
    p = model.params
    return {
        "kind": "rgcn",
        "sdg": sdg,
        "vocab_sha256": vocab.sha256(),
        "config": asdict(model.config),
        "node_ids": list(model.node_ids),
        "relations": list(model.relations),
        "embeddings": p.embeddings.tolist(),
        "wself1": p.wself1.tolist(),
        "wrel1": [w.tolist() for w in p.wrel1],
        "wself2": p.wself2.tolist(),
        "wrel2": [w.tolist() for w in p.wrel2],
        "final_loss": model.loss_history[-1] if model.loss_history else None,
    }


def rgcn_from_payload(payload, graph, company_features):
    """Rebuild an R-GCN from its weights plus the knowledge graph."""
    config = RgcnConfig(**payload["config"])
    ids = sorted(graph.entities)
    if ids != payload["node_ids"]:
        raise DataError("knowledge graph nodes differ from the trained model's")
    relations, matrices = build_relation_matrices(
        graph, ids, min_count=config.min_relation_count)
    if relations != payload["relations"]:
        raise DataError("knowledge graph relations differ from the trained model's")

    params = RgcnParams(
        embeddings=np.array(payload["embeddings"], dtype=np.float64),
        wself1=np.array(payload["wself1"]),
        wrel1=[np.array(w) for w in payload["wrel1"]],
        wself2=np.array(payload["wself2"]),
        wrel2=[np.array(w) for w in payload["wrel2"]],
    )
    if params.embeddings.size == 0:
        params.embeddings = params.embeddings.reshape(0, params.wself1.shape[0])
    embed_rows = np.array(
        [i for i, n in enumerate(ids) if n not in company_features],
        dtype=np.int64)
    X = np.zeros((len(ids), params.wself1.shape[0]))
    index = {n: i for i, n in enumerate(ids)}
    for node, row in company_features.items():
        if node in index:
            X[index[node]] = np.asarray(row, dtype=np.float64)
    X[embed_rows] = params.embeddings
    return RgcnModel(node_ids=ids, relations=relations, matrices=matrices,
                     features=X, embed_rows=embed_rows, params=params,
                     config=config)
