"""Model persistence: exact round trips and refusal of mismatched artifacts."""

import json

import numpy as np
import pytest

from sdgscore.errors import DataError
from sdgscore.features import Vocabulary
from sdgscore.graph import Entity, KnowledgeGraph, SummaryGraph, TypedEdge
from sdgscore.models.brf import BalancedRandomForest
from sdgscore.models.gcn import GcnConfig, predict_gcn, train_gcn
from sdgscore.models.rgcn import RgcnConfig, predict_rgcn, train_rgcn
from sdgscore.models.store import (
    FORMAT,
    brf_from_payload,
    brf_payload,
    check_vocab,
    gcn_from_payload,
    gcn_payload,
    load_model,
    rgcn_from_payload,
    rgcn_payload,
    save_model,
)


def vocab(terms=("solar", "wind", "coal")):
    return Vocabulary(terms=tuple(terms), df={t: 1 for t in terms})


def small_summary_graph():
    return SummaryGraph(
        nodes=frozenset({"a", "b", "c"}),
        edges=frozenset({("a", "b"), ("b", "c")}),
    )


def small_kg():
    edges = [
        TypedEdge("c0", "industry", "hub"),
        TypedEdge("c1", "industry", "hub"),
        TypedEdge("c0", "industry", "c1"),
    ]
    ids = {"c0", "c1", "hub"}
    return KnowledgeGraph([Entity(id=i) for i in sorted(ids)], edges)


class TestEnvelope:
    def test_wrong_format_rejected(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"format": "something-else", "kind": "brf"}))
        with pytest.raises(DataError, match="not a"):
            load_model(path)

    def test_unknown_kind_rejected(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"format": FORMAT, "kind": "svm"}))
        with pytest.raises(DataError, match="unknown model kind"):
            load_model(path)

    def test_save_injects_format(self, tmp_path):
        path = tmp_path / "m.json"
        save_model(path, {"kind": "brf", "model": {}, "sdg": 7,
                          "vocab_sha256": "x"})
        assert load_model(path)["format"] == FORMAT

    def test_vocab_hash_mismatch_rejected(self):
        payload = {"vocab_sha256": vocab().sha256()}
        with pytest.raises(DataError, match="vocabulary mismatch"):
            check_vocab(payload, vocab(("different", "terms")))
        check_vocab(payload, vocab())  # matching hash passes silently


class TestBrfRoundTrip:
    def test_probabilities_survive_exactly(self, tmp_path, rng):
        X = rng.normal(size=(40, 3))
        y = rng.integers(0, 7, size=40)
        model = BalancedRandomForest(n_trees=8, max_depth=6, seed=3)
        model.fit(X, y)

        path = tmp_path / "brf.json"
        save_model(path, brf_payload(model, sdg=7, vocab=vocab()))
        payload = load_model(path)
        assert payload["kind"] == "brf"
        assert payload["sdg"] == 7
        check_vocab(payload, vocab())

        restored = brf_from_payload(payload)
        probe = rng.normal(size=(15, 3))
        assert np.array_equal(model.predict_proba(probe),
                              restored.predict_proba(probe))


class TestGcnRoundTrip:
    def test_forward_pass_survives_exactly(self, tmp_path, rng):
        sg = small_summary_graph()
        X = rng.normal(size=(3, 4))
        model = train_gcn(sg, X, {"a": 6, "c": 0}, {"a", "c"},
                          GcnConfig(epochs=25, hidden=5, seed=1))

        path = tmp_path / "gcn.json"
        save_model(path, gcn_payload(model, sdg=13, vocab=vocab()))
        payload = load_model(path)
        assert payload["node_ids"] == ["a", "b", "c"]
        assert payload["final_loss"] == model.loss_history[-1]

        restored = gcn_from_payload(payload, sg, X)
        _, want = predict_gcn(model)
        _, got = predict_gcn(restored)
        assert np.array_equal(want, got)

    def test_node_set_drift_rejected(self, tmp_path, rng):
        sg = small_summary_graph()
        X = rng.normal(size=(3, 4))
        model = train_gcn(sg, X, {"a": 6}, {"a"}, GcnConfig(epochs=5))
        path = tmp_path / "gcn.json"
        save_model(path, gcn_payload(model, sdg=13, vocab=vocab()))
        payload = load_model(path)

        other = SummaryGraph(nodes=frozenset({"a", "b", "d"}),
                             edges=frozenset({("a", "d")}))
        with pytest.raises(DataError, match="nodes differ"):
            gcn_from_payload(payload, other, rng.normal(size=(3, 4)))

    def test_feature_row_count_checked(self, tmp_path, rng):
        sg = small_summary_graph()
        X = rng.normal(size=(3, 4))
        model = train_gcn(sg, X, {"a": 6}, {"a"}, GcnConfig(epochs=5))
        path = tmp_path / "gcn.json"
        save_model(path, gcn_payload(model, sdg=13, vocab=vocab()))
        with pytest.raises(DataError, match="feature rows"):
            gcn_from_payload(load_model(path), sg, rng.normal(size=(2, 4)))


class TestRgcnRoundTrip:
    def config(self):
        return RgcnConfig(epochs=20, hidden=5, seed=2, min_relation_count=1)

    def features(self, rng):
        return {"c0": rng.normal(size=4), "c1": rng.normal(size=4)}

    def test_forward_pass_survives_exactly(self, tmp_path, rng):
        g = small_kg()
        feats = self.features(rng)
        model = train_rgcn(g, feats, {"c0": 6, "c1": 0}, {"c0", "c1"},
                           self.config())

        path = tmp_path / "rgcn.json"
        save_model(path, rgcn_payload(model, sdg=9, vocab=vocab()))
        payload = load_model(path)
        assert payload["relations"] == list(model.relations)

        restored = rgcn_from_payload(payload, g, feats)
        _, want = predict_rgcn(model)
        _, got = predict_rgcn(restored)
        assert np.array_equal(want, got)
        assert np.array_equal(model.params.embeddings,
                              restored.params.embeddings)

    def test_node_set_drift_rejected(self, tmp_path, rng):
        g = small_kg()
        feats = self.features(rng)
        model = train_rgcn(g, feats, {"c0": 6}, {"c0"}, self.config())
        path = tmp_path / "rgcn.json"
        save_model(path, rgcn_payload(model, sdg=9, vocab=vocab()))
        payload = load_model(path)

        other = KnowledgeGraph([Entity(id=i) for i in ("c0", "c1", "spoke")],
                               [TypedEdge("c0", "industry", "spoke")])
        with pytest.raises(DataError, match="nodes differ"):
            rgcn_from_payload(payload, other, feats)

    def test_relation_drift_rejected(self, tmp_path, rng):
        g = small_kg()
        feats = self.features(rng)
        model = train_rgcn(g, feats, {"c0": 6}, {"c0"}, self.config())
        path = tmp_path / "rgcn.json"
        save_model(path, rgcn_payload(model, sdg=9, vocab=vocab()))
        payload = load_model(path)

        other = KnowledgeGraph(
            [Entity(id=i) for i in ("c0", "c1", "hub")],
            [TypedEdge("c0", "supplier", "hub"),
             TypedEdge("c1", "supplier", "hub"),
             TypedEdge("c0", "supplier", "c1")])
        with pytest.raises(DataError, match="relations differ"):
            rgcn_from_payload(payload, other, feats)
