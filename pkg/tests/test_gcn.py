"""Graph convolutional classifier: hand-computed forwards, gradient oracle, planted graphs."""

import math

import numpy as np
import pytest

from sdgscore.errors import DataError, DataMissingError, NumericError
from sdgscore.graph import SummaryGraph
from sdgscore.models.gcn import (
    GcnConfig,
    gcn_forward,
    gcn_loss_and_grads,
    masked_cross_entropy,
    normalized_adjacency,
    predict_gcn,
    softmax_rows,
    train_gcn,
)

from conftest import labeled_subset, two_block_graph


def pair_graph():
    return SummaryGraph(nodes=frozenset({"a", "b"}), edges=frozenset({("a", "b")}))


class TestNormalizedAdjacency:
    def test_single_node_is_identity(self):
        sg = SummaryGraph(nodes=frozenset({"only"}))
        a_hat, ids = normalized_adjacency(sg)
        assert ids == ["only"]
        assert a_hat.tolist() == [[1.0]]

    def test_connected_pair(self):
        # A + I is all-ones, both degrees 2, so every entry is 1/2.
        a_hat, ids = normalized_adjacency(pair_graph())
        assert ids == ["a", "b"]
        assert np.allclose(a_hat, 0.5)

    def test_three_node_path_entries(self):
        sg = SummaryGraph(
            nodes=frozenset({"a", "b", "c"}),
            edges=frozenset({("a", "b"), ("b", "c")}),
        )
        a_hat, ids = normalized_adjacency(sg)
        assert ids == ["a", "b", "c"]
        # Degrees with self-loops: 2, 3, 2.
        assert a_hat[0, 0] == pytest.approx(1 / 2)
        assert a_hat[1, 1] == pytest.approx(1 / 3)
        assert a_hat[0, 1] == pytest.approx(1 / math.sqrt(6))
        assert a_hat[0, 2] == 0.0
        assert np.allclose(a_hat, a_hat.T)


class TestForward:
    def test_single_node_reduces_to_plain_mlp(self, rng):
        x = rng.normal(size=(1, 5))
        W1 = rng.normal(size=(5, 4))
        W2 = rng.normal(size=(4, 7))
        _, _, probs = gcn_forward(np.eye(1), x, W1, W2)
        manual = softmax_rows(np.maximum(x @ W1, 0.0) @ W2)
        assert np.allclose(probs, manual, atol=1e-15)

    def test_hand_computed_two_node_forward(self):
        # a_hat is the all-halves matrix; with identity features and the
        # weights below, both rows get logits (1, 0, ..., 0), so the
        # predicted-class probability is e / (e + 6).
        a_hat, _ = normalized_adjacency(pair_graph())
        X = np.eye(2)
        W1 = np.array([[1.0, -1.0], [1.0, 1.0]])
        W2 = np.zeros((2, 7))
        W2[0, 0] = 1.0
        W2[1, 1] = 1.0
        _, _, probs = gcn_forward(a_hat, X, W1, W2)
        want = math.e / (math.e + 6.0)
        assert probs[0, 0] == pytest.approx(want, abs=1e-12)
        assert probs[1, 0] == pytest.approx(want, abs=1e-12)
        assert probs[0, 1] == pytest.approx(1.0 / (math.e + 6.0), abs=1e-12)

    def test_softmax_rows_are_distributions(self, rng):
        z = rng.normal(size=(6, 7)) * 10
        p = softmax_rows(z)
        assert np.allclose(p.sum(axis=1), 1.0, atol=1e-9)
        assert (p >= 0).all()

    def test_argmax_invariant_under_row_shift(self, rng):
        z = rng.normal(size=(6, 7))
        shifted = z + rng.normal(size=(6, 1))
        assert (softmax_rows(z).argmax(axis=1) == softmax_rows(shifted).argmax(axis=1)).all()


def finite_difference_grads(a_hat, X, y, mask_idx, W1, W2, h=1e-5):
    def loss_at(W1v, W2v):
        _, _, probs = gcn_forward(a_hat, X, W1v, W2v)
        return masked_cross_entropy(probs, y, mask_idx)

    fd1 = np.zeros_like(W1)
    for i in range(W1.shape[0]):
        for j in range(W1.shape[1]):
            up, down = W1.copy(), W1.copy()
            up[i, j] += h
            down[i, j] -= h
            fd1[i, j] = (loss_at(up, W2) - loss_at(down, W2)) / (2 * h)
    fd2 = np.zeros_like(W2)
    for i in range(W2.shape[0]):
        for j in range(W2.shape[1]):
            up, down = W2.copy(), W2.copy()
            up[i, j] += h
            down[i, j] -= h
            fd2[i, j] = (loss_at(W1, up) - loss_at(W1, down)) / (2 * h)
    return fd1, fd2


def max_relative_error(analytic, numeric):
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-6)
    return float((np.abs(analytic - numeric) / denom).max())


class TestGradients:
    def test_analytic_matches_central_differences(self):
        for seed in range(3):
            rng = np.random.default_rng(seed)
            n, d, hidden = 5, 3, 4
            ids = [f"n{i}" for i in range(n)]
            pairs = {("n0", "n1"), ("n1", "n2"), ("n2", "n3"), ("n0", "n4")}
            sg = SummaryGraph(nodes=frozenset(ids), edges=frozenset(pairs))
            a_hat, _ = normalized_adjacency(sg)
            X = rng.normal(size=(n, d))
            y = rng.integers(0, 7, size=n)
            mask_idx = np.array([0, 2, 4])
            W1 = rng.normal(size=(d, hidden)) * 0.5
            W2 = rng.normal(size=(hidden, 7)) * 0.5
            _, dW1, dW2 = gcn_loss_and_grads(a_hat, X, y, mask_idx, W1, W2)
            fd1, fd2 = finite_difference_grads(a_hat, X, y, mask_idx, W1, W2)
            assert max_relative_error(dW1, fd1) <= 1e-4
            assert max_relative_error(dW2, fd2) <= 1e-4


class TestTraining:
    def fit_two_block(self, epochs=1500):
        sg, ids, block, X = two_block_graph(seed=13)
        rng = np.random.default_rng(99)
        labeled = labeled_subset(rng, ids, fraction=0.3)
        classes = {0: 2, 1: 5}
        y = {i: classes[block[ids.index(i)]] for i in labeled}
        config = GcnConfig(epochs=epochs, seed=0)
        model = train_gcn(sg, X, y, set(labeled), config)
        return model, ids, block, set(labeled), classes

    def test_two_block_held_out_accuracy(self):
        model, ids, block, labeled, classes = self.fit_two_block()
        held_out = [i for i in ids if i not in labeled]
        pred, _ = predict_gcn(model, held_out)
        want = np.array([classes[block[ids.index(i)]] for i in held_out])
        accuracy = float((pred == want).mean())
        assert accuracy >= 0.9

    def test_loss_decreases_over_ten_epoch_windows(self):
        model, *_ = self.fit_two_block(epochs=400)
        loss = model.loss_history
        windows = [loss[i + 10] <= loss[i] for i in range(len(loss) - 10)]
        assert sum(windows) / len(windows) >= 0.95
        assert all(np.isfinite(loss))

    def test_same_seed_reproduces_parameters(self):
        a, *_ = self.fit_two_block(epochs=50)
        b, *_ = self.fit_two_block(epochs=50)
        assert (a.W1 == b.W1).all()
        assert (a.W2 == b.W2).all()

    def test_empty_mask_rejected(self):
        sg = pair_graph()
        with pytest.raises(DataError, match="mask"):
            train_gcn(sg, np.eye(2), {}, set(), GcnConfig(epochs=1))

    def test_feature_row_count_must_match_nodes(self):
        sg = pair_graph()
        with pytest.raises(DataError):
            train_gcn(sg, np.eye(3), {"a": 1}, {"a"}, GcnConfig(epochs=1))

    def test_numeric_blowup_aborts_with_diagnostics(self):
        sg = pair_graph()
        X = np.full((2, 2), 1e308)
        with np.errstate(all="ignore"):
            with pytest.raises(NumericError):
                train_gcn(sg, X, {"a": 1}, {"a"}, GcnConfig(epochs=3))


class TestPrediction:
    def test_rows_are_probability_simplex(self):
        sg, ids, block, X = two_block_graph(seed=21)
        y = {ids[0]: 1, ids[-1]: 4}
        model = train_gcn(sg, X, y, {ids[0], ids[-1]}, GcnConfig(epochs=20))
        _, probs = predict_gcn(model)
        assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-9)
        assert (probs >= 0).all()

    def test_unknown_node_rejected(self):
        sg = pair_graph()
        model = train_gcn(sg, np.eye(2), {"a": 0, "b": 1}, {"a", "b"}, GcnConfig(epochs=5))
        with pytest.raises(DataMissingError):
            predict_gcn(model, ["nope"])

    def test_subset_prediction_matches_full(self):
        sg, ids, block, X = two_block_graph(seed=5)
        y = {ids[0]: 0, ids[1]: 3}
        model = train_gcn(sg, X, y, {ids[0], ids[1]}, GcnConfig(epochs=10))
        full_cls, full_probs = predict_gcn(model)
        sub_cls, sub_probs = predict_gcn(model, [ids[7], ids[3]])
        assert sub_cls[0] == full_cls[7]
        assert (sub_probs[1] == full_probs[3]).all()
