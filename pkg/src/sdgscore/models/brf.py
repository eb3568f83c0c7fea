"""Balanced random forest over bag-of-words rows.

Each tree trains on a class-balanced bootstrap: every class present in the
training set contributes m samples drawn with replacement, where m is the
size of the smallest present class. Trees are CART with the Gini criterion
and a random feature subset of ceil(sqrt(d)) per split. Tie-breaking is
fixed (best purity, then lowest feature column, then lowest threshold) so a
forest is a pure function of (data, config, seed). Tree seeds derive from
the master seed by tree index, so tree training can run in parallel without
changing results.
"""

import math

import numpy as np

from .. import N_CLASSES
from ..errors import DataError
from .. import kernels


class _Node:
    __slots__ = ("column", "threshold", "left", "right", "histogram")

    def __init__(self, histogram=None, column=-1, threshold=0.0, left=None, right=None):
        self.histogram = histogram
        self.column = column
        self.threshold = threshold
        self.left = left
        self.right = right

    @property
    def is_leaf(self):
        return self.left is None

    def to_dict(self):
        if self.is_leaf:
            return {"leaf": [int(c) for c in self.histogram]}
        return {
            "column": int(self.column),
            "threshold": float(self.threshold),
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, d):
        if "leaf" in d:
            return cls(histogram=np.asarray(d["leaf"], dtype=np.int64))
        return cls(
            column=d["column"],
            threshold=d["threshold"],
            left=cls.from_dict(d["left"]),
            right=cls.from_dict(d["right"]),
        )


class _Tree:
    def __init__(self, max_depth, n_classes):
        self.max_depth = max_depth
        self.n_classes = n_classes
        self.root = None

    def fit(self, X, y, rng):
        n_features = X.shape[1]
        k = math.ceil(math.sqrt(n_features))
        self.root = self._grow(X, y, np.arange(X.shape[0]), 0, k, rng)
        return self

    def _grow(self, X, y, idx, depth, k, rng):
        hist = np.bincount(y[idx], minlength=self.n_classes).astype(np.int64)
        n = idx.shape[0]
        if depth >= self.max_depth or n < 2 or hist.max() == n:
            return _Node(histogram=hist)

        features = np.sort(rng.choice(X.shape[1], size=k, replace=False))
        parent_score = float(np.sum(hist * hist)) / n
        best_score, best_col, best_thr = -np.inf, -1, 0.0
        labels = np.ascontiguousarray(y[idx], dtype=np.int64)
        for col in features:
            values = np.ascontiguousarray(X[idx, col], dtype=np.float64)
            score, thr = kernels.best_split(values, labels, self.n_classes)
            if score > best_score:
                best_score, best_col, best_thr = score, int(col), thr
        if best_score <= parent_score:
            return _Node(histogram=hist)

        go_left = X[idx, best_col] <= best_thr
        left = self._grow(X, y, idx[go_left], depth + 1, k, rng)
        right = self._grow(X, y, idx[~go_left], depth + 1, k, rng)
        return _Node(column=best_col, threshold=best_thr, left=left, right=right)

    def predict_proba(self, X):
        out = np.zeros((X.shape[0], self.n_classes))
        self._route(self.root, X, np.arange(X.shape[0]), out)
        return out

    def _route(self, node, X, idx, out):
        if idx.size == 0:
            return
        if node.is_leaf:
            out[idx] = node.histogram / node.histogram.sum()
            return
        go_left = X[idx, node.column] <= node.threshold
        self._route(node.left, X, idx[go_left], out)
        self._route(node.right, X, idx[~go_left], out)


class BalancedRandomForest:
    def __init__(self, n_trees=100, max_depth=32, seed=0, n_classes=N_CLASSES):
        if n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.seed = seed
        self.n_classes = n_classes
        self.trees = []
        self.n_features = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        if X.shape[0] == 0:
            raise DataError("empty training set")
        classes, counts = np.unique(y, return_counts=True)
        if classes.size < 2:
            raise DataError("single-class training set: no split signal")
        m = int(counts.min())
        class_indices = [np.flatnonzero(y == c) for c in classes]

        self.n_features = X.shape[1]
        self.trees = []
        for t in range(self.n_trees):
            rng = np.random.default_rng([self.seed, t])
            sample = np.concatenate(
                [rng.choice(pool, size=m, replace=True) for pool in class_indices]
            )
            picked = np.bincount(y[sample], minlength=self.n_classes)
            assert all(picked[c] == m for c in classes), "balanced bootstrap broke class parity"
            tree = _Tree(self.max_depth, self.n_classes)
            tree.fit(X[sample], y[sample], rng)
            self.trees.append(tree)
        return self

    def predict_proba(self, X):
        X = np.asarray(X, dtype=np.float64)
        if self.n_features is None:
            raise DataError("model not fitted")
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DataError(
                f"row width {X.shape[1] if X.ndim == 2 else X.shape} does not match "
                f"training feature count {self.n_features}"
            )
        proba = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            proba += tree.predict_proba(X)
        return proba / len(self.trees)

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1)

    def to_dict(self):
        return {
            "n_trees": self.n_trees,
            "max_depth": self.max_depth,
            "seed": self.seed,
            "n_classes": self.n_classes,
            "n_features": self.n_features,
            "trees": [t.root.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, d):
        model = cls(n_trees=d["n_trees"], max_depth=d["max_depth"], seed=d["seed"],
                    n_classes=d["n_classes"])
        model.n_features = d["n_features"]
        for td in d["trees"]:
            tree = _Tree(model.max_depth, model.n_classes)
            tree.root = _Node.from_dict(td)
            model.trees.append(tree)
        return model


def train_brf(matrix, labels, train_ids, n_trees=100, max_depth=32, seed=0):
    """Fit a forest on the FeatureMatrix rows of `train_ids`."""
    X = matrix.dense(train_ids)
    y = np.array([labels.values[c] for c in train_ids], dtype=np.int64)
    return BalancedRandomForest(n_trees=n_trees, max_depth=max_depth, seed=seed).fit(X, y)


def predict_brf(model, rows):
    """Class index and full probability vector per row."""
    proba = model.predict_proba(rows)
    return np.argmax(proba, axis=1), proba
