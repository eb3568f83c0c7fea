"""Bag-of-words features per company, label encoding, and stratified splits.

Classifier features are raw token counts (the relevance module owns TF-IDF
weighting for ranking). One feature row per company concatenates every
evidence sentence that survived filtering plus the full encyclopedia
description; provenance stays in the evidence records for explanations.
"""

import json
import logging
from dataclasses import dataclass, field

import numpy as np

from . import N_CLASSES, encode_score
from .errors import DataError
from .textutil import tokenize

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple  # ordered unique tokens
    df: dict  # term -> document frequency
    index: dict = field(default_factory=dict)  # term -> column

    def __post_init__(self):
        if not self.index:
            object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def sha256(self):
        import hashlib

        h = hashlib.sha256()
        for t in self.terms:
            h.update(t.encode("utf-8"))
            h.update(b"\n")
        return h.hexdigest()


@dataclass
class FeatureMatrix:
    vocab: Vocabulary
    rows: dict  # company id -> {column: count}
    row_order: list  # company ids in row order

    def dense(self, company_ids=None):
        ids = list(company_ids) if company_ids is not None else self.row_order
        X = np.zeros((len(ids), len(self.vocab)), dtype=np.float64)
        for i, cid in enumerate(ids):
            for col, cnt in self.rows[cid].items():
                X[i, col] = cnt
        return X


@dataclass
class LabelVector:
    sdg: int
    values: dict  # company id -> class index 0..6
    mask: set  # labeled companies

    def __post_init__(self):
        if set(self.values) != set(self.mask):
            raise DataError(f"SDG {self.sdg}: label values must be defined exactly on the mask")
        for cid, cls in self.values.items():
            if not 0 <= cls < N_CLASSES:
                raise DataError(f"SDG {self.sdg}: class {cls} for {cid!r} out of range")

    @classmethod
    def from_scores(cls, sdg, scores):
        """scores: company id -> alignment score in -3..3."""
        return cls(sdg=sdg, values={c: encode_score(s) for c, s in scores.items()},
                   mask=set(scores))


def build_vocabulary(docs, min_df=2, max_size=50000):
    """Deterministic vocabulary over lowercased alphanumeric tokens.

    Terms below `min_df` documents are dropped; above `max_size` the
    highest-df terms win, lexicographic order breaking ties. Final ordering
    is (-df, term).
    """
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    df = {}
    for doc in docs:
        text = doc.text if hasattr(doc, "text") else doc
        for t in set(tokenize(text)):
            df[t] = df.get(t, 0) + 1
    kept = sorted(
        (t for t, d in df.items() if d >= min_df),
        key=lambda t: (-df[t], t),
    )[:max_size]
    return Vocabulary(terms=tuple(kept), df={t: df[t] for t in kept})


def featurize(vocab, texts):
    """Sparse token-count row over the vocabulary; OOV tokens are ignored."""
    row = {}
    for text in texts:
        for t in tokenize(text):
            col = vocab.index.get(t)
            if col is not None:
                row[col] = row.get(col, 0) + 1
    return row


def _round_half_up(x):
    return int(np.floor(x + 0.5))


def stratified_split(labels, test_fraction, seed):
    """Per-class proportional split of the labeled companies.

    Classes with >= 2 members contribute at least one company to each side;
    single-member classes go to train with a warning. Deterministic per seed.
    Returns (train_ids, test_ids) as sorted lists.
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    by_class = {}
    for cid in sorted(labels.mask):
        by_class.setdefault(labels.values[cid], []).append(cid)

    train, test = [], []
    for cls in sorted(by_class):
        members = by_class[cls]
        if len(members) == 1:
            log.warning("SDG %s: class %s has a single member %r; kept in train",
                        labels.sdg, cls, members[0])
            train.extend(members)
            continue
        n_test = _round_half_up(len(members) * test_fraction)
        n_test = max(1, min(n_test, len(members) - 1))
        perm = rng.permutation(len(members))
        test.extend(members[i] for i in perm[:n_test])
        train.extend(members[i] for i in perm[n_test:])
    return sorted(train), sorted(test)


def write_vocabulary(vocab, path):
    """One `term<TAB>df` line per term, in column order."""
    with open(path, "w", encoding="utf-8") as fh:
        for t in vocab.terms:
            fh.write(f"{t}\t{vocab.df[t]}\n")


def load_vocabulary(path):
    terms, df = [], {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise DataError(f"{path}:{lineno}: expected term<TAB>df")
            terms.append(parts[0])
            df[parts[0]] = int(parts[1])
    return Vocabulary(terms=tuple(terms), df=df)


def write_feature_rows(matrix, path):
    """JSONL rows: {"company_id": ..., "counts": {column: count}}."""
    with open(path, "w", encoding="utf-8") as fh:
        for cid in matrix.row_order:
            counts = {str(col): matrix.rows[cid][col] for col in sorted(matrix.rows[cid])}
            fh.write(json.dumps({"company_id": cid, "counts": counts}, sort_keys=True) + "\n")


def load_feature_rows(vocab, path):
    rows, order = {}, []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            cid = rec["company_id"]
            row = {}
            for col, cnt in rec["counts"].items():
                col = int(col)
                if col >= len(vocab):
                    raise DataError(f"{path}:{lineno}: column {col} outside vocabulary")
                row[col] = int(cnt)
            rows[cid] = row
            order.append(cid)
    return FeatureMatrix(vocab=vocab, rows=rows, row_order=order)
