"""SDG alignment scoring from web-derived text and a knowledge graph.

Subpackages cover ingestion of fixture-backed text sources, relevance
filtering, bag-of-words features, the three classifiers (balanced random
forest, GCN, relational GCN), cluster label smoothing, local explanations,
and evaluation. The `sdgscore` CLI orchestrates them end to end.
"""

__version__ = "0.1.0"

SUPPORTED_SDGS = (1, 2, 3, 5, 6, 7, 8, 9, 11, 12, 13, 14, 15, 16)

SCORE_MIN = -3
SCORE_MAX = 3
N_CLASSES = 7


def encode_score(score):
    """Map an alignment score in -3..3 to a class index in 0..6."""
    if not SCORE_MIN <= score <= SCORE_MAX:
        raise ValueError(f"score {score} outside [{SCORE_MIN}, {SCORE_MAX}]")
    return int(score) - SCORE_MIN


def decode_class(cls):
    """Inverse of encode_score."""
    if not 0 <= cls < N_CLASSES:
        raise ValueError(f"class index {cls} outside [0, {N_CLASSES})")
    return int(cls) + SCORE_MIN
