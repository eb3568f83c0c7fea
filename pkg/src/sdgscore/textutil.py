"""Shared text primitives: tokenization, stopwords, content tokens.

Every module that counts words (vocabulary building, TF-IDF scoring,
headline dedup, the lexical entailment gate) goes through `tokenize` so the
token definition cannot drift between them.
"""

import re

_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Small function-word list; enough to keep the lexical gate and scorer from
# matching on glue words. Not a linguistic resource.
STOPWORDS = frozenset(
    """a an and are as at be by for from has have in is it its of on or that
    the this to was were will with we our their they i you he she them us
    than then there here do does did been being such also more most other
    any all each which who whom these those not no""".split()
)

NEGATION_CUES = frozenset(
    {"not", "no", "never", "none", "without", "fails", "failed", "lacks",
     "lacking", "denies", "denied", "refuses", "refused", "worsens",
     "worsened", "harms", "harmed", "opposes", "opposed"}
)


def tokenize(text):
    """Lowercased alphanumeric tokens, in order of appearance."""
    return _TOKEN_RE.findall(text.lower())


def content_tokens(text):
    """Token set with stopwords removed (negation cues are kept)."""
    return {t for t in tokenize(text) if t not in STOPWORDS or t in NEGATION_CUES}
