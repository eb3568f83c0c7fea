"""Reduce raw documents to SDG-relevant evidence.

Stages: sentence segmentation, similarity ranking of sentences against a
per-SDG keyword query, an entailment gate that keeps only sentences
supporting the goal statement, plus news significance scoring and headline
deduplication.

The similarity scorer and the entailment gate are pluggable. The defaults
are deterministic lexical methods (TF-IDF cosine, content-token overlap) so
the whole pipeline runs offline; embedding- or NLI-model backends can be
swapped in behind the same two-method interfaces. All operations are pure
functions of their inputs and safe to run in parallel across
(company, SDG) pairs.
"""

import math
import re
from dataclasses import dataclass
from importlib import resources

from .errors import DataError
from .textutil import NEGATION_CUES, content_tokens, tokenize

ENTAILED = "entailed"
NEUTRAL = "neutral"
CONTRADICTED = "contradicted"

# Corporate text is abbreviation-heavy; a period after any of these never
# ends a sentence.
ABBREVIATIONS = frozenset(
    {"inc", "ltd", "corp", "co", "plc", "sa", "ag", "llc", "approx", "no",
     "nos", "vs", "etc", "eg", "ie", "est", "dept", "dr", "mr", "mrs", "ms",
     "jr", "sr", "st", "mt", "fig", "al", "cf"}
)


@dataclass(frozen=True)
class SdgQuery:
    sdg: int
    query_text: str  # concatenated keywords
    description: str  # goal statement, used by the entailment gate

    def __post_init__(self):
        if not self.query_text.strip():
            raise DataError(f"SDG {self.sdg}: empty keyword query")


@dataclass(frozen=True)
class ScoredSentence:
    sentence: str
    score: float
    doc_ref: object = None

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise DataError(f"non-finite score for sentence {self.sentence!r}")


@dataclass(frozen=True)
class EntailmentVerdict:
    label: str
    confidence: float

    def __post_init__(self):
        if self.label not in (ENTAILED, NEUTRAL, CONTRADICTED):
            raise DataError(f"unknown entailment label {self.label!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise DataError(f"confidence {self.confidence} outside [0, 1]")


class ScorerError(DataError):
    """Raised when a scorer cannot produce a usable score; carries the sentence index."""


_SPLIT_RE = re.compile(r"[.!?](?=\s)")
_LAST_WORD_RE = re.compile(r"([A-Za-z0-9]+)$")


def split_sentences(text):
    """Split at ., ! or ? followed by whitespace, guarding known abbreviations.

    Joining the outputs with single spaces preserves every non-whitespace
    character of the input.
    """
    if not text or not text.strip():
        return []
    cuts = []
    for m in _SPLIT_RE.finditer(text):
        if text[m.start()] == ".":
            word = _LAST_WORD_RE.search(text[:m.start()])
            if word and word.group(1).lower() in ABBREVIATIONS:
                continue
        cuts.append(m.end())
    sentences = []
    start = 0
    for cut in cuts + [len(text)]:
        piece = text[start:cut].strip()
        if piece:
            sentences.append(piece)
        start = cut
    return sentences


class TfidfScorer:
    """TF-IDF cosine between the keyword query and each sentence.

    Document frequencies come from the sentence list itself (one sentence =
    one document), so scoring is a pure function of (query, sentences).
    tf is the raw count and idf(t) = 1 + ln(N / df(t)).
    """

    def scores(self, query, sentences):
        n = len(sentences)
        if n == 0:
            return []
        sent_tokens = [tokenize(s) for s in sentences]
        df = {}
        for toks in sent_tokens:
            for t in set(toks):
                df[t] = df.get(t, 0) + 1
        idf = {t: 1.0 + math.log(n / d) for t, d in df.items()}

        def vector(tokens):
            counts = {}
            for t in tokens:
                if t in idf:
                    counts[t] = counts.get(t, 0) + 1
            return {t: c * idf[t] for t, c in counts.items()}

        qv = vector(tokenize(query.query_text))
        qn = math.sqrt(sum(w * w for w in qv.values()))
        out = []
        for toks in sent_tokens:
            sv = vector(toks)
            sn = math.sqrt(sum(w * w for w in sv.values()))
            if qn == 0.0 or sn == 0.0:
                out.append(0.0)
                continue
            dot = sum(w * sv.get(t, 0.0) for t, w in qv.items())
            out.append(dot / (qn * sn))
        return out


def rank_relevant(scorer, query, sentences, k=5, doc_refs=None):
    """Top-k sentences by scorer score, descending; ties keep input order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = scorer.scores(query, sentences)
    if len(scores) != len(sentences):
        raise ScorerError(f"scorer returned {len(scores)} scores for {len(sentences)} sentences")
    for i, s in enumerate(scores):
        if not math.isfinite(s):
            raise ScorerError(f"sentence {i}: non-finite score {s!r}")
    order = sorted(range(len(sentences)), key=lambda i: (-scores[i], i))
    return [
        ScoredSentence(
            sentence=sentences[i],
            score=scores[i],
            doc_ref=doc_refs[i] if doc_refs is not None else None,
        )
        for i in order[:k]
    ]


class LexicalGate:
    """Content-token overlap heuristic standing in for an NLI model.

    Jaccard overlap >= `threshold` counts as entailed unless the sentence
    introduces a negation cue absent from the goal statement, which flips
    the verdict to contradicted. Zero-content sentences are neutral with
    confidence 0. The 0.2 default is a calibration choice, not a modeling
    claim.
    """

    def __init__(self, threshold=0.2):
        if not 0.0 < threshold <= 1.0:
            raise ValueError("threshold must be in (0, 1]")
        self.threshold = threshold

    def verdict(self, query, sentence):
        s_tokens = content_tokens(sentence)
        if not s_tokens:
            return EntailmentVerdict(NEUTRAL, 0.0)
        d_tokens = content_tokens(query.description)
        union = s_tokens | d_tokens
        overlap = len(s_tokens & d_tokens) / len(union) if union else 0.0
        novel_negation = (set(tokenize(sentence)) & NEGATION_CUES) - (
            set(tokenize(query.description)) & NEGATION_CUES
        )
        if overlap >= self.threshold:
            if novel_negation:
                return EntailmentVerdict(CONTRADICTED, overlap)
            return EntailmentVerdict(ENTAILED, overlap)
        return EntailmentVerdict(NEUTRAL, 1.0 - overlap)


def entailment_gate(gate, query, candidate):
    """Run the pluggable gate on one ranked sentence."""
    return gate.verdict(query, candidate.sentence)


def aggregate_news_score(article):
    """sentiment x magnitude x mention count; the article's significance."""
    return article.sentiment * article.magnitude * article.mention_count


def dedup_headlines(articles, threshold=0.55):
    """Greedy scan dropping articles whose headline mostly repeats an earlier one.

    Overlap = |shared tokens| / |smaller headline's token set|, so a truncated
    rewrite of the same event collapses onto the first occurrence.
    """
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    kept = []
    kept_tokens = []
    for article in articles:
        tokens = set(tokenize(article.headline))
        duplicate = False
        for seen in kept_tokens:
            smaller = min(len(tokens), len(seen))
            if smaller == 0:
                continue
            if len(tokens & seen) / smaller >= threshold:
                duplicate = True
                break
        if not duplicate:
            kept.append(article)
            kept_tokens.append(tokens)
    return kept


def select_influential(articles, n=5, dedup_threshold=0.55):
    """After dedup, the n most positive and n most negative articles by
    aggregated sentiment score.

    The two lists are disjoint; on ties of membership the top list wins.
    Top is sorted descending, bottom ascending; input order breaks ties.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    kept = dedup_headlines(articles, dedup_threshold)
    scored = [(aggregate_news_score(a), i, a) for i, a in enumerate(kept)]
    top_order = sorted(scored, key=lambda t: (-t[0], t[1]))
    top_keys = {t[1] for t in top_order[:n]}
    top = [t[2] for t in top_order[:n]]
    remaining = [t for t in scored if t[1] not in top_keys]
    bottom_order = sorted(remaining, key=lambda t: (t[0], t[1]))
    bottom = [t[2] for t in bottom_order[:n]]
    return top, bottom


def load_sdg_queries(keyword_dir=None, goals_path=None, sdgs=None):
    """Build SdgQuery objects from keyword files `sdg<NN>.txt` plus the goal table.

    Defaults to the lists shipped with the package (a hand-curated stand-in
    documented in the README).
    """
    from . import SUPPORTED_SDGS

    sdgs = tuple(sdgs) if sdgs is not None else SUPPORTED_SDGS
    pkg = resources.files("sdgscore")
    goals = {}
    if goals_path is None:
        goal_text = pkg.joinpath("data/sdg_goals.tsv").read_text("utf-8")
    else:
        with open(goals_path, encoding="utf-8") as fh:
            goal_text = fh.read()
    for line in goal_text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        sdg, _, statement = line.partition("\t")
        goals[int(sdg)] = statement.strip()

    queries = []
    for sdg in sdgs:
        fname = f"sdg{sdg:02d}.txt"
        if keyword_dir is None:
            raw = pkg.joinpath(f"data/keywords/{fname}").read_text("utf-8")
        else:
            with open(f"{keyword_dir}/{fname}", encoding="utf-8") as fh:
                raw = fh.read()
        keywords = [ln.strip() for ln in raw.splitlines() if ln.strip() and not ln.startswith("#")]
        if sdg not in goals:
            raise DataError(f"no goal statement for SDG {sdg}")
        queries.append(SdgQuery(sdg=sdg, query_text=" ".join(keywords), description=goals[sdg]))
    return queries
