"""Company/document records and pluggable text-source providers.

Three sources feed the pipeline: web search for sustainability reports,
encyclopedia descriptions, and per-company news. Each has a provider
interface plus a deterministic fixture backend reading JSONL files from
`{root}/{reports,wikipedia,news}/<company_id>.jsonl`; the root comes from
the constructor or the `SDG_FIXTURE_DIR` environment variable. Live
crawler backends plug in behind the same interfaces and must keep callers
transport-agnostic.

Fixture backends are read-only and therefore thread-safe; two calls with
the same arguments return identical results.
"""

import datetime
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from . import SCORE_MAX, SCORE_MIN, SUPPORTED_SDGS
from .errors import DataError, DataRangeError

SOURCE_KINDS = ("report", "web", "wikipedia", "news")


@dataclass(frozen=True)
class Company:
    id: str
    name: str
    kg_entity: str = None
    sector: str = None
    labels: dict = field(default_factory=dict)  # sdg -> score in -3..3

    def __post_init__(self):
        for sdg, score in self.labels.items():
            if sdg not in SUPPORTED_SDGS:
                raise DataRangeError(f"company {self.id!r}: unsupported SDG {sdg}")
            if not SCORE_MIN <= score <= SCORE_MAX:
                raise DataRangeError(
                    f"company {self.id!r}: score {score} for SDG {sdg} outside "
                    f"[{SCORE_MIN}, {SCORE_MAX}]"
                )


@dataclass(frozen=True)
class Document:
    company_id: str
    source: str
    text: str
    uri: str = None
    retrieved_at: datetime.date = None

    def __post_init__(self):
        if self.source not in SOURCE_KINDS:
            raise DataRangeError(f"unknown source kind {self.source!r}")
        if not self.text:
            raise DataRangeError(f"empty document text for company {self.company_id!r}")


@dataclass(frozen=True)
class NewsArticle:
    company_id: str
    headline: str
    sentiment: float
    magnitude: float
    mention_count: int
    published: datetime.date
    body: str = None

    def __post_init__(self):
        if not self.headline:
            raise DataRangeError(f"empty headline for company {self.company_id!r}")
        if not -1.0 <= self.sentiment <= 1.0:
            raise DataRangeError(f"sentiment {self.sentiment} outside [-1, 1]")
        if self.magnitude < 0:
            raise DataRangeError(f"magnitude {self.magnitude} must be >= 0")
        if self.mention_count < 0 or int(self.mention_count) != self.mention_count:
            raise DataRangeError(f"mention_count {self.mention_count} must be a non-negative integer")


def fixture_root(explicit=None):
    root = explicit or os.environ.get("SDG_FIXTURE_DIR")
    if not root:
        raise DataError("no fixture directory: pass one or set SDG_FIXTURE_DIR")
    return Path(root)


def _read_jsonl(path):
    if not path.exists():
        return []
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                records.append((lineno, json.loads(line)))
            except json.JSONDecodeError as exc:
                raise DataError(f"{path}:{lineno}: invalid JSON: {exc}") from None
    return records


def _parse_date(value):
    if value is None:
        return None
    try:
        return datetime.date.fromisoformat(value)
    except ValueError as exc:
        raise DataError(f"invalid date {value!r}: {exc}") from None


class FixtureSearchProvider:
    """Report/web text lookup backed by stored JSONL records."""

    def __init__(self, root=None):
        self.root = fixture_root(root)

    def find_reports(self, company):
        if not company.name:
            raise DataError(f"company {company.id!r} has no name")
        path = self.root / "reports" / f"{company.id}.jsonl"
        docs = []
        for lineno, rec in _read_jsonl(path):
            try:
                docs.append(
                    Document(
                        company_id=company.id,
                        source=rec.get("source", "report"),
                        text=rec.get("text", ""),
                        uri=rec.get("uri"),
                        retrieved_at=_parse_date(rec.get("retrieved_at")),
                    )
                )
            except DataError as exc:
                raise DataError(f"{path}: record {lineno}: {exc}") from None
        # PDF-derived report text is preferred over plain page text.
        rank = {"report": 0, "web": 1}
        docs.sort(key=lambda d: rank.get(d.source, 2))
        for d in docs:
            if d.source not in ("report", "web"):
                raise DataRangeError(f"{path}: source {d.source!r} not allowed for reports")
        return docs


class FixtureWikiProvider:
    """Encyclopedia description lookup; at most one document per company."""

    def __init__(self, root=None):
        self.root = fixture_root(root)

    def description(self, company):
        path = self.root / "wikipedia" / f"{company.id}.jsonl"
        records = _read_jsonl(path)
        if not records:
            return None
        lineno, rec = records[0]
        try:
            return Document(
                company_id=company.id,
                source="wikipedia",
                text=rec.get("text", ""),
                uri=rec.get("uri"),
                retrieved_at=_parse_date(rec.get("retrieved_at")),
            )
        except DataError as exc:
            raise DataError(f"{path}: record {lineno}: {exc}") from None


class FixtureNewsProvider:
    """Per-company news records with provider-supplied sentiment fields."""

    def __init__(self, root=None):
        self.root = fixture_root(root)

    def news_for(self, company, year):
        path = self.root / "news" / f"{company.id}.jsonl"
        articles = []
        for lineno, rec in _read_jsonl(path):
            published = _parse_date(rec.get("published"))
            if published is None or published.year != year:
                continue
            try:
                articles.append(
                    NewsArticle(
                        company_id=company.id,
                        headline=rec.get("headline", ""),
                        body=rec.get("body"),
                        sentiment=rec.get("sentiment", 0.0),
                        magnitude=rec.get("magnitude", 0.0),
                        mention_count=rec.get("mention_count", 0),
                        published=published,
                    )
                )
            except DataRangeError as exc:
                raise DataRangeError(f"{path}: record {lineno}: {exc}") from None
        return articles


def load_companies(path):
    """CSV `id,name,kg_entity,sector` -> list of Company (no labels attached)."""
    import csv

    companies = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"id", "name"}
        if not required <= set(reader.fieldnames or ()):
            raise DataError(f"{path}: company CSV must have at least columns id,name")
        for row in reader:
            companies.append(
                Company(
                    id=row["id"],
                    name=row["name"],
                    kg_entity=row.get("kg_entity") or None,
                    sector=row.get("sector") or None,
                )
            )
    return companies


def load_labels(path):
    """CSV `company_id,sdg,score` -> {sdg: {company_id: score}}."""
    import csv

    by_sdg = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if not {"company_id", "sdg", "score"} <= set(reader.fieldnames or ()):
            raise DataError(f"{path}: label CSV must have columns company_id,sdg,score")
        for i, row in enumerate(reader, start=2):
            try:
                sdg = int(row["sdg"])
                score = int(row["score"])
            except ValueError:
                raise DataError(f"{path}:{i}: sdg and score must be integers") from None
            if sdg not in SUPPORTED_SDGS:
                raise DataRangeError(f"{path}:{i}: unsupported SDG {sdg}")
            if not SCORE_MIN <= score <= SCORE_MAX:
                raise DataRangeError(f"{path}:{i}: score {score} outside [{SCORE_MIN}, {SCORE_MAX}]")
            by_sdg.setdefault(sdg, {})[row["company_id"]] = score
    return by_sdg
