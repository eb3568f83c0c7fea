"""Pipeline configuration: one JSON file, schema-checked at load.

Paths are resolved relative to the config file's directory so a config can
travel with its fixture. Seeds are always explicit; nothing in the pipeline
reads the clock.
"""

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema

from . import SUPPORTED_SDGS
from .errors import ConfigError, ConfigPathError, ConfigSchemaError


@dataclass(frozen=True)
class RelevanceConfig:
    top_k: int = 5
    dedup_threshold: float = 0.55
    news_top: int = 5
    scorer: str = "tfidf"
    gate: str = "lexical"
    gate_threshold: float = 0.2


@dataclass(frozen=True)
class FeatureConfig:
    min_df: int = 2
    max_size: int = 50000


@dataclass(frozen=True)
class ExplainConfig:
    lime_samples: int = 1000
    top_terms: int = 10
    mask_steps: int = 200
    sparsity: float = 0.05


@dataclass(frozen=True)
class PipelineConfig:
    fixture_dir: Path
    sdgs: tuple
    seed: int
    out_dir: Path
    news_year: int = 2021
    test_fraction: float = 0.2
    clusters: int = 50
    summary_step_threshold: int = 2
    relevance: RelevanceConfig = field(default_factory=RelevanceConfig)
    features: FeatureConfig = field(default_factory=FeatureConfig)
    explain: ExplainConfig = field(default_factory=ExplainConfig)
    brf: dict = field(default_factory=dict)
    gcn: dict = field(default_factory=dict)
    rgcn: dict = field(default_factory=dict)


def load_schema():
    ref = resources.files("sdgscore").joinpath("data/config.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def load_config(path, seed=None, out_dir=None, fixture_dir=None):
    """Parse, schema-check, and resolve a config file.

    `seed`, `out_dir`, and `fixture_dir` are command-line or environment
    overrides and win over the file.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigPathError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigSchemaError(f"{path}: invalid JSON: {exc}") from exc

    try:
        jsonschema.validate(raw, load_schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigSchemaError(f"{path}: {where}: {exc.message}") from exc

    unsupported = sorted(set(raw["sdgs"]) - set(SUPPORTED_SDGS))
    if unsupported:
        raise ConfigError(f"unsupported SDGs {unsupported}; "
                          f"supported: {list(SUPPORTED_SDGS)}")

    base = path.parent
    if fixture_dir is not None:
        fixture_dir = Path(fixture_dir).resolve()
    else:
        fixture_dir = (base / raw["fixture_dir"]).resolve()
    if not fixture_dir.is_dir():
        raise ConfigPathError(f"fixture directory not found: {fixture_dir}")
    resolved_out = Path(out_dir) if out_dir is not None else (base / raw["out_dir"])

    models = raw.get("models", {})
    return PipelineConfig(
        fixture_dir=fixture_dir,
        sdgs=tuple(sorted(raw["sdgs"])),
        seed=int(seed) if seed is not None else raw["seed"],
        out_dir=resolved_out,
        news_year=raw.get("news_year", 2021),
        test_fraction=raw.get("test_fraction", 0.2),
        clusters=raw.get("clusters", 50),
        summary_step_threshold=raw.get("summary_step_threshold", 2),
        relevance=RelevanceConfig(**raw.get("relevance", {})),
        features=FeatureConfig(**raw.get("features", {})),
        explain=ExplainConfig(**raw.get("explain", {})),
        brf=dict(models.get("brf", {})),
        gcn=dict(models.get("gcn", {})),
        rgcn=dict(models.get("rgcn", {})),
    )
