"""Command-line entry point.

Every verb takes --config/--seed/--out; errors exit with a single
machine-parseable `CLASS: detail` line on stderr (0 success, 2 config,
3 data, 4 numeric). Every successful run writes a manifest of config and
input hashes next to the artifacts; nothing in the manifest depends on the
clock, so identical runs write identical bytes.
"""

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .config import load_config
from .errors import SdgScoreError
from . import pipeline


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sdgscore",
        description="Predict and explain per-SDG alignment scores for "
                    "companies from web-derived text and a knowledge graph.")
    sub = parser.add_subparsers(dest="command", required=True)

    def verb(name, help_text):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True,
                        help="pipeline config JSON file")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--out", default=None,
                        help="override the config output directory")
        return sp

    verb("extract-graph", "cut the company neighborhood out of the KG")
    verb("summarize-graph", "build the company-to-company summary graph")
    ft = verb("filter-text", "reduce documents to SDG evidence sentences")
    ft.add_argument("--top-k", type=int, default=None,
                    help="sentences kept per company per SDG")
    ft.add_argument("--dedup-threshold", type=float, default=None,
                    help="headline overlap ratio treated as a duplicate")
    verb("featurize", "bag-of-words features over the evidence")
    tr = verb("train", "fit models for every configured SDG")
    tr.add_argument("--model", choices=["brf", "gcn", "rgcn", "all"],
                    default="all")
    pr = verb("predict", "score all companies with the trained models")
    pr.add_argument("--model", choices=["brf", "gcn", "rgcn", "all"],
                    default="all")
    ex = verb("explain", "term and edge explanations for predictions")
    ex.add_argument("--company", default=None, help="restrict to one company")
    ex.add_argument("--sdg", type=int, default=None, help="restrict to one SDG")
    ex.add_argument("--model", default=None,
                    help="path to a stored model file to explain")
    verb("evaluate", "held-out metrics per SDG per model")
    verb("pipeline", "run every stage in order")
    return parser


def _sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(cfg, command, config_path):
    """Hashes of the config and every fixture file, plus tool versions."""
    import numpy
    import scipy

    inputs = {}
    for path in sorted(cfg.fixture_dir.rglob("*")):
        if path.is_file():
            rel = path.relative_to(cfg.fixture_dir).as_posix()
            inputs[rel] = _sha256_file(path)
    manifest = {
        "command": command,
        "config_sha256": _sha256_file(config_path),
        "seed": cfg.seed,
        "sdgs": list(cfg.sdgs),
        "inputs": inputs,
        "versions": {
            "sdgscore": __version__,
            "python": ".".join(str(v) for v in sys.version_info[:3]),
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
        },
    }
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    with open(cfg.out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")


def dispatch(args, cfg):
    if args.command == "extract-graph":
        pipeline.stage_extract_graph(cfg)
    elif args.command == "summarize-graph":
        pipeline.stage_summarize_graph(cfg)
    elif args.command == "filter-text":
        pipeline.stage_filter_text(cfg, top_k=args.top_k,
                                   dedup_threshold=args.dedup_threshold)
    elif args.command == "featurize":
        pipeline.stage_featurize(cfg)
    elif args.command == "train":
        pipeline.stage_train(cfg, model=args.model)
    elif args.command == "predict":
        pipeline.stage_predict(cfg, model=args.model)
    elif args.command == "explain":
        pipeline.stage_explain(cfg, company=args.company, sdg=args.sdg,
                               model_path=args.model)
    elif args.command == "evaluate":
        pipeline.stage_evaluate(cfg)
    elif args.command == "pipeline":
        pipeline.run_pipeline(cfg)
    else:
        raise AssertionError(f"unreachable verb {args.command!r}")


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        fixture_override = os.environ.get("SDG_FIXTURE_DIR")
        cfg = load_config(args.config, seed=args.seed, out_dir=args.out,
                          fixture_dir=fixture_override)
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        dispatch(args, cfg)
        write_manifest(cfg, args.command, Path(args.config))
    except SdgScoreError as exc:
        print(f"{exc.error_class}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
