"""Stage functions behind the CLI verbs.

Each stage reads fixture files and artifacts written by earlier stages,
never hidden state, and writes its outputs under the configured output
directory, so re-running any stage with unchanged inputs rewrites identical
bytes. Stage order: extract-graph, summarize-graph, filter-text, featurize,
train, predict, explain, evaluate.
"""

import json
import logging
from pathlib import Path

import numpy as np

from . import decode_class, encode_score
from .errors import ConfigError, DataError, DataMissingError
from .evaluate import confusion, macro_f1, micro_f1, per_sdg_report
from .explain import gnn_explain, lime_explain, load_report_schema, render_report
from .features import (FeatureMatrix, LabelVector, build_vocabulary, featurize,
                       load_feature_rows, load_vocabulary, stratified_split,
                       write_feature_rows, write_vocabulary)
from .graph import (build_summary_graph, extract_subgraph, load_edge_list,
                    load_summary_graph, write_degree_histogram, write_edge_list,
                    write_summary_graph)
from .graph import SummaryGraph
from .ingest import (FixtureNewsProvider, FixtureSearchProvider,
                     FixtureWikiProvider, load_companies, load_labels)
from .models import store
from .models.brf import BalancedRandomForest
from .models.cluster import cluster_graph, propagate_cluster_labels
from .models.gcn import GcnConfig, predict_gcn, train_gcn
from .models.rgcn import RgcnConfig, predict_rgcn, train_rgcn
from .relevance import (ENTAILED, LexicalGate, TfidfScorer, entailment_gate,
                        load_sdg_queries, rank_relevant, select_influential,
                        split_sentences)

log = logging.getLogger(__name__)

MODEL_KINDS = ("brf", "gcn", "rgcn")


def _fixture_path(cfg, name):
    path = cfg.fixture_dir / name
    if not path.exists():
        raise DataMissingError(f"fixture file not found: {path}")
    return path


def _load_company_table(cfg):
    companies = load_companies(_fixture_path(cfg, "companies.csv"))
    seen = set()
    for c in companies:
        if c.id in seen:
            raise DataError(f"duplicate company id {c.id!r}")
        seen.add(c.id)
    return companies


def _entity_map(companies):
    """company id <-> knowledge-graph entity, both directions."""
    to_entity = {c.id: c.kg_entity for c in companies if c.kg_entity}
    to_company = {}
    for cid, ent in to_entity.items():
        if ent in to_company:
            raise DataError(f"entity {ent!r} mapped by both "
                            f"{to_company[ent]!r} and {cid!r}")
        to_company[ent] = cid
    return to_entity, to_company


def stage_extract_graph(cfg):
    """Cut the 2-hop neighborhood of all company entities out of the KG."""
    full = load_edge_list(_fixture_path(cfg, "edges.tsv"))
    companies = _load_company_table(cfg)
    to_entity, _ = _entity_map(companies)
    seeds = sorted(ent for ent in to_entity.values() if ent in full.entities)
    if not seeds:
        raise DataError("no company entity appears in the knowledge graph")
    sub = extract_subgraph(full, seeds)
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    write_edge_list(sub, cfg.out_dir / "graph.tsv")
    log.info("extract-graph: %d entities, %d edges", sub.n_entities, sub.n_edges)
    return cfg.out_dir / "graph.tsv"


def _load_extracted_graph(cfg):
    path = cfg.out_dir / "graph.tsv"
    if not path.exists():
        raise DataMissingError(f"run extract-graph first: {path} missing")
    return load_edge_list(path)


def stage_summarize_graph(cfg):
    """Company-to-company summary graph plus its degree histogram."""
    g = _load_extracted_graph(cfg)
    companies = _load_company_table(cfg)
    to_entity, to_company = _entity_map(companies)
    present = sorted(ent for ent in to_entity.values() if ent in g.entities)
    entity_sg = build_summary_graph(g, present,
                                    step_threshold=cfg.summary_step_threshold)
    nodes = frozenset(c.id for c in companies)
    edges = frozenset(
        tuple(sorted((to_company[u], to_company[v])))
        for u, v in entity_sg.edges)
    sg = SummaryGraph(nodes=nodes, edges=edges)
    write_summary_graph(sg, cfg.out_dir / "summary.tsv")
    write_degree_histogram(sg, cfg.out_dir / "degree_histogram.csv")
    log.info("summarize-graph: %d companies, %d edges", len(nodes), len(edges))
    return cfg.out_dir / "summary.tsv"


def _load_summary(cfg):
    path = cfg.out_dir / "summary.tsv"
    if not path.exists():
        raise DataMissingError(f"run summarize-graph first: {path} missing")
    companies = _load_company_table(cfg)
    return load_summary_graph(path, sorted(c.id for c in companies))


def stage_filter_text(cfg, top_k=None, dedup_threshold=None):
    """Reduce documents to entailed evidence sentences and key news."""
    top_k = top_k if top_k is not None else cfg.relevance.top_k
    dedup = (dedup_threshold if dedup_threshold is not None
             else cfg.relevance.dedup_threshold)
    companies = _load_company_table(cfg)
    root = cfg.fixture_dir
    search = FixtureSearchProvider(root)
    wiki = FixtureWikiProvider(root)
    news = FixtureNewsProvider(root)
    queries = load_sdg_queries(sdgs=cfg.sdgs)
    scorer = TfidfScorer()
    gate = LexicalGate(threshold=cfg.relevance.gate_threshold)

    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    n_sentences = 0
    with open(cfg.out_dir / "evidence.jsonl", "w", encoding="utf-8") as fh:
        for company in sorted(companies, key=lambda c: c.id):
            docs = list(search.find_reports(company))
            desc = wiki.description(company)
            if desc is not None:
                docs.append(desc)
            sentences, refs = [], []
            for doc in docs:
                for s in split_sentences(doc.text):
                    sentences.append(s)
                    refs.append(doc)
            for query in queries:
                if not sentences:
                    continue
                ranked = rank_relevant(scorer, query, sentences,
                                       k=top_k, doc_refs=refs)
                for cand in ranked:
                    verdict = entailment_gate(gate, query, cand)
                    if verdict.label != ENTAILED:
                        continue
                    fh.write(json.dumps({
                        "company_id": company.id,
                        "sdg": query.sdg,
                        "sentence": cand.sentence,
                        "score": cand.score,
                        "verdict": verdict.label,
                        "confidence": verdict.confidence,
                        "source": cand.doc_ref.source,
                        "uri": cand.doc_ref.uri,
                    }, sort_keys=True) + "\n")
                    n_sentences += 1

    n_articles = 0
    with open(cfg.out_dir / "news.jsonl", "w", encoding="utf-8") as fh:
        for company in sorted(companies, key=lambda c: c.id):
            articles = news.news_for(company, cfg.news_year)
            top, bottom = select_influential(
                articles, n=cfg.relevance.news_top, dedup_threshold=dedup)
            for direction, bucket in (("top", top), ("bottom", bottom)):
                for a in bucket:
                    fh.write(json.dumps({
                        "company_id": company.id,
                        "headline": a.headline,
                        "score": a.sentiment * a.magnitude * a.mention_count,
                        "sentiment": a.sentiment,
                        "magnitude": a.magnitude,
                        "mention_count": a.mention_count,
                        "direction": direction,
                    }, sort_keys=True) + "\n")
                    n_articles += 1
    log.info("filter-text: %d evidence sentences, %d news picks",
             n_sentences, n_articles)
    return cfg.out_dir / "evidence.jsonl"


def _read_jsonl(path):
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                records.append(json.loads(line))
    return records


def _company_texts(cfg, companies):
    """Per company: evidence sentences, news headlines, wiki description."""
    evidence_path = cfg.out_dir / "evidence.jsonl"
    if not evidence_path.exists():
        raise DataMissingError(f"run filter-text first: {evidence_path} missing")
    texts = {c.id: [] for c in companies}
    for rec in _read_jsonl(evidence_path):
        texts[rec["company_id"]].append(rec["sentence"])
    news_path = cfg.out_dir / "news.jsonl"
    if news_path.exists():
        for rec in _read_jsonl(news_path):
            texts[rec["company_id"]].append(rec["headline"])
    wiki = FixtureWikiProvider(cfg.fixture_dir)
    for company in companies:
        desc = wiki.description(company)
        if desc is not None:
            texts[company.id].append(desc.text)
    return texts


def stage_featurize(cfg):
    """Bag-of-words rows per company over a corpus-wide vocabulary."""
    companies = _load_company_table(cfg)
    texts = _company_texts(cfg, companies)
    ids = sorted(texts)
    corpus = [" ".join(texts[cid]) for cid in ids]
    vocab = build_vocabulary(corpus, min_df=cfg.features.min_df,
                             max_size=cfg.features.max_size)
    rows = {cid: featurize(vocab, texts[cid]) for cid in ids}
    matrix = FeatureMatrix(vocab=vocab, rows=rows, row_order=ids)
    write_vocabulary(vocab, cfg.out_dir / "vocabulary.tsv")
    write_feature_rows(matrix, cfg.out_dir / "features.jsonl")
    log.info("featurize: %d companies, %d terms", len(ids), len(vocab))
    return cfg.out_dir / "features.jsonl"


def _load_features(cfg):
    vpath = cfg.out_dir / "vocabulary.tsv"
    fpath = cfg.out_dir / "features.jsonl"
    if not vpath.exists() or not fpath.exists():
        raise DataMissingError("run featurize first: feature artifacts missing")
    vocab = load_vocabulary(vpath)
    return load_feature_rows(vocab, fpath)


def _load_label_vectors(cfg, companies):
    by_sdg = load_labels(_fixture_path(cfg, "labels.csv"))
    ids = {c.id for c in companies}
    vectors = {}
    for sdg in cfg.sdgs:
        scores = by_sdg.get(sdg, {})
        unknown = sorted(set(scores) - ids)
        if unknown:
            raise DataError(f"labels for unknown companies: {unknown}")
        if not scores:
            raise DataError(f"no labels for SDG {sdg}")
        vectors[sdg] = LabelVector.from_scores(sdg, scores)
    return vectors


def _splits(cfg, vectors):
    return {
        sdg: stratified_split(vec, cfg.test_fraction, cfg.seed)
        for sdg, vec in sorted(vectors.items())
    }


def _model_path(cfg, kind, sdg):
    return cfg.out_dir / "models" / f"{kind}_sdg{sdg:02d}.json"


def stage_train(cfg, model=None):
    """Fit the requested model kinds for every configured SDG."""
    kinds = MODEL_KINDS if model in (None, "all") else (model,)
    for kind in kinds:
        if kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {kind!r}")
    companies = _load_company_table(cfg)
    matrix = _load_features(cfg)
    vocab = matrix.vocab
    vectors = _load_label_vectors(cfg, companies)
    splits = _splits(cfg, vectors)
    (cfg.out_dir / "models").mkdir(parents=True, exist_ok=True)

    with open(cfg.out_dir / "splits.json", "w", encoding="utf-8") as fh:
        json.dump({str(sdg): {"train": tr, "test": te}
                   for sdg, (tr, te) in splits.items()},
                  fh, sort_keys=True, indent=1)
        fh.write("\n")

    sg = _load_summary(cfg) if {"gcn", "rgcn"} & set(kinds) else None
    kg = _load_extracted_graph(cfg) if "rgcn" in kinds else None

    for sdg in cfg.sdgs:
        vec = vectors[sdg]
        train_ids, _ = splits[sdg]
        if "brf" in kinds:
            brf = BalancedRandomForest(seed=cfg.seed, **cfg.brf)
            brf.fit(matrix.dense(train_ids),
                    np.array([vec.values[c] for c in train_ids]))
            store.save_model(_model_path(cfg, "brf", sdg),
                             store.brf_payload(brf, sdg, vocab))
        if "gcn" in kinds:
            gcfg = GcnConfig(seed=cfg.seed, **cfg.gcn)
            y = {c: vec.values[c] for c in train_ids}
            gm = train_gcn(sg, matrix.dense(sorted(sg.nodes)), y,
                           set(train_ids), gcfg)
            store.save_model(_model_path(cfg, "gcn", sdg),
                             store.gcn_payload(gm, sdg, vocab))
        if "rgcn" in kinds:
            rcfg = RgcnConfig(seed=cfg.seed, **cfg.rgcn)
            to_entity, _ = _entity_map(companies)
            feats = {to_entity[c]: matrix.dense([c])[0]
                     for c in matrix.row_order
                     if to_entity.get(c) in kg.entities}
            y = {to_entity[c]: vec.values[c] for c in train_ids
                 if to_entity.get(c) in kg.entities}
            rm = train_rgcn(kg, feats, y, set(y), rcfg)
            store.save_model(_model_path(cfg, "rgcn", sdg),
                             store.rgcn_payload(rm, sdg, vocab))
        log.info("train: SDG %d done (%s)", sdg, ",".join(kinds))
    return cfg.out_dir / "models"


def _prob_header():
    return [f"prob_{decode_class(c)}" for c in range(7)]


def stage_predict(cfg, model=None):
    """Score every company with each trained model; smooth with clusters."""
    kinds = MODEL_KINDS if model in (None, "all") else (model,)
    companies = _load_company_table(cfg)
    matrix = _load_features(cfg)
    all_ids = sorted(c.id for c in companies)
    to_entity, to_company = _entity_map(companies)

    lines = ["company_id,sdg,model," + "predicted_score," + ",".join(_prob_header())]
    gcn_models = {}
    for sdg in cfg.sdgs:
        for kind in kinds:
            path = _model_path(cfg, kind, sdg)
            if not path.exists():
                raise DataMissingError(f"run train first: {path} missing")
            payload = store.load_model(path)
            store.check_vocab(payload, matrix.vocab)
            if kind == "brf":
                brf = store.brf_from_payload(payload)
                probs = brf.predict_proba(matrix.dense(all_ids))
                targets = all_ids
            elif kind == "gcn":
                sg = _load_summary(cfg)
                gm = store.gcn_from_payload(payload, sg,
                                            matrix.dense(sorted(sg.nodes)))
                gcn_models[sdg] = gm
                _, probs = predict_gcn(gm, all_ids)
                targets = all_ids
            else:
                kg = _load_extracted_graph(cfg)
                feats = {to_entity[c]: matrix.dense([c])[0]
                         for c in matrix.row_order
                         if to_entity.get(c) in kg.entities}
                rm = store.rgcn_from_payload(payload, kg, feats)
                targets = [c for c in all_ids if to_entity.get(c) in kg.entities]
                _, probs = predict_rgcn(rm, [to_entity[c] for c in targets])
            for cid, p in zip(targets, probs):
                cls = int(np.argmax(p))
                cells = [cid, str(sdg), kind, str(decode_class(cls))]
                cells.extend(repr(float(v)) for v in p)
                lines.append(",".join(cells))

    (cfg.out_dir / "predictions.csv").write_text("\n".join(lines) + "\n",
                                                 encoding="utf-8")

    if gcn_models:
        _write_cluster_labels(cfg, companies, gcn_models)
    log.info("predict: wrote %d rows", len(lines) - 1)
    return cfg.out_dir / "predictions.csv"


def _write_cluster_labels(cfg, companies, gcn_models):
    sg = _load_summary(cfg)
    if cfg.clusters > len(sg.nodes):
        raise ConfigError(f"clusters={cfg.clusters} exceeds company count "
                          f"{len(sg.nodes)}")
    assign = cluster_graph(sg, k=cfg.clusters, seed=cfg.seed)
    vectors = _load_label_vectors(cfg, companies)
    splits = _splits(cfg, vectors)
    lines = ["company_id,sdg,cluster_id,propagated_score"]
    for sdg in cfg.sdgs:
        train_ids, _ = splits[sdg]
        vec = vectors[sdg]
        observed = LabelVector(
            sdg=sdg, values={c: vec.values[c] for c in train_ids},
            mask=set(train_ids))
        propagated = propagate_cluster_labels(assign, observed,
                                              gcn_models[sdg])
        for cid in sorted(propagated.values):
            lines.append(f"{cid},{sdg},{assign.assignment[cid]},"
                         f"{decode_class(propagated.values[cid])}")
    (cfg.out_dir / "cluster_labels.csv").write_text("\n".join(lines) + "\n",
                                                    encoding="utf-8")


def stage_explain(cfg, company=None, sdg=None, model_path=None):
    """Term attributions from the forest, edge masks from the GCN."""
    import jsonschema

    companies = _load_company_table(cfg)
    matrix = _load_features(cfg)
    sg = _load_summary(cfg)
    targets = [company] if company else sorted(c.id for c in companies)
    sdgs = [sdg] if sdg else list(cfg.sdgs)

    evidence = {}
    epath = cfg.out_dir / "evidence.jsonl"
    if epath.exists():
        for rec in _read_jsonl(epath):
            key = (rec["company_id"], rec["sdg"])
            evidence.setdefault(key, []).append(rec["sentence"])

    attributions, edge_explanations = [], []
    for s in sdgs:
        brf_path = Path(model_path) if model_path else _model_path(cfg, "brf", s)
        gcn_path = _model_path(cfg, "gcn", s)
        brf = gcn = None
        if brf_path.exists():
            payload = store.load_model(brf_path)
            if payload["kind"] == "brf":
                store.check_vocab(payload, matrix.vocab)
                brf = store.brf_from_payload(payload)
        if gcn_path.exists():
            payload = store.load_model(gcn_path)
            store.check_vocab(payload, matrix.vocab)
            gcn = store.gcn_from_payload(payload, sg,
                                         matrix.dense(sorted(sg.nodes)))
        if brf is None and gcn is None:
            raise DataMissingError(f"no trained model found for SDG {s}")
        for cid in targets:
            row = matrix.rows.get(cid, {})
            if brf is not None and row:
                attributions.append(lime_explain(
                    brf.predict_proba, row, matrix.vocab,
                    n_samples=cfg.explain.lime_samples,
                    m=cfg.explain.top_terms, seed=cfg.seed,
                    company_id=cid, sdg=s))
            if gcn is not None:
                edge_explanations.append(gnn_explain(
                    gcn, sg, cid, steps=cfg.explain.mask_steps,
                    sparsity=cfg.explain.sparsity, seed=cfg.seed, sdg=s))

    report, markdown = render_report(attributions, edge_explanations, evidence)
    jsonschema.validate(report, load_report_schema())
    with open(cfg.out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, sort_keys=True, indent=1)
        fh.write("\n")
    (cfg.out_dir / "report.md").write_text(markdown, encoding="utf-8")
    log.info("explain: %d term and %d edge explanations",
             len(attributions), len(edge_explanations))
    return cfg.out_dir / "report.json"


def stage_evaluate(cfg):
    """Held-out metrics per SDG per model, as CSV and an aligned table."""
    path = cfg.out_dir / "predictions.csv"
    if not path.exists():
        raise DataMissingError(f"run predict first: {path} missing")
    companies = _load_company_table(cfg)
    vectors = _load_label_vectors(cfg, companies)
    splits = _splits(cfg, vectors)

    predicted = {}
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            cells = line.strip().split(",")
            rec = dict(zip(header, cells))
            key = (int(rec["sdg"]), rec["model"])
            predicted.setdefault(key, {})[rec["company_id"]] = (
                encode_score(int(rec["predicted_score"])))

    cpath = cfg.out_dir / "cluster_labels.csv"
    if cpath.exists():
        with open(cpath, encoding="utf-8") as fh:
            header = fh.readline().strip().split(",")
            for line in fh:
                rec = dict(zip(header, line.strip().split(",")))
                key = (int(rec["sdg"]), "cluster")
                predicted.setdefault(key, {})[rec["company_id"]] = (
                    encode_score(int(rec["propagated_score"])))

    models = sorted({m for _, m in predicted})
    results = {}
    for sdg in cfg.sdgs:
        _, test_ids = splits[sdg]
        vec = vectors[sdg]
        results[sdg] = {}
        for m in models:
            preds = predicted.get((sdg, m), {})
            pairs = [(vec.values[c], preds[c]) for c in test_ids if c in preds]
            if not pairs:
                raise DataError(f"no predictions for SDG {sdg} model {m}")
            cm = confusion([t for t, _ in pairs], [p for _, p in pairs])
            results[sdg][m] = (micro_f1(cm), macro_f1(cm))

    csv_text, table = per_sdg_report(results, models=models)
    (cfg.out_dir / "results.csv").write_text(csv_text, encoding="utf-8")
    (cfg.out_dir / "results.txt").write_text(table, encoding="utf-8")
    log.info("evaluate:\n%s", table)
    return cfg.out_dir / "results.csv"


def run_pipeline(cfg):
    """All stages in order on one config."""
    stage_extract_graph(cfg)
    stage_summarize_graph(cfg)
    stage_filter_text(cfg)
    stage_featurize(cfg)
    stage_train(cfg)
    stage_predict(cfg)
    stage_explain(cfg)
    stage_evaluate(cfg)
    return cfg.out_dir
