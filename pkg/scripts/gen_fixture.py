#!/usr/bin/env python3
"""Generate the bundled synthetic demo fixture.

Thirty invented companies across six sectors, with a small typed knowledge
graph, per-company report/wikipedia/news records, and alignment labels for
SDG 7 and SDG 13. Everything is derived from the seed, so re-running the
script rewrites identical files. The checked-in copy under fixtures/demo
was produced with the defaults.
"""

import argparse
import hashlib
import json
from pathlib import Path

import numpy as np

SECTORS = {
    "renewables": ["solara-grid", "nordwind-energi", "helios-pv",
                   "tidal-core", "aeolus-power"],
    "fossil": ["brancoal-mining", "petrovia-oil", "lignite-baltic",
               "gasnord", "darkfuel-refining"],
    "food": ["verdant-farms", "grainhaus", "aquaponic-fields",
             "dairylight", "pomona-orchards"],
    "health": ["medicura", "biopharm-atlas", "clinova", "vitalab",
               "herzklinik"],
    "water": ["aquapura", "blueflow-utilities", "hydrovest",
              "cleanstream", "delta-water"],
    "manufacturing": ["sgl-carbon", "steelwerk-ruhr", "polymetal-forge",
                      "cementia", "fibertex-mills"],
}

NAMES = {
    "solara-grid": "Solara Grid AS", "nordwind-energi": "Nordwind Energi ASA",
    "helios-pv": "Helios PV SE", "tidal-core": "Tidal Core BV",
    "aeolus-power": "Aeolus Power SA", "brancoal-mining": "Brancoal Mining AG",
    "petrovia-oil": "Petrovia Oil NV", "lignite-baltic": "Lignite Baltic AS",
    "gasnord": "Gasnord ASA", "darkfuel-refining": "Darkfuel Refining BV",
    "verdant-farms": "Verdant Farms BV", "grainhaus": "Grainhaus AG",
    "aquaponic-fields": "Aquaponic Fields AS", "dairylight": "Dairylight SA",
    "pomona-orchards": "Pomona Orchards SE", "medicura": "Medicura AG",
    "biopharm-atlas": "Biopharm Atlas NV", "clinova": "Clinova SE",
    "vitalab": "Vitalab AS", "herzklinik": "Herzklinik AG",
    "aquapura": "Aquapura SA", "blueflow-utilities": "Blueflow Utilities NV",
    "hydrovest": "Hydrovest ASA", "cleanstream": "Cleanstream SE",
    "delta-water": "Delta Water BV", "sgl-carbon": "SGL Carbon SE",
    "steelwerk-ruhr": "Steelwerk Ruhr AG", "polymetal-forge": "Polymetal Forge AS",
    "cementia": "Cementia SA", "fibertex-mills": "Fibertex Mills NV",
}

COUNTRIES = ["norway", "germany", "spain", "denmark", "netherlands"]

PRODUCTS = {
    "renewables": ["wind-turbines", "solar-panels"],
    "fossil": ["coal", "crude-oil"],
    "food": ["grain", "fresh-produce"],
    "health": ["pharmaceuticals", "diagnostics"],
    "water": ["drinking-water", "wastewater-treatment"],
    "manufacturing": ["carbon-fiber", "steel", "cement"],
}

# One unlabeled company per sector; scores cover every class in -3..3.
LABELS = {
    7: {"solara-grid": 3, "nordwind-energi": 3, "helios-pv": 2,
        "tidal-core": 2, "brancoal-mining": -3, "petrovia-oil": -3,
        "lignite-baltic": -2, "gasnord": -1, "verdant-farms": 1,
        "grainhaus": 0, "aquaponic-fields": 1, "dairylight": 0,
        "medicura": 0, "biopharm-atlas": 0, "clinova": 1, "vitalab": -1,
        "aquapura": 1, "blueflow-utilities": 2, "hydrovest": 1,
        "cleanstream": 2, "sgl-carbon": 1, "steelwerk-ruhr": -2,
        "polymetal-forge": -1, "cementia": -2},
    13: {"solara-grid": 3, "nordwind-energi": 2, "helios-pv": 3,
         "tidal-core": 2, "brancoal-mining": -3, "petrovia-oil": -2,
         "lignite-baltic": -3, "gasnord": -2, "verdant-farms": 1,
         "grainhaus": -1, "aquaponic-fields": 2, "dairylight": 0,
         "medicura": 0, "biopharm-atlas": 1, "clinova": 0, "vitalab": 0,
         "aquapura": 1, "blueflow-utilities": 1, "hydrovest": 0,
         "cleanstream": 1, "sgl-carbon": -1, "steelwerk-ruhr": -2,
         "polymetal-forge": -1, "cementia": -3},
}

# Phrases reusing goal-statement words so the lexical gate accepts them.
SDG7_POSITIVE = [
    "{name} expanded access to affordable and reliable energy through new "
    "{product} capacity, a sustainable and modern energy milestone.",
    "The board of {name} approved further investment in sustainable modern "
    "energy so that affordable and reliable access keeps growing.",
]
SDG7_NEGATIVE = [
    "{name} kept most generation on {product}, leaving affordable reliable "
    "sustainable energy access behind its modern energy peers.",
    "Regulators criticised {name} because its {product} portfolio slows "
    "access to affordable, reliable and sustainable modern energy.",
]
SDG7_NEUTRAL = [
    "{name} reviewed how affordable, reliable, sustainable and modern "
    "energy access could fit its {product} operations.",
]
SDG13_POSITIVE = [
    "{name} took urgent action to combat climate change, cutting the "
    "impacts of its {product} operations.",
    "Urgent climate action at {name} reduced change impacts across the "
    "{product} supply chain.",
]
SDG13_NEGATIVE = [
    "{name} postponed urgent action on climate change while the impacts "
    "of its {product} output kept rising.",
    "Analysts flagged {name} for weak climate action as change impacts "
    "from {product} grew more urgent.",
]
SDG13_NEUTRAL = [
    "{name} studied what urgent climate change action would mean for the "
    "impacts of its {product} line.",
]
FILLER = [
    "{name} reported stable quarterly revenue and kept headcount flat.",
    "The supervisory board of {name} met four times during the year.",
    "{name} renewed its logistics contracts on standard market terms.",
    "Customers rated {name} service quality as good in the annual survey.",
]

HEADLINE_GOOD = [
    "{name} wins award for clean energy transition",
    "{name} pledges faster emissions cuts",
    "{name} opens new sustainable plant",
    "Investors praise {name} climate roadmap",
]
HEADLINE_BAD = [
    "{name} fined over environmental breach",
    "Protests target {name} expansion plans",
    "{name} quarterly profit slumps",
    "Regulator probes {name} reporting",
]


def polarity(score):
    if score > 0:
        return "positive"
    if score < 0:
        return "negative"
    return "neutral"


def evidence_sentences(cid, rng):
    """Report text: per-SDG evidence matching the label sign, plus filler."""
    name = NAMES[cid]
    sector = next(s for s, members in SECTORS.items() if cid in members)
    product = PRODUCTS[sector][0].replace("-", " ")
    banks = {
        7: {"positive": SDG7_POSITIVE, "negative": SDG7_NEGATIVE,
            "neutral": SDG7_NEUTRAL},
        13: {"positive": SDG13_POSITIVE, "negative": SDG13_NEGATIVE,
             "neutral": SDG13_NEUTRAL},
    }
    sentences = []
    for sdg in (7, 13):
        score = LABELS[sdg].get(cid, 0)
        bank = banks[sdg][polarity(score)]
        picks = 1 + min(abs(score), len(bank) - 1)
        for i in range(picks):
            sentences.append(bank[i % len(bank)].format(name=name,
                                                        product=product))
    for i in rng.choice(len(FILLER), size=2, replace=False):
        sentences.append(FILLER[i].format(name=name))
    order = rng.permutation(len(sentences))
    return [sentences[i] for i in order]


def wiki_text(cid):
    name = NAMES[cid]
    sector = next(s for s, members in SECTORS.items() if cid in members)
    product = PRODUCTS[sector][0].replace("-", " ")
    if cid == "sgl-carbon":
        return (f"{name} is one of the worlds leading manufacturers of "
                "carbon based products. The group develops carbon fiber "
                "materials for industrial customers across Europe.")
    return (f"{name} is a {sector} company supplying {product}. "
            f"It serves industrial and retail customers across Europe.")


def news_records(cid, rng):
    name = NAMES[cid]
    n_good = int(rng.integers(2, 4))
    n_bad = int(rng.integers(2, 4))
    records = []
    for i in range(n_good):
        records.append({
            "headline": HEADLINE_GOOD[i % len(HEADLINE_GOOD)].format(name=name),
            "sentiment": round(float(rng.uniform(0.3, 0.9)), 2),
            "magnitude": round(float(rng.uniform(0.5, 2.5)), 2),
            "mention_count": int(rng.integers(1, 9)),
            "published": f"2021-{int(rng.integers(1, 13)):02d}-"
                         f"{int(rng.integers(1, 28)):02d}",
        })
    for i in range(n_bad):
        records.append({
            "headline": HEADLINE_BAD[i % len(HEADLINE_BAD)].format(name=name),
            "sentiment": round(float(rng.uniform(-0.9, -0.2)), 2),
            "magnitude": round(float(rng.uniform(0.5, 2.5)), 2),
            "mention_count": int(rng.integers(1, 9)),
            "published": f"2021-{int(rng.integers(1, 13)):02d}-"
                         f"{int(rng.integers(1, 28)):02d}",
        })
    # An exact duplicate of the first headline, and one article outside the
    # pipeline year; dedup and the year filter must drop them.
    records.append(dict(records[0]))
    records.append({
        "headline": f"{name} archive story from earlier years",
        "sentiment": 0.1, "magnitude": 1.0, "mention_count": 2,
        "published": "2019-06-15",
    })
    return records


def build_edges():
    edges = []
    country_of = {}
    for i, (sector, members) in enumerate(sorted(SECTORS.items())):
        for j, cid in enumerate(members):
            ent = f"ent-{cid}"
            country = COUNTRIES[(i + j) % len(COUNTRIES)]
            country_of[cid] = country
            edges.append((ent, "industry", f"sector-{sector}"))
            edges.append((ent, "country", f"country-{country}"))
            for k, product in enumerate(PRODUCTS[sector]):
                if (j + k) % 2 == 0 or len(PRODUCTS[sector]) == 2:
                    edges.append((ent, "produces", f"product-{product}"))
    suppliers = [
        ("steelwerk-ruhr", "nordwind-energi"), ("sgl-carbon", "helios-pv"),
        ("polymetal-forge", "tidal-core"), ("brancoal-mining", "steelwerk-ruhr"),
        ("grainhaus", "dairylight"), ("aquapura", "verdant-farms"),
        ("gasnord", "cementia"), ("cementia", "hydrovest"),
    ]
    for a, b in suppliers:
        edges.append((f"ent-{a}", "supplier-of", f"ent-{b}"))
    partners = [
        ("solara-grid", "blueflow-utilities"), ("medicura", "vitalab"),
        ("tidal-core", "cleanstream"), ("biopharm-atlas", "clinova"),
        ("verdant-farms", "pomona-orchards"), ("helios-pv", "aeolus-power"),
    ]
    for a, b in partners:
        edges.append((f"ent-{a}", "partner-of", f"ent-{b}"))
    return edges, country_of


def write_jsonl(path, records):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="fixtures/demo", help="fixture directory")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)

    edges, country_of = build_edges()
    with open(out / "edges.tsv", "w", encoding="utf-8") as fh:
        fh.write("# subject<TAB>relation<TAB>object\n")
        for s, r, o in edges:
            fh.write(f"{s}\t{r}\t{o}\n")

    ids = sorted(NAMES)
    with open(out / "companies.csv", "w", encoding="utf-8") as fh:
        fh.write("id,name,kg_entity,sector\n")
        for cid in ids:
            sector = next(s for s, m in SECTORS.items() if cid in m)
            fh.write(f"{cid},{NAMES[cid]},ent-{cid},{sector}\n")

    with open(out / "labels.csv", "w", encoding="utf-8") as fh:
        fh.write("company_id,sdg,score\n")
        for sdg in sorted(LABELS):
            for cid in sorted(LABELS[sdg]):
                fh.write(f"{cid},{sdg},{LABELS[sdg][cid]}\n")

    for cid in ids:
        sentences = evidence_sentences(cid, rng)
        cut = max(2, len(sentences) - 2)
        write_jsonl(out / "reports" / f"{cid}.jsonl", [
            {"source": "report", "text": " ".join(sentences[:cut]),
             "uri": f"https://example.org/reports/{cid}.pdf",
             "retrieved_at": "2021-11-02"},
            {"source": "web", "text": " ".join(sentences[cut:]),
             "uri": f"https://example.org/sustainability/{cid}.html",
             "retrieved_at": "2021-11-03"},
        ])
        write_jsonl(out / "wikipedia" / f"{cid}.jsonl", [
            {"text": wiki_text(cid),
             "uri": f"https://en.wikipedia.org/wiki/{NAMES[cid].replace(' ', '_')}",
             "retrieved_at": "2021-11-01"},
        ])
        write_jsonl(out / "news" / f"{cid}.jsonl", news_records(cid, rng))

    entities = sorted({e for s, _, o in edges for e in (s, o)})
    relations = sorted({r for _, r, _ in edges})
    manifest = {
        "seed": args.seed,
        "companies": len(ids),
        "kg_nodes": len(entities),
        "kg_edges": len(edges),
        "relation_types": len(relations),
        "countries": {cid: country_of[cid] for cid in ids},
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    digest = hashlib.sha256()
    for path in sorted(out.rglob("*")):
        if path.is_file() and path.name != "manifest.json":
            digest.update(path.read_bytes())
    print(f"wrote {len(ids)} companies, {len(edges)} edges, "
          f"{len(relations)} relations to {out} (sha256 {digest.hexdigest()[:12]})")


if __name__ == "__main__":
    main()
