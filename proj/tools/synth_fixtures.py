#!/usr/bin/env python3
"""Generate the offline replay corpus under fixtures/.

The corpus mimics Semantic Scholar Graph API responses: one JSON body per
recorded request, named {endpoint}_{corpusid}_{offset}_{limit}.json, plus a
manifest.json listing every recording. Output is deterministic.

Hub papers used by the tests:
  9999  12 references, 200 citations
  1001  3 references (plus one reference without a CorpusID), 0 citations
  3000  1 reference, 7 citations (3001..3007)
  4000  6 references with citation counts {10,200,5,50,70,1}
"""

import argparse
import hashlib
import json
import random
from pathlib import Path

WORDS = [
    "incremental", "citation", "graph", "exploration", "visual", "analytics",
    "scalable", "network", "literature", "sensemaking", "interactive", "neural",
    "embedding", "layout", "force-directed", "ranking", "retrieval", "semantic",
    "scholarly", "corpus", "browsing", "associative", "discovery", "adaptive",
    "robust", "sparse", "temporal", "hierarchical", "summarization", "provenance",
]
NAMES = [
    "Ada Park", "Ben Ito", "Chloé Durand", "Dmitri Volkov", "Eun-ji Kim",
    "Farah Haddad", "Gustavo Lima", "Hana Sato", "Ibrahim Okafor", "Jana Nováková",
    "Kai Müller", "Lina Svensson", "Mateo García", "Nadia Rahman", "Oskar Berg",
    "Priya Nair", "Quentin Roux", "Rosa Ortiz", "Søren Dahl", "Tomás Ruiz",
]
VENUES = ["IEEE VIS", "CHI", "KDD", "WWW", "SIGIR", "JCDL", "EuroVis", ""]

PAPER_FIELDS = ("paperId", "corpusId", "externalIds", "url", "title", "abstract",
                "venue", "year", "citationCount", "authors")


def paper_id(corpus_id):
    return hashlib.sha1(f"paper-{corpus_id}".encode()).hexdigest()


def build_graph(rng):
    refs = {}  # citing -> ordered list of cited

    def cite(src, dst):
        refs.setdefault(src, [])
        if dst not in refs[src] and src != dst:
            refs[src].append(dst)

    hub_refs = list(range(10001, 10013))
    for r in hub_refs:
        cite(9999, r)
    citing = list(range(20001, 20201))
    for c in citing:
        cite(c, 9999)
        for r in rng.sample(hub_refs, rng.randint(0, 2)):
            cite(c, r)
    for i, r in enumerate(hub_refs[:-1]):
        if i % 3 == 0:
            cite(r, hub_refs[i + 1])

    for r in (10013, 10014, 10015):
        cite(1001, r)

    cite(3000, 10013)
    for c in range(3001, 3008):
        cite(c, 3000)

    for r in range(4001, 4007):
        cite(4000, r)
    return refs


def make_papers(rng, refs):
    ids = set(refs)
    for targets in refs.values():
        ids.update(targets)
    papers = {}
    fixed_counts = {4001: 10, 4002: 200, 4003: 5, 4004: 50, 4005: 70, 4006: 1}
    fixed_years = {4001: 2015, 4002: 2019, 4003: 2019, 4004: 2001, 4005: 2020, 4006: 2010}
    for cid in sorted(ids):
        words = rng.sample(WORDS, rng.randint(3, 6))
        title = " ".join(words).capitalize()
        if cid == 9999:
            title = "Argo-style incremental exploration of citation networks"
        n_authors = rng.randint(1, 4)
        authors = [{"authorId": str(100000 + rng.randint(0, 99999)), "name": n}
                   for n in rng.sample(NAMES, n_authors)]
        abstract = None
        if rng.random() < 0.8:
            abstract = ("We study " + " ".join(rng.sample(WORDS, 8)) +
                        ". Results on “real” corpora show gains of " +
                        f"{rng.randint(2, 40)}%.")
        year = fixed_years.get(cid, rng.randint(1995, 2021) if rng.random() < 0.95 else None)
        count = fixed_counts.get(cid, rng.randint(0, 5000))
        papers[cid] = {
            "paperId": paper_id(cid),
            "corpusId": cid,
            "externalIds": {"CorpusId": cid},
            "url": f"https://www.semanticscholar.org/paper/{paper_id(cid)}",
            "title": title,
            "abstract": abstract,
            "venue": rng.choice(VENUES),
            "year": year,
            "citationCount": count,
            "authors": authors,
        }
    return papers


def summary(p):
    return {"paperId": p["paperId"], "corpusId": p["corpusId"], "title": p["title"],
            "year": p["year"], "citationCount": p["citationCount"]}


def unlisted_summary():
    # S2 returns linked papers outside the corpus with a null corpusId.
    return {"paperId": None, "corpusId": None, "title": "Unresolved reference",
            "year": None, "citationCount": None}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "fixtures"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for old in out.glob("*.json"):
        old.unlink()

    rng = random.Random(2021)
    refs = build_graph(rng)
    papers = make_papers(rng, refs)
    cits = {cid: [] for cid in papers}
    for src in sorted(refs):
        for dst in refs[src]:
            cits[dst].append(src)

    linked = {}
    for cid in papers:
        r = [summary(papers[x]) for x in refs.get(cid, [])]
        if cid == 1001:
            r.insert(1, unlisted_summary())
        linked[(cid, "references")] = r
        linked[(cid, "citations")] = [summary(papers[x]) for x in cits[cid]]

    recordings = []

    def record(endpoint, cid, offset, limit, body):
        name = f"{endpoint}_{cid}_{offset}_{limit}.json"
        (out / name).write_text(json.dumps(body, ensure_ascii=False, indent=1) + "\n",
                                encoding="utf-8")
        recordings.append({"endpoint": endpoint, "corpus_id": cid, "offset": offset,
                           "limit": limit, "status": 200, "file": name})

    for cid, p in sorted(papers.items()):
        body = {k: p[k] for k in PAPER_FIELDS}
        body["references"] = linked[(cid, "references")]
        body["citations"] = linked[(cid, "citations")]
        record("paper", cid, 0, 0, body)
        for endpoint, key in (("references", "citedPaper"), ("citations", "citingPaper")):
            items = linked[(cid, endpoint)]
            for limit in (5, 50):
                offset = 0
                while True:
                    page = items[offset:offset + limit]
                    body = {"offset": offset, "data": [{key: s} for s in page]}
                    if offset + limit < len(items):
                        body["next"] = offset + limit
                    record(endpoint, cid, offset, limit, body)
                    offset += limit
                    if offset >= len(items):
                        break

    manifest = {"version": 1, "source": "synthetic", "recordings": recordings}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    print(f"wrote {len(recordings)} recordings for {len(papers)} papers to {out}")


if __name__ == "__main__":
    main()
