#!/usr/bin/env python3
# Copyright 2026 The entl Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the bundled synthetic corpus: 3 events x 4 days x 5 documents.

Output files (in the target directory):
  corpus.jsonl     annotated documents
  events.json      event descriptions with relevant days
  pageviews.tsv    entity_key, day, views
  links.tsv        entity_key, page title
  judgments.tsv    entity_key, event_id, day, grade
  entl.conf        configuration for the CLI
"""

import argparse
import datetime as dt
import json
import os
import random
import re

DAYS = [dt.date(2013, 4, 15) + dt.timedelta(days=i) for i in range(4)]

# Each entity: (label, etype, short reference or None, spelling variant or None)
EVENTS = [
    {
        "event_id": "marathon",
        "query": "boston marathon bombing",
        "category": "accident",
        "words": ["marathon", "bombing", "boston", "bomber", "finish", "line", "runners", "blast"],
        "verbs": ["chased", "identified", "treated", "searched"],
        "filler": ["spectators", "medics", "agents", "volunteers"],
        "entities": [
            ("Dzhokhar Tsarnaev", "PERSON", "Tsarnaev", "Dzhokhar Tsarnayev"),
            ("Tamerlan Tsarnaev", "PERSON", None, None),
            ("Deval Patrick", "PERSON", "Patrick", None),
            ("Boylston Street", "LOCATION", None, None),
            ("Watertown", "LOCATION", None, None),
            ("Federal Bureau of Investigation", "ORGANIZATION", None, "Federal Bureau Investigation"),
            ("Boston Police Department", "ORGANIZATION", None, None),
            ("Massachusetts General Hospital", "ORGANIZATION", None, None),
        ],
        # Focus entities per day index: these dominate coverage and page views.
        "focus": [[3, 2, 7], [5, 2, 3], [0, 1, 5], [0, 4, 6]],
        "relevant_days": None,
    },
    {
        "event_id": "fertilizer",
        "query": "texas fertilizer plant explosion",
        "category": "accident",
        "words": ["fertilizer", "plant", "explosion", "texas", "fire", "ammonium", "blaze", "rescue"],
        "verbs": ["evacuated", "inspected", "extinguished", "mourned"],
        "filler": ["firefighters", "farmers", "inspectors", "neighbors"],
        "entities": [
            ("West Fertilizer Company", "ORGANIZATION", None, None),
            ("Rick Perry", "PERSON", "Perry", None),
            ("Tommy Muska", "PERSON", "Muska", "Tommy Muskaa"),
            ("Waco", "LOCATION", None, None),
            ("West", "LOCATION", None, None),
            ("Chemical Safety Board", "ORGANIZATION", None, None),
            ("Hillcrest Hospital", "ORGANIZATION", None, None),
        ],
        "focus": [[0, 3, 1], [0, 4, 3], [1, 6, 2], [5, 1, 0]],
        "relevant_days": None,
    },
    {
        "event_id": "election",
        "query": "venezuela presidential election",
        "category": "politics",
        "words": ["election", "venezuela", "presidential", "vote", "ballot", "recount", "candidate", "results"],
        "verbs": ["campaigned", "disputed", "proclaimed", "rallied"],
        "filler": ["voters", "supporters", "observers", "diplomats"],
        "entities": [
            ("Nicolas Maduro", "PERSON", "Maduro", "Nicolas Madurro"),
            ("Henrique Capriles", "PERSON", "Capriles", None),
            ("Caracas", "LOCATION", None, None),
            ("National Electoral Council", "ORGANIZATION", None, None),
            ("Hugo Chavez", "PERSON", "Chavez", None),
            ("Organization of American States", "ORGANIZATION", None, None),
        ],
        "focus": [[0, 1, 3], [1, 3, 2], [2, 5, 0], [0, 4, 5]],
        # Day index 2 is judged off-topic, leaving a two-day gap in the timeline.
        "relevant_days": [0, 1, 3],
    },
]



def tokenize(text):
    toks = []
    for m in re.finditer(r"[A-Za-z0-9]+|[^\sA-Za-z0-9]", text):
        w = m.group(0)
        if re.match(r"[A-Za-z0-9]", w):
            pos = "NNP" if w[0].isupper() else ("VBD" if w.endswith("ed") else "NN")
            lemma = w.lower()
            if pos == "NN" and lemma.endswith("s") and len(lemma) > 4 and not lemma.endswith("ss"):
                lemma = lemma[:-1]
            toks.append([w, lemma, pos])
        else:
            toks.append([w, w, "."])
    return toks


def sentence_with(rng, event, parts):
    """parts: list of strings or (entity label) markers as dicts."""
    text, spans = "", []
    for p in parts:
        if text and not text.endswith(" "):
            text += " "
        if isinstance(p, dict):
            spans.append((len(text), len(text) + len(p["surface"]), p))
            text += p["surface"]
        else:
            text += p
    return text.rstrip() + ".", spans


def build(out_dir, seed):
    rng = random.Random(seed)
    docs = []
    judgments = []
    prominence = {}  # (entity_key, day) -> weight
    for ev in EVENTS:
        ents = ev["entities"]
        for di, day in enumerate(DAYS):
            focus = ev["focus"][di]
            for dn in range(5):
                doc_id = f"{ev['event_id']}-{day.isoformat()}-{dn}"
                sentences, mentions = [], []
                chosen = list(focus)
                extra = [i for i in range(len(ents)) if i not in focus]
                chosen.append(rng.choice(extra))
                lead = ents[focus[0]][0]
                title = f"{lead} and the {ev['words'][0]} {ev['words'][1]}"
                n_sent = rng.randint(4, 6)
                for si in range(n_sent):
                    if si == 0:
                        idx = focus[0]
                    elif si < len(chosen) + 1:
                        idx = chosen[(si - 1) % len(chosen)]
                    else:
                        idx = rng.choice(focus)
                    label, etype, short, variant = ents[idx]
                    surface = label
                    if variant and rng.random() < 0.25:
                        surface = variant
                    chain = f"c{idx}"
                    parts = [{"surface": surface, "etype": etype, "chain": chain, "label": label}]
                    parts.append(rng.choice(ev["verbs"]))
                    kws = rng.sample(ev["words"], 3)
                    parts.append("the " + kws[0] + " " + kws[1])
                    parts.append("among the")
                    parts.append(rng.choice(ev["filler"]))
                    if rng.random() < 0.5:
                        other = ents[rng.choice(chosen)]
                        if other[0] != label:
                            parts.append("with")
                            parts.append({"surface": other[0], "etype": other[1], "chain": f"c{ents.index(other)}",
                                          "label": other[0]})
                    parts.append("after the " + kws[2])
                    if short and si > 0 and rng.random() < 0.5:
                        parts.append("and")
                        parts.append({"surface": short, "etype": etype, "chain": chain, "label": label})
                        parts.append("said so")
                    text, spans = sentence_with(rng, ev, parts)
                    sentences.append({"index": si, "text": text, "tokens": tokenize(text)})
                    for s, e, p in spans:
                        mentions.append({
                            "mention_id": f"{doc_id}-m{len(mentions)}",
                            "sentence_index": si,
                            "start": s,
                            "end": e,
                            "surface": p["surface"],
                            "etype": p["etype"],
                            "chain_id": p["chain"],
                            "in_title": p["label"] == lead,
                        })
                        key = p["label"].lower()
                        prominence[(key, day)] = prominence.get((key, day), 0) + 1
                # A mention the ingest filter drops.
                if dn == 0:
                    mentions.append({"mention_id": f"{doc_id}-noise", "sentence_index": 0, "start": 0, "end": 0,
                                     "surface": "...", "etype": "PERSON"})
                docs.append({"doc_id": doc_id, "date": day.isoformat(), "title": title,
                             "sentences": sentences, "mentions": mentions})
            for rank, idx in enumerate(focus):
                judgments.append((ents[idx][0].lower(), ev["event_id"], day, 4 - rank if rank < 2 else 3))
            for idx in range(len(ents)):
                if idx not in focus:
                    judgments.append((ents[idx][0].lower(), ev["event_id"], day, 1 + (idx % 2)))

    with open(os.path.join(out_dir, "corpus.jsonl"), "w") as f:
        for d in docs:
            f.write(json.dumps(d, sort_keys=True) + "\n")

    events = []
    for ev in EVENTS:
        rel = ev["relevant_days"]
        events.append({
            "event_id": ev["event_id"],
            "query": ev["query"],
            "first_day": DAYS[0].isoformat(),
            "last_day": DAYS[-1].isoformat(),
            "category": ev["category"],
            "relevant_days": [DAYS[i].isoformat() for i in (rel if rel is not None else range(len(DAYS)))],
        })
    with open(os.path.join(out_dir, "events.json"), "w") as f:
        json.dump(events, f, indent=1)
        f.write("\n")

    start = DAYS[0] - dt.timedelta(days=14)
    with open(os.path.join(out_dir, "pageviews.tsv"), "w") as pv, open(os.path.join(out_dir, "links.tsv"), "w") as ln:
        for ev in EVENTS:
            for label, _, _, _ in ev["entities"]:
                key = label.lower()
                ln.write(f"{key}\t{label.replace(' ', '_')}\n")
                base = rng.randint(20, 400)
                for k in range(35):
                    day = start + dt.timedelta(days=k)
                    views = int(base * (0.8 + 0.4 * rng.random()))
                    views += 60 * prominence.get((key, day), 0)
                    pv.write(f"{key}\t{day.isoformat()}\t{views}\n")

    with open(os.path.join(out_dir, "judgments.tsv"), "w") as f:
        for key, ev_id, day, grade in judgments:
            f.write(f"{key}\t{ev_id}\t{day.isoformat()}\t{grade}\n")

    with open(os.path.join(out_dir, "entl.conf"), "w") as f:
        f.write("# Configuration for the bundled synthetic corpus. Paths are relative to the\n")
        f.write("# directory the CLI runs in; override any key with the matching flag.\n")
        for k, v in [("corpus", "data/synthetic/corpus.jsonl"), ("events", "data/synthetic/events.json"),
                     ("pageviews", "data/synthetic/pageviews.tsv"), ("links", "data/synthetic/links.tsv"),
                     ("judgments", "data/synthetic/judgments.tsv"), ("work-dir", "entl-work"),
                     ("docs-per-day", 10), ("expand-terms", 30), ("topics", 20), ("vor-window", 10),
                     ("vor-min-median", 12), ("c", 20), ("decay-alpha", 0.5), ("decay-lambda", 2),
                     ("decay-mu", 1), ("pair-margin", 0.5), ("topk", 10), ("mode", "AdaptER"), ("seed", 42)]:
            f.write(f"{k}={v}\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "data", "synthetic"))
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    build(args.out, args.seed)


if __name__ == "__main__":
    main()
