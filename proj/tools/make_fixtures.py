#!/usr/bin/env python3
"""Generate the test fixtures under tests/fixtures.

Expected values are computed here from the planted errors and small
independent oracles (rectangle intersection, Euclidean distance, edit
distance), never by calling the library.

    python3 tools/make_fixtures.py [--out tests/fixtures]
"""

import argparse
import json
import math
import random
from pathlib import Path

TEXT_TARGETS = [
    "Firetube Boiler",
    "Export Volume",
    "Watertube Steam Boiler Assembly",
    "Northern Hemisphere",
    "Quarterly Revenue Breakdown",
    "Mitochondrial Membrane",
    "Suspension Bridge",
    "Average Daily Temperature Range",
]
UNRELATED_TEXT = ["zq", "xv", "kkk", "yy"]


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def text_similarity(a, b):
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein(a, b) / max(len(a), len(b))


def iou(a, b):
    ix = max(0, min(a[2], b[2]) - max(a[0], b[0]))
    iy = max(0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = ix * iy
    area = lambda r: (r[2] - r[0]) * (r[3] - r[1])
    union = area(a) + area(b) - inter
    return inter / union if union > 0 else 0.0


def verifier_examples(out):
    box_t, box_p = [531, 118, 892, 435], [529, 119, 890, 433]
    rows = [
        ("text_verify(target='Export Volume', ignore_space=True, ignore_case=True)",
         "text_verify(predict='Export Volume')", 1.0, 0.0),
        ("expr_verify(target=r'\\frac{4}{6}')", "expr_verify(predict='2/3')", 1.0, 0.0),
        ("time_verify(target='18:15', tformat='%H:%M')",
         "time_verify(predict='18:15', pformat='%H:%M')", 1.0, 0.0),
        ("list_verify(target=['M-30', 'M-31', 'M-31UK'])",
         "list_verify(predict=['M-30', 'M-31'])", 2 / 3, 1e-3),
        ("bbox_verify(target=[[531,118,892,435]])", "bbox_verify(predict=[[529,119,890,433]])",
         iou(box_t, box_p), 1e-3),
        ("point_verify(target=[[591,234]])", "point_verify(predict=[[589,236]])",
         max(0.0, 1 - math.hypot(591 - 589, 234 - 236) / 141.42), 1e-3),
    ]
    with open(out / "verifier_examples.jsonl", "w") as f:
        for ref, credit, expected, tol in rows:
            f.write(json.dumps({"reference": ref, "credit": credit, "expected": expected,
                                "tolerance": tol}) + "\n")


# Rubric layout shared by the GenRM and audit fixtures:
#   0 essential text_verify, 1 essential judge, 2 additional time_verify,
#   3 additional bbox_verify.
DESCRIPTIONS = [
    "Names the labeled component.",
    "Explains why the reading changes.",
    "Gives the time shown on the clock.",
    "Locates the highlighted region.",
]


def make_rubric(t):
    return {
        "essential": [
            {"criterion": DESCRIPTIONS[0], "reference": f"text_verify(target='{t['text']}')",
             "weight": 3},
            {"criterion": DESCRIPTIONS[1], "reference": "The reading rises because demand grows.",
             "weight": 2},
        ],
        "additional": [
            {"criterion": DESCRIPTIONS[2],
             "reference": f"time_verify(target='{t['time']}', tformat='%H:%M')", "weight": 1},
            {"criterion": DESCRIPTIONS[3], "reference": f"bbox_verify(target=[{box_str(t['box'])}])",
             "weight": 1},
        ],
    }


def box_str(b):
    return "[" + ",".join(str(v) for v in b) + "]"


def random_targets(rng):
    h, m = rng.randrange(24), rng.randrange(60)
    x, y = rng.randrange(0, 300), rng.randrange(0, 300)
    return {"text": rng.choice(TEXT_TARGETS), "time": f"{h:02d}:{m:02d}",
            "box": [x, y, x + rng.randrange(20, 200), y + rng.randrange(20, 200)]}


def unrelated(kind, t, rng):
    if kind == "text":
        return rng.choice(UNRELATED_TEXT)
    if kind == "time":
        h, m = map(int, t["time"].split(":"))
        return f"{(h + 5) % 24:02d}:{m:02d}"
    x, y = rng.randrange(600, 800), rng.randrange(600, 800)
    return [x, y, x + 50, y + 50]


KINDS = ["text", None, "time", "box"]


def call_for(kind, value):
    if kind == "text":
        return f"text_verify(predict='{value}')"
    if kind == "time":
        return f"time_verify(predict='{value}', pformat='%H:%M')"
    return f"bbox_verify(predict=[{box_str(value)}])" if value else "bbox_verify(predict=[])"


def score(kind, t, value):
    """Verifier score of `value` against the rubric target."""
    if kind == "text":
        return text_similarity(t["text"], value)
    if kind == "time":
        return 1.0 if value == t["time"] else 0.0
    return iou(t["box"], value) if value else 0.0


def discretize(s):
    return 1.0 if s >= 1.0 else (0.5 if s >= 0.5 else 0.0)


def agreement_ok(kind, label_value, student_value):
    if kind == "text":
        return text_similarity(label_value, student_value) >= 0.95
    if kind == "time":
        return label_value == student_value
    if not label_value or not student_value:
        return label_value == student_value
    return iou(label_value, student_value) >= 0.95


# Label value plans per category: "t" target, "u" unrelated, "e" empty.
# The judge entry is the judge credit.
CATEGORY_PLANS = {
    "regular": ["t", 1.0, "t", "t"],
    "no_final_answer": ["e", 0.0, "t", "e"],
    "irrelevant": ["u", 0.0, "u", "u"],
    "wrong_but_plausible": ["u", 0.5, "t", "u"],
    "adversarial": ["u", 0.0, "u", "t"],
}


def label_values(category, t, rng):
    plan = CATEGORY_PLANS[category]
    values = []
    for k, kind in enumerate(KINDS):
        if kind is None:
            values.append(plan[k])
            continue
        p = plan[k]
        if p == "t":
            values.append(t[kind])
        elif p == "u":
            values.append(unrelated(kind, t, rng))
        else:
            values.append("" if kind == "text" else [])
    return values


def label_json(kind, t, value):
    if kind is None:
        return {"credit": value, "extracted": None}
    return {"credit": discretize(score(kind, t, value)), "extracted": call_for(kind, value)}


def student_record(k, kind, t, label_value, plants, rng):
    """One scoring slot plus the engine score it earns when it pairs."""
    desc = DESCRIPTIONS[k]
    if plants.get("rename") == k:
        desc = desc.rstrip(".") + " precisely."
    slot = plants["slots"].get(k)
    if slot == "swap":
        credit = 1 if kind else "text_verify(predict='x')"
        return {"criterion": desc, "rationale": "", "credit": credit}, 0.0, None
    if slot == "malformed":
        return {"criterion": desc, "rationale": "", "credit": kind_name(kind) + "(predict="}, 0.0, None
    if kind is None:
        credit = label_value
        if slot == "wrong":
            credit = 1.0 if label_value == 0.0 else 0.0
        return ({"criterion": desc, "rationale": "", "credit": num(credit)}, credit, credit)
    value = label_value
    if slot == "wrong":
        value = unrelated(kind, t, rng) if label_value == t[kind] else t[kind]
    elif slot == "near":
        value = label_value[:-1]
    return ({"criterion": desc, "rationale": "", "credit": call_for(kind, value)},
            score(kind, t, value), value)


def kind_name(kind):
    return {"text": "text_verify", "time": "time_verify", "box": "bbox_verify"}[kind]


def num(c):
    return int(c) if c in (0.0, 1.0) else c


def draw_plants(rng, rate):
    plants = {"slots": {}}
    r = rng.random()
    if r < rate * 0.5:
        plants["unparseable"] = True
    elif r < rate:
        plants["drop_last"] = True
    if rng.random() < rate * 0.5:
        plants["rename"] = rng.randrange(4)
    for k, kind in enumerate(KINDS):
        if rng.random() >= rate:
            continue
        options = ["wrong", "swap"] + (["malformed"] if kind else [])
        if kind == "text":
            options.append("near")
        plants["slots"][k] = rng.choice(options)
    return plants


def build_record(idx, category, rng, rate):
    t = random_targets(rng)
    rubric = make_rubric(t)
    values = label_values(category, t, rng)
    labels = [label_json(kind, t, v) for kind, v in zip(KINDS, values)]
    plants = draw_plants(rng, rate)
    if plants["slots"].get(0) == "near" and len(values[0]) < 2:
        del plants["slots"][0]

    slots, engine, student_values = [], [], []
    for k, kind in enumerate(KINDS):
        rec, s, v = student_record(k, kind, t, values[k], plants, rng)
        slots.append(rec)
        engine.append(s)
        student_values.append(v)
    if plants.get("drop_last"):
        slots = slots[:3]
    output = {"thought": "", "essential": slots[:2], "additional": slots[2:]}
    raw = json.dumps(output)
    if plants.get("unparseable"):
        raw = raw[: len(raw) // 2]

    # Expected outcomes, slot by slot.
    parsed = not plants.get("unparseable")
    present = [parsed and not (plants.get("drop_last") and k == 3) for k in range(4)]
    routed = [present[k] and plants["slots"].get(k) not in ("swap", "malformed") for k in range(4)]
    ok = [routed[k] and plants.get("rename") != k for k in range(4)]
    correct = []
    for k, kind in enumerate(KINDS):
        if not ok[k]:
            correct.append(False)
        elif kind is None:
            correct.append(student_values[k] == values[k])
        else:
            correct.append(agreement_ok(kind, values[k], student_values[k]))
    engine = [engine[k] if ok[k] else 0.0 for k in range(4)]
    strict_ok = parsed and not plants.get("drop_last") and all(ok)
    record = {
        "id": f"{category}-{idx:04d}",
        "category": category,
        "rubric": rubric,
        "response": "See the figure for details.",
        "labels": labels,
        "genrm_output": raw,
    }
    expect = {
        "schema": parsed,
        "criterion": parsed and not plants.get("drop_last") and "rename" not in plants,
        "routed": routed,
        "correct": correct,
        "engine": engine,
        "label_credit": [l["credit"] for l in labels],
        "format": 1 if strict_ok else 0,
        "content": (sum(correct) / 4) if strict_ok else 0.0,
        "plants": {**{k: v for k, v in plants.items() if k != "slots"},
                   "slots": {str(k): v for k, v in plants["slots"].items()}},
    }
    return record, expect


def pct(hits, total):
    return None if total == 0 else 100.0 * hits / total


def genrm_fixture(out, rng):
    records, manifest = [], []
    cats = list(CATEGORY_PLANS)
    for i in range(50):
        rec, exp = build_record(i, cats[i % len(cats)], rng, rate=0.15)
        records.append(rec)
        manifest.append({"id": rec["id"], "format": exp["format"], "content": exp["content"],
                         "plants": exp["plants"]})
    write_jsonl(out / "genrm_records.jsonl", records)
    (out / "genrm_manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


def audit_fixture(out, rng, fp_threshold=0.5):
    counts = {"regular": 120, "no_final_answer": 70, "irrelevant": 70,
              "wrong_but_plausible": 70, "adversarial": 70}
    records, expects = [], []
    for category, n in counts.items():
        for i in range(n):
            rec, exp = build_record(i, category, rng, rate=0.12)
            records.append(rec)
            expects.append((category, exp))
    rng.shuffle(records)

    tally = {k: [0, 0] for k in ["schema", "criterion", "execution", "execution_per_record",
                                 "argument", "credit", "criterion_level", "sample_level"]}

    def add(key, hit):
        tally[key][0] += int(hit)
        tally[key][1] += 1

    fpr = {}
    for category, e in expects:
        add("schema", e["schema"])
        add("criterion", e["criterion"])
        for k, kind in enumerate(KINDS):
            add("execution", e["routed"][k])
            add("argument" if kind else "credit", e["correct"][k])
            add("criterion_level", e["correct"][k])
        add("execution_per_record", all(e["routed"]))
        add("sample_level", all(e["correct"]))
        if category == "regular":
            continue
        cell = fpr.setdefault(category, {"average": [0, 0], "arguments": [0, 0], "credit": [0, 0]})
        for k, kind in enumerate(KINDS):
            if e["label_credit"][k] != 0.0:
                continue
            hit = int(e["engine"][k] >= fp_threshold)
            for key in ("average", "arguments" if kind else "credit"):
                cell[key][0] += hit
                cell[key][1] += 1

    manifest = {
        "records": len(records),
        "fp_threshold": fp_threshold,
        "accuracy": {k: {"hits": h, "total": t, "percent": pct(h, t)} for k, (h, t) in tally.items()},
        "fpr": {c: {k: {"hits": h, "total": t, "percent": pct(h, t)} for k, (h, t) in cell.items()}
                for c, cell in fpr.items()},
    }
    write_jsonl(out / "audit_records.jsonl", records)
    (out / "audit_manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")


def corpus_fixture(out, rng):
    """Scoring corpus for the exposure audit: every verifier plus judge items."""
    rows = []
    for i in range(120):
        t = random_targets(rng)
        px, py = rng.randrange(1000), rng.randrange(1000)
        items = rng.sample(["Brake Caliper", "Torque Converter", "Heat Exchanger"], 2)
        option = rng.choice("ABCD")
        rubric = make_rubric(t)
        rubric["essential"].append({
            "criterion": "Selects the correct option.",
            "reference": f"expr_verify(target='{option}')", "weight": 3})
        rubric["additional"] += [
            {"criterion": "Marks the center of the gauge.",
             "reference": f"point_verify(target=[[{px},{py}]])", "weight": 1},
            {"criterion": "Lists the visible parts.",
             "reference": f"list_verify(target=['{items[0]}', '{items[1]}'])", "weight": 1},
        ]
        # Some responses state the answers; the scan must not count those.
        if i % 3 == 0:
            response = f"The part is the {t['text']} and the answer is ({option})."
        else:
            response = "The figure shows a mechanical assembly; the answer is unclear."
        rows.append({
            "id": f"corpus-{i:04d}",
            "prompt": "Answer the question about the pictured equipment.",
            "image_ref": f"img://fixtures/corpus/{i:04d}-{rng.randrange(16**8):08x}.png",
            "response": response,
            "response_length": len(response.split()),
            "rubric": rubric,
        })
    write_jsonl(out / "scoring_corpus.jsonl", rows)


def groups_fixture(out, rng):
    """Rollout groups in the aggregate input format, for cross-checking the
    bindings against the command-line tool."""
    loop = "I will restate the answer to be sure of it. " * 30
    rows = []
    for i in range(30):
        t = random_targets(rng)
        g = rng.choice([2, 4, 4, 8])
        rollouts = []
        for _ in range(g):
            slots = []
            for k, kind in enumerate(KINDS):
                roll = rng.random()
                if kind is None:
                    credit = rng.choice([0, 0.5, 1, 1])
                    slots.append({"criterion": DESCRIPTIONS[k], "rationale": "", "credit": credit})
                    continue
                if roll < 0.5:
                    value = t[kind]
                elif roll < 0.7 and kind == "text":
                    value = t[kind][:-2]
                elif roll < 0.7 and kind == "box":
                    b = t[kind]
                    value = [b[0] + 3, b[1] - 2, b[2] + 5, b[3]]
                else:
                    value = unrelated(kind, t, rng)
                credit = call_for(kind, value)
                if roll > 0.97:
                    credit = 1  # wrong path, scored 0 by lenient pairing
                slots.append({"criterion": DESCRIPTIONS[k], "rationale": "", "credit": credit})
            response = loop if rng.random() < 0.1 else "The answer is given in the final line."
            rollouts.append({
                "scoring": {"thought": "", "essential": slots[:2], "additional": slots[2:]},
                "response": response,
                "response_length": rng.choice([120, 800, 2500, 7000]),
            })
        rows.append({"id": f"group-{i:03d}", "rubric": make_rubric(t), "rollouts": rollouts})
    write_jsonl(out / "groups.jsonl", rows)


def write_jsonl(path, rows):
    with open(path, "w") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "tests" / "fixtures"))
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = random.Random(args.seed)
    verifier_examples(out)
    genrm_fixture(out, rng)
    audit_fixture(out, rng)
    corpus_fixture(out, rng)
    groups_fixture(out, rng)


if __name__ == "__main__":
    main()
