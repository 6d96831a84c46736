#!/usr/bin/env python3
"""Convert the OPP-115 release into the privcomp policy corpus format.

Reads sanitized_policies/<n>_<domain>.html (segments separated by "|||") and,
when present, annotations/<n>_<domain>.csv to label each segment with its most
frequent data-practice category.  With --category-map (rows
`category,article`) a ground-truth file is written as well.

    tools/opp115_to_corpus.py OPP-115/ -o opp115.txt --truth opp115_truth.csv \
        --category-map categories.csv
"""

import argparse
import collections
import csv
import html
import pathlib
import re
import sys

TAG = re.compile(r"<[^>]+>")
SPACE = re.compile(r"\s+")
SLUG_CHARS = re.compile(r"[^a-z0-9._-]")


def clean(fragment):
    text = html.unescape(TAG.sub(" ", fragment))
    text = SPACE.sub(" ", text).strip()
    return text.lstrip("#").strip()


def slug(domain):
    s = SLUG_CHARS.sub("-", domain.lower()).strip("-._")
    return s or "policy"


def segment_categories(path):
    votes = collections.defaultdict(collections.Counter)
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.reader(f):
            if len(row) < 6:
                continue
            try:
                seg = int(row[4])
            except ValueError:
                continue
            votes[seg][row[5].strip()] += 1
    # Most votes wins; ties go to the alphabetically first category.
    return {
        seg: sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
        for seg, c in votes.items()
    }


def label(category):
    return re.sub(r"[^a-z0-9]+", "_", category.lower()).strip("_") or None


def load_category_map(path):
    mapping = collections.defaultdict(set)
    with open(path, newline="", encoding="utf-8") as f:
        for row in csv.reader(f):
            if not row or row[0].startswith("#"):
                continue
            mapping[label(row[0])].add(int(row[1]))
    return mapping


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("root", type=pathlib.Path, help="unpacked OPP-115 directory")
    ap.add_argument("-o", "--out", type=pathlib.Path, required=True)
    ap.add_argument("--truth", type=pathlib.Path)
    ap.add_argument("--category-map", type=pathlib.Path)
    args = ap.parse_args(argv)
    if args.truth and not args.category_map:
        ap.error("--truth needs --category-map")

    policies = sorted((args.root / "sanitized_policies").glob("*.html"))
    if not policies:
        sys.exit(f"no sanitized_policies/*.html under {args.root}")
    mapping = load_category_map(args.category_map) if args.category_map else {}

    seen = set()
    corpus, truth = [], []
    for path in policies:
        number, _, domain = path.stem.partition("_")
        pid = slug(domain or number)
        if pid in seen:
            pid = f"{pid}-{number}"
        seen.add(pid)
        ann = args.root / "annotations" / f"{path.stem}.csv"
        cats = segment_categories(ann) if ann.exists() else {}

        body = []
        raw = path.read_text(encoding="utf-8", errors="replace").split("|||")
        for i, fragment in enumerate(raw):
            text = clean(fragment)
            if not text:
                continue
            cat = label(cats[i]) if i in cats else None
            body.append(f"#SEG s{i}" + (f" {cat}" if cat else ""))
            body.append(text)
            for article in sorted(mapping.get(cat, ())):
                truth.append(f"{pid},s{i},{article}")
        if body:
            corpus.append(f"#PROVIDER {pid} {domain or pid}")
            corpus.extend(body)
            corpus.append("")

    args.out.write_text("\n".join(corpus), encoding="utf-8")
    if args.truth:
        args.truth.write_text("\n".join(truth) + "\n", encoding="utf-8")
    print(f"providers {len(seen)} written to {args.out}", file=sys.stderr)


if __name__ == "__main__":
    main()
