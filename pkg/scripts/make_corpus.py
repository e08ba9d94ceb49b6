#!/usr/bin/env python3
"""Regenerate the bundled synthetic treebank splits and head-rule table.

The files under data/ are checked in; rerunning this script reproduces them
bit-for-bit (the generator is seeded).
"""

import argparse
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from chartprune.synth import SynthConfig, generate_corpus
from chartprune.trees import write_treebank

HEAD_RULES = """\
S\tleft\tVP S
NP\tleft\tN NP
VP\tleft\tV VP
PP\tleft\tP
SBAR\tleft\tS
"""


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out-dir", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    args = ap.parse_args()

    train, dev, test = generate_corpus(SynthConfig(seed=args.seed))
    os.makedirs(args.out_dir, exist_ok=True)
    for name, split in (("train", train), ("dev", dev), ("test", test)):
        path = os.path.join(args.out_dir, f"synth.{name}.ptb")
        write_treebank(split, path)
        print(f"wrote {len(split)} trees to {path}")
    rules_path = os.path.join(args.out_dir, "head_rules.tsv")
    with open(rules_path, "w", encoding="utf-8") as f:
        f.write(HEAD_RULES)
    print(f"wrote {rules_path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
