#!/usr/bin/env python3
"""Generate the deterministic synthetic survey response set.

Writes responses.jsonl (79 raters by default across E1/E2/E3) plus a JSON file
with the analytic per-method means the histograms were drawn to, so downstream
statistics can be sanity-checked against known ground truth.
"""

import argparse
import json
from pathlib import Path

from outfitgen.evaluation import save_responses
from outfitgen.synthetic import analytic_means, build_synthetic_survey


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="responses.jsonl")
    parser.add_argument("--participants", type=int, default=79)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    responses = build_synthetic_survey(args.participants, seed=args.seed)
    save_responses(responses, args.out)
    means_path = Path(args.out).with_suffix(".means.json")
    means_path.write_text(json.dumps(analytic_means(), indent=2))
    print(f"{len(responses)} responses from {args.participants} participants "
          f"-> {args.out}")
    print(f"analytic means -> {means_path}")


if __name__ == "__main__":
    main()
