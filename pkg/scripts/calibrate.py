"""Measure the regression constants and write the golden files.

Run once after any intentional change to the evaluators:

    python scripts/calibrate.py [--out src/gausssieve/golden]
"""

import argparse
import json
from pathlib import Path

from gausssieve import acceptance as acc
from gausssieve.verify import csv_text


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path,
                    default=Path(__file__).resolve().parents[1] / "src" / "gausssieve" / "golden")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    hux = acc.huxley_reports()
    sq = acc.squares_reports()
    pr = acc.primes_reports()
    constants = {
        "C_hux": acc.max_ratio(hux, "huxley"),
        "C_sq": acc.max_ratio(sq, "thm3"),
        "C_pr": acc.max_ratio(pr, "thm4"),
        "grid": {
            "huxley": {"Q": acc.HUX_Q, "N": acc.HUX_N, "seq": acc.HUX_SEQ},
            "squares": {"Q": acc.SQ_Q, "N": acc.SQ_N, "seq": acc.SQ_SEQ, "epsilon": acc.SQ_EPS},
            "primes": {"Q": acc.PR_Q, "delta": acc.PR_DELTA, "seq": acc.PR_SEQ},
        },
    }
    (args.out / "constants.json").write_text(json.dumps(constants, indent=2) + "\n")
    with open(args.out / "squares.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(sq))
    for k in ("C_hux", "C_sq", "C_pr"):
        print(f"{k} = {constants[k]!r}")


if __name__ == "__main__":
    main()
