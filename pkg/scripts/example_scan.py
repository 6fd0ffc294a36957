"""Dyadic Q scan for square moduli, printed as CSV.

Usage: python3 scripts/example_scan.py [N]
"""

import sys

from gausssieve.verify import csv_text, run_experiment


def main(N: int = 256) -> None:
    reports = [run_experiment("squares", Q, N, "random_phase", seed, ["thm3", "huxley"])
               for Q in (2, 4, 8, 16) for seed in range(2)]
    sys.stdout.write(csv_text(reports))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 256)
