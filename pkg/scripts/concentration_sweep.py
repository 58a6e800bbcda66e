#!/usr/bin/env python3
"""Tail fractions of squared correlations for two to five qubits."""

import argparse

from entdetect.bench import concentration_csv, concentration_table, concentration_text


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--epsilon", type=float, default=0.2)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-qubits", type=int, default=5)
    parser.add_argument("--out", default=None)
    args = parser.parse_args()

    reports = concentration_table(
        range(2, args.max_qubits + 1), args.samples, args.epsilon, args.seed
    )
    print(concentration_text(reports))
    if args.out:
        concentration_csv(reports, args.out)
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
