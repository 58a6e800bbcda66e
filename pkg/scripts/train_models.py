#!/usr/bin/env python3
"""Train the default two- and three-qubit forest models into models/."""

import argparse
import time
from pathlib import Path

from entdetect.forest.model import ForestConfig, save_model, train_model


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="models")
    parser.add_argument("--seed", type=int, default=11)
    parser.add_argument("--qubits", type=int, nargs="+", default=[2, 3])
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for n in args.qubits:
        t0 = time.time()
        model = train_model(n, ForestConfig(seed=args.seed))
        path = out_dir / f"forest-{n}q-seed{args.seed}.json"
        save_model(model, path)
        oob = model.metadata["oob_error"]
        mean_oob = sum(oob.values()) / len(oob)
        print(
            f"{path}: {3**n} forests in {time.time() - t0:.0f}s, "
            f"mean oob error {mean_oob:.4f}"
        )


if __name__ == "__main__":
    main()
