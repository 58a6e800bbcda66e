#!/usr/bin/env python3
"""Accessible-source comparison of the three strategies, CSV per qubit count.

Requires trained models (see train_models.py). Writes one
cumulative-detections CSV per qubit count plus a text summary.
"""

import argparse
import time
from pathlib import Path

import numpy as np

from entdetect.bench import (
    bayes_factory,
    forest_factory,
    run_benchmark,
    tree_factory,
)
from entdetect.forest.model import load_model
from entdetect.sources import accessible_source


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--models-dir", default="models")
    parser.add_argument("--out-dir", default="results")
    parser.add_argument("--qubits", type=int, nargs="+", default=[2, 3])
    parser.add_argument("--states", type=int, default=200)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--model-seed", type=int, default=11)
    parser.add_argument("--particles", type=int, default=2000)
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for n in args.qubits:
        model_path = Path(args.models_dir) / f"forest-{n}q-seed{args.model_seed}.json"
        model = load_model(model_path)
        rng = np.random.default_rng(args.seed)
        source = accessible_source(n, rng)
        t0 = time.time()
        result = run_benchmark(
            source,
            {
                "forest": forest_factory(model),
                "tree": tree_factory(),
                "bayes": bayes_factory(n_particles=args.particles),
            },
            n_states=args.states,
            seed=args.seed,
            config={"source": "accessible", "qubits": n, "seed": args.seed},
        )
        out = out_dir / f"access{n}.csv"
        result.to_csv(out)
        print(f"== {n} qubits ({args.states} states, {time.time() - t0:.0f}s)")
        print(result.summary())
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
