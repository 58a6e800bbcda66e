#!/usr/bin/env python3
"""Print detection traces for the showcase states under a trained model."""

import argparse
import math

from entdetect.forest.model import ForestStrategy, load_model
from entdetect.session import anticommutes_with_previous, run_detection
from entdetect.states import dicke_state, gdansk_state


def print_trace(title, trace):
    print(f"== {title}")
    flags = anticommutes_with_previous(trace)
    for step, flag in zip(trace.steps, flags):
        mark = "---" if flag is None else ("true" if flag else "false")
        print(
            f"{step.step:>3} | {step.observable.label:^6} | "
            f"{step.value:+.3f} | {step.running_sum:.3f} | {mark}"
        )
    print(f"-> {trace.final_status.value} after {trace.length} measurements\n")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--model", default="models/forest-3q-seed11.json")
    parser.add_argument("--alpha", type=float, default=37 * math.pi / 64)
    args = parser.parse_args()

    model = load_model(args.model)
    print_trace(
        "one-excitation Dicke state",
        run_detection(ForestStrategy(model), dicke_state(3, 1), 3),
    )
    print_trace(
        "two-excitation Dicke state",
        run_detection(ForestStrategy(model), dicke_state(3, 2), 3),
    )
    print_trace(
        f"interpolated state, alpha={args.alpha:.4f}",
        run_detection(ForestStrategy(model), gdansk_state(args.alpha), 3),
    )


if __name__ == "__main__":
    main()
