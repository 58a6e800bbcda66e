"""Command-line entry points: train, detect, bench, concentration, serve.

Exit codes: 0 success, 1 user error (bad flags, missing files, invalid
config), 2 internal error.
"""

from __future__ import annotations

import argparse
import os
import sys
import traceback

import numpy as np

from . import __version__
from .bayes import BayesStrategy
from .bench import (
    bayes_factory,
    concentration_csv,
    concentration_table,
    concentration_text,
    forest_factory,
    run_benchmark,
    tree_factory,
)
from .errors import EntdetectError
from .forest.model import ForestConfig, ForestStrategy, load_model, save_model, train_model
from .pauli import parse_pauli
from .record import CorrelationRecord
from .session import (
    Status,
    anticommutes_with_previous,
    run_detection,
    scaled_oracle,
    shot_noise_oracle,
    as_truth_oracle,
)
from .sources import (
    BUNDLED_FIXTURES,
    StateSource,
    accessible_source,
    bundled_fixture,
    fixture_anchor,
    haar_source,
    load_fixture,
)
from .states import named_state, sample_haar_pure
from .treesearch import TreeStrategy

MODEL_ENV_VAR = "ENTDETECT_MODEL"
LONG_RUN_QUBITS = 4


class UsageError(EntdetectError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="entdetect", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train a forest model and save it")
    train.add_argument("--qubits", type=int, required=True)
    train.add_argument("--out", default="model.json")
    train.add_argument("--trees", type=int, default=64)
    train.add_argument("--per-class", type=int, default=None)
    train.add_argument("--draws", type=int, default=None)
    train.add_argument("--min-leaf", type=int, default=5)
    train.add_argument("--feature-subset", type=int, default=None)
    train.add_argument("--seed", type=int, default=0)

    detect = sub.add_parser("detect", help="run one guided detection and print the trace")
    detect.add_argument("--strategy", choices=["forest", "tree", "bayes"], required=True)
    detect.add_argument(
        "--state",
        required=True,
        help=(
            "named state (bell, ghz:N, dicke:N:K, gdansk:ALPHA, haar:N), a "
            "bundled fixture name, or a fixture CSV path"
        ),
    )
    detect.add_argument("--model", default=None, help="forest model file")
    detect.add_argument("--noise", type=float, default=0.0, help="white-noise probability")
    detect.add_argument("--shots", type=int, default=None, help="enable shot noise")
    detect.add_argument("--seed", type=int, default=0)
    detect.add_argument("--bstar", default=None, help="tree anchor override")
    detect.add_argument("--threshold", type=float, default=0.25)
    detect.add_argument("--particles", type=int, default=2000)
    detect.add_argument("--max-steps", type=int, default=None)

    bench = sub.add_parser("bench", help="compare strategies over a state source")
    bench.add_argument("--qubits", type=int, required=True)
    bench.add_argument("--source", choices=["accessible", "haar"], default="accessible")
    bench.add_argument("--states", type=int, default=200)
    bench.add_argument("--strategies", default="forest,tree,bayes")
    bench.add_argument("--model", default=None)
    bench.add_argument("--out", default=None, help="CSV output path")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--particles", type=int, default=2000)
    bench.add_argument("--max-steps", type=int, default=None)
    bench.add_argument(
        "--long-run",
        action="store_true",
        help=f"required for {LONG_RUN_QUBITS}+ qubits",
    )

    conc = sub.add_parser("concentration", help="tail report for squared correlations")
    conc.add_argument("--qubits", type=int, required=True)
    conc.add_argument("--samples", type=int, default=1000)
    conc.add_argument("--epsilon", type=float, default=0.2)
    conc.add_argument("--seed", type=int, default=0)
    conc.add_argument("--out", default=None, help="CSV output path")

    serve = sub.add_parser("serve", help="run the guided-measurement HTTP service")
    serve.add_argument("--model", default=None, help="forest model file")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--ui-dir", default=None, help="static UI directory to mount")
    return parser


def _resolve_model_path(explicit: str | None) -> str | None:
    return explicit or os.environ.get(MODEL_ENV_VAR) or None


def _load_truth(args):
    """Returns (truth oracle, n_qubits, anchor-or-None)."""
    spec = args.state
    rng = np.random.default_rng(args.seed)
    if spec in BUNDLED_FIXTURES:
        record = bundled_fixture(spec)
        return as_truth_oracle(record), record.n_qubits, fixture_anchor(spec)
    if spec.endswith(".csv") or os.path.exists(spec):
        record = load_fixture(spec)
        return as_truth_oracle(record), record.n_qubits, None
    name, _, rest = spec.partition(":")
    params = [float(x) for x in rest.split(":")] if rest else []
    if name == "haar":
        n = int(params[0]) if params else 2
        state = sample_haar_pure(n, rng)
    else:
        state = named_state(name, params)
    return as_truth_oracle(state), state.n_qubits, None


def cmd_train(args) -> int:
    if args.trees < 1:
        raise UsageError("--trees must be at least 1")
    if args.per_class is not None and args.per_class < 1:
        raise UsageError("--per-class must be at least 1")
    if args.qubits >= LONG_RUN_QUBITS:
        print(
            f"note: training {3 ** args.qubits} instances; this is a long run",
            file=sys.stderr,
        )
    config = ForestConfig(
        n_trees=args.trees,
        samples_per_class=args.per_class,
        n_draws=args.draws,
        min_leaf=args.min_leaf,
        feature_subset_size=args.feature_subset,
        seed=args.seed,
    )

    def progress(target, oob):
        print(f"  {target.label}: oob error {oob:.4f}")

    print(f"training {3 ** args.qubits} forests on {args.qubits} qubits")
    model = train_model(args.qubits, config, progress=progress)
    save_model(model, args.out)
    errors = [e for e in model.metadata["oob_error"].values()]
    print(
        f"wrote {args.out} (mean oob error {float(np.mean(errors)):.4f})"
    )
    return 0


def _make_strategy(args, n_qubits, anchor):
    if args.strategy == "forest":
        path = _resolve_model_path(args.model)
        if path is None:
            raise UsageError(
                f"--model (or ${MODEL_ENV_VAR}) is required for the forest strategy"
            )
        model = load_model(path)
        return ForestStrategy(model)
    if args.strategy == "tree":
        b_star = parse_pauli(args.bstar) if args.bstar else anchor
        return TreeStrategy(n_qubits, b_star=b_star, threshold=args.threshold)
    return BayesStrategy(n_qubits, n_particles=args.particles, seed=args.seed)


def cmd_detect(args) -> int:
    truth, n_qubits, anchor = _load_truth(args)
    if args.noise:
        if not 0.0 <= args.noise <= 1.0:
            raise UsageError("--noise must lie in [0, 1]")
        truth = scaled_oracle(truth, 1.0 - args.noise)
    if args.shots is not None:
        if args.shots < 1:
            raise UsageError("--shots must be positive")
        truth = shot_noise_oracle(truth, args.shots, np.random.default_rng(args.seed))
    strategy = _make_strategy(args, n_qubits, anchor)
    trace = run_detection(strategy, truth, n_qubits, args.max_steps)
    flags = anticommutes_with_previous(trace)
    print(f"{'i':>3} | {'B_i':^6} | {'<B_i>':>8} | {'sum':>7} | anti-commutes w/ prev?")
    for step, flag in zip(trace.steps, flags):
        mark = "---" if flag is None else ("true" if flag else "false")
        print(
            f"{step.step:>3} | {step.observable.label:^6} | "
            f"{step.value:>+8.3f} | {step.running_sum:>7.3f} | {mark}"
        )
    print(f"status: {trace.final_status.value} after {trace.length} measurements")
    if isinstance(strategy, TreeStrategy) and strategy.preliminary_cost:
        print(
            f"(plus {strategy.preliminary_cost} single-qubit preliminary measurements)"
        )
    return 0


def cmd_bench(args) -> int:
    if args.states < 1:
        raise UsageError("--states must be at least 1")
    if args.qubits >= LONG_RUN_QUBITS and not args.long_run:
        raise UsageError(
            f"benchmarks on {args.qubits} qubits take long; pass --long-run"
        )
    names = [s.strip() for s in args.strategies.split(",") if s.strip()]
    if not names:
        raise UsageError("--strategies must name at least one strategy")
    factories = {}
    for name in names:
        if name == "forest":
            path = _resolve_model_path(args.model)
            if path is None:
                raise UsageError(
                    f"--model (or ${MODEL_ENV_VAR}) is required to bench the forest"
                )
            model = load_model(path)
            if model.n_qubits != args.qubits:
                raise UsageError(
                    f"model is for {model.n_qubits} qubits, bench wants {args.qubits}"
                )
            factories[name] = forest_factory(model)
        elif name == "tree":
            factories[name] = tree_factory()
        elif name == "bayes":
            factories[name] = bayes_factory(n_particles=args.particles)
        else:
            raise UsageError(f"unknown strategy {name!r}")
    rng = np.random.default_rng(args.seed)
    if args.source == "accessible":
        source = accessible_source(args.qubits, rng)
    else:
        source = haar_source(args.qubits, rng)
    result = run_benchmark(
        source,
        factories,
        args.states,
        max_steps=args.max_steps,
        seed=args.seed,
        config={
            "source": args.source,
            "qubits": args.qubits,
            "seed": args.seed,
        },
    )
    print(result.summary())
    if args.out:
        result.to_csv(args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_concentration(args) -> int:
    if args.samples < 100:
        raise UsageError("--samples must be at least 100")
    reports = concentration_table([args.qubits], args.samples, args.epsilon, args.seed)
    print(concentration_text(reports))
    if args.out:
        concentration_csv(reports, args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    path = _resolve_model_path(args.model)
    model = load_model(path) if path else None
    app = create_app(model=model, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


_COMMANDS = {
    "train": cmd_train,
    "detect": cmd_detect,
    "bench": cmd_bench,
    "concentration": cmd_concentration,
    "serve": cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EntdetectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 2
    except Exception:
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
