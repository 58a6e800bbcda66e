"""Forests of count-carrying trees, reachable-region scoring, model files.

Scoring a tree against partial knowledge keeps every leaf whose path is
not contradicted by a known squared value (decisions on unknown features
never prune) and returns the positive fraction of the training rows in
the surviving leaves. A forest's score is the median over its trees,
discarded entirely when too few trees retain enough reachable structure
to be trusted.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from ..errors import MalformedModelError, ModelVersionError, QubitCountError
from ..pauli import PauliString, observable_set, parse_pauli
from ..record import CorrelationRecord
from ..session import Session, Strategy
from .cart import (
    Leaf,
    Node,
    Split,
    fit_tree_arrays,
    node_from_json,
    node_to_json,
    prune_oob,
    reachable_sums,
)
from .data import TrainingSet, default_samples_per_class, generate_training_data

MODEL_FORMAT_VERSION = 1

DISCARD_FRACTION_DEFAULT = 0.5
MIN_QUORUM_DEFAULT = 8


@dataclass(frozen=True)
class ForestConfig:
    """Training and scoring knobs; None means derive from the qubit count."""

    n_trees: int = 64
    samples_per_class: int | None = None
    n_draws: int | None = None
    feature_subset_size: int | None = None
    min_leaf: int = 5
    stop_entropy: float = 0.1
    max_depth: int = 64
    discard_fraction: float = DISCARD_FRACTION_DEFAULT
    min_quorum: int = MIN_QUORUM_DEFAULT
    bootstrap: bool = True
    seed: int = 0

    def resolved(self, n_qubits: int) -> "ForestConfig":
        per_class = self.samples_per_class or default_samples_per_class(n_qubits)
        subset = self.feature_subset_size or math.ceil(
            math.sqrt(3**n_qubits - 1)
        )
        # Enough draws that most positives are natural rather than
        # relabeled, capped so the draw matrix stays desk-sized.
        draws = self.n_draws or min(3**n_qubits, 27) * per_class
        return replace(
            self,
            samples_per_class=per_class,
            feature_subset_size=subset,
            n_draws=draws,
        )

    def validate(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be at least 1")
        if self.min_leaf < 1:
            raise ValueError("min_leaf must be at least 1")
        if not 0.0 <= self.discard_fraction <= 1.0:
            raise ValueError("discard_fraction must lie in [0, 1]")
        if self.min_quorum < 1:
            raise ValueError("min_quorum must be at least 1")


@dataclass
class DecisionTree:
    """One tree plus the feature labeling it was trained with."""

    root: Node
    feature_names: tuple[PauliString, ...]


@dataclass
class Forest:
    """All trees answering "is this observable the largest?" for one target."""

    target: PauliString
    feature_names: tuple[PauliString, ...]
    trees: list[Node]
    oob_errors: list[float] = field(default_factory=list)

    @property
    def n_trees(self) -> int:
        return len(self.trees)


@dataclass
class ForestModel:
    n_qubits: int
    config: ForestConfig
    forests: list[Forest]  # canonical target order
    metadata: dict = field(default_factory=dict)

    def forest_for(self, target: PauliString) -> Forest:
        idx = observable_set(self.n_qubits).index(target)
        return self.forests[idx]


def _known_squares(
    known: CorrelationRecord | Mapping[PauliString, float],
    feature_index: Mapping[PauliString, int],
) -> dict[int, float]:
    """Map known expectations to per-feature squared values."""
    items = known.items()
    out = {}
    for obs, value in items:
        idx = feature_index.get(obs)
        if idx is not None:
            out[idx] = value * value
    return out


def tree_score(
    tree: DecisionTree,
    known: CorrelationRecord | Mapping[PauliString, float],
) -> tuple[float, float]:
    """(positive fraction over reachable leaves, reachable-leaf fraction)."""
    feature_index = {p: i for i, p in enumerate(tree.feature_names)}
    known_sq = _known_squares(known, feature_index)
    sum_p, sum_n, n_reach, n_total = reachable_sums(tree.root, known_sq)
    if n_reach == 0:  # pragma: no cover - impossible: unknowns keep both branches
        raise ValueError("no reachable leaf")
    return sum_p / (sum_p + sum_n), n_reach / n_total


def forest_score(
    forest: Forest,
    known: CorrelationRecord | Mapping[PauliString, float],
    discard_fraction: float = DISCARD_FRACTION_DEFAULT,
    min_quorum: int = MIN_QUORUM_DEFAULT,
) -> float | None:
    """Median tree score, or None (discarded) without a trusted quorum.

    Trees whose reachable-leaf fraction falls below ``discard_fraction``
    are dropped; if fewer than ``min_quorum`` remain the forest abstains.
    """
    feature_index = {p: i for i, p in enumerate(forest.feature_names)}
    known_sq = _known_squares(known, feature_index)
    surviving = []
    for root in forest.trees:
        sum_p, sum_n, n_reach, n_total = reachable_sums(root, known_sq)
        if n_reach / n_total < discard_fraction:
            continue
        surviving.append(sum_p / (sum_p + sum_n))
    if len(surviving) < min_quorum:
        return None
    return float(np.median(surviving))


class CompiledForest:
    """Array form of a forest for fast repeated scoring.

    Every leaf's path compiles to one interval per tested feature
    (reachable iff lo < value <= hi), so a new known value filters all
    leaves with two comparisons, and per-tree sums come from a single
    segmented reduction. Verified against the walk-based scorer in tests.
    """

    def __init__(self, forest: Forest):
        self.feature_index = {p: i for i, p in enumerate(forest.feature_names)}
        leaf_p: list[float] = []
        leaf_n: list[float] = []
        offsets = [0]
        raw_constraints: dict[int, list[tuple[int, float, float]]] = {}
        for root in forest.trees:
            stack: list[tuple[Node, dict[int, tuple[float, float]]]] = [(root, {})]
            while stack:
                node, bounds = stack.pop()
                if isinstance(node, Leaf):
                    idx = len(leaf_p)
                    leaf_p.append(float(node.p))
                    leaf_n.append(float(node.n))
                    for f, (lo, hi) in bounds.items():
                        raw_constraints.setdefault(f, []).append((idx, lo, hi))
                    continue
                lo, hi = bounds.get(node.feature, (-math.inf, math.inf))
                low_bounds = dict(bounds)
                low_bounds[node.feature] = (lo, min(hi, node.threshold))
                high_bounds = dict(bounds)
                high_bounds[node.feature] = (max(lo, node.threshold), hi)
                stack.append((node.low, low_bounds))
                stack.append((node.high, high_bounds))
            offsets.append(len(leaf_p))
        self.leaf_p = np.array(leaf_p)
        self.leaf_n = np.array(leaf_n)
        self.offsets = np.array(offsets[:-1], dtype=np.int64)
        self.leaves_per_tree = np.diff(np.array(offsets, dtype=np.int64))
        self.n_leaves = len(leaf_p)
        self.constraints = {
            f: (
                np.array([c[0] for c in lst], dtype=np.int64),
                np.array([c[1] for c in lst]),
                np.array([c[2] for c in lst]),
            )
            for f, lst in raw_constraints.items()
        }

    def tree_scores(
        self, known_sq: Mapping[int, float]
    ) -> tuple[np.ndarray, np.ndarray]:
        mask = np.ones(self.n_leaves, dtype=bool)
        for f, value in known_sq.items():
            entry = self.constraints.get(f)
            if entry is None:
                continue
            rows, lo, hi = entry
            violated = (value <= lo) | (value > hi)
            mask[rows[violated]] = False
        sum_p = np.add.reduceat(np.where(mask, self.leaf_p, 0.0), self.offsets)
        sum_n = np.add.reduceat(np.where(mask, self.leaf_n, 0.0), self.offsets)
        n_reach = np.add.reduceat(mask.astype(np.float64), self.offsets)
        scores = sum_p / (sum_p + sum_n)
        return scores, n_reach / self.leaves_per_tree

    def score(
        self,
        known_sq: Mapping[int, float],
        discard_fraction: float,
        min_quorum: int,
    ) -> float | None:
        scores, fractions = self.tree_scores(known_sq)
        keep = fractions >= discard_fraction
        if int(keep.sum()) < min_quorum:
            return None
        return float(np.median(scores[keep]))


def fit_forest(
    ts: TrainingSet,
    config: ForestConfig,
    seed_seq: np.random.SeedSequence | int,
) -> Forest:
    """Bootstrap-aggregated trees, each pruned against its own OOB rows."""
    config = config.resolved(ts.target.n_qubits)
    config.validate()
    if not isinstance(seed_seq, np.random.SeedSequence):
        seed_seq = np.random.SeedSequence(seed_seq)
    n_rows = ts.X.shape[0]
    pos_idx = np.where(ts.y)[0]
    neg_idx = np.where(~ts.y)[0]
    trees = []
    oob_errors = []
    for child in seed_seq.spawn(config.n_trees):
        rng = np.random.default_rng(child)
        if config.bootstrap:
            # Stratified resample: every tree keeps the exact class
            # balance, so an uninformed tree scores exactly one half and
            # cold-start ties resolve canonically instead of by noise.
            boot = np.concatenate(
                [
                    pos_idx[rng.integers(0, pos_idx.size, size=pos_idx.size)],
                    neg_idx[rng.integers(0, neg_idx.size, size=neg_idx.size)],
                ]
            )
        else:
            boot = np.arange(n_rows)
        root = fit_tree_arrays(
            ts.X[boot],
            ts.y[boot],
            config.feature_subset_size,
            config.min_leaf,
            config.stop_entropy,
            rng,
            max_depth=config.max_depth,
        )
        oob = np.setdiff1d(np.arange(n_rows), boot, assume_unique=False)
        if oob.size:
            root, errors = prune_oob(root, ts.X, ts.y, oob)
            oob_errors.append(errors / oob.size)
        else:
            oob_errors.append(float("nan"))
        trees.append(root)
    return Forest(ts.target, ts.feature_names, trees, oob_errors)


def fit_tree(
    ts: TrainingSet,
    feature_subset_size: int | None = None,
    min_leaf: int = 5,
    rng: np.random.Generator | None = None,
    stop_entropy: float = 0.1,
    max_depth: int = 64,
) -> DecisionTree:
    """Single unbagged tree on the full training set."""
    if rng is None:
        rng = np.random.default_rng(0)
    n_features = ts.X.shape[1]
    if feature_subset_size is None:
        feature_subset_size = n_features
    root = fit_tree_arrays(
        ts.X, ts.y, feature_subset_size, min_leaf, stop_entropy, rng, max_depth
    )
    return DecisionTree(root, ts.feature_names)


def train_model(
    n_qubits: int,
    config: ForestConfig | None = None,
    progress=None,
) -> ForestModel:
    """Generate training data and fit one forest per observable."""
    config = (config or ForestConfig()).resolved(n_qubits)
    config.validate()
    root_seq = np.random.SeedSequence(config.seed)
    data_seq, fit_seq = root_seq.spawn(2)
    sets = generate_training_data(
        n_qubits,
        config.samples_per_class,
        np.random.default_rng(data_seq),
        n_draws=config.n_draws,
    )
    forests = []
    oob_summary = {}
    for ts, child in zip(sets, fit_seq.spawn(len(sets))):
        forest = fit_forest(ts, config, child)
        forests.append(forest)
        finite = [e for e in forest.oob_errors if not math.isnan(e)]
        oob_summary[ts.target.label] = (
            float(np.mean(finite)) if finite else float("nan")
        )
        if progress is not None:
            progress(ts.target, oob_summary[ts.target.label])
    metadata = {
        "samples_per_class": config.samples_per_class,
        "seed": config.seed,
        "oob_error": oob_summary,
    }
    return ForestModel(n_qubits, config, forests, metadata)


# -- recommendation


class ForestStrategy(Strategy):
    """Scores every unmeasured observable's forest; picks the best.

    The model is immutable and shared; compiled scorers are built lazily
    per target. Discarded forests rank below every numeric score; ties
    resolve to the canonically first observable. With an empty record
    every balanced forest scores one half, so the cold start recommends
    the canonical first observable.
    """

    name = "forest"

    def __init__(self, model: ForestModel):
        self.model = model
        self._compiled: dict[PauliString, CompiledForest] = {}

    def _compiled_for(self, target: PauliString) -> CompiledForest:
        cf = self._compiled.get(target)
        if cf is None:
            cf = CompiledForest(self.model.forest_for(target))
            self._compiled[target] = cf
        return cf

    def recommend(self, session: Session) -> PauliString:
        if session.n_qubits != self.model.n_qubits:
            raise QubitCountError(
                f"model trained for {self.model.n_qubits} qubits, "
                f"session has {session.n_qubits}"
            )
        config = self.model.config
        best: PauliString | None = None
        best_score = -math.inf
        for target in session.unmeasured():
            cf = self._compiled_for(target)
            known_sq = {
                cf.feature_index[obs]: value * value
                for obs, value in session.record.items()
            }
            score = cf.score(known_sq, config.discard_fraction, config.min_quorum)
            if best is None:
                # canonical-first default covers the all-discarded case
                best = target
                if score is not None:
                    best_score = score
                continue
            if score is not None and score > best_score:
                best, best_score = target, score
        if best is None:
            raise ValueError("no unmeasured observable left")
        return best


def recommend(model: ForestModel, session: Session) -> PauliString:
    return ForestStrategy(model).recommend(session)


# -- persistence


def _config_to_json(config: ForestConfig) -> dict:
    return {
        "n_trees": config.n_trees,
        "samples_per_class": config.samples_per_class,
        "n_draws": config.n_draws,
        "feature_subset_size": config.feature_subset_size,
        "min_leaf": config.min_leaf,
        "stop_entropy": config.stop_entropy,
        "max_depth": config.max_depth,
        "discard_fraction": config.discard_fraction,
        "min_quorum": config.min_quorum,
        "bootstrap": config.bootstrap,
        "seed": config.seed,
    }


def save_model(model: ForestModel, path) -> None:
    doc = {
        "version": MODEL_FORMAT_VERSION,
        "n_qubits": model.n_qubits,
        "config": _config_to_json(model.config),
        "metadata": model.metadata,
        "forests": [
            {
                "target": forest.target.label,
                "oob_errors": forest.oob_errors,
                "trees": [
                    node_to_json(root, [p.label for p in forest.feature_names])
                    for root in forest.trees
                ],
            }
            for forest in model.forests
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_model(path) -> ForestModel:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise MalformedModelError(f"cannot parse model file {path}: {exc}") from exc
    try:
        version = doc["version"]
        if version != MODEL_FORMAT_VERSION:
            raise ModelVersionError(
                f"model format version {version} unsupported "
                f"(expected {MODEL_FORMAT_VERSION})"
            )
        n_qubits = int(doc["n_qubits"])
        config = ForestConfig(**doc["config"])
        members = observable_set(n_qubits).members
        raw_forests = doc["forests"]
        if len(raw_forests) != len(members):
            raise MalformedModelError(
                f"expected {len(members)} forests, found {len(raw_forests)}"
            )
        forests = []
        for expected, raw in zip(members, raw_forests):
            target = parse_pauli(raw["target"])
            if target != expected:
                raise MalformedModelError(
                    f"forest order broken: expected {expected.label}, "
                    f"found {target.label}"
                )
            feature_names = tuple(p for p in members if p != target)
            feature_index = {p.label: i for i, p in enumerate(feature_names)}
            trees = [node_from_json(t, feature_index) for t in raw["trees"]]
            forests.append(
                Forest(
                    target,
                    feature_names,
                    trees,
                    [float(e) for e in raw.get("oob_errors", [])],
                )
            )
        return ForestModel(n_qubits, config, forests, doc.get("metadata", {}))
    except ModelVersionError:
        raise
    except MalformedModelError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedModelError(f"malformed model file {path}: {exc}") from exc
