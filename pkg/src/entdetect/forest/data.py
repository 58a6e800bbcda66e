"""Training sets for the per-observable "is it the largest?" classifiers.

Each uniform random draw yields the squared expectations of all 3^N
observables; the draw is a positive example for the instance whose value
is the maximum and a negative example for every other instance. Naive
sampling therefore starves every instance of positives (one per draw
across 3^N instances), so deficits are filled by letter-permutation
Clifford relabelings that move the maximum onto the target instance (the
feature vector permutes with it, signs square away) and by repeating
positives.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..pauli import PauliString, observable_set
from ..states import expectations_batch, sample_haar_batch


@dataclass
class TrainingSet:
    """Balanced rows for one instance; features exclude the target."""

    target: PauliString
    feature_names: tuple[PauliString, ...]
    X: np.ndarray  # (rows, features) squared expectations in [0, 1]
    y: np.ndarray  # bool labels, True = positive
    # Provenance (kept on request): originating draw index per row and the
    # per-qubit letter permutation applied (None for natural rows).
    source_rows: np.ndarray | None = None
    perms: list[tuple[tuple[int, int, int], ...] | None] | None = None
    states: np.ndarray | None = None

    def __post_init__(self) -> None:
        n_pos = int(self.y.sum())
        if n_pos * 2 != self.y.size:
            raise ValueError(
                f"training set for {self.target.label} is unbalanced: "
                f"{n_pos} positives of {self.y.size}"
            )


_ALL_PERMS = tuple(itertools.permutations((1, 2, 3)))

# _PERM_CHOICES[(a, b)] = the two letter permutations with perm[a-1] == b.
_PERM_CHOICES: dict[tuple[int, int], tuple] = {}
for _a in (1, 2, 3):
    for _b in (1, 2, 3):
        _PERM_CHOICES[(_a, _b)] = tuple(
            perm for perm in _ALL_PERMS if perm[_a - 1] == _b
        )


def squared_expectation_matrix(states: np.ndarray, n_qubits: int) -> np.ndarray:
    """(draws x 3^N) squared expectations, canonical observable order."""
    members = observable_set(n_qubits).members
    out = np.empty((states.shape[0], len(members)))
    for col, obs in enumerate(members):
        out[:, col] = expectations_batch(states, obs.letters) ** 2
    np.clip(out, 0.0, 1.0, out=out)
    return out


def _observable_digits(n_qubits: int) -> tuple[np.ndarray, np.ndarray]:
    """Letter digits (0-based) of each canonical observable, plus the radix."""
    members = observable_set(n_qubits).members
    digits = np.array([[a - 1 for a in p.letters] for p in members], dtype=np.int64)
    radix = 3 ** np.arange(n_qubits - 1, -1, -1, dtype=np.int64)
    return digits, radix


def relabel_row(
    row: np.ndarray,
    perms: tuple[tuple[int, int, int], ...],
    digits: np.ndarray,
    radix: np.ndarray,
) -> np.ndarray:
    """Permute a squared-expectation row under per-qubit letter permutations.

    Index k maps to the index of the letter-wise image string; the value
    moves with it, exactly as conjugating the state by the corresponding
    Clifford would permute the measured squares.
    """
    n = len(perms)
    perm_arr = np.array([[p[d] - 1 for d in range(3)] for p in perms], dtype=np.int64)
    new_digits = perm_arr[np.arange(n)[None, :], digits]
    new_idx = new_digits @ radix
    out = np.empty_like(row)
    out[new_idx] = row
    return out


def draw_perms_mapping(
    source: PauliString,
    target: PauliString,
    rng: np.random.Generator,
) -> tuple[tuple[int, int, int], ...]:
    """Random per-qubit letter permutations sending source onto target."""
    perms = []
    for a, b in zip(source.letters, target.letters):
        choices = _PERM_CHOICES[(a, b)]
        perms.append(choices[int(rng.integers(len(choices)))])
    return tuple(perms)


def generate_training_data(
    n_qubits: int,
    samples_per_class: int,
    rng: np.random.Generator,
    n_draws: int | None = None,
    keep_provenance: bool = False,
) -> list[TrainingSet]:
    """One balanced training set per observable from a shared draw batch."""
    if samples_per_class < 1:
        raise ValueError("samples_per_class must be at least 1")
    members = observable_set(n_qubits).members
    n_instances = len(members)
    if n_draws is None:
        n_draws = 2 * samples_per_class
    n_draws = max(n_draws, samples_per_class + 1)

    states = sample_haar_batch(n_qubits, n_draws, rng)
    sq = squared_expectation_matrix(states, n_qubits)
    amax = np.argmax(sq, axis=1)  # first maximum = canonical tie-break
    digits, radix = _observable_digits(n_qubits)

    sets = []
    for i, target in enumerate(members):
        natural = np.where(amax == i)[0]
        if natural.size > samples_per_class:
            natural = rng.choice(natural, size=samples_per_class, replace=False)
        deficit = samples_per_class - natural.size

        aug_rows = np.empty((deficit, n_instances))
        aug_sources = rng.integers(0, n_draws, size=deficit)
        aug_perms: list[tuple[tuple[int, int, int], ...]] = []
        for r, s in enumerate(aug_sources):
            src_obs = members[amax[s]]
            perms = draw_perms_mapping(src_obs, target, rng)
            aug_rows[r] = relabel_row(sq[s], perms, digits, radix)
            aug_perms.append(perms)

        neg_pool = np.where(amax != i)[0]
        replace = neg_pool.size < samples_per_class
        negatives = rng.choice(neg_pool, size=samples_per_class, replace=replace)

        full = np.concatenate([sq[natural], aug_rows, sq[negatives]], axis=0)
        X = np.delete(full, i, axis=1)
        y = np.zeros(2 * samples_per_class, dtype=bool)
        y[:samples_per_class] = True

        feature_names = tuple(p for p in members if p != target)
        if keep_provenance:
            source_rows = np.concatenate([natural, aug_sources, negatives])
            perms_col: list = [None] * natural.size + aug_perms + [None] * samples_per_class
            sets.append(
                TrainingSet(
                    target, feature_names, X, y,
                    source_rows=source_rows, perms=perms_col, states=states,
                )
            )
        else:
            sets.append(TrainingSet(target, feature_names, X, y))
    return sets


def default_samples_per_class(n_qubits: int) -> int:
    """2048 per class up to two qubits, 4096 beyond (training-time tradeoff)."""
    return 2048 if n_qubits <= 2 else 4096
