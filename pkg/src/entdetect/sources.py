"""State sources for benchmarks and fixture correlation tables.

Sources cover uniform random states, "accessible" states produced by
finite random circuits (optionally rejection-filtered so the all-X
correlation is usable as a search anchor), named showcase states, and
experimentally measured correlation tables loaded from CSV. Six
two-qubit tables measured on a photonic setup ship with the package
("fig1a" .. "fig1f").
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources
from typing import Iterator

import numpy as np

from .errors import FixtureError, RejectionRateError
from .pauli import PauliString, X, observable_set, parse_pauli
from .record import CorrelationRecord
from .states import (
    PureState,
    expectation,
    named_state,
    random_circuit_state_counted,
    sample_haar_pure,
)

DEFAULT_REJECTION_SQ = 0.25
REJECTION_PROBE_ATTEMPTS = 10_000
REJECTION_MIN_RATE = 0.01

BUNDLED_FIXTURES = ("fig1a", "fig1b", "fig1c", "fig1d", "fig1e", "fig1f")

# Search anchors for the bundled tables: the observable both algorithms
# opened with in the source experiment (largest magnitude in each table).
FIXTURE_ANCHORS = {
    "fig1a": "xx",
    "fig1b": "zz",
    "fig1c": "xx",
    "fig1d": "yy",
    "fig1e": "xy",
    "fig1f": "xx",
}


def default_mean_gates(n_qubits: int) -> float:
    """24 N (N - 1): enough degrees of freedom at two qubits, scaled by the
    number of two-qubit gate placements."""
    return 24.0 * n_qubits * (n_qubits - 1)


class AccessibleSource:
    """Random-circuit states, rejection-filtered on the all-X correlation.

    Iterating yields states; ``attempts``, ``accepted`` and
    ``mean_gates_accepted`` track the bookkeeping. If fewer than 1% of
    the first ten thousand candidates pass the filter, the configuration
    is considered broken and iteration aborts.
    """

    def __init__(
        self,
        n_qubits: int,
        rng: np.random.Generator,
        mean_gates: float | None = None,
        rejection: bool = True,
        min_sq: float = DEFAULT_REJECTION_SQ,
    ):
        if n_qubits < 2:
            raise ValueError("accessible source needs at least two qubits")
        self.n_qubits = n_qubits
        self.rng = rng
        self.mean_gates = (
            default_mean_gates(n_qubits) if mean_gates is None else mean_gates
        )
        self.rejection = rejection
        self.min_sq = min_sq
        self.all_x = PauliString(tuple([X] * n_qubits))
        self.attempts = 0
        self.accepted = 0
        self._gate_total = 0

    @property
    def mean_gates_accepted(self) -> float:
        return self._gate_total / self.accepted if self.accepted else float("nan")

    def __iter__(self) -> Iterator[PureState]:
        return self

    def __next__(self) -> PureState:
        while True:
            state, n_gates = random_circuit_state_counted(
                self.n_qubits, self.mean_gates, self.rng
            )
            self.attempts += 1
            if (
                self.rejection
                and expectation(state, self.all_x) ** 2 < self.min_sq
            ):
                if (
                    self.attempts >= REJECTION_PROBE_ATTEMPTS
                    and self.accepted / self.attempts < REJECTION_MIN_RATE
                ):
                    raise RejectionRateError(
                        f"acceptance rate {self.accepted}/{self.attempts} "
                        f"below {REJECTION_MIN_RATE:.0%}"
                    )
                continue
            self.accepted += 1
            self._gate_total += n_gates
            return state


def accessible_source(
    n_qubits: int,
    rng: np.random.Generator,
    mean_gates: float | None = None,
    rejection: bool = True,
) -> AccessibleSource:
    return AccessibleSource(n_qubits, rng, mean_gates, rejection)


def haar_source(n_qubits: int, rng: np.random.Generator) -> Iterator[PureState]:
    while True:
        yield sample_haar_pure(n_qubits, rng)


@dataclass(frozen=True)
class StateSource:
    """Declarative source description (echoed into benchmark results)."""

    kind: str  # haar | accessible | named | fixture
    n_qubits: int
    seed: int | None = None
    mean_gates: float | None = None
    rejection: bool = True
    name: str | None = None
    params: tuple = ()
    path: str | None = None

    def states(self) -> Iterator[PureState]:
        rng = np.random.default_rng(self.seed)
        if self.kind == "haar":
            return haar_source(self.n_qubits, rng)
        if self.kind == "accessible":
            return accessible_source(
                self.n_qubits, rng, self.mean_gates, self.rejection
            )
        if self.kind == "named":
            return iter([named_state(self.name or "", self.params)])
        raise ValueError(f"source kind {self.kind!r} does not yield states")


def load_fixture(path) -> CorrelationRecord:
    """Read an "observable,value" CSV covering every full-weight observable."""
    rows: list[tuple[PauliString, float]] = []
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise FixtureError(f"cannot open fixture {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader, start=1):
            if not row or (lineno == 1 and row[0].strip().lower() == "observable"):
                continue
            if len(row) != 2:
                raise FixtureError(f"{path}:{lineno}: expected 'observable,value'")
            try:
                obs = parse_pauli(row[0].strip())
                value = float(row[1])
            except ValueError as exc:
                raise FixtureError(f"{path}:{lineno}: {exc}") from exc
            rows.append((obs, value))
    if not rows:
        raise FixtureError(f"{path}: no data rows")
    n_qubits = rows[0][0].n_qubits
    record = CorrelationRecord(n_qubits)
    for obs, value in rows:
        if obs.n_qubits != n_qubits:
            raise FixtureError(
                f"{path}: mixed qubit counts ({obs.label} vs {n_qubits} qubits)"
            )
        if obs in record:
            raise FixtureError(f"{path}: duplicate observable {obs.label}")
        try:
            record.set(obs, value)
        except ValueError as exc:
            raise FixtureError(f"{path}: {obs.label}: {exc}") from exc
    missing = record.missing()
    if missing:
        labels = ", ".join(p.label for p in missing)
        raise FixtureError(f"{path}: missing observables: {labels}")
    return record


def bundled_fixture(name: str) -> CorrelationRecord:
    """Load one of the packaged measured tables by name (e.g. "fig1b")."""
    if name not in BUNDLED_FIXTURES:
        raise FixtureError(
            f"unknown bundled fixture {name!r}; have {', '.join(BUNDLED_FIXTURES)}"
        )
    ref = resources.files("entdetect").joinpath(f"data/{name}.csv")
    with resources.as_file(ref) as path:
        return load_fixture(path)


def fixture_anchor(name: str) -> PauliString:
    """The tree-search anchor paired with a bundled fixture."""
    return parse_pauli(FIXTURE_ANCHORS[name])


def geometric_sum(record: CorrelationRecord) -> float:
    """Sum of squared correlations over the record (brute-force check)."""
    return sum(v * v for v in record.entries.values())
