"""Detection sessions: result accumulation, the stopping rule, strategies.

A session accumulates full-weight correlation measurements and tracks the
running sum of their squares. Once that sum exceeds one the state is
certified entangled; if every observable is measured without crossing the
threshold the session ends exhausted (which does not imply separability).
"""

from __future__ import annotations

import csv
import enum
import io
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateMeasurementError,
    QubitCountError,
    StrategyContractError,
)
from .pauli import PauliString, observable_set
from .record import CorrelationRecord, clamp_value
from .states import PureState, expectation

SESSION_QUBIT_CAP = 8

# Floating-point guard on the strict criterion_sum > 1 test: exact product
# states sum to 1.0 up to rounding and must never flip to "entangled".
CRITERION_EPS = 1e-9


class Status(str, enum.Enum):
    UNDETERMINED = "undetermined"
    ENTANGLED = "entangled"
    EXHAUSTED = "exhausted"


TruthOracle = Callable[[PauliString], float]


class Session:
    """Mutable detection-session state; one owner at a time."""

    __slots__ = ("n_qubits", "record", "history", "criterion_sum", "status")

    def __init__(self, n_qubits: int):
        if not 1 <= n_qubits <= SESSION_QUBIT_CAP:
            raise QubitCountError(
                f"session qubit count {n_qubits} outside [1, {SESSION_QUBIT_CAP}]"
            )
        self.n_qubits = n_qubits
        self.record = CorrelationRecord(n_qubits)
        self.history: list[tuple[PauliString, float]] = []
        self.criterion_sum = 0.0
        self.status = Status.UNDETERMINED

    def record_result(self, p: PauliString, value: float) -> "Session":
        if p in self.record:
            raise DuplicateMeasurementError(f"{p.label} was already measured")
        value = clamp_value(value)
        self.record.set(p, value)
        self.history.append((p, value))
        self.criterion_sum += value * value
        self._refresh_status()
        return self

    def _refresh_status(self) -> None:
        if self.criterion_sum > 1.0 + CRITERION_EPS:
            self.status = Status.ENTANGLED
        elif len(self.history) == observable_set(self.n_qubits).size:
            self.status = Status.EXHAUSTED
        else:
            self.status = Status.UNDETERMINED

    def measured(self) -> set[PauliString]:
        return set(self.record.entries)

    def unmeasured(self) -> list[PauliString]:
        """Unmeasured observables in canonical order."""
        return [p for p in observable_set(self.n_qubits) if p not in self.record]


def new_session(n_qubits: int) -> Session:
    return Session(n_qubits)


class Strategy(ABC):
    """Recommends the next observable to measure.

    One instance drives one session at a time: implementations may keep
    per-run state, but the recommendation must be a deterministic
    function of the session history, the strategy's frozen model, and
    its seed. Never recommends an observable already in the record.
    """

    name: str = "strategy"

    @abstractmethod
    def recommend(self, session: Session) -> PauliString:
        ...


class StaticOrderStrategy(Strategy):
    """Measures a fixed list of observables, then canonical order."""

    name = "static"

    def __init__(self, order: Iterable[PauliString] = ()):
        self.order = list(order)

    def recommend(self, session: Session) -> PauliString:
        for p in self.order:
            if p not in session.record:
                return p
        for p in observable_set(session.n_qubits):
            if p not in session.record:
                return p
        raise StrategyContractError("all observables already measured")


@dataclass(frozen=True)
class TraceStep:
    step: int
    observable: PauliString
    value: float
    running_sum: float
    status: Status


@dataclass
class MeasurementTrace:
    """Ordered record of one detection run; the benchmark's unit of comparison."""

    n_qubits: int
    strategy_name: str
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def final_status(self) -> Status:
        return self.steps[-1].status if self.steps else Status.UNDETERMINED

    @property
    def final_sum(self) -> float:
        return self.steps[-1].running_sum if self.steps else 0.0

    def observables(self) -> list[PauliString]:
        return [s.observable for s in self.steps]

    def to_csv(self, target) -> None:
        """Write columns step, observable, value, running_sum, status."""
        close = False
        if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
            target = open(target, "w", newline="")
            close = True
        try:
            writer = csv.writer(target)
            writer.writerow(["step", "observable", "value", "running_sum", "status"])
            for s in self.steps:
                writer.writerow(
                    [s.step, s.observable.label, repr(s.value), repr(s.running_sum), s.status.value]
                )
        finally:
            if close:
                target.close()

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()


def as_truth_oracle(
    truth: TruthOracle | Mapping[PauliString, float] | CorrelationRecord | PureState,
) -> TruthOracle:
    """Normalize the supported truth representations to a callable."""
    if isinstance(truth, PureState):
        state = truth
        return lambda p: expectation(state, p)
    if isinstance(truth, CorrelationRecord):
        rec = truth
        return lambda p: rec[p]
    if isinstance(truth, Mapping):
        mapping = truth
        return lambda p: mapping[p]
    if callable(truth):
        return truth
    raise TypeError(f"cannot interpret {type(truth)!r} as a truth oracle")


def scaled_oracle(truth: TruthOracle, scale: float) -> TruthOracle:
    """Truth oracle with every value multiplied by ``scale`` (white noise)."""
    return lambda p: truth(p) * scale


def shot_noise_oracle(
    truth: TruthOracle, n_shots: int, rng: np.random.Generator
) -> TruthOracle:
    """Binomial shot noise: value = 2k/n - 1 with k ~ Bin(n, (1+<B>)/2)."""
    if n_shots < 1:
        raise ValueError("n_shots must be positive")

    def noisy(p: PauliString) -> float:
        q = min(1.0, max(0.0, 0.5 * (1.0 + truth(p))))
        k = rng.binomial(n_shots, q)
        return 2.0 * k / n_shots - 1.0

    return noisy


def run_detection(
    strategy: Strategy,
    truth: TruthOracle | Mapping[PauliString, float] | CorrelationRecord | PureState,
    n_qubits: int,
    max_steps: int | None = None,
) -> MeasurementTrace:
    """Recommend-measure-record loop until detection, exhaustion, or the cap."""
    oracle = as_truth_oracle(truth)
    if max_steps is None:
        max_steps = observable_set(n_qubits).size
    session = Session(n_qubits)
    trace = MeasurementTrace(n_qubits, strategy.name)
    while session.status is Status.UNDETERMINED and len(session.history) < max_steps:
        rec = strategy.recommend(session)
        if rec in session.record:
            raise StrategyContractError(
                f"strategy {strategy.name!r} recommended measured observable {rec.label}"
            )
        value = oracle(rec)
        session.record_result(rec, value)
        trace.steps.append(
            TraceStep(
                step=len(session.history),
                observable=rec,
                value=session.record[rec],
                running_sum=session.criterion_sum,
                status=session.status,
            )
        )
    return trace


def anticommutes_with_previous(trace: MeasurementTrace) -> list[bool | None]:
    """Per step, whether it anti-commutes with the preceding measurement."""
    from .pauli import commutes

    flags: list[bool | None] = []
    prev: PauliString | None = None
    for s in trace.steps:
        flags.append(None if prev is None else not commutes(s.observable, prev))
        prev = s.observable
    return flags
