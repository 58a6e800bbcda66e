"""Benchmark harness, interpolated-state sweep, and concentration report.

The harness runs each strategy on each sampled state, counts distinct
measurement settings until entanglement is certified, and aggregates
histograms. Cost excludes the tree strategy's 3N Bloch preliminary by
default; both figures are reported.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator

import numpy as np

from .bayes import BayesStrategy
from .forest.data import squared_expectation_matrix
from .forest.model import ForestModel, ForestStrategy
from .pauli import observable_set
from .session import (
    MeasurementTrace,
    StaticOrderStrategy,
    Status,
    Strategy,
    run_detection,
)
from .states import PureState, expectations_batch, gdansk_state, sample_haar_batch
from .treesearch import TreeStrategy

# A strategy factory builds a fresh strategy instance for one detection
# run; it receives the state under test (for the Bloch preliminary) and
# a per-run seed.
StrategyFactory = Callable[[PureState, np.random.SeedSequence], Strategy]


def forest_factory(model: ForestModel) -> StrategyFactory:
    return lambda state, seed: ForestStrategy(model)


def tree_factory(threshold: float = 0.25) -> StrategyFactory:
    return lambda state, seed: TreeStrategy.from_state(state, threshold=threshold)


def bayes_factory(n_particles: int = 2000, n_shots: int = 300) -> StrategyFactory:
    return lambda state, seed: BayesStrategy(
        state.n_qubits, n_particles, n_shots, seed=seed
    )


def static_factory(order=()) -> StrategyFactory:
    return lambda state, seed: StaticOrderStrategy(order)


@dataclass
class StrategyStats:
    """Per-strategy aggregation over one benchmark run."""

    histogram: dict[int, int] = field(default_factory=dict)
    detected_histogram: dict[int, int] = field(default_factory=dict)
    failures: int = 0
    preliminary_cost: int = 0

    def add(self, trace: MeasurementTrace) -> None:
        self.histogram[trace.length] = self.histogram.get(trace.length, 0) + 1
        if trace.final_status is Status.ENTANGLED:
            self.detected_histogram[trace.length] = (
                self.detected_histogram.get(trace.length, 0) + 1
            )
        else:
            self.failures += 1

    @property
    def counts(self) -> list[int]:
        out: list[int] = []
        for steps, freq in sorted(self.histogram.items()):
            out.extend([steps] * freq)
        return out

    @property
    def mean(self) -> float:
        counts = self.counts
        return float(np.mean(counts)) if counts else float("nan")

    @property
    def mean_with_preliminary(self) -> float:
        return self.mean + self.preliminary_cost

    @property
    def median(self) -> float:
        counts = self.counts
        return float(np.median(counts)) if counts else float("nan")


@dataclass
class BenchResult:
    n_qubits: int
    n_states: int
    max_steps: int
    stats: dict[str, StrategyStats]
    config: dict = field(default_factory=dict)

    def cumulative_detected(self, name: str) -> list[int]:
        """States detected within k measurements, for k = 1 .. max_steps."""
        hist = self.stats[name].detected_histogram
        out = []
        running = 0
        for k in range(1, self.max_steps + 1):
            running += hist.get(k, 0)
            out.append(running)
        return out

    def to_csv(self, target) -> None:
        """Columns: steps, then one cumulative-detections column per strategy."""
        close = False
        if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
            target = open(target, "w", newline="")
            close = True
        try:
            writer = csv.writer(target)
            names = list(self.stats)
            writer.writerow(["steps", *names])
            columns = {name: self.cumulative_detected(name) for name in names}
            for k in range(1, self.max_steps + 1):
                writer.writerow([k, *(columns[name][k - 1] for name in names)])
        finally:
            if close:
                target.close()

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()

    def summary(self) -> str:
        lines = []
        for name, st in self.stats.items():
            line = (
                f"{name}: mean {st.mean:.2f}, median {st.median:.0f}, "
                f"undetected {st.failures}/{self.n_states}"
            )
            if st.preliminary_cost:
                line += (
                    f" (mean {st.mean_with_preliminary:.2f} counting the "
                    f"{st.preliminary_cost}-measurement preliminary)"
                )
            lines.append(line)
        return "\n".join(lines)


def run_benchmark(
    source: Iterable[PureState] | Iterator[PureState],
    strategies: dict[str, StrategyFactory],
    n_states: int,
    max_steps: int | None = None,
    seed: int = 0,
    config: dict | None = None,
) -> BenchResult:
    """Compare strategies on the same sampled states, one trace each."""
    if n_states < 1:
        raise ValueError("n_states must be at least 1")
    it = iter(source)
    states = [next(it) for _ in range(n_states)]
    n_qubits = states[0].n_qubits
    if max_steps is None:
        max_steps = observable_set(n_qubits).size
    root_seq = np.random.SeedSequence(seed)
    stats = {name: StrategyStats() for name in strategies}
    for state in states:
        child_seeds = root_seq.spawn(len(strategies))
        for (name, factory), child in zip(strategies.items(), child_seeds):
            strategy = factory(state, child)
            trace = run_detection(strategy, state, n_qubits, max_steps)
            st = stats[name]
            st.add(trace)
            if isinstance(strategy, TreeStrategy):
                st.preliminary_cost = strategy.preliminary_cost
    return BenchResult(n_qubits, n_states, max_steps, stats, config or {})


def gdansk_sweep(
    model: ForestModel,
    n_points: int = 24,
    max_steps: int | None = None,
) -> tuple[float, list[int]]:
    """Mean forest measurement count over interpolated three-qubit states.

    Angles form a uniform right-endpoint grid over (0, pi/2], so a
    single point evaluates the one-excitation endpoint state.
    """
    if n_points < 1:
        raise ValueError("n_points must be at least 1")
    counts = []
    for k in range(1, n_points + 1):
        alpha = (math.pi / 2) * k / n_points
        state = gdansk_state(alpha)
        trace = run_detection(ForestStrategy(model), state, 3, max_steps)
        counts.append(trace.length)
    return float(np.mean(counts)), counts


@dataclass(frozen=True)
class ConcentrationReport:
    """How rare large squared correlations are under the uniform prior."""

    n_qubits: int
    n_samples: int
    epsilon: float
    fraction_exceeding: float
    analytic_bound: float
    median_expectation: float
    lipschitz_bound: float = 3.0


def levy_bound(n_qubits: int, epsilon: float) -> float:
    """exp[-(k - 1) eps / (2 pi^2 eta^2)] on the 2^(N+1)-dimensional sphere.

    eta^2 = 3 bounds the squared gradient of the expectation functional:
    the diagonal term is at most 2 by normalization and the remaining
    term equals 1 because Pauli words square to identity. The constant
    is documented here and checked empirically, not re-derived.
    """
    k = 2 ** (n_qubits + 1)
    return math.exp(-(k - 1) * epsilon / (2.0 * math.pi**2 * 3.0))


def concentration_report(
    n_qubits: int,
    n_samples: int,
    epsilon: float,
    rng: np.random.Generator,
) -> ConcentrationReport:
    """Empirical tail fraction of squared correlations vs the analytic bound."""
    if n_samples < 100:
        raise ValueError("need at least 100 samples for a stable fraction")
    states = sample_haar_batch(n_qubits, n_samples, rng)
    sq = squared_expectation_matrix(states, n_qubits)
    members = observable_set(n_qubits).members
    raw = np.concatenate([expectations_batch(states, p.letters) for p in members])
    return ConcentrationReport(
        n_qubits,
        n_samples,
        epsilon,
        float(np.mean(sq > epsilon)),
        levy_bound(n_qubits, epsilon),
        float(np.median(raw)),
    )


def concentration_table(
    qubit_range: Iterable[int],
    n_samples: int,
    epsilon: float,
    seed: int = 0,
) -> list[ConcentrationReport]:
    reports = []
    for n in qubit_range:
        rng = np.random.default_rng(np.random.SeedSequence([seed, n]))
        reports.append(concentration_report(n, n_samples, epsilon, rng))
    return reports


def concentration_csv(reports: list[ConcentrationReport], target) -> None:
    close = False
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        target = open(target, "w", newline="")
        close = True
    try:
        writer = csv.writer(target)
        writer.writerow(["n_qubits", "epsilon", "empirical_fraction", "analytic_bound"])
        for r in reports:
            writer.writerow(
                [r.n_qubits, r.epsilon, repr(r.fraction_exceeding), repr(r.analytic_bound)]
            )
    finally:
        if close:
            target.close()


def concentration_text(reports: list[ConcentrationReport]) -> str:
    lines = [
        "fraction of squared correlations exceeding epsilon (uniform random states)"
    ]
    for r in reports:
        lines.append(
            f"N={r.n_qubits}: eps={r.epsilon} fraction={r.fraction_exceeding:.4f} "
            f"bound={r.analytic_bound:.4f} median<B>={r.median_expectation:+.4f} "
            f"(samples={r.n_samples})"
        )
    return "\n".join(lines)
