"""Partial maps from observables to measured correlation values."""

from __future__ import annotations

from typing import Iterator, Mapping

from .errors import QubitCountError, ValueRangeError
from .pauli import PauliString, observable_set

# Values marginally outside [-1, 1] (experimental fixtures) are clamped;
# anything further out is rejected.
CLAMP_TOL = 1e-6
# Slack used by invariant checks on stored values.
RANGE_TOL = 1e-9


def clamp_value(value: float, tol: float = CLAMP_TOL) -> float:
    if not -1.0 - tol <= value <= 1.0 + tol:
        raise ValueRangeError(f"correlation value {value} outside [-1, 1]")
    return min(1.0, max(-1.0, float(value)))


class CorrelationRecord:
    """What a detection session knows: observable -> expectation in [-1, 1]."""

    __slots__ = ("n_qubits", "entries", "noise_scale")

    def __init__(
        self,
        n_qubits: int,
        entries: Mapping[PauliString, float] | None = None,
        noise_scale: float = 1.0,
    ):
        if n_qubits < 1:
            raise QubitCountError(f"need at least one qubit, got {n_qubits}")
        if not 0.0 <= noise_scale <= 1.0:
            raise ValueRangeError(f"noise_scale {noise_scale} outside [0, 1]")
        self.n_qubits = n_qubits
        self.entries: dict[PauliString, float] = {}
        self.noise_scale = float(noise_scale)
        if entries:
            for p, v in entries.items():
                self.set(p, v)

    def set(self, p: PauliString, value: float) -> None:
        if p.n_qubits != self.n_qubits:
            raise QubitCountError(
                f"{p.label} has {p.n_qubits} qubits, record holds {self.n_qubits}"
            )
        self.entries[p] = clamp_value(value)

    def __contains__(self, p: PauliString) -> bool:
        return p in self.entries

    def __getitem__(self, p: PauliString) -> float:
        return self.entries[p]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[PauliString]:
        return iter(self.entries)

    def items(self):
        return self.entries.items()

    def is_complete(self) -> bool:
        return len(self.entries) == observable_set(self.n_qubits).size

    def missing(self) -> list[PauliString]:
        return [
            p for p in observable_set(self.n_qubits) if p not in self.entries
        ]

    def copy(self) -> "CorrelationRecord":
        out = CorrelationRecord(self.n_qubits, noise_scale=self.noise_scale)
        out.entries = dict(self.entries)
        return out


def apply_white_noise(record: CorrelationRecord, p: float) -> CorrelationRecord:
    """Scale every full-weight correlation by (1 - p).

    Mixing a state with probability-p white noise multiplies each
    full-weight correlation by (1 - p) and leaves the measurement order
    logic untouched, so the scaling is all the pipeline needs.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueRangeError(f"noise probability {p} outside [0, 1]")
    out = CorrelationRecord(
        record.n_qubits, noise_scale=record.noise_scale * (1.0 - p)
    )
    out.entries = {obs: v * (1.0 - p) for obs, v in record.entries.items()}
    return out
