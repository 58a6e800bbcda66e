"""Pauli-string algebra: labels, canonical ordering, commutation, matrices.

Letters are coded as integers X=1, Y=2, Z=3 (0 is reserved for identity
factors, which only appear in internal "words", never in a
:class:`PauliString`). The canonical order over strings is lexicographic
with X < Y < Z; tuples of letter codes compare the same way, so plain
tuple comparison is used everywhere an ordering or tie-break is needed.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidLetterError, QubitCountError

IDENT, X, Y, Z = 0, 1, 2, 3

_LETTER_CHARS = "ixyz"
_CHAR_TO_CODE = {"x": X, "y": Y, "z": Z}

# Dense Pauli matrices are capped: 2^cap x 2^cap complex entries.
MATRIX_QUBIT_CAP = 8


@dataclass(frozen=True, order=True)
class PauliString:
    """A full-weight Pauli observable: one X/Y/Z factor per qubit."""

    letters: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.letters) == 0:
            raise InvalidLetterError("Pauli string must have at least one letter")
        if any(a not in (X, Y, Z) for a in self.letters):
            raise InvalidLetterError(
                f"full-weight Pauli string cannot contain {self.letters!r}"
            )

    @property
    def n_qubits(self) -> int:
        return len(self.letters)

    @property
    def label(self) -> str:
        return "".join(_LETTER_CHARS[a] for a in self.letters)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        return parse_pauli(label)

    def __str__(self) -> str:
        return self.label

    def __repr__(self) -> str:
        return f"PauliString({self.label!r})"


def parse_pauli(label: str) -> PauliString:
    """Parse a text label like ``"xyz"`` into a :class:`PauliString`.

    Identity letters are rejected: measurement settings are always
    full-weight.
    """
    if not label:
        raise InvalidLetterError("empty Pauli label")
    letters = []
    for ch in label.lower():
        code = _CHAR_TO_CODE.get(ch)
        if code is None:
            raise InvalidLetterError(f"invalid Pauli letter {ch!r} in {label!r}")
        letters.append(code)
    return PauliString(tuple(letters))


@dataclass(frozen=True)
class ObservableSet:
    """All 3^N full-weight Pauli strings on N qubits, canonically ordered."""

    n_qubits: int
    members: tuple[PauliString, ...]

    @property
    def size(self) -> int:
        return len(self.members)

    def index(self, p: PauliString) -> int:
        """Canonical index of ``p`` (mixed-radix digits over X<Y<Z)."""
        if p.n_qubits != self.n_qubits:
            raise QubitCountError(
                f"observable has {p.n_qubits} qubits, set has {self.n_qubits}"
            )
        idx = 0
        for a in p.letters:
            idx = idx * 3 + (a - 1)
        return idx

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)


@lru_cache(maxsize=None)
def observable_set(n_qubits: int) -> ObservableSet:
    if n_qubits < 1:
        raise QubitCountError(f"need at least one qubit, got {n_qubits}")
    members = tuple(
        PauliString(letters)
        for letters in itertools.product((X, Y, Z), repeat=n_qubits)
    )
    return ObservableSet(n_qubits, members)


def commutes(p: PauliString, q: PauliString) -> bool:
    """Whether the two Pauli matrices commute.

    Single-qubit factors anti-commute exactly when they differ, so the
    tensor products commute iff the letters differ in an even number of
    positions.
    """
    if p.n_qubits != q.n_qubits:
        raise QubitCountError(
            f"length mismatch: {p.label} vs {q.label}"
        )
    diff = sum(1 for a, b in zip(p.letters, q.letters) if a != b)
    return diff % 2 == 0


_SINGLES = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def matrix_of_word(letters: Sequence[int]) -> np.ndarray:
    """Kronecker product of single-qubit Pauli matrices (identity allowed)."""
    if len(letters) > MATRIX_QUBIT_CAP:
        raise QubitCountError(
            f"dense matrices capped at {MATRIX_QUBIT_CAP} qubits, got {len(letters)}"
        )
    out = _SINGLES[letters[0]]
    for a in letters[1:]:
        out = np.kron(out, _SINGLES[a])
    return out


def matrix_of(p: PauliString) -> np.ndarray:
    """Dense 2^N x 2^N matrix of a full-weight Pauli string."""
    return matrix_of_word(p.letters)


# Single-letter multiplication: _MUL[a][b] = (letter of a*b, phase exponent k
# with a*b = i^k * letter). Identity rows/columns included.
_MUL: dict[tuple[int, int], tuple[int, int]] = {}
for _a in range(4):
    _MUL[(0, _a)] = (_a, 0)
    _MUL[(_a, 0)] = (_a, 0)
    _MUL[(_a, _a)] = (0, 0)
_MUL[(X, Y)] = (Z, 1)
_MUL[(Y, X)] = (Z, 3)
_MUL[(Y, Z)] = (X, 1)
_MUL[(Z, Y)] = (X, 3)
_MUL[(Z, X)] = (Y, 1)
_MUL[(X, Z)] = (Y, 3)


def multiply_words(
    w1: Sequence[int], w2: Sequence[int]
) -> tuple[tuple[int, ...], int]:
    """Multiply two Pauli words letter-wise.

    Returns ``(word, k)`` with ``w1 * w2 = i^k * word`` (k mod 4).
    """
    if len(w1) != len(w2):
        raise QubitCountError("word length mismatch")
    letters = []
    phase = 0
    for a, b in zip(w1, w2):
        c, k = _MUL[(a, b)]
        letters.append(c)
        phase = (phase + k) % 4
    return tuple(letters), phase


def word_is_full_weight(letters: Iterable[int]) -> bool:
    return all(a != IDENT for a in letters)


def word_label(letters: Iterable[int]) -> str:
    return "".join(_LETTER_CHARS[a] for a in letters)
