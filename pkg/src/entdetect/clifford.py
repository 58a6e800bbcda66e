"""Clifford conjugation of Pauli words via letter-image tableaux.

A tableau stores, for every qubit and every input letter X/Y/Z on that
qubit, the image word and sign under conjugation by the circuit that
generated the tableau. Tableaux are built by composing random H/S/CNOT
words (the generation method declared here); correctness is checked
against dense-matrix conjugation in the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import QubitCountError
from .pauli import (
    IDENT,
    X,
    Y,
    Z,
    PauliString,
    multiply_words,
    word_is_full_weight,
)
from .states import PureState, apply_gate

# Single-letter images under H and S conjugation: letter -> (letter, sign).
_H_MAP = {X: (Z, 1), Y: (Y, -1), Z: (X, 1), IDENT: (IDENT, 1)}
_S_MAP = {X: (Y, 1), Y: (X, -1), Z: (Z, 1), IDENT: (IDENT, 1)}

# Two-letter (control, target) images under CNOT conjugation.
_CX_MAP = {
    (IDENT, IDENT): (IDENT, IDENT, 1),
    (X, IDENT): (X, X, 1),
    (Y, IDENT): (Y, X, 1),
    (Z, IDENT): (Z, IDENT, 1),
    (IDENT, X): (IDENT, X, 1),
    (X, X): (X, IDENT, 1),
    (Y, X): (Y, IDENT, 1),
    (Z, X): (Z, X, 1),
    (IDENT, Z): (Z, Z, 1),
    (X, Z): (Y, Y, -1),
    (Y, Z): (X, Y, 1),
    (Z, Z): (IDENT, Z, 1),
    (IDENT, Y): (Z, Y, 1),
    (X, Y): (Y, Z, 1),
    (Y, Y): (X, Z, -1),
    (Z, Y): (IDENT, Y, 1),
}


def _image_through_gate(
    word: tuple[int, ...], sign: int, gate: tuple
) -> tuple[tuple[int, ...], int]:
    letters = list(word)
    kind = gate[0]
    if kind == "h":
        q = gate[1] - 1
        letters[q], s = _H_MAP[letters[q]]
        return tuple(letters), sign * s
    if kind == "s":
        q = gate[1] - 1
        letters[q], s = _S_MAP[letters[q]]
        return tuple(letters), sign * s
    if kind == "cx":
        c, t = gate[1] - 1, gate[2] - 1
        lc, lt, s = _CX_MAP[(letters[c], letters[t])]
        letters[c], letters[t] = lc, lt
        return tuple(letters), sign * s
    raise ValueError(f"tableaux support h/s/cx gates, got {gate!r}")


@dataclass(frozen=True)
class CliffordTableau:
    """Conjugation images of single-letter inputs, plus the generating circuit."""

    n_qubits: int
    # images[q][letter-1] = (word, sign) for input letter on qubit q+1
    images: tuple[tuple[tuple[tuple[int, ...], int], ...], ...]
    gates: tuple[tuple, ...] = field(default=())

    @classmethod
    def identity(cls, n_qubits: int) -> "CliffordTableau":
        return cls.from_gates(n_qubits, ())

    @classmethod
    def from_gates(
        cls, n_qubits: int, gates: Sequence[tuple]
    ) -> "CliffordTableau":
        if n_qubits < 1:
            raise QubitCountError("need at least one qubit")
        images = []
        for q in range(n_qubits):
            per_letter = []
            for a in (X, Z):
                word = tuple(
                    a if i == q else IDENT for i in range(n_qubits)
                )
                sign = 1
                for gate in gates:
                    word, sign = _image_through_gate(word, sign, gate)
                per_letter.append((word, sign))
            # Y = i X Z, so its image is i * image(X) * image(Z).
            xw, xs = per_letter[0]
            zw, zs = per_letter[1]
            yw, k = multiply_words(xw, zw)
            k = (k + 1) % 4  # the leading i
            if k not in (0, 2):
                raise AssertionError("Y image acquired a non-real phase")
            ys = xs * zs * (1 if k == 0 else -1)
            images.append(((per_letter[0]), (yw, ys), (per_letter[1])))
        return cls(n_qubits, tuple(tuple(i) for i in images), tuple(gates))


def conjugate(
    tab: CliffordTableau, p: PauliString
) -> tuple[tuple[int, ...], int]:
    """Image of a full-weight string under the tableau: (word, sign).

    The image word may contain identity factors; callers that need
    full-weight strings filter on :func:`entdetect.pauli.word_is_full_weight`.
    """
    if p.n_qubits != tab.n_qubits:
        raise QubitCountError(
            f"string on {p.n_qubits} qubits vs tableau on {tab.n_qubits}"
        )
    word: tuple[int, ...] = tuple([IDENT] * tab.n_qubits)
    phase = 0
    sign = 1
    for q, a in enumerate(p.letters):
        img, s = tab.images[q][a - 1]
        word, k = multiply_words(word, img)
        phase = (phase + k) % 4
        sign *= s
    if phase not in (0, 2):
        raise AssertionError("conjugated Hermitian word acquired phase i")
    return word, sign * (1 if phase == 0 else -1)


def conjugate_string(
    tab: CliffordTableau, p: PauliString
) -> tuple[PauliString | None, int]:
    """Like :func:`conjugate`, returning None when the image has identities."""
    word, sign = conjugate(tab, p)
    if not word_is_full_weight(word):
        return None, sign
    return PauliString(word), sign


def apply_tableau_circuit(state: PureState, tab: CliffordTableau) -> PureState:
    """Apply the tableau's generating circuit to a state."""
    if state.n_qubits != tab.n_qubits:
        raise QubitCountError("state/tableau qubit mismatch")
    amps = state.amplitudes
    for gate in tab.gates:
        amps = apply_gate(amps, gate, tab.n_qubits)
    return PureState.normalized(amps)


def random_clifford(n_qubits: int, rng: np.random.Generator) -> CliffordTableau:
    """Tableau of a random gate word over {H, S, CNOT}.

    Word length 12 N^2 + 12 mixes well at the system sizes used here; the
    distribution is not exactly uniform over the Clifford group, which no
    caller requires.
    """
    n_gates = 12 * n_qubits * n_qubits + 12
    kinds = ("h", "s", "cx") if n_qubits >= 2 else ("h", "s")
    gates: list[tuple] = []
    for _ in range(n_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "cx":
            c, t = rng.choice(n_qubits, size=2, replace=False)
            gates.append(("cx", int(c) + 1, int(t) + 1))
        else:
            gates.append((kind, int(rng.integers(n_qubits)) + 1))
    return CliffordTableau.from_gates(n_qubits, gates)


@lru_cache(maxsize=1)
def _single_qubit_permutation_words() -> dict[tuple[int, int, int], tuple[tuple, ...]]:
    """One {H,S} word per permutation of the letters {X, Y, Z}.

    Found by breadth-first composition; the unsigned action of H is the
    X<->Z swap and of S the X<->Y swap, which generate all six
    permutations.
    """
    h_perm = {X: Z, Y: Y, Z: X}
    s_perm = {X: Y, Y: X, Z: Z}
    found: dict[tuple[int, int, int], tuple[tuple, ...]] = {
        (X, Y, Z): ()
    }
    frontier = [(X, Y, Z)]
    while len(found) < 6:
        nxt = []
        for perm in frontier:
            for gate_name, gmap in (("h", h_perm), ("s", s_perm)):
                new = tuple(gmap[p] for p in perm)
                if new not in found:
                    found[new] = found[perm] + ((gate_name, 1),)
                    nxt.append(new)
        frontier = nxt
    return found


def letter_permutation_tableau(
    perms: Sequence[Sequence[int]],
) -> CliffordTableau:
    """Tableau realizing a per-qubit permutation of the Pauli letters.

    ``perms[q]`` is a 3-tuple giving the image letters of (X, Y, Z) on
    qubit q+1. Such tableaux always map full-weight strings to
    full-weight strings, which is what the training-data augmentation
    relies on.
    """
    n = len(perms)
    words = _single_qubit_permutation_words()
    gates: list[tuple] = []
    for q, perm in enumerate(perms):
        key = tuple(perm)
        if key not in words:
            raise ValueError(f"{perm!r} is not a permutation of (X, Y, Z)")
        for gate in words[key]:
            gates.append((gate[0], q + 1))
    return CliffordTableau.from_gates(n, gates)
