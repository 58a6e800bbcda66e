import itertools

import numpy as np
import pytest

from entdetect.clifford import (
    CliffordTableau,
    apply_tableau_circuit,
    conjugate,
    conjugate_string,
    letter_permutation_tableau,
    random_clifford,
)
from entdetect.errors import QubitCountError
from entdetect.pauli import (
    commutes,
    matrix_of,
    matrix_of_word,
    observable_set,
    parse_pauli,
    word_is_full_weight,
)
from entdetect.states import PureState, apply_gate, expectation, expectation_word, sample_haar_pure


def circuit_unitary(tab: CliffordTableau) -> np.ndarray:
    dim = 2**tab.n_qubits
    u = np.zeros((dim, dim), dtype=complex)
    for b in range(dim):
        amps = np.zeros(dim, dtype=complex)
        amps[b] = 1.0
        for gate in tab.gates:
            amps = apply_gate(amps, gate, tab.n_qubits)
        u[:, b] = amps
    return u


class TestTableauBasics:
    def test_identity(self):
        tab = CliffordTableau.identity(2)
        word, sign = conjugate(tab, parse_pauli("xy"))
        assert word == (1, 2) and sign == 1

    def test_hadamard_swaps_x_and_z(self):
        tab = CliffordTableau.from_gates(2, [("h", 1)])
        word, sign = conjugate(tab, parse_pauli("xy"))
        assert word == (3, 2) and sign == 1
        word, sign = conjugate(tab, parse_pauli("zy"))
        assert word == (1, 2) and sign == 1

    def test_qubit_mismatch(self):
        tab = CliffordTableau.identity(2)
        with pytest.raises(QubitCountError):
            conjugate(tab, parse_pauli("xyz"))

    def test_identity_bearing_images_are_legal(self):
        # CNOT maps the all-X two-qubit string onto a single-qubit factor
        tab = CliffordTableau.from_gates(2, [("cx", 1, 2)])
        word, sign = conjugate(tab, parse_pauli("xx"))
        assert not word_is_full_weight(word)
        string, _ = conjugate_string(tab, parse_pauli("xx"))
        assert string is None


class TestAgainstMatrixOracle:
    @pytest.mark.parametrize("n_qubits", [1, 2, 3])
    def test_conjugation_matches_matrices(self, n_qubits, rng):
        for _ in range(6):
            tab = random_clifford(n_qubits, rng)
            u = circuit_unitary(tab)
            for p in observable_set(n_qubits).members:
                word, sign = conjugate(tab, p)
                lhs = u @ matrix_of(p) @ u.conj().T
                assert np.allclose(lhs, sign * matrix_of_word(word), atol=1e-10)

    def test_commutation_preserved_on_random_pairs(self, rng):
        members = observable_set(3).members
        tab = random_clifford(3, rng)
        for _ in range(100):
            i, j = rng.integers(0, len(members), size=2)
            p, q = members[int(i)], members[int(j)]
            wp, _ = conjugate(tab, p)
            wq, _ = conjugate(tab, q)
            # commutation of words: even number of differing non-identity slots
            diff = sum(
                1 for a, b in zip(wp, wq) if a != b and a != 0 and b != 0
            )
            assert (diff % 2 == 0) == commutes(p, q)

    def test_expectation_preserved_through_circuit(self, rng):
        state = sample_haar_pure(2, rng)
        for _ in range(5):
            tab = random_clifford(2, rng)
            moved = apply_tableau_circuit(state, tab)
            for p in observable_set(2).members:
                word, sign = conjugate(tab, p)
                before = expectation(state, p)
                after = expectation_word(moved, word)
                assert after == pytest.approx(sign * before, abs=1e-10)
                assert abs(after) == pytest.approx(abs(before), abs=1e-10)


class TestLetterPermutations:
    def test_all_single_qubit_permutations_realized(self):
        for perm in itertools.permutations((1, 2, 3)):
            tab = letter_permutation_tableau([perm])
            for code, label in zip((1, 2, 3), "xyz"):
                word, _ = conjugate(tab, parse_pauli(label))
                assert word == (perm[code - 1],)

    def test_multi_qubit_permutation_keeps_full_weight(self, rng):
        perms = [(3, 2, 1), (2, 1, 3), (1, 2, 3)]
        tab = letter_permutation_tableau(perms)
        for p in observable_set(3).members:
            word, _ = conjugate(tab, p)
            assert word_is_full_weight(word)
            expected = tuple(perms[q][a - 1] for q, a in enumerate(p.letters))
            assert word == expected

    def test_rejects_non_permutation(self):
        with pytest.raises(ValueError):
            letter_permutation_tableau([(1, 1, 2)])

    def test_squared_expectations_permute(self, rng):
        state = sample_haar_pure(2, rng)
        tab = letter_permutation_tableau([(2, 1, 3), (3, 2, 1)])
        moved = apply_tableau_circuit(state, tab)
        for p in observable_set(2).members:
            string, _ = conjugate_string(tab, p)
            assert string is not None
            assert expectation(moved, string) ** 2 == pytest.approx(
                expectation(state, p) ** 2, abs=1e-10
            )
