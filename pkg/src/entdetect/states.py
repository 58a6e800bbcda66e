"""Pure-state vectors, expectation values, and random state sampling.

Basis convention: index ``b`` of the amplitude vector is read as the
bitstring ``b_1 b_2 ... b_N`` with qubit 1 in the most significant
position, matching the Kronecker-product order of
:func:`entdetect.pauli.matrix_of`. Expectations of Pauli words are
evaluated by bit-indexed application of the word to the amplitude
vector, never by materializing the dense matrix (that path exists
separately as an oracle).
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .errors import EntdetectError, QubitCountError
from .pauli import IDENT, X, Y, Z, PauliString, matrix_of_word

NORM_TOL = 1e-10


class PureState:
    """An N-qubit pure state. Amplitudes are immutable after construction."""

    __slots__ = ("amplitudes", "n_qubits")

    def __init__(self, amplitudes: np.ndarray | Sequence[complex]):
        amps = np.array(amplitudes, dtype=complex)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be a vector")
        n = int(round(math.log2(amps.shape[0])))
        if 2**n != amps.shape[0] or n < 1:
            raise ValueError(f"amplitude vector length {amps.shape[0]} is not 2^N")
        nrm = np.linalg.norm(amps)
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValueError(f"state norm {nrm} deviates from 1 beyond {NORM_TOL}")
        amps.flags.writeable = False
        self.amplitudes = amps
        self.n_qubits = n

    @classmethod
    def normalized(cls, amplitudes: Sequence[complex]) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex)
        nrm = np.linalg.norm(amps)
        if nrm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / nrm)

    def __repr__(self) -> str:
        return f"PureState(n_qubits={self.n_qubits})"


def _word_masks(letters: Sequence[int], n: int) -> tuple[int, int, int]:
    """Bit masks driving the word's action: (flip mask, sign mask, #Y)."""
    xmask = 0
    yzmask = 0
    n_y = 0
    for q, a in enumerate(letters):
        bit = n - 1 - q
        if a == X:
            xmask |= 1 << bit
        elif a == Y:
            xmask |= 1 << bit
            yzmask |= 1 << bit
            n_y += 1
        elif a == Z:
            yzmask |= 1 << bit
    return xmask, yzmask, n_y


def _parity(values: np.ndarray, n_bits: int) -> np.ndarray:
    par = np.zeros(values.shape, dtype=np.int64)
    for k in range(n_bits):
        par ^= (values >> k) & 1
    return par


def apply_word(amps: np.ndarray, letters: Sequence[int]) -> np.ndarray:
    """Apply a Pauli word to an amplitude vector: returns P|psi>.

    ``P|b> = i^{n_Y} (-1)^{popcount(b & yz)} |b ^ x>`` per basis state.
    """
    n = len(letters)
    dim = amps.shape[-1]
    if dim != 2**n:
        raise QubitCountError(f"state dim {dim} does not match word length {n}")
    xmask, yzmask, n_y = _word_masks(letters, n)
    idx = np.arange(dim)
    src = idx ^ xmask
    signs = 1.0 - 2.0 * _parity(src & yzmask, n)
    phase = (1j ** (n_y % 4)) * signs
    return phase * amps[..., src]


def expectation_word(state: PureState, letters: Sequence[int]) -> float:
    """<psi| P |psi> for a Pauli word (identity letters allowed)."""
    if len(letters) != state.n_qubits:
        raise QubitCountError(
            f"word length {len(letters)} vs state on {state.n_qubits} qubits"
        )
    val = np.vdot(state.amplitudes, apply_word(state.amplitudes, letters))
    return float(val.real)


def expectation(state: PureState, p: PauliString) -> float:
    """Expectation of a full-weight Pauli observable on a pure state."""
    return expectation_word(state, p.letters)


def expectation_dense(state: PureState, p: PauliString) -> float:
    """Dense-matrix oracle for :func:`expectation` (small N only)."""
    if p.n_qubits != state.n_qubits:
        raise QubitCountError(
            f"observable on {p.n_qubits} qubits vs state on {state.n_qubits}"
        )
    m = matrix_of_word(p.letters)
    val = np.vdot(state.amplitudes, m @ state.amplitudes)
    return float(val.real)


def expectations_batch(amps: np.ndarray, letters: Sequence[int]) -> np.ndarray:
    """Expectations of one Pauli word for a batch of states (rows)."""
    n = len(letters)
    dim = amps.shape[-1]
    if dim != 2**n:
        raise QubitCountError(f"state dim {dim} does not match word length {n}")
    xmask, yzmask, n_y = _word_masks(letters, n)
    idx = np.arange(dim)
    src = idx ^ xmask
    signs = 1.0 - 2.0 * _parity(src & yzmask, n)
    phase = (1j ** (n_y % 4)) * signs
    vals = np.einsum("...i,...i->...", amps.conj(), phase * amps[..., src])
    return vals.real


def bloch_vector(state: PureState, qubit: int) -> tuple[float, float, float]:
    """(<x>, <y>, <z>) of a single qubit (1-indexed)."""
    if not 1 <= qubit <= state.n_qubits:
        raise QubitCountError(f"qubit {qubit} out of range")
    out = []
    for a in (X, Y, Z):
        word = [IDENT] * state.n_qubits
        word[qubit - 1] = a
        out.append(expectation_word(state, word))
    return tuple(out)  # type: ignore[return-value]


def bloch_vectors(state: PureState) -> list[tuple[float, float, float]]:
    return [bloch_vector(state, q + 1) for q in range(state.n_qubits)]


# -- gate application (used by the random-circuit sampler and Clifford tests)

_SQRT_HALF = 1.0 / math.sqrt(2.0)


def _reshaped(amps: np.ndarray, qubit: int, n: int) -> np.ndarray:
    pre = 2 ** (qubit - 1)
    post = 2 ** (n - qubit)
    return amps.reshape(pre, 2, post)


def apply_h(amps: np.ndarray, qubit: int, n: int) -> np.ndarray:
    r = _reshaped(amps, qubit, n)
    out = np.empty_like(r)
    out[:, 0, :] = _SQRT_HALF * (r[:, 0, :] + r[:, 1, :])
    out[:, 1, :] = _SQRT_HALF * (r[:, 0, :] - r[:, 1, :])
    return out.reshape(-1)


def apply_phase(amps: np.ndarray, qubit: int, n: int, phase: complex) -> np.ndarray:
    """diag(1, phase) on one qubit; phase=i gives S, exp(i pi/4) gives T."""
    r = _reshaped(amps, qubit, n).copy()
    r[:, 1, :] *= phase
    return r.reshape(-1)


def apply_t(amps: np.ndarray, qubit: int, n: int) -> np.ndarray:
    return apply_phase(amps, qubit, n, np.exp(1j * math.pi / 4))


def apply_s(amps: np.ndarray, qubit: int, n: int) -> np.ndarray:
    return apply_phase(amps, qubit, n, 1j)


def apply_cnot(amps: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    if control == target:
        raise ValueError("CNOT needs distinct qubits")
    shaped = amps.reshape((2,) * n).copy()
    c_ax, t_ax = control - 1, target - 1
    sel1 = [slice(None)] * n
    sel1[c_ax] = 1
    block = shaped[tuple(sel1)]
    shaped[tuple(sel1)] = np.flip(block, axis=t_ax if t_ax < c_ax else t_ax - 1)
    return shaped.reshape(-1)


def apply_gate(amps: np.ndarray, gate: tuple, n: int) -> np.ndarray:
    kind = gate[0]
    if kind == "h":
        return apply_h(amps, gate[1], n)
    if kind == "t":
        return apply_t(amps, gate[1], n)
    if kind == "s":
        return apply_s(amps, gate[1], n)
    if kind == "cx":
        return apply_cnot(amps, gate[1], gate[2], n)
    raise ValueError(f"unknown gate {gate!r}")


# -- samplers


def sample_haar_pure(n_qubits: int, rng: np.random.Generator) -> PureState:
    """Uniform (unitarily invariant) random pure state.

    A normalized complex-Gaussian vector has the same distribution as
    U|0...0> with U drawn uniformly, and is much cheaper to produce.
    """
    return PureState(sample_haar_batch(n_qubits, 1, rng)[0])


def sample_haar_batch(
    n_qubits: int, n_states: int, rng: np.random.Generator
) -> np.ndarray:
    if n_qubits < 1:
        raise QubitCountError(f"need at least one qubit, got {n_qubits}")
    dim = 2**n_qubits
    vecs = rng.standard_normal((n_states, dim)) + 1j * rng.standard_normal(
        (n_states, dim)
    )
    norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    while np.any(norms == 0):  # pragma: no cover - probability zero
        bad = norms[:, 0] == 0
        vecs[bad] = rng.standard_normal((bad.sum(), dim)) + 1j * rng.standard_normal(
            (bad.sum(), dim)
        )
        norms = np.linalg.norm(vecs, axis=1, keepdims=True)
    return vecs / norms


def sample_product_pure(n_qubits: int, rng: np.random.Generator) -> PureState:
    """Tensor product of independent single-qubit uniform random states."""
    amps = np.array([1.0], dtype=complex)
    for _ in range(n_qubits):
        amps = np.kron(amps, sample_haar_batch(1, 1, rng)[0])
    return PureState.normalized(amps)


def draw_gate_sequence(
    n_qubits: int, mean_gates: float, rng: np.random.Generator
) -> list[tuple]:
    """Poisson-length random word over {H, T, CNOT} with uniform placement.

    On a single qubit the two-qubit gate is unavailable and the word is
    drawn over {H, T} only.
    """
    if mean_gates <= 0:
        raise ValueError(f"mean_gates must be positive, got {mean_gates}")
    n_gates = int(rng.poisson(mean_gates))
    kinds = ("h", "t", "cx") if n_qubits >= 2 else ("h", "t")
    gates: list[tuple] = []
    for _ in range(n_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        if kind == "cx":
            c, t = rng.choice(n_qubits, size=2, replace=False)
            gates.append(("cx", int(c) + 1, int(t) + 1))
        else:
            gates.append((kind, int(rng.integers(n_qubits)) + 1))
    return gates


def random_circuit_state(
    n_qubits: int, mean_gates: float, rng: np.random.Generator
) -> PureState:
    """State produced by a Poisson-length random {H, T, CNOT} circuit on |0...0>."""
    state, _ = random_circuit_state_counted(n_qubits, mean_gates, rng)
    return state


def random_circuit_state_counted(
    n_qubits: int, mean_gates: float, rng: np.random.Generator
) -> tuple[PureState, int]:
    """Like :func:`random_circuit_state`, also returning the gate count."""
    gates = draw_gate_sequence(n_qubits, mean_gates, rng)
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = 1.0
    for gate in gates:
        amps = apply_gate(amps, gate, n_qubits)
    return PureState.normalized(amps), len(gates)


# -- named states


def bell_state() -> PureState:
    return PureState(np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2))


def ghz_state(n_qubits: int) -> PureState:
    if n_qubits < 2:
        raise QubitCountError("GHZ needs at least 2 qubits")
    amps = np.zeros(2**n_qubits, dtype=complex)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2)
    return PureState(amps)


def dicke_state(n_qubits: int, k: int) -> PureState:
    """Equal superposition of all N-qubit basis states with k excitations."""
    if k > n_qubits or k < 0:
        raise ValueError(f"dicke excitations k={k} out of range for N={n_qubits}")
    amps = np.zeros(2**n_qubits, dtype=complex)
    hits = [b for b in range(2**n_qubits) if bin(b).count("1") == k]
    amps[hits] = 1.0 / math.sqrt(len(hits))
    return PureState(amps)


def gdansk_state(alpha: float) -> PureState:
    """cos(a) |three qubits, two excitations> + sin(a) |one excitation>.

    Any real alpha is accepted; the two Dicke components are orthogonal,
    so the result is normalized for every angle.
    """
    d2 = dicke_state(3, 2).amplitudes
    d1 = dicke_state(3, 1).amplitudes
    return PureState.normalized(math.cos(alpha) * d2 + math.sin(alpha) * d1)


def named_state(name: str, params: Sequence[float] = ()) -> PureState:
    """Dispatch on a state family name; see the CLI for the text syntax."""
    key = name.lower()
    if key == "bell":
        return bell_state()
    if key == "ghz":
        n = int(params[0]) if params else 2
        return ghz_state(n)
    if key == "dicke":
        if len(params) < 2:
            raise EntdetectError("dicke needs qubit count and excitation number")
        return dicke_state(int(params[0]), int(params[1]))
    if key == "gdansk":
        if len(params) < 1:
            raise EntdetectError("gdansk needs an angle parameter")
        return gdansk_state(float(params[0]))
    raise EntdetectError(f"unknown state name {name!r}")
