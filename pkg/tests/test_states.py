import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from entdetect.errors import EntdetectError, QubitCountError
from entdetect.pauli import observable_set, parse_pauli
from entdetect.states import (
    PureState,
    bell_state,
    bloch_vectors,
    dicke_state,
    draw_gate_sequence,
    expectation,
    expectation_dense,
    expectations_batch,
    gdansk_state,
    ghz_state,
    named_state,
    random_circuit_state,
    sample_haar_batch,
    sample_haar_pure,
    sample_product_pure,
)


class TestPureState:
    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            PureState([1.0, 1.0])

    def test_rejects_bad_length(self):
        with pytest.raises(ValueError):
            PureState([1.0, 0.0, 0.0])

    def test_amplitudes_frozen(self):
        state = bell_state()
        with pytest.raises(ValueError):
            state.amplitudes[0] = 0.0


class TestExpectation:
    def test_zero_state_z(self):
        zero = PureState([1.0, 0.0])
        assert expectation(zero, parse_pauli("z")) == pytest.approx(1.0, abs=1e-12)

    def test_bell_correlations(self):
        bell = bell_state()
        assert expectation(bell, parse_pauli("xx")) == pytest.approx(1.0, abs=1e-12)
        assert expectation(bell, parse_pauli("yy")) == pytest.approx(-1.0, abs=1e-12)
        assert expectation(bell, parse_pauli("zz")) == pytest.approx(1.0, abs=1e-12)

    def test_dicke_zzz_matches_dense_oracle(self):
        d13 = dicke_state(3, 1)
        p = parse_pauli("zzz")
        assert expectation(d13, p) == pytest.approx(
            expectation_dense(d13, p), abs=1e-12
        )
        assert expectation(d13, p) == pytest.approx(-1.0, abs=1e-12)

    def test_fast_matches_dense_on_random_cases(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 5))
            state = sample_haar_pure(n, rng)
            members = observable_set(n).members
            p = members[int(rng.integers(len(members)))]
            assert abs(expectation(state, p) - expectation_dense(state, p)) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(QubitCountError):
            expectation(bell_state(), parse_pauli("zzz"))

    def test_batch_matches_scalar(self, rng):
        states = sample_haar_batch(2, 50, rng)
        p = parse_pauli("xy")
        batch = expectations_batch(states, p.letters)
        for k in range(50):
            assert batch[k] == pytest.approx(
                expectation(PureState(states[k]), p), abs=1e-12
            )


class TestHaarSampler:
    def test_norms(self, rng):
        for seed in (0, 1, 12345):
            state = sample_haar_pure(3, np.random.default_rng(seed))
            assert abs(np.linalg.norm(state.amplitudes) - 1.0) < 1e-10

    def test_mean_expectation_near_zero_every_observable(self):
        rng = np.random.default_rng(8)
        states = sample_haar_batch(2, 10_000, rng)
        for p in observable_set(2).members:
            mean = float(np.mean(expectations_batch(states, p.letters)))
            assert abs(mean) < 0.05, (p.label, mean)

    def test_squared_marginals_indistinguishable(self):
        rng = np.random.default_rng(9)
        states = sample_haar_batch(2, 10_000, rng)
        xx = expectations_batch(states, parse_pauli("xx").letters) ** 2
        zz = expectations_batch(states, parse_pauli("zz").letters) ** 2
        result = scipy_stats.ks_2samp(xx, zz)
        assert result.pvalue > 0.01

    def test_product_state_sampler(self, rng):
        state = sample_product_pure(3, rng)
        total = sum(
            expectation(state, p) ** 2 for p in observable_set(3).members
        )
        assert total == pytest.approx(1.0, abs=1e-9)


class TestRandomCircuit:
    def test_zero_gates_leaves_ground_state(self):
        class ZeroPoisson:
            def __getattr__(self, name):
                raise AssertionError(f"unexpected rng use: {name}")

            def poisson(self, lam):
                return 0

        state = random_circuit_state(2, 48.0, ZeroPoisson())
        assert np.allclose(state.amplitudes, [1, 0, 0, 0])

    def test_single_hadamard_single_qubit(self):
        class OneHadamard:
            def poisson(self, lam):
                return 1

            def integers(self, n):
                return 0  # picks the "h" kind, then qubit index 0

        state = random_circuit_state(1, 1.0, OneHadamard())
        assert np.allclose(state.amplitudes, [1 / math.sqrt(2)] * 2)

    def test_mean_gate_count_two_qubits(self):
        rng = np.random.default_rng(17)
        counts = [len(draw_gate_sequence(2, 48.0, rng)) for _ in range(10_000)]
        assert 46.0 <= float(np.mean(counts)) <= 50.0

    def test_reproducible(self):
        a = random_circuit_state(3, 20.0, np.random.default_rng(5))
        b = random_circuit_state(3, 20.0, np.random.default_rng(5))
        assert np.array_equal(a.amplitudes, b.amplitudes)

    def test_mean_gates_must_be_positive(self, rng):
        with pytest.raises(ValueError):
            random_circuit_state(2, 0.0, rng)


class TestNamedStates:
    def test_dicke_31_amplitudes(self):
        amps = dicke_state(3, 1).amplitudes
        hits = np.nonzero(amps)[0]
        assert list(hits) == [1, 2, 4]
        assert np.allclose(amps[hits], 1 / math.sqrt(3))

    def test_gdansk_endpoints(self):
        assert np.allclose(
            gdansk_state(0.0).amplitudes, dicke_state(3, 2).amplitudes
        )
        assert np.allclose(
            gdansk_state(math.pi / 2).amplitudes, dicke_state(3, 1).amplitudes
        )

    def test_gdansk_any_angle_normalized(self):
        alpha = 37 * math.pi / 64  # beyond pi/2 on purpose
        assert abs(np.linalg.norm(gdansk_state(alpha).amplitudes) - 1) < 1e-12

    def test_ghz_bell_consistency(self):
        assert np.allclose(ghz_state(2).amplitudes, bell_state().amplitudes)

    def test_dispatcher(self):
        assert np.allclose(
            named_state("dicke", (3, 1)).amplitudes, dicke_state(3, 1).amplitudes
        )
        with pytest.raises(EntdetectError):
            named_state("squeezed")
        with pytest.raises(ValueError):
            named_state("dicke", (3, 4))

    def test_bloch_vectors_of_product_state(self):
        zero2 = PureState([1, 0, 0, 0])
        assert np.allclose(bloch_vectors(zero2), [(0, 0, 1), (0, 0, 1)], atol=1e-12)
