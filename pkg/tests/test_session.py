import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from entdetect.bayes import BayesStrategy
from entdetect.errors import (
    DuplicateMeasurementError,
    QubitCountError,
    StrategyContractError,
)
from entdetect.pauli import observable_set, parse_pauli
from entdetect.session import (
    Session,
    StaticOrderStrategy,
    Status,
    new_session,
    run_detection,
    scaled_oracle,
    shot_noise_oracle,
    as_truth_oracle,
)
from entdetect.states import PureState, bell_state, expectation, sample_haar_pure


class TestSessionBasics:
    def test_new_session_empty(self):
        s = new_session(2)
        assert s.criterion_sum == 0
        assert s.status is Status.UNDETERMINED
        assert s.history == []

    def test_zero_qubits_rejected(self):
        with pytest.raises(QubitCountError):
            new_session(0)

    def test_bell_two_results_certify(self):
        s = new_session(2)
        s.record_result(parse_pauli("xx"), 1.0)
        assert s.status is Status.UNDETERMINED  # sum exactly 1 is not enough
        s.record_result(parse_pauli("yy"), -1.0)
        assert s.criterion_sum == pytest.approx(2.0)
        assert s.status is Status.ENTANGLED

    def test_partial_sum_example(self):
        s = new_session(2)
        s.record_result(parse_pauli("zz"), 0.984)
        assert s.criterion_sum == pytest.approx(0.968256)
        assert s.status is Status.UNDETERMINED

    def test_duplicate_rejected(self):
        s = new_session(2)
        s.record_result(parse_pauli("xx"), 0.3)
        with pytest.raises(DuplicateMeasurementError):
            s.record_result(parse_pauli("xx"), 0.3)

    def test_value_clamped(self):
        s = new_session(2)
        s.record_result(parse_pauli("xx"), 1.0000002)
        assert s.record[parse_pauli("xx")] == 1.0

    def test_exhaustion(self):
        s = new_session(1)
        for label, value in [("x", 0.1), ("y", 0.1), ("z", 0.1)]:
            s.record_result(parse_pauli(label), value)
        assert s.status is Status.EXHAUSTED

    @given(st.lists(st.floats(min_value=-1, max_value=1), min_size=1, max_size=9))
    def test_sum_is_sum_of_squares_and_monotone(self, values):
        s = new_session(2)
        members = observable_set(2).members
        previous = 0.0
        for p, v in zip(members, values):
            s.record_result(p, v)
            assert s.criterion_sum >= previous - 1e-12
            previous = s.criterion_sum
        expected = sum(s.record[p] ** 2 for p, _ in s.history)
        assert s.criterion_sum == pytest.approx(expected, abs=1e-12)


class TestRunDetection:
    def test_bell_static_order(self):
        order = [parse_pauli("xx"), parse_pauli("yy"), parse_pauli("zz")]
        trace = run_detection(StaticOrderStrategy(order), bell_state(), 2)
        assert trace.length == 2
        assert trace.final_status is Status.ENTANGLED

    def test_product_state_exhausts_at_sum_one(self):
        zero2 = PureState([1, 0, 0, 0])
        brute = sum(
            expectation(zero2, p) ** 2 for p in observable_set(2).members
        )
        assert brute == pytest.approx(1.0, abs=1e-12)
        trace = run_detection(StaticOrderStrategy(), zero2, 2)
        assert trace.final_status is Status.EXHAUSTED
        assert trace.final_sum <= 1 + 1e-9

    def test_max_steps_caps_run(self):
        zero2 = PureState([1, 0, 0, 0])
        trace = run_detection(StaticOrderStrategy(), zero2, 2, max_steps=3)
        assert trace.length == 3
        assert trace.final_status is Status.UNDETERMINED

    def test_contract_violation_detected(self):
        class Stubborn(StaticOrderStrategy):
            def recommend(self, session):
                return parse_pauli("xx")

        with pytest.raises(StrategyContractError):
            run_detection(Stubborn(), bell_state(), 2)

    def test_replay_determinism_with_seeded_strategy(self, rng):
        state = sample_haar_pure(2, rng)
        t1 = run_detection(BayesStrategy(2, 200, seed=5), state, 2)
        t2 = run_detection(BayesStrategy(2, 200, seed=5), state, 2)
        assert [s.observable for s in t1.steps] == [s.observable for s in t2.steps]
        assert [s.value for s in t1.steps] == [s.value for s in t2.steps]


class TestOracles:
    def test_mapping_and_record_oracles(self):
        mapping = {parse_pauli("xx"): 0.25}
        assert as_truth_oracle(mapping)(parse_pauli("xx")) == 0.25

    def test_scaled_oracle(self):
        oracle = scaled_oracle(as_truth_oracle(bell_state()), 0.5)
        assert oracle(parse_pauli("xx")) == pytest.approx(0.5)

    def test_shot_noise_oracle_extremes(self, rng):
        truth = as_truth_oracle(bell_state())
        noisy = shot_noise_oracle(truth, 100, rng)
        assert noisy(parse_pauli("xx")) == pytest.approx(1.0)  # p=1 binomial
        assert noisy(parse_pauli("yy")) == pytest.approx(-1.0)

    def test_shot_noise_statistics(self):
        rng = np.random.default_rng(0)
        truth = lambda p: 0.0
        noisy = shot_noise_oracle(truth, 10_000, rng)
        assert abs(noisy(parse_pauli("xx"))) < 0.04


class TestTraceExport:
    def test_csv_columns(self):
        order = [parse_pauli("xx"), parse_pauli("yy")]
        trace = run_detection(StaticOrderStrategy(order), bell_state(), 2)
        text = trace.to_csv_text()
        lines = text.strip().splitlines()
        assert lines[0] == "step,observable,value,running_sum,status"
        row1 = lines[1].split(",")
        row2 = lines[2].split(",")
        assert row1[:2] == ["1", "xx"] and row1[4] == "undetermined"
        assert float(row1[2]) == pytest.approx(1.0)
        assert row2[:2] == ["2", "yy"] and row2[4] == "entangled"
        assert float(row2[3]) == pytest.approx(2.0)
