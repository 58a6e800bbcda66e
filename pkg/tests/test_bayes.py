import numpy as np
import pytest

from entdetect.bayes import (
    BayesStrategy,
    ParticleEnsemble,
    ShotRecord,
    bayes_update,
    estimate_correlations,
    init_ensemble,
    pseudo_shots,
    simulate_shots,
)
from entdetect.errors import DegenerateEnsembleError
from entdetect.pauli import observable_set, parse_pauli
from entdetect.session import Session, as_truth_oracle, run_detection, Status
from entdetect.states import bell_state, expectation, sample_haar_pure


class TestEnsembleBasics:
    def test_init_uniform(self, rng):
        ens = init_ensemble(2, 50, rng)
        assert np.allclose(ens.weights, 1 / 50)
        assert ens.effective_sample_size == pytest.approx(50)
        norms = np.linalg.norm(ens.states, axis=1)
        assert np.allclose(norms, 1.0, atol=1e-10)

    def test_weights_must_normalize(self, rng):
        ens = init_ensemble(1, 4, rng)
        with pytest.raises(ValueError):
            ParticleEnsemble(ens.states, np.array([0.5, 0.5, 0.5, 0.5]))


class TestShots:
    def test_certain_outcomes(self, rng):
        truth = as_truth_oracle(bell_state())
        assert simulate_shots(truth, parse_pauli("xx"), 100, rng).n_plus == 100
        assert simulate_shots(truth, parse_pauli("yy"), 100, rng).n_plus == 0

    def test_unbiased_coin(self):
        rng = np.random.default_rng(3)
        shot = simulate_shots(lambda p: 0.0, parse_pauli("xx"), 10_000, rng)
        assert abs(shot.n_plus / shot.n_shots - 0.5) < 0.02

    def test_pseudo_shots_roundtrip(self):
        shot = pseudo_shots(parse_pauli("xx"), 0.5, 300)
        assert shot.n_plus == 225
        assert pseudo_shots(parse_pauli("xx"), -1.0, 300).n_plus == 0

    def test_invalid_tally_rejected(self):
        with pytest.raises(ValueError):
            ShotRecord(parse_pauli("xx"), 10, 11)


class TestBayesUpdate:
    def test_zero_shots_is_identity(self, rng):
        ens = init_ensemble(2, 20, rng)
        out = bayes_update(ens, ShotRecord(parse_pauli("xx"), 0, 0), rng)
        assert out is ens

    def test_two_particle_certainty(self, rng):
        plus = np.full(4, 0.5, dtype=complex)  # |++>: <xx> = +1
        pm = np.array([0.5, -0.5, 0.5, -0.5], dtype=complex)  # |+->: <xx> = -1
        ens = ParticleEnsemble(np.stack([plus, pm]), np.array([0.5, 0.5]))
        shot = ShotRecord(parse_pauli("xx"), 10, 10)
        out = bayes_update(ens, shot, rng, resample_threshold=0.0)
        assert out.weights[0] == pytest.approx(1.0)
        assert out.weights[1] == pytest.approx(0.0)

    def test_no_underflow_at_many_shots(self, rng):
        ens = init_ensemble(2, 200, rng)
        shot = ShotRecord(parse_pauli("zz"), 10_000, 6_000)
        out = bayes_update(ens, shot, rng)
        assert np.isfinite(out.weights).all()
        assert out.effective_sample_size > 0

    def test_degenerate_ensemble_raises(self, rng):
        plus = np.full(4, 0.5, dtype=complex)  # <xx> = +1 exactly
        ens = ParticleEnsemble(np.stack([plus, plus]), np.array([0.5, 0.5]))
        shot = ShotRecord(parse_pauli("xx"), 10, 0)  # impossible under both
        with pytest.raises(DegenerateEnsembleError):
            bayes_update(ens, shot, rng)

    def test_resampling_restores_ess(self):
        rng = np.random.default_rng(1)
        ens = init_ensemble(2, 400, rng)
        truth = as_truth_oracle(bell_state())
        for label in ("xx", "yy", "zz"):
            shot = simulate_shots(truth, parse_pauli(label), 300, rng)
            ens = bayes_update(ens, shot, rng)
        assert ens.effective_sample_size >= 200  # resampled at least once

    def test_posterior_concentrates_on_bell_evidence(self):
        # the measured observable's posterior mean lands near its truth
        truth = as_truth_oracle(bell_state())
        for label in ("xx", "yy", "zz"):
            rng = np.random.default_rng(7)
            ens = init_ensemble(2, 2000, rng)
            p = parse_pauli(label)
            shot = simulate_shots(truth, p, 300, rng)
            ens = bayes_update(ens, shot, rng)
            estimate = estimate_correlations(ens)[p]
            assert abs(estimate - expectation(bell_state(), p)) < 0.15


class TestEstimates:
    def test_single_particle_is_exact(self):
        ens = ParticleEnsemble(
            bell_state().amplitudes[None, :].copy(), np.array([1.0])
        )
        estimates = estimate_correlations(ens)
        assert estimates[parse_pauli("xx")] == pytest.approx(1.0, abs=1e-12)
        assert estimates[parse_pauli("yy")] == pytest.approx(-1.0, abs=1e-12)

    def test_fresh_prior_estimates_small(self, rng):
        ens = init_ensemble(2, 1000, rng)
        estimates = estimate_correlations(ens)
        assert all(abs(v) < 0.2 for v in estimates.values())

    def test_degenerate_weights_pick_first_particle(self, rng):
        ens = init_ensemble(2, 2, rng)
        skewed = ParticleEnsemble(ens.states, np.array([1.0, 0.0]))
        estimates = estimate_correlations(skewed)
        for p in observable_set(2).members:
            single = ParticleEnsemble(ens.states[:1], np.array([1.0]))
            assert estimates[p] == pytest.approx(
                estimate_correlations(single)[p], abs=1e-12
            )


class TestBayesStrategy:
    def test_first_recommendation_deterministic(self):
        a = BayesStrategy(2, 300, seed=5).recommend(Session(2))
        b = BayesStrategy(2, 300, seed=5).recommend(Session(2))
        assert a == b

    def test_argmax_contract_after_evidence(self):
        strategy = BayesStrategy(2, 500, seed=4)
        session = Session(2)
        session.record_result(parse_pauli("xx"), 1.0)
        rec = strategy.recommend(session)
        assert rec != parse_pauli("xx")
        estimates = estimate_correlations(strategy.ensemble)
        unmeasured_mags = {
            p: abs(v) for p, v in estimates.items() if p != parse_pauli("xx")
        }
        assert abs(estimates[rec]) == pytest.approx(max(unmeasured_mags.values()))

    def test_bell_detected_but_slower_than_forest(self, tiny_model2):
        from entdetect.forest.model import ForestStrategy

        forest_trace = run_detection(ForestStrategy(tiny_model2), bell_state(), 2)
        assert forest_trace.final_status is Status.ENTANGLED
        lengths = []
        for trial in range(10):
            trace = run_detection(
                BayesStrategy(2, 2000, seed=trial), bell_state(), 2
            )
            assert trace.final_status is Status.ENTANGLED
            lengths.append(trace.length)
        assert float(np.mean(lengths)) >= forest_trace.length

    def test_posterior_consistency_reduces_error(self):
        # with the truth inside the ensemble's support, evidence from ten
        # 300-shot experiments shrinks the mean absolute estimate error
        rng = np.random.default_rng(12)
        improved = 0
        trials = 20
        for trial in range(trials):
            state = sample_haar_pure(2, rng)
            truth_vals = {
                p: expectation(state, p) for p in observable_set(2).members
            }
            strategy = BayesStrategy(2, 1000, seed=100 + trial)
            states = strategy.ensemble.states.copy()
            states[0] = state.amplitudes
            strategy.ensemble = ParticleEnsemble(states, strategy.ensemble.weights)
            fresh = estimate_correlations(strategy.ensemble)
            fresh_err = np.mean(
                [abs(fresh[p] - truth_vals[p]) for p in truth_vals]
            )
            # ten evidence folds: every observable once, the anchor twice
            targets = list(truth_vals) + [parse_pauli("xx")]
            for p in targets:
                strategy.fold(pseudo_shots(p, truth_vals[p], 300))
            post = estimate_correlations(strategy.ensemble)
            post_err = np.mean(
                [abs(post[p] - truth_vals[p]) for p in truth_vals]
            )
            improved += post_err < fresh_err
        assert improved >= 15, f"improved only {improved}/{trials}"
