"""Particle-approximated Bayesian mean estimation over pure states.

The posterior over states given binary measurement outcomes is
approximated by a weighted ensemble of uniform-random pure-state
particles. Likelihood updates run in log space; the ensemble resamples
multinomially when the effective sample size halves. No rejuvenation
kernel is applied, which is acceptable at the system sizes used here and
is the main accuracy limitation of this baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateEnsembleError, QubitCountError
from .pauli import PauliString, observable_set
from .session import Session, Strategy, TruthOracle
from .states import expectations_batch, sample_haar_batch

DEFAULT_PARTICLES = 2000
DEFAULT_SHOTS = 300
WEIGHT_TOL = 1e-10


@dataclass(frozen=True)
class ShotRecord:
    """Outcome tally of one binary-observable experiment."""

    observable: PauliString
    n_shots: int
    n_plus: int

    def __post_init__(self) -> None:
        if not 0 <= self.n_plus <= self.n_shots:
            raise ValueError(
                f"n_plus={self.n_plus} outside [0, {self.n_shots}]"
            )


@dataclass
class ParticleEnsemble:
    """Weighted pure-state particles; weights sum to one."""

    states: np.ndarray  # (n_particles, 2^N) complex
    weights: np.ndarray  # (n_particles,) float, normalized

    def __post_init__(self) -> None:
        if self.states.ndim != 2 or self.states.shape[0] != self.weights.shape[0]:
            raise ValueError("states/weights shape mismatch")
        if np.any(self.weights < 0):
            raise ValueError("negative particle weight")
        total = self.weights.sum()
        if abs(total - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {total}, not 1")

    @property
    def n_particles(self) -> int:
        return self.weights.shape[0]

    @property
    def n_qubits(self) -> int:
        return int(np.log2(self.states.shape[1]))

    @property
    def effective_sample_size(self) -> float:
        return 1.0 / float(np.sum(self.weights**2))


def init_ensemble(
    n_qubits: int, n_particles: int, rng: np.random.Generator
) -> ParticleEnsemble:
    if n_particles < 1:
        raise ValueError("need at least one particle")
    states = sample_haar_batch(n_qubits, n_particles, rng)
    weights = np.full(n_particles, 1.0 / n_particles)
    return ParticleEnsemble(states, weights)


def simulate_shots(
    truth: TruthOracle,
    p: PauliString,
    n_shots: int,
    rng: np.random.Generator,
) -> ShotRecord:
    """Binomial draw of +1 outcomes with success probability (1 + <B>)/2."""
    if n_shots < 1:
        raise ValueError("n_shots must be positive")
    q = min(1.0, max(0.0, 0.5 * (1.0 + truth(p))))
    return ShotRecord(p, n_shots, int(rng.binomial(n_shots, q)))


def pseudo_shots(p: PauliString, value: float, n_shots: int = DEFAULT_SHOTS) -> ShotRecord:
    """Deterministic shot record encoding an exactly known expectation."""
    n_plus = int(round(n_shots * 0.5 * (1.0 + value)))
    return ShotRecord(p, n_shots, min(n_shots, max(0, n_plus)))


def bayes_update(
    ens: ParticleEnsemble,
    shot: ShotRecord,
    rng: np.random.Generator | None = None,
    resample_threshold: float = 0.5,
) -> ParticleEnsemble:
    """Reweight by the binomial likelihood of the tally; resample if needed.

    Weights update in log space (no underflow up to at least 1e4 shots);
    particles assigning zero probability to an observed outcome get zero
    weight. Resampling needs an rng; pass one whenever updates may
    degenerate the ensemble.
    """
    if shot.observable.n_qubits != ens.n_qubits:
        raise QubitCountError("shot/ensemble qubit mismatch")
    if shot.n_shots == 0:
        return ens
    vals = expectations_batch(ens.states, shot.observable.letters)
    q = np.clip(0.5 * (1.0 + vals), 0.0, 1.0)
    n_minus = shot.n_shots - shot.n_plus
    with np.errstate(divide="ignore"):
        log_lik = np.where(shot.n_plus > 0, shot.n_plus * np.log(q), 0.0)
        log_lik += np.where(n_minus > 0, n_minus * np.log(1.0 - q), 0.0)
    log_w = np.log(ens.weights, where=ens.weights > 0,
                   out=np.full_like(ens.weights, -np.inf))
    log_w = log_w + log_lik
    peak = np.max(log_w)
    if not np.isfinite(peak):
        raise DegenerateEnsembleError(
            "all particle weights vanished; raise the particle count"
        )
    weights = np.exp(log_w - peak)
    weights /= weights.sum()
    out = ParticleEnsemble(ens.states, weights)
    if out.effective_sample_size < resample_threshold * out.n_particles:
        if rng is None:
            raise ValueError("resampling required but no rng was provided")
        picks = rng.choice(out.n_particles, size=out.n_particles, p=out.weights)
        out = ParticleEnsemble(
            out.states[picks],
            np.full(out.n_particles, 1.0 / out.n_particles),
        )
    return out


def estimate_correlations(ens: ParticleEnsemble) -> dict[PauliString, float]:
    """Posterior-mean expectation of every observable."""
    return dict(zip(observable_set(ens.n_qubits).members, _estimate_matrix(ens)))


def _estimate_matrix(ens: ParticleEnsemble) -> np.ndarray:
    members = observable_set(ens.n_qubits).members
    out = np.empty(len(members))
    for k, obs in enumerate(members):
        out[k] = expectations_batch(ens.states, obs.letters) @ ens.weights
    return out


class BayesStrategy(Strategy):
    """Measure the observable with the largest posterior-mean magnitude.

    Session results are folded in as shot records (exact values become
    deterministic tallies), the posterior refreshes, and the unmeasured
    observable with the largest estimated magnitude is recommended,
    ties canonical. Nothing defines a privileged first measurement, so
    the cold start is simply the same argmax over the fresh prior's
    near-zero estimates.
    """

    name = "bayes"

    def __init__(
        self,
        n_qubits: int,
        n_particles: int = DEFAULT_PARTICLES,
        n_shots: int = DEFAULT_SHOTS,
        seed: int | np.random.SeedSequence = 0,
    ):
        self.n_qubits = n_qubits
        self.n_shots = n_shots
        self.rng = np.random.default_rng(seed)
        self.ensemble = init_ensemble(n_qubits, n_particles, self.rng)
        self._folded = 0
        self._estimates: np.ndarray | None = None

    def fold(self, shot: ShotRecord) -> None:
        self.ensemble = bayes_update(self.ensemble, shot, self.rng)
        self._estimates = None

    def recommend(self, session: Session) -> PauliString:
        if session.n_qubits != self.n_qubits:
            raise QubitCountError("session/ensemble qubit mismatch")
        for obs, value in session.history[self._folded :]:
            self.fold(pseudo_shots(obs, value, self.n_shots))
        self._folded = len(session.history)
        if self._estimates is None:
            self._estimates = _estimate_matrix(self.ensemble)
        members = observable_set(self.n_qubits).members
        best: PauliString | None = None
        best_mag = -1.0
        for k, obs in enumerate(members):
            if obs in session.record:
                continue
            mag = abs(float(self._estimates[k]))
            if mag > best_mag:
                best, best_mag = obs, mag
        if best is None:
            raise ValueError("no unmeasured observable left")
        return best
