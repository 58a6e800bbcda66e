"""Analytic search strategy over maximal commuting subsets.

Anti-commuting observables share a squared-expectation budget of one, so
once a large value is found, its anti-commuting partners cannot help
certify entanglement. The strategy anchors on a starting observable
chosen from single-qubit Bloch vectors, walks the maximal mutually
commuting subsets containing it while results stay large, jumps between
subsets when results are small, and falls back to a priority order over
everything left once the plan is exhausted.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import networkx as nx

from .pauli import PauliString, X, commutes, observable_set
from .session import Session, Strategy
from .states import PureState, bloch_vectors

THRESHOLD_DEFAULT = 0.25
BLOCH_DEGENERACY = 0.1


class PlanExhausted:
    """Sentinel value: the subset walk has no target left."""

    _instance: "PlanExhausted | None" = None

    def __new__(cls) -> "PlanExhausted":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "PLAN_EXHAUSTED"


PLAN_EXHAUSTED = PlanExhausted()


def select_bstar(
    bloch: Sequence[tuple[float, float, float]],
    degeneracy: float = BLOCH_DEGENERACY,
) -> PauliString:
    """Anchor observable from per-qubit Bloch vectors.

    Each qubit contributes the letter of its largest-magnitude Bloch
    component (ties broken X < Y < Z). When every qubit's largest
    component is below the degeneracy cutoff (maximally entangled states
    have all-zero Bloch vectors), the all-X string is used instead.
    """
    letters = []
    best_overall = 0.0
    for triple in bloch:
        mags = [abs(c) for c in triple]
        best = max(mags)
        best_overall = max(best_overall, best)
        letters.append(mags.index(best) + 1)
    if best_overall < degeneracy:
        return PauliString(tuple([X] * len(bloch)))
    return PauliString(tuple(letters))


@dataclass(frozen=True)
class TreePlan:
    """Sorted maximal mutually commuting subsets anchored on b_star."""

    b_star: PauliString
    subsets: tuple[tuple[PauliString, ...], ...]


@lru_cache(maxsize=256)
def build_plan(b_star: PauliString) -> TreePlan:
    """Enumerate the maximal mutually commuting subsets containing b_star.

    Every maximal clique of the commutation graph over S = {B : B
    commutes with b_star} contains b_star (it commutes with all of S, so
    a maximal clique omitting it could be grown). Subsets are sorted
    with b_star first then canonically; the subset list is sorted
    lexicographically.
    """
    members = observable_set(b_star.n_qubits).members
    s_set = [p for p in members if commutes(p, b_star)]
    graph = nx.Graph()
    graph.add_nodes_from(s_set)
    for i, p in enumerate(s_set):
        for q in s_set[i + 1 :]:
            if commutes(p, q):
                graph.add_edge(p, q)
    subsets = []
    for clique in nx.find_cliques(graph):
        if b_star not in clique:  # pragma: no cover - impossible by maximality
            raise AssertionError("maximal clique missing the anchor")
        rest = sorted(p for p in clique if p != b_star)
        subsets.append((b_star, *rest))
    subsets.sort()
    return TreePlan(b_star, tuple(subsets))


def _first_difference(
    a: tuple[PauliString, ...], b: tuple[PauliString, ...]
) -> int:
    for k in range(min(len(a), len(b))):
        if a[k] != b[k]:
            return k
    return min(len(a), len(b))


def next_measurement(
    plan: TreePlan,
    session: Session,
    threshold: float = THRESHOLD_DEFAULT,
) -> PauliString | PlanExhausted:
    """Next target of the subset walk, replayed from the session history.

    The walk prescribes exactly two moves: advance within the subset
    after a large result (squared value above the threshold), or jump to
    the next subset at the first differing position after a small one.
    Running off a subset prescribes nothing and ends the plan (the
    priority fallback takes over); wrapping past the last subset
    likewise. Observables measured outside the walk are skipped in
    place. Replaying the ordered history on every call keeps the
    recommendation a pure function of the session, so shadow replays
    agree with the live run.
    """
    subsets = plan.subsets
    history = session.history
    i = j = k = 0
    revealed: set[PauliString] = set()
    while i < len(subsets):
        subset = subsets[i]
        if j >= len(subset):
            return PLAN_EXHAUSTED
        obs = subset[j]
        if obs in revealed:
            j += 1  # measured before the walk arrived here: skip in-subset
            continue
        if k < len(history):
            hist_obs, hist_value = history[k]
            k += 1
            revealed.add(hist_obs)
            if hist_obs == obs:
                # the walk's own measurement: the threshold rule decides
                if hist_value * hist_value > threshold:
                    j += 1
                elif i + 1 >= len(subsets):
                    return PLAN_EXHAUSTED
                else:
                    j = _first_difference(subset, subsets[i + 1])
                    i += 1
            # anything else was measured out-of-band; re-evaluate in place
            continue
        return obs
    return PLAN_EXHAUSTED


def priority(session: Session, p: PauliString) -> float:
    """Sum of squared results over measured observables anti-commuting with p."""
    total = 0.0
    for obs, value in session.record.items():
        if not commutes(obs, p):
            total += value * value
    return total


def lowest_priority_unmeasured(session: Session) -> PauliString:
    """Fallback pick: minimum priority, ties broken canonically."""
    best: PauliString | None = None
    best_score = float("inf")
    for p in session.unmeasured():
        score = priority(session, p)
        if score < best_score:
            best, best_score = p, score
    if best is None:
        raise ValueError("no unmeasured observable left")
    return best


class TreeStrategy(Strategy):
    """Subset-walk strategy with the priority fallback.

    The anchor comes from Bloch vectors when a state is available (a
    3N-measurement preliminary, tracked in ``preliminary_cost``),
    an explicit ``b_star``, or the all-X fallback when neither is given
    (the guided-service case, where no local data exists).
    """

    name = "tree"

    def __init__(
        self,
        n_qubits: int,
        b_star: PauliString | None = None,
        bloch: Sequence[tuple[float, float, float]] | None = None,
        threshold: float = THRESHOLD_DEFAULT,
    ):
        if bloch is not None:
            if len(bloch) != n_qubits:
                raise ValueError("one Bloch triple per qubit required")
            b_star = select_bstar(bloch)
            self.preliminary_cost = 3 * n_qubits
        else:
            self.preliminary_cost = 0
        if b_star is None:
            b_star = PauliString(tuple([X] * n_qubits))
        if b_star.n_qubits != n_qubits:
            raise ValueError("b_star qubit count mismatch")
        self.n_qubits = n_qubits
        self.b_star = b_star
        self.threshold = threshold
        self.plan = build_plan(b_star)

    @classmethod
    def from_state(
        cls, state: PureState, threshold: float = THRESHOLD_DEFAULT
    ) -> "TreeStrategy":
        return cls(state.n_qubits, bloch=bloch_vectors(state), threshold=threshold)

    def recommend(self, session: Session) -> PauliString:
        target = next_measurement(self.plan, session, self.threshold)
        if isinstance(target, PlanExhausted):
            return lowest_priority_unmeasured(session)
        return target
