"""Adaptive entanglement detection from few Pauli correlation measurements.

Certifies entanglement by accumulating squared full-weight correlation
values until their sum exceeds one, choosing which observable to measure
next with one of three strategies: an analytic walk over maximal
commuting subsets, per-observable random forests scored on reachable
leaf regions, or a Bayesian particle-filter baseline.
"""

from .bayes import BayesStrategy, ParticleEnsemble, ShotRecord
from .clifford import CliffordTableau, conjugate, random_clifford
from .errors import EntdetectError
from .forest import ForestConfig, ForestModel, ForestStrategy, load_model, save_model, train_model
from .pauli import ObservableSet, PauliString, commutes, matrix_of, observable_set, parse_pauli
from .record import CorrelationRecord, apply_white_noise
from .session import (
    MeasurementTrace,
    Session,
    StaticOrderStrategy,
    Status,
    Strategy,
    new_session,
    run_detection,
)
from .sources import accessible_source, bundled_fixture, load_fixture
from .states import (
    PureState,
    bell_state,
    dicke_state,
    expectation,
    gdansk_state,
    ghz_state,
    named_state,
    random_circuit_state,
    sample_haar_pure,
)
from .treesearch import TreePlan, TreeStrategy, build_plan, select_bstar

__version__ = "0.1.0"

__all__ = [
    "BayesStrategy",
    "CliffordTableau",
    "CorrelationRecord",
    "EntdetectError",
    "ForestConfig",
    "ForestModel",
    "ForestStrategy",
    "MeasurementTrace",
    "ObservableSet",
    "ParticleEnsemble",
    "PauliString",
    "PureState",
    "Session",
    "ShotRecord",
    "StaticOrderStrategy",
    "Status",
    "Strategy",
    "TreePlan",
    "TreeStrategy",
    "apply_white_noise",
    "accessible_source",
    "bell_state",
    "build_plan",
    "bundled_fixture",
    "commutes",
    "conjugate",
    "dicke_state",
    "expectation",
    "gdansk_state",
    "ghz_state",
    "load_fixture",
    "load_model",
    "matrix_of",
    "named_state",
    "new_session",
    "observable_set",
    "parse_pauli",
    "random_circuit_state",
    "random_clifford",
    "run_detection",
    "sample_haar_pure",
    "save_model",
    "select_bstar",
    "train_model",
    "__version__",
]
