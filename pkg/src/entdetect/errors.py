"""Exception types shared across the package."""


class EntdetectError(Exception):
    """Base class for all package-specific errors."""


class InvalidLetterError(EntdetectError, ValueError):
    """A Pauli label contains a character outside {x, y, z}."""


class QubitCountError(EntdetectError, ValueError):
    """Operands disagree on qubit count, or the count is out of range."""


class DuplicateMeasurementError(EntdetectError, ValueError):
    """The same observable was recorded twice in one session."""


class ValueRangeError(EntdetectError, ValueError):
    """A correlation value lies outside [-1, 1] beyond tolerance."""


class StrategyContractError(EntdetectError, RuntimeError):
    """A strategy recommended an observable that was already measured."""


class MalformedModelError(EntdetectError, ValueError):
    """A model file cannot be parsed or fails schema validation."""


class ModelVersionError(MalformedModelError):
    """A model file declares an unsupported format version."""


class DegenerateEnsembleError(EntdetectError, RuntimeError):
    """All particle weights underflowed to zero during a Bayesian update.

    Signals a likelihood too peaked for the current ensemble; callers
    should retry with more particles.
    """


class FixtureError(EntdetectError, ValueError):
    """A fixture CSV is malformed or incomplete."""


class RejectionRateError(EntdetectError, RuntimeError):
    """A rejection-sampling source accepts too few candidates to be usable."""
