"""Exception types shared across the package."""


class CtrlMeasError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CtrlMeasError):
    """A value failed one of its construction invariants."""


class NotHermitian(ValidationError):
    pass


class TraceNotOne(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class NegativeProbability(ValidationError):
    pass


class PhaseSingularity(CtrlMeasError):
    """Coherence term of the three-way decomposition is undefined near cos(phi) = 0."""


class NoSuccessfulPostSelections(CtrlMeasError):
    """A histogram contains no post-selected events to normalize."""


class ReconstructionError(CtrlMeasError):
    """Base class for failures of the reconstruction pipeline."""


class CoherenceWeightTooSmall(ReconstructionError):
    pass


class DegenerateDecomposition(ReconstructionError):
    pass


class PhasesNotIndependent(ReconstructionError):
    pass


class NonUniformPhaseGrid(ReconstructionError):
    pass


class DegenerateStrength(ReconstructionError):
    pass


class VanishingOverlap(ReconstructionError):
    pass


class StateValidationFailed(ReconstructionError):
    """Tomographic inversion produced a non-physical matrix.

    Carries the nearest physical state obtained by eigenvalue clipping so
    callers working with noisy data can fall back to it.
    """

    def __init__(self, message, projected_state=None, projection_distance=None):
        super().__init__(message)
        self.projected_state = projected_state
        self.projection_distance = projection_distance


class ConfigError(CtrlMeasError):
    """An experiment configuration failed to parse or validate."""
