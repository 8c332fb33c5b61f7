"""Exact statistics of a controlled measurement of A followed by a projective B.

The observed joint probability p(a, b | post-selection) decomposes into
exactly three processes: a random outcome assignment with the input
statistics of B (weight P_I), a projective measurement of A with its full
back-action (weight P_M), and an interference term (weight P_C) whose
normalized shape is the phase-rotated real part of the complex joint
probability

    rho(a, b) = <b|a><a|rho|b>.

That complex table is a complete, generally non-positive description of
the state; its imaginary part encodes non-commutativity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ALG_TOL, DensityMatrix, ObservablePair
from .errors import (
    DimensionMismatch,
    NegativeProbability,
    PhaseSingularity,
    ValidationError,
)
from .measurement import ControlSetting, success_probability

NEGATIVE_CLIP = -1e-14
PHASE_COS_TOL = 1e-3


@dataclass(frozen=True, eq=False)
class JointOutcomeTable:
    """Conditional probabilities probs[a, b] of the sequential outcomes.

    Entries in [-1e-14, 0) are clipped to zero as roundoff; anything more
    negative is rejected.  ``p1`` is the post-selection success probability
    the table is conditioned on (exact or empirical).
    """

    probs: np.ndarray
    p1: float
    setting: ControlSetting

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionMismatch(f"joint table must be square, got shape {p.shape}")
        lowest = p.min()
        if lowest < NEGATIVE_CLIP:
            raise NegativeProbability(f"joint probability {lowest:.3e} below roundoff floor")
        np.clip(p, 0.0, None, out=p)
        total = p.sum()
        if abs(total - 1.0) > ALG_TOL:
            raise ValidationError(f"joint probabilities sum to {total:.15g}, not 1")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)

    @property
    def d(self) -> int:
        return self.probs.shape[0]

    def marginal_a(self) -> np.ndarray:
        return self.probs.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        return self.probs.sum(axis=0)


@dataclass(frozen=True)
class QuasiProbTriple:
    """Weights of the identity, projective, and coherence processes.

    They always sum to one and the first two are nonnegative, but this is a
    quasi-probability: the coherence weight carries the sign of cos(phi),
    and when it is negative the other two weights necessarily exceed one in
    total.
    """

    p_identity: float
    p_measurement: float
    p_coherence: float

    def __post_init__(self):
        s = self.p_identity + self.p_measurement + self.p_coherence
        if abs(s - 1.0) > ALG_TOL:
            raise ValidationError(f"quasi-probabilities sum to {s:.15g}, not 1")
        for name in ("p_identity", "p_measurement"):
            v = getattr(self, name)
            if v < -ALG_TOL:
                raise ValidationError(f"{name} = {v:.15g} is negative")


@dataclass(frozen=True, eq=False)
class ComplexJointDistribution:
    """Complex table values[a, b] = <b|a><a|rho|b> for an observable pair.

    For exact input the entries sum to exactly 1 and both marginals are the
    real basis probabilities of the state; tables reconstructed from finite
    statistics satisfy these only approximately, so no hard normalization
    check happens here.
    """

    values: np.ndarray
    pair: ObservablePair

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        d = self.pair.dim
        if v.shape != (d, d):
            raise DimensionMismatch(f"expected a {d} x {d} table, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def marginal_a(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        return self.values.sum(axis=0)


def complex_joint_probability(state: DensityMatrix, pair: ObservablePair) -> ComplexJointDistribution:
    """Exact complex joint probability of the pair's outcomes in ``state``."""
    if state.dim != pair.dim:
        raise DimensionMismatch(f"state dimension {state.dim} != pair dimension {pair.dim}")
    cross = pair.obs_a.eigenvectors.conj().T @ state.matrix @ pair.obs_b.eigenvectors
    values = pair.overlaps.T * cross
    total = values.sum()
    if abs(total - 1.0) > ALG_TOL:
        raise ValidationError(f"complex joint table sums to {total:.15g}, not 1")
    return ComplexJointDistribution(values, pair)


def exact_joint_probability(
    state: DensityMatrix, pair: ObservablePair, setting: ControlSetting
) -> JointOutcomeTable:
    """Conditional joint probability table of the sequential measurement.

    probs[a, b] = [cos^2(theta) <b|rho|b>
                   + d sin^2(theta) |<b|a>|^2 <a|rho|a>
                   + 2 sqrt(d) sin(theta) cos(theta) Re(e^{i phi} rho(a, b))]
                  / (2 d P(1))
    """
    if state.dim != pair.dim:
        raise DimensionMismatch(f"state dimension {state.dim} != pair dimension {pair.dim}")
    if setting.d != pair.dim:
        raise DimensionMismatch(f"setting dimension {setting.d} != pair dimension {pair.dim}")
    d = pair.dim
    cos_t, sin_t = math.cos(setting.theta), math.sin(setting.theta)
    p1 = success_probability(setting)
    prob_a = state.basis_probabilities(pair.obs_a)
    prob_b = state.basis_probabilities(pair.obs_b)
    kd = complex_joint_probability(state, pair).values
    phase = complex(math.cos(setting.phi), math.sin(setting.phi))
    table = (
        cos_t**2 * prob_b[None, :]
        + d * sin_t**2 * pair.overlap_probabilities().T * prob_a[:, None]
        + 2.0 * math.sqrt(d) * sin_t * cos_t * np.real(phase * kd)
    ) / (2.0 * d * p1)
    return JointOutcomeTable(table, p1, setting)


def decompose(setting: ControlSetting) -> QuasiProbTriple:
    """Split the observed statistics into identity, projective, and coherence weights.

    P_I = cos^2(theta) / (2 P(1)),  P_M = sin^2(theta) / (2 P(1)),
    P_C = (2 cos(phi) / sqrt(d)) sin(theta) cos(theta) / (2 P(1)).

    Rejected near cos(phi) = 0: the normalized coherence term divides by
    cos(phi) there, so the decomposition is undefined even though the raw
    joint table is not.
    """
    cos_p = math.cos(setting.phi)
    if abs(cos_p) <= PHASE_COS_TOL:
        raise PhaseSingularity(
            f"decomposition undefined for |cos(phi)| <= {PHASE_COS_TOL}, got phi = {setting.phi}"
        )
    p1 = success_probability(setting)
    cos_t, sin_t = math.cos(setting.theta), math.sin(setting.theta)
    return QuasiProbTriple(
        p_identity=cos_t**2 / (2.0 * p1),
        p_measurement=sin_t**2 / (2.0 * p1),
        p_coherence=(2.0 * cos_p / math.sqrt(setting.d)) * sin_t * cos_t / (2.0 * p1),
    )


def fidelity_from_decomposition(triple: QuasiProbTriple, d: int) -> float:
    """Measurement fidelity implied by the identity-process weight: 1 - (d-1)/d * P_I."""
    return 1.0 - (d - 1) / d * triple.p_identity


def dephasing_from_decomposition(triple: QuasiProbTriple) -> float:
    """Dephasing factor implied by the projective-process weight: 1 - P_M."""
    return 1.0 - triple.p_measurement


def complex_correlation(dist: ComplexJointDistribution) -> complex:
    """Eigenvalue-weighted sum over the complex table.

    Equals the expectation of the ordered operator product (B on the left,
    A on the right); commuting observables give a real value.
    """
    ev_a = dist.pair.obs_a.eigenvalues
    ev_b = dist.pair.obs_b.eigenvalues
    return complex(np.einsum("a,b,ab->", ev_a, ev_b, dist.values))


def commutator_expectation(dist: ComplexJointDistribution) -> float:
    """Eigenvalue-weighted sum over the imaginary part of the table.

    A real number equal to (i/2) tr([A, B] rho): the imaginary part of the
    correlation is exactly the commutator average.
    """
    ev_a = dist.pair.obs_a.eigenvalues
    ev_b = dist.pair.obs_b.eigenvalues
    return float(np.einsum("a,b,ab->", ev_a, ev_b, np.imag(dist.values)))
