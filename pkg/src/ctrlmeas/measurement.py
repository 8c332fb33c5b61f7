"""Control-qubit driven measurement operators and their figures of merit.

A single ancilla qubit coherently mixes the identity channel with a full
projective measurement of an observable A.  Post-selecting the ancilla in
the state cos(theta)|0> + e^{-i phi} sin(theta)|1> leaves the system with
the conditional operators

    success:  S(a, 1) = (cos(theta)/sqrt(d) I + e^{i phi} sin(theta) |a><a|) / sqrt(2)
    failure:  S(a, 0) = (sin(theta)/sqrt(d) I - e^{i phi} cos(theta) |a><a|) / sqrt(2)

where the failure branch corresponds to the orthogonal ancilla state
sin(theta)|0> - e^{-i phi} cos(theta)|1>.  theta tunes the measurement
strength from "do nothing" (0) to fully projective (pi/2); phi sets the
interference phase between the two branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ALG_TOL, DensityMatrix, Observable
from .errors import DimensionMismatch, IndexOutOfRange, ValidationError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ControlSetting:
    """Measurement strength and control phase for a d-level system.

    ``theta`` must lie in [0, pi/2].  ``phi`` is accepted as any real angle
    and stored wrapped into [0, 2 pi); every formula in the package is
    2 pi-periodic in phi, so wrapping is transparent.
    """

    d: int
    theta: float
    phi: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValidationError(f"d must be an integer >= 2, got {self.d}")
        if not 0.0 <= self.theta <= math.pi / 2:
            raise ValidationError(f"theta must lie in [0, pi/2], got {self.theta}")
        wrapped = float(self.phi) % TWO_PI
        if wrapped >= TWO_PI:
            wrapped = 0.0
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "theta", float(self.theta))
        object.__setattr__(self, "phi", wrapped)


@dataclass(frozen=True, eq=False)
class KrausSet:
    """The 2d conditional operators of one controlled measurement.

    ``success_ops[a]`` and ``failure_ops[a]`` are d x d matrices; together
    they resolve the identity, and the success branch alone sums to
    P(1) * I independently of the input state.
    """

    setting: ControlSetting
    basis_a: Observable
    success_ops: np.ndarray
    failure_ops: np.ndarray


def build_interaction_operator(basis_a: Observable, a: int) -> np.ndarray:
    """The joint system+ancilla operator of outcome ``a`` before post-selection.

    Returns a 2d x 2d matrix on the combined space, basis ordered with the
    ancilla index slowest: the first d rows/columns are the ancilla-|0>
    (identity) sector, the last d the ancilla-|1> (projector) sector.
    """
    d = basis_a.dim
    if not 0 <= a < d:
        raise IndexOutOfRange(f"outcome index {a} outside 0..{d - 1}")
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = np.eye(d) / math.sqrt(d)
    out[d:, d:] = basis_a.projector(a)
    return out


def build_kraus_set(basis_a: Observable, setting: ControlSetting) -> KrausSet:
    """Construct all success and failure operators for one setting."""
    d = basis_a.dim
    if d != setting.d:
        raise DimensionMismatch(f"basis dimension {d} != setting dimension {setting.d}")
    ident = np.eye(d, dtype=complex)
    cos_t, sin_t = math.cos(setting.theta), math.sin(setting.theta)
    phase = complex(math.cos(setting.phi), math.sin(setting.phi))
    success = np.empty((d, d, d), dtype=complex)
    failure = np.empty((d, d, d), dtype=complex)
    for a in range(d):
        proj = basis_a.projector(a)
        success[a] = (cos_t / math.sqrt(d) * ident + phase * sin_t * proj) / math.sqrt(2)
        failure[a] = (sin_t / math.sqrt(d) * ident - phase * cos_t * proj) / math.sqrt(2)
    total = np.einsum("aji,ajk->ik", success.conj(), success) + np.einsum(
        "aji,ajk->ik", failure.conj(), failure
    )
    dev = np.max(np.abs(total - ident))
    if dev > ALG_TOL:
        raise ValidationError(f"Kraus completeness violated by {dev:.3e}")
    success.setflags(write=False)
    failure.setflags(write=False)
    return KrausSet(setting, basis_a, success, failure)


def success_probability(setting: ControlSetting) -> float:
    """Probability of finding the ancilla in the post-selected state.

    P(1) = (1 + (2/sqrt(d)) sin(theta) cos(theta) cos(phi)) / 2, independent
    of the system state.  phi = 0 is constructive interference between the
    identity and projector branches, phi = pi destructive.
    """
    s = math.sin(setting.theta) * math.cos(setting.theta)
    return 0.5 * (1.0 + 2.0 / math.sqrt(setting.d) * s * math.cos(setting.phi))


def measurement_fidelity(setting: ControlSetting) -> float:
    """Probability of reading the correct outcome for an eigenstate input.

    F = 1 - (d-1) cos^2(theta) / (2 d P(1)); equals 1 for a projective
    measurement (theta = pi/2) and 1/d (a random guess) at zero strength.
    """
    p1 = success_probability(setting)
    return 1.0 - (setting.d - 1) / (2.0 * setting.d * p1) * math.cos(setting.theta) ** 2


def dephasing_factor(setting: ControlSetting) -> float:
    """Factor by which coherences between measured-basis eigenstates survive.

    eta = 1 - sin^2(theta) / (2 P(1)); 1 at zero strength, 0 at full
    projection.
    """
    p1 = success_probability(setting)
    return 1.0 - math.sin(setting.theta) ** 2 / (2.0 * p1)


def apply_nonselective(state: DensityMatrix, kraus: KrausSet) -> DensityMatrix:
    """Post-measurement state after discarding the outcome but keeping post-selection.

    rho_out = sum_a S(a,1) rho S(a,1)^dag / P(1).  Equivalent to shrinking
    all off-diagonal elements of rho (in the measured basis) by the
    dephasing factor.
    """
    if state.dim != kraus.setting.d:
        raise DimensionMismatch(f"state dimension {state.dim} != setting dimension {kraus.setting.d}")
    acc = np.einsum("aij,jk,alk->il", kraus.success_ops, state.matrix, kraus.success_ops.conj())
    return DensityMatrix(acc / success_probability(kraus.setting))
