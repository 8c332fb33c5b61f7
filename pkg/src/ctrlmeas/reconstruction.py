"""Recovery of intrinsic distributions and the full state from sequential data.

The pipeline inverts the three-process error model of the observed joint
table: subtract the identity-process background (a flat random outcome
times the B marginal) and the projective-process background (the A
marginal spread by the eigenstate overlaps), then divide by the coherence
weight.  What remains at control phase phi is

    Re(e^{i phi} rho(a, b)) / cos(phi) = Re(rho(a, b)) - tan(phi) Im(rho(a, b)),

so two phases with different tan(phi) determine the complex table
entrywise, and a uniform phi scan isolates it as the first Fourier
coefficient.  Dividing by the eigenstate overlaps then yields every matrix
element <a|rho|b>, i.e. full state tomography in any pair of bases whose
eigenstates all overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .core import DensityMatrix, ObservablePair, trace_distance
from .errors import (
    CoherenceWeightTooSmall,
    DegenerateDecomposition,
    DegenerateStrength,
    DimensionMismatch,
    NonUniformPhaseGrid,
    PhasesNotIndependent,
    ReconstructionError,
    StateValidationFailed,
    ValidationError,
    VanishingOverlap,
)
from .measurement import ControlSetting
from .sampler import sample_postselected
from .sequential import (
    ComplexJointDistribution,
    JointOutcomeTable,
    QuasiProbTriple,
    complex_joint_probability,
    decompose,
    exact_joint_probability,
)

COHERENCE_TOL = 1e-6
PHASE_GRID_TOL = 1e-9
STRENGTH_TOL = 1e-9
DEGENERATE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class IntrinsicDistribution:
    """Background-subtracted table Re(rho) - tan(phi) Im(rho) at one control phase.

    Sums to one and reproduces the state's basis probabilities in its
    marginals (exactly for exact input), but individual entries may be
    negative: it is a quasi-probability.
    """

    values: np.ndarray
    phi: float

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"intrinsic table must be square, got shape {v.shape}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def d(self) -> int:
        return self.values.shape[0]

    def marginal_a(self) -> np.ndarray:
        return self.values.sum(axis=1)

    def marginal_b(self) -> np.ndarray:
        return self.values.sum(axis=0)


@dataclass(frozen=True, eq=False)
class ReconstructionReport:
    """Result bundle of one reconstruction.

    ``residuals`` holds per-entry |measured - implied| deviations between
    the reconstructed complex table and the one implied by the final
    physical state.  ``projection_distance`` is zero unless the raw
    tomographic matrix had to be projected back to the physical set.
    """

    complex_joint: ComplexJointDistribution
    reconstructed_state: DensityMatrix
    residuals: np.ndarray
    method: str
    projection_distance: float = 0.0
    trace_distance_to_truth: float | None = None

    def to_json_dict(self) -> dict:
        values = self.complex_joint.values
        state = self.reconstructed_state.matrix
        return {
            "method": self.method,
            "complex_joint": {"re": np.real(values).tolist(), "im": np.imag(values).tolist()},
            "reconstructed_state": {"re": np.real(state).tolist(), "im": np.imag(state).tolist()},
            "residuals": {
                "per_entry": self.residuals.tolist(),
                "max": float(self.residuals.max()),
                "rms": float(np.sqrt(np.mean(self.residuals**2))),
                "projection_distance": self.projection_distance,
                "trace_distance_to_truth": self.trace_distance_to_truth,
            },
        }


def subtract_background(
    table: JointOutcomeTable,
    triple: QuasiProbTriple,
    marg_a: np.ndarray,
    marg_b: np.ndarray,
    overlaps: np.ndarray,
) -> IntrinsicDistribution:
    """Remove the identity and projective backgrounds from a joint table.

    ``overlaps`` is the |<b|a>|^2 table indexed [b, a].  The result is the
    intrinsic quasi-probability at the table's control phase; dividing by a
    coherence weight below 1e-6 would amplify noise without bound, so such
    settings are rejected.
    """
    p_c = triple.p_coherence
    if abs(p_c) <= COHERENCE_TOL:
        raise CoherenceWeightTooSmall(
            f"|coherence weight| = {abs(p_c):.3e} <= {COHERENCE_TOL}; reconstruction ill-conditioned"
        )
    marg_a = np.asarray(marg_a, dtype=float)
    marg_b = np.asarray(marg_b, dtype=float)
    d = table.d
    values = (
        table.probs
        - triple.p_identity / d * marg_b[None, :]
        - triple.p_measurement * overlaps.T * marg_a[:, None]
    ) / p_c
    return IntrinsicDistribution(values, table.setting.phi)


def recover_marginals(
    table: JointOutcomeTable, triple: QuasiProbTriple, overlaps: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Recover both observables' probabilities from the joint table itself.

    marg_a[a] = (sum_b p(a,b|1) - P_I / d) / (1 - P_I)
    marg_b[b] = sum_a (p(a,b|1) - P_M |<b|a>|^2 marg_a[a]) / (1 - P_M)

    Impossible at the endpoints: P_I = 1 (zero strength) erases all
    information about A, P_M = 1 (full projection) erases the coherent B
    statistics.
    """
    if 1.0 - triple.p_identity <= DEGENERATE_TOL:
        raise DegenerateDecomposition("identity weight is 1 (zero strength): A marginal unrecoverable")
    if 1.0 - triple.p_measurement <= DEGENERATE_TOL:
        raise DegenerateDecomposition(
            "projective weight is 1 (full strength): B marginal unrecoverable"
        )
    d = table.d
    marg_a = (table.probs.sum(axis=1) - triple.p_identity / d) / (1.0 - triple.p_identity)
    marg_b = (table.probs - triple.p_measurement * overlaps.T * marg_a[:, None]).sum(axis=0) / (
        1.0 - triple.p_measurement
    )
    return marg_a, marg_b


def phase_component(dist: ComplexJointDistribution, phi: float) -> IntrinsicDistribution:
    """The intrinsic table Re(rho) - tan(phi) Im(rho) an experiment at ``phi`` would see."""
    values = np.real(dist.values) - math.tan(phi) * np.imag(dist.values)
    return IntrinsicDistribution(values, phi % (2.0 * math.pi))


def combine_two_phases(
    dist0: IntrinsicDistribution, dist1: IntrinsicDistribution, pair: ObservablePair
) -> ComplexJointDistribution:
    """Solve two intrinsic tables at different phases for the complex table.

    Each table is Re(rho) - tan(phi) Im(rho); any two phases with distinct
    tangents invert the 2x2 system entrywise.  tan(phi) = +-1 balances the
    sensitivity to the two parts.
    """
    if dist0.d != dist1.d or dist0.d != pair.dim:
        raise DimensionMismatch("intrinsic tables and pair must share one dimension")
    t0, t1 = math.tan(dist0.phi), math.tan(dist1.phi)
    det = t1 - t0
    if abs(det) < 1e-9:
        raise PhasesNotIndependent(
            f"phases {dist0.phi} and {dist1.phi} have equal tangents; system is singular"
        )
    imag = (dist0.values - dist1.values) / det
    real = dist0.values + t0 * imag
    return ComplexJointDistribution(real + 1j * imag, pair)


def fourier_constant(theta: float, d: int) -> float:
    """Proportionality constant between the phase-scan Fourier coefficient and rho(a, b).

    Expanding the unconditioned success-branch probability p(a,b|1) P(1) in
    phi gives a single e^{+i phi} component with amplitude
    sin(theta) cos(theta) / (2 sqrt(d)) * rho(a, b); the first Fourier
    coefficient of the scan divided by this constant is the complex table.
    """
    return math.sin(theta) * math.cos(theta) / (2.0 * math.sqrt(d))


def fourier_extract(
    tables: list[tuple[float, np.ndarray]], theta: float, pair: ObservablePair
) -> ComplexJointDistribution:
    """Extract the complex table from a uniform scan of the control phase.

    ``tables`` holds (phi_k, raw_table) pairs where raw_table[a, b] is the
    unconditioned success-branch probability p(a,b|1) P(1) at phase phi_k.
    The phases must form a uniform grid over [0, 2 pi) with at least four
    points (any offset is fine).
    """
    if len(tables) < 4:
        raise NonUniformPhaseGrid(f"need at least 4 uniformly spaced phases, got {len(tables)}")
    k = len(tables)
    phases = np.array([entry[0] for entry in tables], dtype=float) % (2.0 * math.pi)
    order = np.argsort(phases)
    sorted_phases = phases[order]
    gaps = np.diff(sorted_phases)
    wrap_gap = sorted_phases[0] + 2.0 * math.pi - sorted_phases[-1]
    all_gaps = np.append(gaps, wrap_gap)
    if np.max(np.abs(all_gaps - 2.0 * math.pi / k)) > PHASE_GRID_TOL:
        raise NonUniformPhaseGrid(f"phases are not a uniform {k}-point grid over [0, 2 pi)")
    if abs(math.sin(theta) * math.cos(theta)) < STRENGTH_TOL:
        raise DegenerateStrength(f"theta = {theta} gives zero phase visibility")
    constant = fourier_constant(theta, pair.dim)
    d = pair.dim
    coeff = np.zeros((d, d), dtype=complex)
    for phi_k, raw in tables:
        raw = np.asarray(raw, dtype=float)
        if raw.shape != (d, d):
            raise DimensionMismatch(f"raw table must be {d} x {d}, got {raw.shape}")
        coeff += raw * complex(math.cos(phi_k), -math.sin(phi_k))
    coeff /= k
    return ComplexJointDistribution(coeff / constant, pair)


def project_to_physical(matrix: np.ndarray) -> tuple[DensityMatrix, float]:
    """Clip negative eigenvalues and renormalize; return the state and the distance moved.

    The distance is half the trace norm between the hermitized input and
    the projected state.
    """
    m = np.asarray(matrix, dtype=complex)
    herm = (m + m.conj().T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(herm)
    clipped = np.clip(eigvals, 0.0, None)
    weight = clipped.sum()
    if weight <= 0.0:
        raise ReconstructionError("matrix has no positive spectral weight; cannot project")
    state = DensityMatrix((eigvecs * (clipped / weight)) @ eigvecs.conj().T)
    moved = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(herm - state.matrix))))
    return state, moved


def tomography(dist: ComplexJointDistribution) -> DensityMatrix:
    """Invert a complex joint table into the density matrix.

    <a|rho|b> = rho(a, b) / <b|a> requires every overlap to be nonzero; the
    matrix is then assembled in the two eigenbases and symmetrized.  If the
    result is not a physical state (finite statistics generically push
    eigenvalues slightly negative) a StateValidationFailed is raised that
    carries the eigenvalue-clipped nearest physical state.
    """
    pair = dist.pair
    if not pair.fully_overlapping:
        smallest = float(np.min(np.abs(pair.overlaps)))
        raise VanishingOverlap(
            f"smallest eigenstate overlap is {smallest:.3e}; state not reconstructible in these bases"
        )
    elements = dist.values / pair.overlaps.T
    raw = pair.obs_a.eigenvectors @ elements @ pair.obs_b.eigenvectors.conj().T
    herm = (raw + raw.conj().T) / 2.0
    try:
        return DensityMatrix(herm)
    except ValidationError as exc:
        projected, moved = project_to_physical(herm)
        raise StateValidationFailed(
            f"tomographic matrix is not a physical state ({exc}); "
            f"nearest physical state is {moved:.3e} away",
            projected_state=projected,
            projection_distance=moved,
        ) from exc


def reconstruct_two_phase(
    table0: JointOutcomeTable, table1: JointOutcomeTable, pair: ObservablePair
) -> ComplexJointDistribution:
    """Full two-phase pipeline from joint tables to the complex table.

    Marginals are recovered from each table itself, backgrounds subtracted,
    and the two intrinsic tables solved for real and imaginary parts.
    """
    intrinsic = []
    overlaps = pair.overlap_probabilities()
    for table in (table0, table1):
        triple = decompose(table.setting)
        marg_a, marg_b = recover_marginals(table, triple, overlaps)
        intrinsic.append(subtract_background(table, triple, marg_a, marg_b, overlaps))
    return combine_two_phases(intrinsic[0], intrinsic[1], pair)


def build_report(
    dist: ComplexJointDistribution,
    method: str,
    true_state: DensityMatrix | None = None,
) -> ReconstructionReport:
    """Run tomography on a complex table and bundle the outcome.

    Falls back to the nearest physical state when strict validation fails,
    recording how far the projection moved.
    """
    try:
        state = tomography(dist)
        moved = 0.0
    except StateValidationFailed as exc:
        state = exc.projected_state
        moved = exc.projection_distance
    implied = complex_joint_probability(state, dist.pair)
    residuals = np.abs(dist.values - implied.values)
    to_truth = trace_distance(state, true_state) if true_state is not None else None
    return ReconstructionReport(
        complex_joint=dist,
        reconstructed_state=state,
        residuals=residuals,
        method=method,
        projection_distance=moved,
        trace_distance_to_truth=to_truth,
    )


@dataclass(frozen=True)
class SnrPoint:
    """Reconstruction error summary at one measurement strength."""

    theta: float
    rms_error: float
    stderr: float


def snr_summary(
    state: DensityMatrix,
    pair: ObservablePair,
    thetas,
    events_per_phase: int | None,
    n_seeds: int,
    seed: int,
    phis=(math.pi / 4, -math.pi / 4),
) -> list[SnrPoint]:
    """Compare two-phase reconstruction noise across measurement strengths.

    For each strength, ``n_seeds`` independent experiments each collect
    ``events_per_phase`` post-selected events at both control phases, run
    the two-phase pipeline, and score the RMS entrywise error of the real
    part of the complex table against the exact one.  Equal post-selected
    event counts make the comparison strength-fair.  ``events_per_phase =
    None`` uses exact tables (zero error; useful as a pipeline check).
    Results are sorted by strength.
    """
    thetas = sorted(float(t) for t in thetas)
    if len(thetas) < 2:
        raise ValidationError("need at least 2 strength values to compare")
    if n_seeds < 1:
        raise ValidationError(f"n_seeds must be >= 1, got {n_seeds}")
    exact_re = np.real(complex_joint_probability(state, pair).values)
    points = []
    for t_idx, theta in enumerate(thetas):
        theta_seed = rng.substream_seed(seed, t_idx)
        settings = [ControlSetting(pair.dim, theta, phi) for phi in phis]
        errors = np.empty(n_seeds)
        for rep in range(n_seeds):
            rep_seed = rng.substream_seed(theta_seed, rep)
            tables = []
            for p_idx, setting in enumerate(settings):
                if events_per_phase is None:
                    tables.append(exact_joint_probability(state, pair, setting))
                else:
                    tables.append(
                        sample_postselected(
                            state, pair, setting, events_per_phase, rng.substream_seed(rep_seed, p_idx)
                        )
                    )
            recovered = reconstruct_two_phase(tables[0], tables[1], pair)
            errors[rep] = math.sqrt(float(np.mean((np.real(recovered.values) - exact_re) ** 2)))
        stderr = float(errors.std(ddof=1) / math.sqrt(n_seeds)) if n_seeds > 1 else 0.0
        points.append(SnrPoint(theta=theta, rms_error=float(errors.mean()), stderr=stderr))
    return points
