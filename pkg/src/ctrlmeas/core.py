"""Value types for states and observables, plus the numeric primitives they need.

All matrices are dense complex numpy arrays; the package targets d <= 16,
where dense double precision is both exact enough and fast enough.
Tolerances: 1e-12 for algebraic identities (hermiticity, trace,
orthonormality), 1e-10 for eigenvalue positivity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import rng
from .errors import (
    DimensionMismatch,
    NotHermitian,
    NotPositive,
    TraceNotOne,
    ValidationError,
)

ALG_TOL = 1e-12
PSD_TOL = 1e-10
OVERLAP_TOL = 1e-9


def _as_square_complex(matrix, what: str) -> np.ndarray:
    m = np.array(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{what} must be a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated d-level quantum state.

    Construction enforces hermiticity (within 1e-12), unit trace (within
    1e-12) and positive semidefiniteness (eigenvalues >= -1e-10).
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_square_complex(self.matrix, "state")
        if m.shape[0] < 2:
            raise DimensionMismatch(f"state dimension must be >= 2, got {m.shape[0]}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > ALG_TOL:
            raise NotHermitian(f"state is not Hermitian: max|rho - rho^dag| = {herm:.3e}")
        tr = m.trace()
        if abs(tr - 1.0) > ALG_TOL:
            raise TraceNotOne(f"state trace is {tr.real:.15g}, not 1 (|dev| = {abs(tr - 1.0):.3e})")
        lowest = np.linalg.eigvalsh(m).min()
        if lowest < -PSD_TOL:
            raise NotPositive(f"state has negative eigenvalue {lowest:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def basis_probabilities(self, obs: "Observable") -> np.ndarray:
        """Probabilities <a|rho|a> of each eigenstate of ``obs``."""
        if obs.dim != self.dim:
            raise DimensionMismatch(f"observable dimension {obs.dim} != state dimension {self.dim}")
        return np.real(np.einsum("ia,ij,ja->a", obs.eigenvectors.conj(), self.matrix, obs.eigenvectors))


def validate_state(candidate) -> DensityMatrix:
    """Validate a raw matrix as a density matrix, naming the violated invariant on failure."""
    return DensityMatrix(np.asarray(candidate))


@dataclass(frozen=True, eq=False)
class Observable:
    """An orthonormal eigenbasis (columns of ``eigenvectors``) with real eigenvalues.

    Eigenvalues default to 1..d so correlation functionals always have
    numbers to work with.
    """

    eigenvectors: np.ndarray
    eigenvalues: np.ndarray | None = None

    def __post_init__(self):
        v = _as_square_complex(self.eigenvectors, "eigenbasis")
        d = v.shape[0]
        if d < 2:
            raise DimensionMismatch(f"observable dimension must be >= 2, got {d}")
        gram_dev = np.max(np.abs(v.conj().T @ v - np.eye(d)))
        if gram_dev > ALG_TOL:
            raise ValidationError(f"eigenvectors are not orthonormal: max|V^dag V - I| = {gram_dev:.3e}")
        if self.eigenvalues is None:
            ev = np.arange(1.0, d + 1.0)
        else:
            ev = np.array(self.eigenvalues, dtype=float)
            if ev.shape != (d,):
                raise DimensionMismatch(f"need {d} eigenvalues, got shape {ev.shape}")
        v.setflags(write=False)
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvectors", v)
        object.__setattr__(self, "eigenvalues", ev)

    @property
    def dim(self) -> int:
        return self.eigenvectors.shape[0]

    def ket(self, a: int) -> np.ndarray:
        return self.eigenvectors[:, a]

    def projector(self, a: int) -> np.ndarray:
        """Rank-1 projector |a><a|."""
        v = self.eigenvectors[:, a]
        return np.outer(v, v.conj())

    def operator(self) -> np.ndarray:
        """The Hermitian operator sum_a A_a |a><a|."""
        return (self.eigenvectors * self.eigenvalues) @ self.eigenvectors.conj().T


@dataclass(frozen=True, eq=False)
class ObservablePair:
    """Two observables on the same space, with their eigenstate overlaps cached.

    ``overlaps[b, a] = <b|a>``.  The pair is ``fully_overlapping`` when every
    overlap magnitude exceeds 1e-9; only such pairs support tomography by
    division.
    """

    obs_a: Observable
    obs_b: Observable
    overlaps: np.ndarray = field(init=False)
    fully_overlapping: bool = field(init=False)

    def __post_init__(self):
        if self.obs_a.dim != self.obs_b.dim:
            raise DimensionMismatch(
                f"observables have different dimensions: {self.obs_a.dim} vs {self.obs_b.dim}"
            )
        ov = self.obs_b.eigenvectors.conj().T @ self.obs_a.eigenvectors
        ov.setflags(write=False)
        object.__setattr__(self, "overlaps", ov)
        object.__setattr__(self, "fully_overlapping", bool(np.min(np.abs(ov)) > OVERLAP_TOL))

    @property
    def dim(self) -> int:
        return self.obs_a.dim

    def overlap_probabilities(self) -> np.ndarray:
        """|<b|a>|^2 indexed [b, a]."""
        return np.abs(self.overlaps) ** 2


def computational_basis(d: int, eigenvalues=None) -> Observable:
    """The standard basis |0>, ..., |d-1>."""
    return Observable(np.eye(d, dtype=complex), eigenvalues)


def fourier_basis(d: int, eigenvalues=None) -> Observable:
    """Columns <j|F|k> = exp(2 pi i j k / d) / sqrt(d); mutually unbiased with the standard basis."""
    j = np.arange(d)
    f = np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)
    return Observable(f, eigenvalues)


def random_pure_state(d: int, seed: int) -> DensityMatrix:
    """Rank-1 projector onto a Haar-random ket (normalized complex Gaussian vector)."""
    if d < 2:
        raise DimensionMismatch(f"dimension must be >= 2, got {d}")
    g = rng.gaussians(seed, 2 * d)
    psi = g[0::2] + 1j * g[1::2]
    psi /= np.linalg.norm(psi)
    return DensityMatrix(np.outer(psi, psi.conj()))


def random_basis(d: int, seed: int, eigenvalues=None) -> Observable:
    """Haar-random orthonormal basis via QR of a complex Gaussian matrix.

    The R diagonal's phases are absorbed into Q so the distribution is
    uniform rather than QR-convention biased.
    """
    if d < 2:
        raise DimensionMismatch(f"dimension must be >= 2, got {d}")
    g = rng.gaussians(seed, 2 * d * d)
    z = (g[0::2] + 1j * g[1::2]).reshape(d, d)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r).copy()
    diag[np.abs(diag) == 0] = 1.0
    return Observable(q * (diag / np.abs(diag))[None, :], eigenvalues)


def trace_distance(x: DensityMatrix, y: DensityMatrix) -> float:
    """Half the trace norm of x - y.

    The difference is Hermitian, so the singular values are the absolute
    eigenvalues.  Always in [0, 1] for density matrices.
    """
    if x.dim != y.dim:
        raise DimensionMismatch(f"dimension mismatch: {x.dim} vs {y.dim}")
    eigs = np.linalg.eigvalsh(x.matrix - y.matrix)
    return 0.5 * float(np.sum(np.abs(eigs)))
