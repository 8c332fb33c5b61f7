"""Seeded Monte Carlo simulation of finite-statistics experiments.

One shot draws a triple (a, control outcome, b): the controlled-measurement
outcome, whether the ancilla post-selection succeeded, and the final
projective outcome.  Sampling is inverse-CDF over the flattened category
list in fixed (a-major, control 0 then 1, b) order, driven by the pinned
counter-based generator in :mod:`ctrlmeas.rng`, so histograms are
byte-identical across runs and machines.  Failure-branch shots are kept:
they carry the post-selection rate and complete the statistics.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np

from . import rng
from .core import ALG_TOL, DensityMatrix, ObservablePair
from .errors import (
    DimensionMismatch,
    NegativeProbability,
    NoSuccessfulPostSelections,
    ValidationError,
)
from .measurement import ControlSetting, build_kraus_set, success_probability
from .sequential import JointOutcomeTable

CSV_HEADER = ["setting_index", "theta", "phi", "a", "b", "control", "count"]


@dataclass(frozen=True, eq=False)
class ExperimentPlan:
    """A reproducible experiment: state, observable pair, settings, shots, seed."""

    state: DensityMatrix
    pair: ObservablePair
    settings: tuple[ControlSetting, ...]
    shots_per_setting: int
    seed: int

    def __post_init__(self):
        settings = tuple(self.settings)
        if not settings:
            raise ValidationError("experiment plan needs at least one setting")
        if self.shots_per_setting < 1:
            raise ValidationError(f"shots_per_setting must be >= 1, got {self.shots_per_setting}")
        if self.state.dim != self.pair.dim:
            raise DimensionMismatch(
                f"state dimension {self.state.dim} != pair dimension {self.pair.dim}"
            )
        for s in settings:
            if s.d != self.state.dim:
                raise DimensionMismatch(f"setting dimension {s.d} != state dimension {self.state.dim}")
        object.__setattr__(self, "settings", settings)


@dataclass(frozen=True, eq=False)
class CountHistogram:
    """Raw counts of one setting: success_counts[a, b], failure_counts[a, b]."""

    setting: ControlSetting
    success_counts: np.ndarray
    failure_counts: np.ndarray
    total_shots: int

    def __post_init__(self):
        succ = np.array(self.success_counts, dtype=np.int64)
        fail = np.array(self.failure_counts, dtype=np.int64)
        d = self.setting.d
        if succ.shape != (d, d) or fail.shape != (d, d):
            raise DimensionMismatch(f"count tables must be {d} x {d}")
        total = int(succ.sum() + fail.sum())
        if total != self.total_shots:
            raise ValidationError(f"counts sum to {total}, expected total_shots = {self.total_shots}")
        succ.setflags(write=False)
        fail.setflags(write=False)
        object.__setattr__(self, "success_counts", succ)
        object.__setattr__(self, "failure_counts", fail)

    @property
    def d(self) -> int:
        return self.setting.d

    def success_fraction(self) -> float:
        return float(self.success_counts.sum()) / self.total_shots


def outcome_distribution(
    state: DensityMatrix, pair: ObservablePair, setting: ControlSetting
) -> np.ndarray:
    """Full shot distribution as an array indexed [a, control, b].

    probs[a, c, b] = <b| S(a, c) rho S(a, c)^dag |b> computed from the
    conditional operators directly (the closed-form joint table is a
    separate route; the two are cross-checked in tests).  control = 1 is
    the post-selected branch.  The whole array sums to one.
    """
    kraus = build_kraus_set(pair.obs_a, setting)
    if state.dim != setting.d or pair.dim != setting.d:
        raise DimensionMismatch("state, pair, and setting dimensions must agree")
    d = setting.d
    basis_b = pair.obs_b.eigenvectors
    probs = np.empty((d, 2, d))
    for branch, ops in ((0, kraus.failure_ops), (1, kraus.success_ops)):
        # <b|T|b> for T = S rho S^dag, all outcomes at once
        transformed = np.einsum("aij,jk,alk->ail", ops, state.matrix, ops.conj())
        probs[:, branch, :] = np.real(
            np.einsum("ib,ail,lb->ab", basis_b.conj(), transformed, basis_b)
        )
    lowest = probs.min()
    if lowest < -1e-14:
        raise NegativeProbability(f"outcome probability {lowest:.3e} below roundoff floor")
    np.clip(probs, 0.0, None, out=probs)
    total = probs.sum()
    if abs(total - 1.0) > ALG_TOL:
        raise ValidationError(f"outcome distribution sums to {total:.15g}, not 1")
    return probs


def _sample_counts(flat_probs: np.ndarray, shots: int, seed: int) -> np.ndarray:
    """Inverse-CDF draw of ``shots`` category indices; returns per-category counts."""
    cdf = np.cumsum(flat_probs)
    u = rng.uniforms(seed, shots)
    idx = np.searchsorted(cdf, u, side="right")
    np.minimum(idx, len(flat_probs) - 1, out=idx)
    return np.bincount(idx, minlength=len(flat_probs))


def run_experiment(plan: ExperimentPlan) -> list[CountHistogram]:
    """Sample every setting of the plan; deterministic given the plan.

    Setting k draws from sub-stream ``substream_seed(plan.seed, k)``, so
    settings could be sampled in parallel without changing any count.
    """
    histograms = []
    for k, setting in enumerate(plan.settings):
        probs = outcome_distribution(plan.state, plan.pair, setting)
        counts = _sample_counts(probs.ravel(), plan.shots_per_setting, rng.substream_seed(plan.seed, k))
        counts = counts.reshape(probs.shape)
        histograms.append(
            CountHistogram(
                setting=setting,
                success_counts=counts[:, 1, :],
                failure_counts=counts[:, 0, :],
                total_shots=plan.shots_per_setting,
            )
        )
    return histograms


def empirical_joint(hist: CountHistogram) -> JointOutcomeTable:
    """Normalize the post-selected counts into a conditional joint table."""
    n_success = int(hist.success_counts.sum())
    if n_success == 0:
        raise NoSuccessfulPostSelections("histogram has no post-selected events")
    return JointOutcomeTable(
        probs=hist.success_counts / n_success,
        p1=n_success / hist.total_shots,
        setting=hist.setting,
    )


def sample_postselected(
    state: DensityMatrix,
    pair: ObservablePair,
    setting: ControlSetting,
    events: int,
    seed: int,
) -> JointOutcomeTable:
    """Draw a fixed number of post-selected events directly.

    Samples (a, b) from the conditional distribution, which is what an
    experiment that keeps collecting until ``events`` successful
    post-selections sees.  The table's ``p1`` is the analytic success
    probability, since the success rate is not measured here.
    """
    if events < 1:
        raise ValidationError(f"events must be >= 1, got {events}")
    success = outcome_distribution(state, pair, setting)[:, 1, :]
    conditional = success / success.sum()
    counts = _sample_counts(conditional.ravel(), events, seed).reshape(conditional.shape)
    return JointOutcomeTable(counts / events, success_probability(setting), setting)


def histograms_to_csv(histograms: list[CountHistogram], path) -> None:
    """Write per-cell counts with header setting_index,theta,phi,a,b,control,count."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for k, hist in enumerate(histograms):
            for a in range(hist.d):
                for b in range(hist.d):
                    for control, table in ((0, hist.failure_counts), (1, hist.success_counts)):
                        writer.writerow(
                            [k, repr(hist.setting.theta), repr(hist.setting.phi), a, b, control, int(table[a, b])]
                        )


def histograms_to_json_dict(histograms: list[CountHistogram]) -> dict:
    """JSON-ready document mirroring the histogram fields."""
    return {
        "histograms": [
            {
                "setting": {"d": h.setting.d, "theta": h.setting.theta, "phi": h.setting.phi},
                "success_counts": h.success_counts.tolist(),
                "failure_counts": h.failure_counts.tolist(),
                "total_shots": h.total_shots,
            }
            for h in histograms
        ]
    }


def histograms_from_json_dict(doc: dict) -> list[CountHistogram]:
    """Rebuild histograms from the JSON document produced by ``histograms_to_json_dict``."""
    out = []
    for entry in doc["histograms"]:
        s = entry["setting"]
        out.append(
            CountHistogram(
                setting=ControlSetting(d=s["d"], theta=s["theta"], phi=s["phi"]),
                success_counts=np.array(entry["success_counts"], dtype=np.int64),
                failure_counts=np.array(entry["failure_counts"], dtype=np.int64),
                total_shots=entry["total_shots"],
            )
        )
    return out


def save_histograms_json(histograms: list[CountHistogram], path) -> None:
    with open(path, "w") as fh:
        json.dump(histograms_to_json_dict(histograms), fh, indent=2)


def load_histograms_json(path) -> list[CountHistogram]:
    with open(path) as fh:
        return histograms_from_json_dict(json.load(fh))
