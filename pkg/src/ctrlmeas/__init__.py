"""Simulator and reconstruction toolkit for control-qubit driven sequential measurements.

A single ancilla qubit turns a projective measurement of one observable
into a tunable-strength measurement; following it with a projective
measurement of a second, non-commuting observable yields joint statistics
whose error model is simple enough to invert exactly.  This package
provides the exact statistics, a reproducible Monte Carlo sampler, the
background-subtraction reconstruction of the complex joint probability,
and state tomography built on it.
"""

from .core import (
    DensityMatrix,
    Observable,
    ObservablePair,
    computational_basis,
    fourier_basis,
    random_basis,
    random_pure_state,
    trace_distance,
    validate_state,
)
from .measurement import (
    ControlSetting,
    KrausSet,
    apply_nonselective,
    build_interaction_operator,
    build_kraus_set,
    dephasing_factor,
    measurement_fidelity,
    success_probability,
)
from .reconstruction import (
    IntrinsicDistribution,
    ReconstructionReport,
    SnrPoint,
    build_report,
    combine_two_phases,
    fourier_constant,
    fourier_extract,
    phase_component,
    project_to_physical,
    reconstruct_two_phase,
    recover_marginals,
    snr_summary,
    subtract_background,
    tomography,
)
from .sampler import (
    CountHistogram,
    ExperimentPlan,
    empirical_joint,
    outcome_distribution,
    run_experiment,
    sample_postselected,
)
from .sequential import (
    ComplexJointDistribution,
    JointOutcomeTable,
    QuasiProbTriple,
    complex_correlation,
    complex_joint_probability,
    commutator_expectation,
    decompose,
    dephasing_from_decomposition,
    exact_joint_probability,
    fidelity_from_decomposition,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexJointDistribution",
    "ControlSetting",
    "CountHistogram",
    "DensityMatrix",
    "ExperimentPlan",
    "IntrinsicDistribution",
    "JointOutcomeTable",
    "KrausSet",
    "Observable",
    "ObservablePair",
    "QuasiProbTriple",
    "ReconstructionReport",
    "SnrPoint",
    "apply_nonselective",
    "build_interaction_operator",
    "build_kraus_set",
    "build_report",
    "combine_two_phases",
    "complex_correlation",
    "complex_joint_probability",
    "commutator_expectation",
    "computational_basis",
    "decompose",
    "dephasing_factor",
    "dephasing_from_decomposition",
    "empirical_joint",
    "exact_joint_probability",
    "fidelity_from_decomposition",
    "fourier_basis",
    "fourier_constant",
    "fourier_extract",
    "measurement_fidelity",
    "outcome_distribution",
    "phase_component",
    "project_to_physical",
    "random_basis",
    "random_pure_state",
    "reconstruct_two_phase",
    "recover_marginals",
    "run_experiment",
    "sample_postselected",
    "snr_summary",
    "subtract_background",
    "success_probability",
    "tomography",
    "trace_distance",
    "validate_state",
]
