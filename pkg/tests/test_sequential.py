"""Tests for the sequential joint statistics and the complex joint probability."""

import math

import numpy as np
import pytest

from ctrlmeas import (
    ControlSetting,
    DensityMatrix,
    ObservablePair,
    complex_correlation,
    complex_joint_probability,
    commutator_expectation,
    computational_basis,
    decompose,
    dephasing_factor,
    dephasing_from_decomposition,
    exact_joint_probability,
    fidelity_from_decomposition,
    fourier_basis,
    measurement_fidelity,
    random_basis,
    random_pure_state,
)
from ctrlmeas.errors import NegativeProbability, PhaseSingularity, ValidationError
from ctrlmeas.sequential import JointOutcomeTable, QuasiProbTriple


def y_plus_state():
    psi = np.array([1.0, 1.0j]) / math.sqrt(2)
    return DensityMatrix(np.outer(psi, psi.conj()))


def zx_pair(eigenvalues=None):
    """Computational basis vs its Fourier partner; for d=2 that is z vs x."""
    return ObservablePair(
        computational_basis(2, eigenvalues), fourier_basis(2, eigenvalues)
    )


def kraus_oracle_table(state, pair, setting):
    """Independent route: build S(a,1) from scratch and take <b|S rho S^dag|b> / P(1)."""
    d = pair.dim
    table = np.empty((d, d))
    p1_total = np.zeros((d, d), dtype=complex)
    for a in range(d):
        vec = pair.obs_a.ket(a)
        proj = np.outer(vec, vec.conj())
        s_op = (
            math.cos(setting.theta) / math.sqrt(d) * np.eye(d)
            + np.exp(1j * setting.phi) * math.sin(setting.theta) * proj
        ) / math.sqrt(2)
        transformed = s_op @ state.matrix @ s_op.conj().T
        p1_total += s_op.conj().T @ s_op
        for b in range(d):
            ket_b = pair.obs_b.ket(b)
            table[a, b] = np.real(np.vdot(ket_b, transformed @ ket_b))
    p1 = float(np.real(p1_total[0, 0]))
    return table / p1


def random_instance(k):
    d = 2 + k % 5
    state = random_pure_state(d, seed=1000 + k)
    pair = ObservablePair(random_basis(d, seed=2000 + k), random_basis(d, seed=3000 + k))
    theta = (0.1 + 0.8 * ((k * 37) % 100) / 100) * math.pi / 2
    phi = 2 * math.pi * ((k * 61) % 100) / 100
    return state, pair, ControlSetting(d, theta, phi)


class TestExactJointProbability:
    def test_zero_strength_rows_follow_b_marginal(self):
        state = random_pure_state(3, seed=3)
        pair = ObservablePair(random_basis(3, seed=4), random_basis(3, seed=5))
        table = exact_joint_probability(state, pair, ControlSetting(3, 0.0, 0.0))
        prob_b = state.basis_probabilities(pair.obs_b)
        for a in range(3):
            np.testing.assert_allclose(table.probs[a], prob_b / 3, atol=1e-13)

    def test_full_strength_collapse(self):
        state = random_pure_state(3, seed=6)
        pair = ObservablePair(random_basis(3, seed=7), random_basis(3, seed=8))
        table = exact_joint_probability(state, pair, ControlSetting(3, math.pi / 2, 0.0))
        prob_a = state.basis_probabilities(pair.obs_a)
        expected = prob_a[:, None] * pair.overlap_probabilities().T
        np.testing.assert_allclose(table.probs, expected, atol=1e-13)

    def test_matches_kraus_oracle(self):
        state = y_plus_state()
        pair = zx_pair()
        setting = ControlSetting(2, math.pi / 4, 0.0)
        table = exact_joint_probability(state, pair, setting)
        np.testing.assert_allclose(table.probs, kraus_oracle_table(state, pair, setting), atol=1e-12)

    def test_two_form_equivalence_random_instances(self):
        for k in range(20):
            state, pair, setting = random_instance(k)
            table = exact_joint_probability(state, pair, setting)
            oracle = kraus_oracle_table(state, pair, setting)
            assert np.max(np.abs(table.probs - oracle)) < 1e-12

    def test_normalization(self):
        for k in range(10):
            state, pair, setting = random_instance(k)
            table = exact_joint_probability(state, pair, setting)
            assert abs(table.probs.sum() - 1.0) < 1e-12
            assert table.probs.min() >= 0.0


class TestJointOutcomeTableType:
    def test_roundoff_negatives_clipped(self):
        probs = np.array([[0.5, -5e-15], [0.25, 0.25]])
        table = JointOutcomeTable(probs + np.diag([5e-15, 0]), 0.5, ControlSetting(2, 0.3, 0.0))
        assert table.probs.min() == 0.0

    def test_real_negatives_rejected(self):
        probs = np.array([[0.6, -0.1], [0.25, 0.25]])
        with pytest.raises(NegativeProbability):
            JointOutcomeTable(probs, 0.5, ControlSetting(2, 0.3, 0.0))

    def test_bad_normalization_rejected(self):
        with pytest.raises(ValidationError, match="sum"):
            JointOutcomeTable(np.full((2, 2), 0.3), 0.5, ControlSetting(2, 0.3, 0.0))


class TestComplexJointProbability:
    def test_eigenstate_of_a_gives_real_values(self):
        state = DensityMatrix(np.diag([1.0, 0.0]))
        dist = complex_joint_probability(state, zx_pair())
        np.testing.assert_allclose(dist.values[0], [0.5, 0.5], atol=1e-14)
        np.testing.assert_allclose(dist.values[1], [0.0, 0.0], atol=1e-14)

    def test_y_plus_table(self):
        dist = complex_joint_probability(y_plus_state(), zx_pair())
        expected = np.array(
            [[0.25 - 0.25j, 0.25 + 0.25j], [0.25 + 0.25j, 0.25 - 0.25j]]
        )
        np.testing.assert_allclose(dist.values, expected, atol=1e-13)

    def test_unit_sum_any_input(self):
        for k in range(20):
            state, pair, _ = random_instance(k)
            dist = complex_joint_probability(state, pair)
            assert abs(dist.values.sum() - 1.0) < 1e-12

    def test_marginals_reproduce_basis_probabilities(self):
        for k in range(20):
            state, pair, _ = random_instance(k)
            dist = complex_joint_probability(state, pair)
            marg_a = dist.marginal_a()
            marg_b = dist.marginal_b()
            assert np.max(np.abs(marg_a.imag)) < 1e-12
            assert np.max(np.abs(marg_b.imag)) < 1e-12
            np.testing.assert_allclose(marg_a.real, state.basis_probabilities(pair.obs_a), atol=1e-12)
            np.testing.assert_allclose(marg_b.real, state.basis_probabilities(pair.obs_b), atol=1e-12)

    def test_conjugation_symmetry(self):
        # rho(a,b)^* computed with swapped roles: <a|b><b|rho|a>
        for k in range(10):
            state, pair, _ = random_instance(k)
            dist = complex_joint_probability(state, pair)
            swapped = complex_joint_probability(
                state, ObservablePair(pair.obs_b, pair.obs_a)
            )
            np.testing.assert_allclose(dist.values.conj(), swapped.values.T, atol=1e-12)


class TestDecompose:
    def test_zero_strength(self):
        triple = decompose(ControlSetting(2, 0.0, 0.0))
        assert (triple.p_identity, triple.p_measurement, triple.p_coherence) == (1.0, 0.0, 0.0)

    def test_full_strength(self):
        triple = decompose(ControlSetting(2, math.pi / 2, 0.0))
        assert abs(triple.p_identity) < 1e-30
        assert abs(triple.p_measurement - 1.0) < 1e-15
        assert abs(triple.p_coherence) < 1e-15

    def test_intermediate_values(self):
        triple = decompose(ControlSetting(2, math.pi / 4, 0.0))
        assert abs(triple.p_identity - 0.2928932188) < 1e-10
        assert abs(triple.p_measurement - 0.2928932188) < 1e-10
        assert abs(triple.p_coherence - 0.4142135624) < 1e-10

    def test_phase_singularity(self):
        with pytest.raises(PhaseSingularity):
            decompose(ControlSetting(2, math.pi / 4, math.pi / 2))

    def test_coherence_sign_follows_cos_phi(self):
        assert decompose(ControlSetting(2, 0.5, 0.1)).p_coherence > 0
        assert decompose(ControlSetting(2, 0.5, math.pi - 0.1)).p_coherence < 0

    def test_sum_is_one(self):
        for theta in (0.2, 0.7, 1.4):
            for phi in (0.0, 1.0, 2.5, 4.0):
                triple = decompose(ControlSetting(3, theta, phi))
                assert abs(triple.p_identity + triple.p_measurement + triple.p_coherence - 1.0) < 1e-12


class TestDecompositionIdentity:
    def test_three_term_identity(self):
        # p(a,b|1) = P_I (1/d) <b|rho|b> + P_M |<b|a>|^2 <a|rho|a> + P_C Re(e^{i phi} rho(a,b)) / cos(phi)
        for k in range(30):
            state, pair, setting = random_instance(k)
            if abs(math.cos(setting.phi)) <= 1e-3:
                continue
            d = pair.dim
            table = exact_joint_probability(state, pair, setting)
            triple = decompose(setting)
            kd = complex_joint_probability(state, pair).values
            phase = np.exp(1j * setting.phi)
            expected = (
                triple.p_identity / d * state.basis_probabilities(pair.obs_b)[None, :]
                + triple.p_measurement
                * pair.overlap_probabilities().T
                * state.basis_probabilities(pair.obs_a)[:, None]
                + triple.p_coherence * np.real(phase * kd) / math.cos(setting.phi)
            )
            assert np.max(np.abs(table.probs - expected)) < 1e-12


class TestDerivedFiguresOfMerit:
    def test_fidelity_boundary_cases(self):
        assert fidelity_from_decomposition(QuasiProbTriple(1.0, 0.0, 0.0), 2) == 0.5
        assert fidelity_from_decomposition(QuasiProbTriple(0.0, 1.0, 0.0), 5) == 1.0

    def test_fidelity_intermediate(self):
        triple = decompose(ControlSetting(2, math.pi / 4, 0.0))
        assert abs(fidelity_from_decomposition(triple, 2) - 0.8535533906) < 1e-10

    def test_dephasing_boundary_cases(self):
        assert dephasing_from_decomposition(QuasiProbTriple(0.0, 1.0, 0.0)) == 0.0
        assert dephasing_from_decomposition(QuasiProbTriple(1.0, 0.0, 0.0)) == 1.0

    def test_dephasing_intermediate(self):
        triple = decompose(ControlSetting(2, math.pi / 4, 0.0))
        assert abs(dephasing_from_decomposition(triple) - 0.7071067812) < 1e-10

    def test_agreement_with_closed_forms(self):
        for d in (2, 3, 5):
            for theta in (0.1, 0.6, 1.2):
                for phi in (0.0, 0.8, 2.9):
                    setting = ControlSetting(d, theta, phi)
                    triple = decompose(setting)
                    assert abs(fidelity_from_decomposition(triple, d) - measurement_fidelity(setting)) < 1e-12
                    assert abs(dephasing_from_decomposition(triple) - dephasing_factor(setting)) < 1e-12


class TestCorrelations:
    def test_commuting_case_is_real(self):
        basis = random_basis(3, seed=42, eigenvalues=[1.0, -2.0, 0.5])
        state = random_pure_state(3, seed=43)
        pair = ObservablePair(basis, basis)
        corr = complex_correlation(complex_joint_probability(state, pair))
        op = basis.operator()
        assert abs(corr.imag) < 1e-12
        assert abs(corr - np.trace(op @ op @ state.matrix)) < 1e-12

    def test_pauli_example(self):
        # rho = y-plus, A = sigma_z, B = sigma_x: tr(BA rho) = -i
        pair = zx_pair(eigenvalues=[1.0, -1.0])
        corr = complex_correlation(complex_joint_probability(y_plus_state(), pair))
        assert abs(corr - (-1.0j)) < 1e-12

    def test_maximally_mixed_traceless(self):
        d = 4
        obs_a = random_basis(d, seed=50, eigenvalues=[1.5, -0.5, -0.5, -0.5])
        obs_b = random_basis(d, seed=51, eigenvalues=[2.0, 0.0, -1.0, -1.0])
        pair = ObservablePair(obs_a, obs_b)
        state = DensityMatrix(np.eye(d) / d)
        corr = complex_correlation(complex_joint_probability(state, pair))
        expected = np.trace(obs_b.operator() @ obs_a.operator()) / d
        assert abs(corr - expected) < 1e-12

    def test_ordered_product_identity_random(self):
        for k in range(30):
            d = 2 + k % 4
            pair = ObservablePair(
                random_basis(d, seed=100 + k, eigenvalues=np.linspace(-1, 1, d)),
                random_basis(d, seed=200 + k),
            )
            state = random_pure_state(d, seed=300 + k)
            corr = complex_correlation(complex_joint_probability(state, pair))
            expected = np.trace(pair.obs_b.operator() @ pair.obs_a.operator() @ state.matrix)
            assert abs(corr - expected) < 1e-12


class TestCommutatorExpectation:
    def test_commuting_observables_vanish(self):
        basis = random_basis(3, seed=60)
        state = random_pure_state(3, seed=61)
        dist = complex_joint_probability(state, ObservablePair(basis, basis))
        assert abs(commutator_expectation(dist)) < 1e-12

    def test_pauli_example(self):
        pair = zx_pair(eigenvalues=[1.0, -1.0])
        dist = complex_joint_probability(y_plus_state(), pair)
        assert abs(commutator_expectation(dist) - (-1.0)) < 1e-12

    def test_maximally_mixed_vanishes(self):
        pair = zx_pair(eigenvalues=[1.0, -1.0])
        dist = complex_joint_probability(DensityMatrix(np.eye(2) / 2), pair)
        assert abs(commutator_expectation(dist)) < 1e-12

    def test_two_formulas_agree_random(self):
        for k in range(100):
            d = 2 + k % 4
            pair = ObservablePair(
                random_basis(d, seed=400 + k, eigenvalues=np.linspace(0.5, d, d)),
                random_basis(d, seed=500 + k, eigenvalues=np.linspace(-2, 2, d)),
            )
            state = random_pure_state(d, seed=600 + k)
            dist = complex_joint_probability(state, pair)
            op_a, op_b = pair.obs_a.operator(), pair.obs_b.operator()
            commutator = op_a @ op_b - op_b @ op_a
            expected = (0.5j * np.trace(commutator @ state.matrix)).real
            assert abs(commutator_expectation(dist) - expected) < 1e-12
