"""
Tests for adversary construction and audits
"""

import logging

import numpy as np
import pytest

from rng_audit.adversary import (
    AuditReport,
    audit,
    build_adversarial_initial,
    build_target_state,
    case_study_circuit,
    case_study_initial,
    circuit_digest,
    environment_residual,
    random_product_state,
    run_case_study,
)
from rng_audit.circuit import random_circuit
from rng_audit.exceptions import AdversaryConstructionError, InvalidAdversaryConfigError, InvalidStateError
from rng_audit.linalg import equal_up_to_phase, norm, phase_insensitive_distance
from rng_audit.models import AdversaryConfig, Circuit, GateSpec, SubsystemLayout
from rng_audit.simulator import basis_state, run


LAYOUT_111 = SubsystemLayout(1, 1, 1)


class TestBuildTargetState:
    """Test the entangled target state"""

    def test_single_qubit_registers(self):
        """Test the target for one qubit per register"""
        state = build_target_state(LAYOUT_111, AdversaryConfig(p_star=0))
        expected = np.zeros(8, dtype=complex)
        expected[[0b000, 0b101]] = 1 / np.sqrt(2)
        assert np.allclose(state, expected, atol=1e-15)

    def test_two_qubit_m(self):
        """Test that the target spreads evenly over four M values"""
        layout = SubsystemLayout(2, 1, 2)
        state = build_target_state(layout, AdversaryConfig(p_star=1))
        support = np.flatnonzero(state)
        assert support.tolist() == [layout.index(k, 1, k) for k in range(4)]
        assert np.allclose(state[support], 0.5)
        assert norm(state) == pytest.approx(1.0)

    def test_pairing(self):
        """Test that a custom pairing moves the E partners"""
        state = build_target_state(LAYOUT_111, AdversaryConfig(p_star=0, pairing=(1, 0)))
        assert np.flatnonzero(state).tolist() == [0b001, 0b100]

    def test_p_star_out_of_range(self):
        """Test that p_star beyond the P register is rejected"""
        with pytest.raises(InvalidAdversaryConfigError):
            build_target_state(LAYOUT_111, AdversaryConfig(p_star=5))


class TestBuildAdversarialInitial:
    """Test pulling the target back through the circuit"""

    def test_empty_circuit_returns_target(self):
        """Test that an empty circuit needs no preparation"""
        c = Circuit.build(LAYOUT_111, [])
        cfg = AdversaryConfig(p_star=0)
        assert np.allclose(build_adversarial_initial(c, cfg), build_target_state(LAYOUT_111, cfg))

    def test_case_study(self):
        """Test that the case-study input runs forward onto the target"""
        c = case_study_circuit()
        cfg = AdversaryConfig(p_star=0)
        forward = run(c, build_adversarial_initial(c, cfg))
        assert equal_up_to_phase(forward, build_target_state(LAYOUT_111, cfg))

    @pytest.mark.parametrize("m,p", [(1, 1), (2, 2), (3, 1), (1, 3), (4, 4)])
    def test_random_circuits_reach_target(self, m, p):
        """Test that random circuits map the constructed input onto the target"""
        layout = SubsystemLayout.symmetric(m, p)
        for seed in range(3):
            c = random_circuit(layout, 40, seed)
            cfg = AdversaryConfig().resolve(layout, c.success_set)
            forward = run(c, build_adversarial_initial(c, cfg))
            assert phase_insensitive_distance(forward, build_target_state(layout, cfg)) <= 1e-12
            assert np.max(np.abs(forward - build_target_state(layout, cfg))) <= 1e-12

    def test_p_star_must_succeed(self):
        """Test that p_star must be a success outcome"""
        c = Circuit.build(LAYOUT_111, [], success_set=(1,))
        with pytest.raises(InvalidAdversaryConfigError):
            build_adversarial_initial(c, AdversaryConfig(p_star=0))


class TestCaseStudyInitial:
    """Test the entangled case-study preset"""

    def test_unit_norm(self):
        """Test that the preset has exactly unit norm"""
        assert norm(case_study_initial()) == 1.0

    def test_fixed_point(self):
        """Test that the case-study circuit leaves the preset unchanged"""
        preset = case_study_initial()
        assert phase_insensitive_distance(run(case_study_circuit(), preset), preset) <= 1e-12


class TestAudit:
    """Test audits"""

    def test_constructed_adversary(self):
        """Test the audit of the constructed input on the case study"""
        report = audit(case_study_circuit(), AdversaryConfig(p_star=0))
        assert report.success_probability == pytest.approx(1.0, abs=1e-12)
        assert report.agreement_probability == pytest.approx(1.0, abs=1e-12)
        assert report.mutual_information_bits == pytest.approx(1.0, abs=1e-12)
        assert report.output_min_entropy_given_e_bits == pytest.approx(0.0, abs=1e-12)
        assert report.initial_state == "adversary"
        assert report.p_star == 0

    def test_preset_override(self):
        """Test that the preset override is fully predictable"""
        report = audit(case_study_circuit(), initial_override=case_study_initial())
        assert report.agreement_probability == pytest.approx(1.0, abs=1e-12)
        assert report.mutual_information_bits == pytest.approx(1.0, abs=1e-12)
        assert report.initial_state == "override"
        assert report.p_star is None

    def test_honest_input(self):
        """Test that an untouched environment learns nothing"""
        report = audit(case_study_circuit(), initial_override=basis_state(LAYOUT_111, 0, 0, 0))
        assert report.success_probability == pytest.approx(1.0, abs=1e-12)
        assert report.mutual_information_bits == pytest.approx(0.0, abs=1e-12)
        assert report.output_min_entropy_given_e_bits == pytest.approx(1.0, abs=1e-12)
        assert report.agreement_probability == pytest.approx(0.5, abs=1e-12)

    def test_default_p_star_is_smallest_success(self):
        """Test the default choice of p_star"""
        c = Circuit.build(SubsystemLayout(1, 2, 1), [GateSpec("H", (0,))], success_set=(3, 1))
        assert audit(c).p_star == 1

    def test_override_norm_checked(self):
        """Test that a non-normalized override is rejected"""
        with pytest.raises(InvalidStateError):
            audit(case_study_circuit(), initial_override=np.ones(8))


    def test_override_rejects_failing_p_star(self):
        """Test that an explicit p_star outside the success set is rejected with an override"""
        c = Circuit.build(LAYOUT_111, [GateSpec("H", (0,))], success_set=(1,))
        with pytest.raises(InvalidAdversaryConfigError, match="success set"):
            audit(c, AdversaryConfig(p_star=0), initial_override=basis_state(LAYOUT_111, 0, 1, 0))

    def test_override_warns_about_unused_p_star(self, caplog):
        """Test that a valid p_star given with an override is reported as unused"""
        with caplog.at_level(logging.WARNING, logger="rng_audit"):
            report = audit(case_study_circuit(), AdversaryConfig(p_star=1),
                           initial_override=basis_state(LAYOUT_111, 0, 0, 0))
        assert report.p_star is None
        assert "does not affect" in caplog.text
    def test_failed_success(self):
        """Test that an override with no success weight fails with exit code 4"""
        c = Circuit.build(LAYOUT_111, [], success_set=(1,))
        with pytest.raises(AdversaryConstructionError) as excinfo:
            audit(c, initial_override=basis_state(LAYOUT_111, 0, 0, 0))
        assert excinfo.value.exit_code == 4

    def test_swapped_pairing(self):
        """Test agreement under a swapped pairing"""
        report = audit(case_study_circuit(), AdversaryConfig(p_star=1, pairing=(1, 0)))
        assert report.agreement_probability == pytest.approx(1.0, abs=1e-12)
        assert report.pairing == (1, 0)

    @pytest.mark.parametrize("m,p", [(1, 1), (2, 1), (2, 3), (3, 2), (4, 4)])
    def test_random_circuits_fully_predictable(self, m, p):
        """Test that random circuits give m bits of mutual information"""
        layout = SubsystemLayout.symmetric(m, p)
        c = random_circuit(layout, 30, 100 + m * 10 + p)
        report = audit(c)
        assert abs(report.success_probability - 1.0) <= 1e-9
        assert abs(report.agreement_probability - 1.0) <= 1e-9
        assert abs(report.mutual_information_bits - m) <= 1e-9

    def test_product_input_independent(self):
        """Test that a product input keeps M and E independent"""
        layout = SubsystemLayout(2, 2, 2)
        c = random_circuit(layout, 30, 5, success_size=4)
        initial = random_product_state(layout, 5)
        report = audit(c, initial_override=initial)
        assert report.mutual_information_bits <= 1e-12
        assert environment_residual(c, initial) <= 1e-12

    def test_sampling_summary(self):
        """Test sampled agreement on the case study"""
        report = audit(case_study_circuit(), samples=2000, seed=42)
        assert report.sampling.n == 2000
        assert report.sampling.success_count == 2000
        assert report.sampling.empirical_agreement == 1.0
        assert report.sampling.chi_square_dof == 1
        assert report.sampling.prng.startswith("numpy.random.PCG64")

    def test_sampling_deterministic(self):
        """Test that equal seeds give equal sampling summaries"""
        first = audit(case_study_circuit(), samples=500, seed=9)
        again = audit(case_study_circuit(), samples=500, seed=9)
        assert first == again

    def test_to_dict(self):
        """Test the report field order and contents"""
        data = audit(case_study_circuit()).to_dict()
        assert "distribution" not in data
        assert data["pairing"] == [0, 1]
        assert data["index_convention"] == "MPE-big-endian-v1"
        assert data["circuit_digest"].startswith("sha256:")
        assert data["sampling"] is None

    def test_digest_stable(self):
        """Test that the circuit digest depends only on the circuit"""
        assert circuit_digest(case_study_circuit()) == circuit_digest(case_study_circuit())
        assert circuit_digest(case_study_circuit()) != circuit_digest(Circuit.build(LAYOUT_111, []))


class TestCaseStudy:
    """Test the built-in comparison"""

    def test_rows(self):
        """Test the three case-study rows"""
        result = run_case_study()
        assert set(result.rows) == {"honest", "entangled_preset", "constructed"}
        assert result.rows["honest"].mutual_information_bits == pytest.approx(0.0, abs=1e-12)
        assert result.rows["honest"].output_min_entropy_given_e_bits == pytest.approx(1.0, abs=1e-12)
        for name in ("entangled_preset", "constructed"):
            assert result.rows[name].mutual_information_bits == pytest.approx(1.0, abs=1e-12)
            assert result.rows[name].agreement_probability == pytest.approx(1.0, abs=1e-12)
        assert all(isinstance(row, AuditReport) for row in result.rows.values())

    def test_checks(self):
        """Test that every case-study check is at machine precision"""
        checks = run_case_study().checks
        assert checks["fixed_point_residual"] <= 1e-12
        assert checks["conditional_p0_probability"] == pytest.approx(0.5, abs=1e-12)
        assert checks["conditional_p1_bell_fidelity"] == pytest.approx(1.0, abs=1e-12)
        assert checks["constructed_target_residual"] <= 1e-12
        assert checks["deferred_measurement_residual"] <= 1e-12
        assert checks["environment_inertness_residual"] <= 1e-12
