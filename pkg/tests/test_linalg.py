"""
Tests for dense complex linear algebra
"""

import numpy as np
import pytest

from rng_audit.exceptions import DimensionMismatchError, InvalidStateError, ResourceGuardError
from rng_audit.gates import FIXED_GATES
from rng_audit.linalg import (
    adjoint,
    apply,
    equal_up_to_phase,
    fidelity,
    is_unitary,
    kron,
    phase_insensitive_distance,
)


H = FIXED_GATES["H"]
X = FIXED_GATES["X"]
CNOT = FIXED_GATES["CNOT"]
I2 = np.eye(2, dtype=complex)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)
PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)


def basis(dim, index):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


class TestKron:
    """Test Kronecker products"""

    def test_identity(self):
        """Test that I ⊗ I is the 4x4 identity"""
        assert np.array_equal(kron(I2, I2), np.eye(4))

    def test_hadamard_on_first_qubit(self):
        """Test that the left factor acts on the most significant qubit"""
        result = apply(kron(H, I2), basis(4, 0b00))
        expected = (basis(4, 0b00) + basis(4, 0b10)) / np.sqrt(2)
        assert np.allclose(result, expected, atol=1e-12)

    def test_x_x_flips_both(self):
        """Test that X ⊗ X flips both bits"""
        assert np.array_equal(apply(kron(X, X), basis(4, 0b01)), basis(4, 0b10))

    def test_dimensions_multiply(self):
        """Test the shape of a non-square product"""
        a = np.ones((2, 3), dtype=complex)
        b = np.ones((4, 5), dtype=complex)
        assert kron(a, b).shape == (8, 15)

    def test_associativity(self):
        """Test that the product is associative on random complex factors"""
        rng = np.random.default_rng(5)
        a, b, c = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(3))
        left = kron(kron(a, b), c)
        right = kron(a, kron(b, c))
        assert np.max(np.abs(left - right)) <= 1e-15

    def test_dimension_guard(self):
        """Test that an explicit max_dim is enforced"""
        with pytest.raises(ResourceGuardError) as excinfo:
            kron(np.eye(8), np.eye(8), max_dim=32)
        assert "64" in excinfo.value.message

    def test_dimension_guard_from_env(self, monkeypatch):
        """Test that RNG_AUDIT_MAX_QUBITS bounds the result when no limit is passed"""
        monkeypatch.setenv("RNG_AUDIT_MAX_QUBITS", "3")
        with pytest.raises(ResourceGuardError):
            kron(np.eye(4), np.eye(4))
        assert kron(np.eye(2), np.eye(4)).shape == (8, 8)

    def test_rejects_nan(self):
        """Test that NaN operands are rejected"""
        with pytest.raises(InvalidStateError):
            kron(np.array([[np.nan]]), I2)


class TestAdjoint:
    """Test conjugate transposes"""

    def test_hadamard_hermitian(self):
        """Test that H is its own adjoint"""
        assert np.array_equal(adjoint(H), H)

    def test_conjugates_diagonal(self):
        """Test that diagonal entries are conjugated"""
        assert np.array_equal(adjoint(np.diag([1j, 1])), np.diag([-1j, 1]))

    def test_cnot_self_adjoint(self):
        """Test that CNOT is its own adjoint"""
        assert np.array_equal(adjoint(CNOT), CNOT)

    def test_involution(self):
        """Test that the adjoint of the adjoint is the matrix"""
        rng = np.random.default_rng(11)
        a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
        assert np.array_equal(adjoint(adjoint(a)), a)


class TestIsUnitary:
    """Test unitarity checks"""

    def test_hadamard(self):
        """Test that H is unitary"""
        assert is_unitary(H, 1e-10)

    def test_zero_matrix(self):
        """Test that the zero matrix is not unitary"""
        assert not is_unitary(np.zeros((2, 2)), 1e-10)

    def test_shear(self):
        """Test that an invertible non-unitary matrix fails"""
        assert not is_unitary(np.array([[1, 1], [0, 1]]), 1e-10)

    def test_non_square_rejected(self):
        """Test that non-square input is rejected"""
        with pytest.raises(DimensionMismatchError):
            is_unitary(np.ones((2, 3)), 1e-10)


class TestApply:
    """Test matrix-vector application"""

    def test_identity(self):
        """Test that the identity leaves a vector unchanged"""
        v = np.array([0.6, 0.8j])
        assert np.array_equal(apply(I2, v), v)

    def test_hadamard_on_zero(self):
        """Test that H maps the zero state to the plus state"""
        assert np.allclose(apply(H, KET0), PLUS, atol=1e-15)

    def test_hadamard_involution(self):
        """Test that applying H twice returns the input"""
        assert np.allclose(apply(H @ H, KET1), KET1, atol=1e-15)

    def test_dimension_mismatch(self):
        """Test that mismatched operands are rejected"""
        with pytest.raises(DimensionMismatchError):
            apply(np.eye(4), KET0)


class TestStateComparison:
    """Test phase-insensitive comparisons"""

    def test_global_phase_ignored(self):
        """Test that a global phase gives zero distance"""
        phased = np.exp(0.7j) * PLUS
        assert equal_up_to_phase(PLUS, phased)
        assert phase_insensitive_distance(PLUS, phased) <= 1e-12
        assert fidelity(PLUS, phased) == pytest.approx(1.0, abs=1e-12)

    def test_orthogonal_states(self):
        """Test that orthogonal states are sqrt(2) apart"""
        assert not equal_up_to_phase(KET0, KET1)
        assert phase_insensitive_distance(KET0, KET1) == pytest.approx(np.sqrt(2))
        assert fidelity(KET0, KET1) == 0.0

    def test_small_perturbation_resolved(self):
        """Test that the distance tracks perturbations far below sqrt(machine epsilon)"""
        minus = np.array([1, -1], dtype=complex) / np.sqrt(2)
        delta = 1e-10
        nudged = (np.exp(0.3j) * (PLUS + delta * minus)) / np.sqrt(1 + delta ** 2)
        assert phase_insensitive_distance(PLUS, nudged) == pytest.approx(delta, rel=1e-4)

    def test_distance_is_symmetric(self):
        """Test that swapping the arguments leaves the distance unchanged"""
        a = np.array([0.6, 0.8j], dtype=complex)
        b = np.exp(1.1j) * np.array([0.8, 0.6], dtype=complex)
        assert phase_insensitive_distance(a, b) == pytest.approx(phase_insensitive_distance(b, a), abs=1e-15)
