"""
Tests for AuditSettings
"""

import pytest

from rng_audit.settings import AuditSettings


class TestAuditSettings:
    """Test AuditSettings data model"""

    def test_defaults(self):
        """Test default tolerances and limits"""
        settings = AuditSettings()
        assert settings.max_qubits == 20
        assert settings.dense_max_qubits == 12
        assert settings.state_tolerance == 1e-12
        assert settings.unitary_tolerance == 1e-10
        assert settings.probability_floor == 1e-15
        assert settings.validate() is True

    def test_max_dimension(self):
        """Test the dimension implied by the qubit limit"""
        assert AuditSettings(max_qubits=4).max_dimension == 16

    def test_validate_collects_all_errors(self):
        """Test that validation reports every invalid field at once"""
        settings = AuditSettings(max_qubits=2, dense_max_qubits=1, log_level="LOUD")
        with pytest.raises(ValueError) as excinfo:
            settings.validate()
        message = str(excinfo.value)
        assert "max_qubits" in message
        assert "dense_max_qubits" in message
        assert "log_level" in message

    def test_with_max_qubits(self):
        """Test that only the qubit limit changes"""
        settings = AuditSettings().with_max_qubits(8)
        assert settings.max_qubits == 8
        assert settings.dense_max_qubits == 12

    def test_from_env(self, monkeypatch):
        """Test environment overrides of the qubit limits"""
        monkeypatch.setenv("RNG_AUDIT_MAX_QUBITS", "16")
        monkeypatch.setenv("RNG_AUDIT_DENSE_MAX_QUBITS", "10")
        settings = AuditSettings.from_env()
        assert settings.max_qubits == 16
        assert settings.dense_max_qubits == 10

    def test_from_env_ignores_garbage(self, monkeypatch):
        """Test that non-integer overrides fall back to defaults"""
        monkeypatch.setenv("RNG_AUDIT_MAX_QUBITS", "lots")
        monkeypatch.delenv("RNG_AUDIT_DENSE_MAX_QUBITS", raising=False)
        assert AuditSettings.from_env().max_qubits == 20

    def test_to_dict(self):
        """Test conversion to a plain dictionary"""
        data = AuditSettings().to_dict()
        assert data["max_qubits"] == 20
        assert set(data) >= {"state_tolerance", "unitary_tolerance", "log_level"}
