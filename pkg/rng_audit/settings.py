"""
AuditSettings data model for tolerances and resource limits

This module provides the AuditSettings dataclass holding the numeric
tolerances and size guards shared by the simulator, the parser and the
command-line interface. Defaults can be overridden from the environment.
"""

import os
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict

from rng_audit.log import get_logger


logger = get_logger(__name__)

MAX_QUBITS_ENV = "RNG_AUDIT_MAX_QUBITS"
DENSE_MAX_QUBITS_ENV = "RNG_AUDIT_DENSE_MAX_QUBITS"

VALID_LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class AuditSettings:
    """
    Tolerances and limits for simulation and auditing

    Attributes:
        max_qubits: Upper bound on m + p + e for any layout (statevector of 2^max_qubits)
        dense_max_qubits: Upper bound on m + p for compiling a dense unitary
        state_tolerance: Euclidean tolerance for state comparisons and norms
        unitary_tolerance: Entrywise tolerance for unitarity checks
        probability_floor: Probabilities at or below this are treated as exactly 0
        impossible_threshold: Outcomes below this probability cannot be conditioned on
        normalizable_floor: Minimum norm of an explicit amplitude list
        log_level: Package log level name
    """
    max_qubits: int = 20
    dense_max_qubits: int = 12
    state_tolerance: float = 1e-12
    unitary_tolerance: float = 1e-10
    probability_floor: float = 1e-15
    impossible_threshold: float = 1e-12
    normalizable_floor: float = 1e-9
    log_level: str = "ERROR"

    def validate(self) -> bool:
        """
        Validate all settings

        Returns:
            bool: True if all settings are valid

        Raises:
            ValueError: If any setting is invalid, listing every problem
        """
        errors = []

        if not isinstance(self.max_qubits, int) or self.max_qubits < 3:
            errors.append(f"Invalid max_qubits: '{self.max_qubits}'. "
                          f"Must be an integer >= 3 (one qubit each for M, P, E)")

        if not isinstance(self.dense_max_qubits, int) or self.dense_max_qubits < 2:
            errors.append(f"Invalid dense_max_qubits: '{self.dense_max_qubits}'. "
                          f"Must be an integer >= 2")

        for name in ("state_tolerance", "unitary_tolerance", "probability_floor",
                     "impossible_threshold", "normalizable_floor"):
            value = getattr(self, name)
            if not isinstance(value, float) or not 0.0 < value < 1.0:
                errors.append(f"Invalid {name}: '{value}'. Must be a float in (0, 1)")

        if self.log_level.upper() not in VALID_LOG_LEVELS:
            errors.append(f"Invalid log_level: '{self.log_level}'. "
                          f"Expected one of: {', '.join(VALID_LOG_LEVELS)}")

        if errors:
            raise ValueError("AuditSettings validation failed:\n" + "\n".join(f"- {error}" for error in errors))

        return True

    def with_max_qubits(self, max_qubits: int) -> "AuditSettings":
        """Return a copy with a different qubit limit"""
        return replace(self, max_qubits=max_qubits)

    @property
    def max_dimension(self) -> int:
        """Largest vector/matrix dimension allowed by max_qubits"""
        return 1 << self.max_qubits

    def to_dict(self) -> Dict[str, Any]:
        """
        Convert AuditSettings to dictionary format

        Returns:
            dict: Settings as a plain dictionary
        """
        return asdict(self)

    @classmethod
    def from_env(cls) -> "AuditSettings":
        """
        Build settings from defaults and environment overrides

        Unparseable integers are ignored with a warning.

        Returns:
            AuditSettings: Settings for this process
        """
        overrides: Dict[str, Any] = {}

        for env_name, field_name in ((MAX_QUBITS_ENV, "max_qubits"),
                                     (DENSE_MAX_QUBITS_ENV, "dense_max_qubits")):
            raw = os.environ.get(env_name)
            if raw is None:
                continue
            try:
                overrides[field_name] = int(raw)
            except ValueError:
                logger.warning(f"Ignoring {env_name}={raw!r}: not an integer")

        log_level = os.environ.get("RNG_AUDIT_LOG_LEVEL")
        if log_level:
            overrides["log_level"] = log_level.upper()

        return cls(**overrides)


DEFAULT_SETTINGS = AuditSettings()
