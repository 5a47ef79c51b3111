"""
Input validation for circuit definitions

This module provides validator classes for wire names, subsystem
layouts, explicit gate matrices and basis pairings, so that the parser
and the data models reject bad input with the same rules.
"""

import re
from typing import Optional, Sequence, Tuple

import numpy as np

from rng_audit.linalg import is_unitary
from rng_audit.settings import DEFAULT_SETTINGS


class WireValidator:
    """Validator for wire names such as ``M0``, ``P3`` or ``E1``"""

    WIRE_PATTERN = re.compile(r'^([MPE])(\d+)$')

    @staticmethod
    def split_wire(name: str) -> Optional[Tuple[str, int]]:
        """
        Split a wire name into register letter and index

        Args:
            name: Wire token from a circuit file

        Returns:
            tuple: (register, index) or None if the token is not a wire name
        """
        if not name or not isinstance(name, str):
            return None

        match = WireValidator.WIRE_PATTERN.match(name.strip())
        if not match:
            return None
        return match.group(1), int(match.group(2))

    @staticmethod
    def is_environment_wire(name: str) -> bool:
        """True if the token names a wire of the environment register"""
        parts = WireValidator.split_wire(name)
        return parts is not None and parts[0] == "E"


class LayoutValidator:
    """Validator for subsystem layouts"""

    # layout M=<int> P=<int> E=<int>
    LAYOUT_PATTERN = re.compile(
        r'^layout\s+M=(\d+)\s+P=(\d+)\s+E=(\d+)$'
    )

    @staticmethod
    def parse_layout_line(line: str) -> Optional[Tuple[int, int, int]]:
        """
        Extract (m, p, e) qubit counts from a layout line

        Returns:
            tuple: Qubit counts, or None if the line does not match
        """
        match = LayoutValidator.LAYOUT_PATTERN.match(line.strip())
        if not match:
            return None
        return int(match.group(1)), int(match.group(2)), int(match.group(3))

    @staticmethod
    def layout_errors(m_qubits: int, p_qubits: int, e_qubits: int,
                      max_qubits: int = DEFAULT_SETTINGS.max_qubits) -> list:
        """
        Collect every layout problem except the size guard

        The total-qubit guard is reported separately because it maps to a
        different exit code.

        Returns:
            list: Human-readable problems, empty if the layout is valid
        """
        errors = []
        for name, value in (("m_qubits", m_qubits), ("p_qubits", p_qubits), ("e_qubits", e_qubits)):
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                errors.append(f"{name} must be a positive integer, got {value!r}")
        if not errors and e_qubits != m_qubits:
            errors.append(f"environment must match M: e_qubits={e_qubits} but m_qubits={m_qubits}")
        return errors


class UnitaryValidator:
    """Validator for explicit U1/U2 gate matrices"""

    @staticmethod
    def is_valid_gate_matrix(matrix: np.ndarray, n_wires: int,
                             tol: float = DEFAULT_SETTINGS.unitary_tolerance) -> bool:
        """
        Check shape (2^n_wires square) and unitarity

        Returns:
            bool: True if the matrix can be used on n_wires wires
        """
        dim = 1 << n_wires
        if matrix.shape != (dim, dim):
            return False
        if not np.all(np.isfinite(matrix)):
            return False
        return is_unitary(matrix, tol)


class PairingValidator:
    """Validator for M ↔ E basis pairings"""

    @staticmethod
    def is_valid_pairing(pairing: Sequence[int], dim: int) -> bool:
        """
        A pairing is valid when it is a permutation of 0..dim-1

        Args:
            pairing: pairing[k] is the E basis index paired with M index k
            dim: Dimension of M (and E)
        """
        if len(pairing) != dim:
            return False
        return sorted(int(k) for k in pairing) == list(range(dim))

    @staticmethod
    def parse_pairing(text: str) -> Tuple[int, ...]:
        """
        Parse ``"1,0,3,2"`` into a tuple of ints

        Raises:
            ValueError: If an entry is not an integer
        """
        parts = [part.strip() for part in text.split(",") if part.strip()]
        return tuple(int(part) for part in parts)
