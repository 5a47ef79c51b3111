"""
Gate matrices and gate-local tensor updates

The fixed gate set and the routine that applies a 1- or 2-wire matrix to
selected axes of a state tensor. The same routine drives statevector
evolution (one axis per qubit) and dense unitary compilation (one extra
trailing axis for the columns), so both paths run identical arithmetic.
"""

from math import sqrt
from typing import Dict, Sequence

import numpy as np

from rng_audit.linalg import COMPLEX_DTYPE


_SQRT2_INV = 1 / sqrt(2)

FIXED_GATES: Dict[str, np.ndarray] = {
    "H": np.array([[1, 1], [1, -1]], dtype=COMPLEX_DTYPE) * _SQRT2_INV,
    "X": np.array([[0, 1], [1, 0]], dtype=COMPLEX_DTYPE),
    "Z": np.array([[1, 0], [0, -1]], dtype=COMPLEX_DTYPE),
    # first wire is the control; basis order |w0 w1⟩ with w0 most significant
    "CNOT": np.array([[1, 0, 0, 0],
                      [0, 1, 0, 0],
                      [0, 0, 0, 1],
                      [0, 0, 1, 0]], dtype=COMPLEX_DTYPE),
    "CZ": np.diag(np.array([1, 1, 1, -1], dtype=COMPLEX_DTYPE)),
    "SWAP": np.array([[1, 0, 0, 0],
                      [0, 0, 1, 0],
                      [0, 1, 0, 0],
                      [0, 0, 0, 1]], dtype=COMPLEX_DTYPE),
}

GATE_ARITY: Dict[str, int] = {
    "H": 1,
    "X": 1,
    "Z": 1,
    "CNOT": 2,
    "CZ": 2,
    "SWAP": 2,
    "U1": 1,
    "U2": 2,
}

EXPLICIT_GATES = frozenset({"U1", "U2"})

# all fixed gates are Hermitian as well as unitary
SELF_ADJOINT_GATES = frozenset(FIXED_GATES)


def apply_gate_tensor(tensor: np.ndarray, matrix: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    """
    Apply a gate matrix to the given axes of a qubit tensor

    Args:
        tensor: Array whose listed axes all have length 2
        matrix: 2^k x 2^k gate matrix, k = len(axes)
        axes: Target axes, the first one being the most significant gate qubit

    Returns:
        np.ndarray: New tensor with the same shape
    """
    k = len(axes)
    gate = matrix.reshape((2,) * (2 * k))
    # contract the gate's input indices with the target axes; outputs land in front
    updated = np.tensordot(gate, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(updated, list(range(k)), list(axes))
