"""
Dense complex linear algebra

Vectors and matrices are plain ``numpy`` arrays of dtype complex128 in
row-major order. Every public function validates its operands (finite
entries, matching dimensions) and never mutates its inputs.
"""

from typing import Optional

import numpy as np
import numpy.typing as npt

from rng_audit.exceptions import DimensionMismatchError, InvalidStateError, ResourceGuardError
from rng_audit.settings import DEFAULT_SETTINGS, AuditSettings


DenseVector = npt.NDArray[np.complex128]
DenseMatrix = npt.NDArray[np.complex128]

COMPLEX_DTYPE = np.complex128


def as_vector(values, name: str = "vector") -> DenseVector:
    """Convert values to a finite 1-D complex vector"""
    vector = np.asarray(values, dtype=COMPLEX_DTYPE)
    if vector.ndim != 1 or vector.size == 0:
        raise InvalidStateError(f"{name} must be a nonempty 1-D sequence", {"shape": vector.shape})
    if not np.all(np.isfinite(vector)):
        raise InvalidStateError(f"{name} contains NaN or Inf entries")
    return vector


def as_matrix(values, name: str = "matrix") -> DenseMatrix:
    """Convert values to a finite 2-D complex matrix"""
    matrix = np.asarray(values, dtype=COMPLEX_DTYPE)
    if matrix.ndim != 2 or matrix.size == 0:
        raise DimensionMismatchError(name, "nonempty 2-D array", matrix.shape)
    if not np.all(np.isfinite(matrix)):
        raise InvalidStateError(f"{name} contains NaN or Inf entries")
    return matrix


def kron(a: DenseMatrix, b: DenseMatrix, max_dim: Optional[int] = None) -> DenseMatrix:
    """
    Kronecker product of two matrices

    Args:
        a: Left factor
        b: Right factor
        max_dim: Largest allowed row or column count of the result
            (defaults to 2^max_qubits from AuditSettings.from_env())

    Returns:
        DenseMatrix: ``a ⊗ b`` with shape (ra*rb, ca*cb)

    Raises:
        ResourceGuardError: If the result would exceed max_dim
    """
    a = as_matrix(a, "kron left operand")
    b = as_matrix(b, "kron right operand")
    limit = AuditSettings.from_env().max_dimension if max_dim is None else max_dim

    rows = a.shape[0] * b.shape[0]
    cols = a.shape[1] * b.shape[1]
    if max(rows, cols) > limit:
        raise ResourceGuardError("kron result dimension", max(rows, cols), limit,
                                 {"requested_shape": (rows, cols)})

    return np.kron(a, b)


def adjoint(a: DenseMatrix) -> DenseMatrix:
    """Conjugate transpose"""
    return np.ascontiguousarray(as_matrix(a).conj().T)


def is_unitary(a: DenseMatrix, tol: float = DEFAULT_SETTINGS.unitary_tolerance) -> bool:
    """
    Check whether ``a† a`` equals the identity entrywise within tol

    Raises:
        DimensionMismatchError: If a is not square
    """
    a = as_matrix(a)
    rows, cols = a.shape
    if rows != cols:
        raise DimensionMismatchError("is_unitary", "square matrix", a.shape)
    residual = a.conj().T @ a - np.eye(rows, dtype=COMPLEX_DTYPE)
    return bool(np.max(np.abs(residual)) <= tol)


def apply(a: DenseMatrix, v: DenseVector) -> DenseVector:
    """Matrix-vector product"""
    a = as_matrix(a)
    v = as_vector(v)
    if a.shape[1] != v.shape[0]:
        raise DimensionMismatchError("apply", a.shape[1], v.shape[0])
    return a @ v


def norm(v: DenseVector) -> float:
    """Euclidean norm"""
    return float(np.linalg.norm(v))


def inner(a: DenseVector, b: DenseVector) -> complex:
    """Inner product ⟨a|b⟩ (conjugate-linear in a)"""
    if a.shape != b.shape:
        raise DimensionMismatchError("inner", a.shape, b.shape)
    return complex(np.vdot(a, b))


def fidelity(a: DenseVector, b: DenseVector) -> float:
    """Pure-state fidelity |⟨a|b⟩|^2 for unit vectors"""
    return abs(inner(a, b)) ** 2


def phase_insensitive_distance(a: DenseVector, b: DenseVector) -> float:
    """
    Euclidean distance between two unit vectors minimized over a global phase

    b is rotated by the phase of ⟨a|b⟩ and the residual norm is taken
    directly, so equal states give residuals at machine precision.
    Orthogonal states give sqrt(2).
    """
    overlap = inner(a, b)
    aligned = np.exp(-1j * np.angle(overlap)) * b
    return float(np.linalg.norm(a - aligned))


def equal_up_to_phase(a: DenseVector, b: DenseVector,
                      tol: float = DEFAULT_SETTINGS.state_tolerance) -> bool:
    """State equality modulo global phase: |⟨a|b⟩| = 1 within tol"""
    return abs(1.0 - abs(inner(a, b))) <= tol
