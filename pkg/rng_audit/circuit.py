"""
Circuit transformations

Inversion, dense compilation of the M⊗P unitary, and a seeded random
circuit generator used by the sweep command and the property tests.
"""

from typing import Optional

import numpy as np
from scipy.stats import unitary_group

from rng_audit.exceptions import ResourceGuardError
from rng_audit.gates import GATE_ARITY, apply_gate_tensor
from rng_audit.linalg import COMPLEX_DTYPE, DenseMatrix
from rng_audit.log import get_logger
from rng_audit.models import Circuit, GateSpec, SubsystemLayout
from rng_audit.prng import make_generator
from rng_audit.settings import DEFAULT_SETTINGS, AuditSettings


logger = get_logger(__name__)

RANDOM_GATE_KINDS = ("H", "X", "Z", "CNOT", "CZ", "SWAP", "U1", "U2")


def inverse_circuit(c: Circuit) -> Circuit:
    """Reverse the gate list and replace each gate by its adjoint"""
    return c.with_gates(gate.adjoint() for gate in reversed(c.gates))


def compile_unitary(c: Circuit, dense_max_qubits: Optional[int] = None) -> DenseMatrix:
    """
    Compile the circuit into its unitary on M⊗P

    Runs the gate-local update on the identity with the column index as an
    extra trailing axis.

    Raises:
        ResourceGuardError: If m + p exceeds dense_max_qubits (by default
            read from AuditSettings.from_env())
    """
    if dense_max_qubits is None:
        dense_max_qubits = AuditSettings.from_env().dense_max_qubits
    n = c.layout.mp_qubits
    if n > dense_max_qubits:
        raise ResourceGuardError("dense unitary qubit count", n, dense_max_qubits,
                                 {"layout": str(c.layout)})

    dim = 1 << n
    tensor = np.eye(dim, dtype=COMPLEX_DTYPE).reshape((2,) * n + (dim,))
    for gate in c.gates:
        tensor = apply_gate_tensor(tensor, gate.matrix_array(), gate.wires)
    logger.debug(f"Compiled {len(c.gates)} gate(s) into a {dim}x{dim} unitary")
    return np.ascontiguousarray(tensor.reshape(dim, dim))


def random_circuit(layout: SubsystemLayout, n_gates: int, seed: int,
                   success_size: Optional[int] = None) -> Circuit:
    """
    Seeded random circuit over the fixed gate set plus Haar-random U1/U2

    Args:
        layout: Subsystem layout
        n_gates: Number of gates
        seed: Generator seed; equal seeds give equal circuits
        success_size: Size of the random success set (default: half of
            the P outcomes, at least one)

    Returns:
        Circuit: Valid circuit with output map f(m, p) = m
    """
    rng = make_generator(seed)
    n_wires = layout.mp_qubits
    kinds = [kind for kind in RANDOM_GATE_KINDS if GATE_ARITY[kind] <= n_wires]

    gates = []
    for _ in range(n_gates):
        kind = kinds[int(rng.integers(len(kinds)))]
        arity = GATE_ARITY[kind]
        wires = tuple(int(w) for w in rng.choice(n_wires, size=arity, replace=False))
        if kind in ("U1", "U2"):
            matrix = unitary_group.rvs(1 << arity, random_state=rng)
            gates.append(GateSpec.explicit(kind, wires, matrix))
        else:
            gates.append(GateSpec(kind, wires))

    size = success_size if success_size is not None else max(1, layout.d_p // 2)
    success = sorted(int(p) for p in rng.choice(layout.d_p, size=min(size, layout.d_p), replace=False))

    return Circuit.build(layout, gates, success, max_qubits=max(layout.total_qubits, DEFAULT_SETTINGS.max_qubits))
