"""
Statevector simulator on M⊗P⊗E

Circuits act on the M∪P axes of the state tensor only; the operator
V = U ⊗ I_E is never built. Distributions are exact Born-rule tables;
sampling draws from them with the package's named seeded generator.
"""

from dataclasses import dataclass
from typing import Iterator, List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from rng_audit.circuit import inverse_circuit
from rng_audit.exceptions import DimensionMismatchError, ImpossibleOutcomeError, InvalidStateError
from rng_audit.gates import apply_gate_tensor
from rng_audit.linalg import COMPLEX_DTYPE, DenseMatrix, DenseVector, as_vector
from rng_audit.log import get_logger
from rng_audit.models import Circuit, SubsystemLayout
from rng_audit.prng import make_generator
from rng_audit.settings import DEFAULT_SETTINGS


logger = get_logger(__name__)

SUBSYSTEM_AXES = {"M": 0, "P": 1, "E": 2}


class OutcomeTriple(NamedTuple):
    """Computational-basis outcome of M, P and E"""
    m: int
    p: int
    e: int


@dataclass(frozen=True)
class JointDistribution:
    """
    Exact outcome distribution over (m, p, e)

    ``probabilities`` has shape (d_m, d_p, d_e); entries at or below the
    probability floor are stored as exactly 0.
    """
    layout: SubsystemLayout
    probabilities: np.ndarray

    def probability(self, m: int, p: int, e: int) -> float:
        return float(self.probabilities[m, p, e])

    def total(self) -> float:
        return float(self.probabilities.sum())

    def entries(self) -> Iterator[Tuple[OutcomeTriple, float]]:
        """Nonzero entries in lexicographic (m, p, e) order"""
        for flat in np.flatnonzero(self.probabilities):
            m, p, e = np.unravel_index(flat, self.probabilities.shape)
            yield OutcomeTriple(int(m), int(p), int(e)), float(self.probabilities.flat[flat])

    def as_dict(self) -> dict:
        return {triple: prob for triple, prob in self.entries()}


def _check_subsystem(subsystem: str) -> int:
    key = subsystem.upper()
    if key not in SUBSYSTEM_AXES:
        raise InvalidStateError(f"unknown subsystem '{subsystem}'", {"expected": list(SUBSYSTEM_AXES)})
    return SUBSYSTEM_AXES[key]


def _check_dim(s: DenseVector, layout: SubsystemLayout, operation: str) -> DenseVector:
    s = as_vector(s, "state")
    if s.shape[0] != layout.dim:
        raise DimensionMismatchError(operation, layout.dim, s.shape[0], {"layout": str(layout)})
    return s


def init_state(layout: SubsystemLayout, spec: Union[int, Sequence[complex]],
               normalizable_floor: float = DEFAULT_SETTINGS.normalizable_floor,
               tolerance: float = DEFAULT_SETTINGS.state_tolerance) -> Tuple[DenseVector, bool]:
    """
    Prepare an initial state

    Args:
        layout: Subsystem layout
        spec: Basis-state index, or an explicit amplitude list of length 2^(m+p+e)

    Returns:
        tuple: (unit-norm state, renormalized) where renormalized is True
        when the input norm differed from 1 by more than tolerance

    Raises:
        InvalidStateError: Basis index out of range, zero vector
        DimensionMismatchError: Wrong amplitude count
    """
    if isinstance(spec, (int, np.integer)) and not isinstance(spec, bool):
        index = int(spec)
        if not 0 <= index < layout.dim:
            raise InvalidStateError(f"basis index {index} out of range", {"dim": layout.dim})
        state = np.zeros(layout.dim, dtype=COMPLEX_DTYPE)
        state[index] = 1.0
        return state, False

    amplitudes = as_vector(spec, "amplitude list")
    if amplitudes.shape[0] != layout.dim:
        raise DimensionMismatchError("init_state", layout.dim, amplitudes.shape[0], {"layout": str(layout)})

    length = float(np.linalg.norm(amplitudes))
    if length <= normalizable_floor:
        raise InvalidStateError("zero vector cannot be normalized", {"norm": length})

    renormalized = abs(length - 1.0) > tolerance
    if renormalized:
        logger.info(f"Renormalizing initial state (norm {length!r})")
    return amplitudes / length, renormalized


def basis_state(layout: SubsystemLayout, m: int, p: int, e: int) -> DenseVector:
    """|m⟩_M |p⟩_P |e⟩_E"""
    state, _ = init_state(layout, layout.index(m, p, e))
    return state


def product_state(layout: SubsystemLayout, mp_state: DenseVector, e_state: DenseVector) -> DenseVector:
    """|ψ⟩_MP ⊗ |χ⟩_E for unit vectors of the right sizes"""
    mp_state = as_vector(mp_state, "M⊗P state")
    e_state = as_vector(e_state, "E state")
    if mp_state.shape[0] != layout.d_m * layout.d_p:
        raise DimensionMismatchError("product_state", layout.d_m * layout.d_p, mp_state.shape[0])
    if e_state.shape[0] != layout.d_e:
        raise DimensionMismatchError("product_state", layout.d_e, e_state.shape[0])
    return np.kron(mp_state, e_state)


def run(c: Circuit, s: DenseVector) -> DenseVector:
    """
    Evolve a state through the circuit

    Each gate updates only its own wires' axes of the (2,)*n tensor; the
    environment axes are never touched.

    Raises:
        DimensionMismatchError: If s does not match the circuit layout
    """
    layout = c.layout
    s = _check_dim(s, layout, "run")
    tensor = s.reshape((2,) * layout.total_qubits)
    for gate in c.gates:
        tensor = apply_gate_tensor(tensor, gate.matrix_array(), gate.wires)
    logger.debug(f"Ran {len(c.gates)} gate(s) on {layout.total_qubits} qubit(s)")
    return np.ascontiguousarray(tensor).reshape(layout.dim)


def run_inverse(c: Circuit, s: DenseVector) -> DenseVector:
    """Evolve a state backwards: run the inverse circuit"""
    return run(inverse_circuit(c), s)


def measure_all(s: DenseVector, layout: SubsystemLayout,
                probability_floor: float = DEFAULT_SETTINGS.probability_floor) -> JointDistribution:
    """
    Exact Born-rule distribution of a computational-basis measurement of M, P and E

    Probabilities at or below the floor become exactly 0.
    """
    s = _check_dim(s, layout, "measure_all")
    probabilities = np.abs(s) ** 2
    probabilities[probabilities <= probability_floor] = 0.0
    return JointDistribution(layout, probabilities.reshape(layout.shape))


def conditional_state(s: DenseVector, layout: SubsystemLayout, subsystem: str, outcome: int,
                      impossible_threshold: float = DEFAULT_SETTINGS.impossible_threshold) -> Tuple[DenseVector, float]:
    """
    Project onto one outcome of a subsystem and renormalize

    The collapsed state keeps full M⊗P⊗E indexing, with the measured
    register left in the observed basis state.

    Returns:
        tuple: (collapsed state, outcome probability)

    Raises:
        ImpossibleOutcomeError: If the outcome probability is below threshold
    """
    s = _check_dim(s, layout, "conditional_state")
    axis = _check_subsystem(subsystem)
    size = layout.shape[axis]
    if not 0 <= outcome < size:
        raise InvalidStateError(f"outcome {outcome} out of range for subsystem {subsystem}", {"dim": size})

    tensor = s.reshape(layout.shape)
    projected = np.zeros_like(tensor)
    selector = [slice(None)] * 3
    selector[axis] = outcome
    projected[tuple(selector)] = tensor[tuple(selector)]

    probability = float(np.sum(np.abs(projected) ** 2))
    if probability < impossible_threshold:
        raise ImpossibleOutcomeError(subsystem.upper(), outcome, probability)

    return projected.reshape(layout.dim) / np.sqrt(probability), probability


def reduced_density_matrix(s: DenseVector, layout: SubsystemLayout, subsystem: str) -> DenseMatrix:
    """Reduced density matrix of one register, tracing out the other two"""
    s = _check_dim(s, layout, "reduced_density_matrix")
    axis = _check_subsystem(subsystem)
    tensor = np.moveaxis(s.reshape(layout.shape), axis, 0)
    rows = tensor.reshape(layout.shape[axis], -1)
    return rows @ rows.conj().T


def sample(s: DenseVector, layout: SubsystemLayout, n: int, seed: int) -> List[OutcomeTriple]:
    """
    Draw n independent outcomes from measure_all(s)

    Inverse-CDF sampling over the exact distribution in lexicographic
    (m, p, e) order with one uniform per draw, so output depends only on
    (state, n, seed).
    """
    if n < 1:
        raise InvalidStateError(f"sample count must be >= 1, got {n}")

    distribution = measure_all(s, layout)
    cdf = np.cumsum(distribution.probabilities.ravel())
    uniforms = make_generator(seed).random(n)
    # scale by the total so draws never fall past the last nonzero entry
    flat = np.searchsorted(cdf, uniforms * cdf[-1], side="right")
    flat = np.minimum(flat, cdf.shape[0] - 1)
    ms, ps, es = np.unravel_index(flat, layout.shape)
    return [OutcomeTriple(int(m), int(p), int(e)) for m, p, e in zip(ms, ps, es)]
