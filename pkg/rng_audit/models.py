"""
Circuit data models

This module defines the data models describing a random-number
generation setup: the M/P/E subsystem layout, gates acting on M∪P wires,
the circuit with its success set and output map, and the adversary
configuration.

Index convention ("MPE-big-endian"): the flat state index is
``m * 2^(p+e) + p * 2^e + e``; within each register wire 0 is the most
significant bit. Wires of M∪P are numbered globally, M0..M(m-1) first,
then P0..P(p-1).
"""

from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

from rng_audit.exceptions import (
    InvalidAdversaryConfigError,
    InvalidCircuitError,
    ResourceGuardError,
)
from rng_audit.gates import EXPLICIT_GATES, FIXED_GATES, GATE_ARITY, SELF_ADJOINT_GATES
from rng_audit.settings import DEFAULT_SETTINGS
from rng_audit.validators import LayoutValidator, PairingValidator, UnitaryValidator


INDEX_CONVENTION = "MPE-big-endian-v1"

MatrixEntries = Tuple[Tuple[complex, ...], ...]


@dataclass(frozen=True)
class SubsystemLayout:
    """Qubit counts of the measured (M), projection (P) and environment (E) registers"""
    m_qubits: int
    p_qubits: int
    e_qubits: int

    def __post_init__(self):
        errors = LayoutValidator.layout_errors(self.m_qubits, self.p_qubits, self.e_qubits)
        if errors:
            raise InvalidCircuitError("; ".join(errors), {
                "m_qubits": self.m_qubits,
                "p_qubits": self.p_qubits,
                "e_qubits": self.e_qubits,
            })

    @classmethod
    def symmetric(cls, m_qubits: int, p_qubits: int) -> "SubsystemLayout":
        """Layout with E sized to match M"""
        return cls(m_qubits, p_qubits, m_qubits)

    def check_size(self, max_qubits: int = DEFAULT_SETTINGS.max_qubits) -> None:
        """
        Enforce the total-qubit guard

        Raises:
            ResourceGuardError: If m + p + e exceeds max_qubits
        """
        if self.total_qubits > max_qubits:
            raise ResourceGuardError("total qubit count", self.total_qubits, max_qubits,
                                     {"layout": str(self)})

    @property
    def total_qubits(self) -> int:
        return self.m_qubits + self.p_qubits + self.e_qubits

    @property
    def mp_qubits(self) -> int:
        return self.m_qubits + self.p_qubits

    @property
    def d_m(self) -> int:
        return 1 << self.m_qubits

    @property
    def d_p(self) -> int:
        return 1 << self.p_qubits

    @property
    def d_e(self) -> int:
        return 1 << self.e_qubits

    @property
    def dim(self) -> int:
        return 1 << self.total_qubits

    @property
    def shape(self) -> Tuple[int, int, int]:
        """(d_m, d_p, d_e), the shape of a state reshaped by register"""
        return self.d_m, self.d_p, self.d_e

    def index(self, m: int, p: int, e: int) -> int:
        """Flat state index of the basis state |m⟩|p⟩|e⟩"""
        return (m * self.d_p + p) * self.d_e + e

    def wire_name(self, wire: int) -> str:
        """Name of a global M∪P wire index, e.g. 0 -> 'M0'"""
        if wire < self.m_qubits:
            return f"M{wire}"
        return f"P{wire - self.m_qubits}"

    def wire_index(self, register: str, index: int) -> int:
        """
        Global M∪P wire index for a register wire

        Raises:
            InvalidCircuitError: For environment wires or out-of-range indices
        """
        if register == "E":
            raise InvalidCircuitError("gate touches environment wire", {"wire": f"E{index}"})
        size = self.m_qubits if register == "M" else self.p_qubits
        if not 0 <= index < size:
            raise InvalidCircuitError(f"wire index out of range: {register}{index}",
                                      {"register": register, "index": index, "size": size})
        return index if register == "M" else self.m_qubits + index

    def __str__(self) -> str:
        return f"{self.m_qubits}/{self.p_qubits}/{self.e_qubits}"


@dataclass(frozen=True)
class GateSpec:
    """A gate on M∪P wires

    ``wires`` are global M∪P wire indices; ``matrix`` is only present for
    U1/U2 and holds the row-major entries as nested tuples so the gate
    stays hashable and comparable.
    """
    kind: str
    wires: Tuple[int, ...]
    matrix: Optional[MatrixEntries] = None

    @classmethod
    def explicit(cls, kind: str, wires: Iterable[int], matrix) -> "GateSpec":
        """Build a U1/U2 gate from any 2-D array-like"""
        array = np.asarray(matrix, dtype=complex)
        entries = tuple(tuple(complex(value) for value in row) for row in array)
        return cls(kind, tuple(wires), entries)

    @property
    def arity(self) -> int:
        return GATE_ARITY[self.kind]

    def matrix_array(self) -> np.ndarray:
        """Gate matrix as a complex array"""
        if self.kind in EXPLICIT_GATES:
            return np.array(self.matrix, dtype=np.complex128)
        return FIXED_GATES[self.kind]

    def adjoint(self) -> "GateSpec":
        """The inverse gate on the same wires"""
        if self.kind in SELF_ADJOINT_GATES:
            return self
        entries = tuple(
            tuple(self.matrix[col][row].conjugate() for col in range(len(self.matrix)))
            for row in range(len(self.matrix))
        )
        return replace(self, matrix=entries)

    def validate(self, layout: SubsystemLayout,
                 unitary_tol: float = DEFAULT_SETTINGS.unitary_tolerance) -> None:
        """
        Validate kind, wires and matrix against a layout

        Raises:
            InvalidCircuitError: If the gate is malformed
        """
        if self.kind not in GATE_ARITY:
            raise InvalidCircuitError(f"unknown gate name: {self.kind}", {"kind": self.kind})

        if len(self.wires) != self.arity:
            raise InvalidCircuitError(f"{self.kind} needs {self.arity} wire(s), got {len(self.wires)}",
                                      {"wires": self.wires})

        if len(set(self.wires)) != len(self.wires):
            raise InvalidCircuitError(f"duplicate wires in {self.kind}", {"wires": self.wires})

        for wire in self.wires:
            if wire >= layout.mp_qubits:
                raise InvalidCircuitError("gate touches environment wire",
                                          {"kind": self.kind, "wire": wire})
            if wire < 0:
                raise InvalidCircuitError(f"wire index out of range: {wire}", {"wire": wire})

        if self.kind in EXPLICIT_GATES:
            if self.matrix is None:
                raise InvalidCircuitError(f"{self.kind} requires an explicit matrix")
            if not UnitaryValidator.is_valid_gate_matrix(self.matrix_array(), self.arity, unitary_tol):
                raise InvalidCircuitError(f"non-unitary explicit matrix for {self.kind}",
                                          {"wires": self.wires})
        elif self.matrix is not None:
            raise InvalidCircuitError(f"{self.kind} does not take a matrix")


@dataclass(frozen=True)
class Circuit:
    """
    A random-number generation setup

    Attributes:
        layout: Subsystem sizes
        gates: Gates applied in order to M∪P
        success_set: P outcomes for which a run generates a number, ascending
        output_map: f(m, p) for every m and every p in the success set,
            held as a read-only mapping
    """
    layout: SubsystemLayout
    gates: Tuple[GateSpec, ...] = ()
    success_set: Tuple[int, ...] = (0,)
    output_map: Mapping[Tuple[int, int], int] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "output_map", MappingProxyType(dict(self.output_map)))

    @classmethod
    def build(cls, layout: SubsystemLayout, gates: Iterable[GateSpec] = (),
              success_set: Iterable[int] = (0,),
              output_map: Optional[Mapping[Tuple[int, int], int]] = None,
              max_qubits: int = DEFAULT_SETTINGS.max_qubits) -> "Circuit":
        """
        Build and validate a circuit

        When output_map is None the shorthand f(m, p) = m is used.
        """
        success = tuple(sorted(set(int(p) for p in success_set)))
        if output_map is None:
            output_map = identity_output_map(layout, success)
        circuit = cls(layout, tuple(gates), success, output_map)
        circuit.validate(max_qubits)
        return circuit

    def validate(self, max_qubits: int = DEFAULT_SETTINGS.max_qubits) -> bool:
        """
        Validate the whole circuit

        Raises:
            ResourceGuardError: If the layout is too large
            InvalidCircuitError: For any other violated invariant
        """
        self.layout.check_size(max_qubits)

        for gate in self.gates:
            gate.validate(self.layout)

        if not self.success_set:
            raise InvalidCircuitError("success set is empty")
        for p in self.success_set:
            if not 0 <= p < self.layout.d_p:
                raise InvalidCircuitError(f"success outcome {p} out of range for {self.layout.p_qubits} P qubit(s)",
                                          {"outcome": p, "d_p": self.layout.d_p})

        expected_keys = {(m, p) for m in range(self.layout.d_m) for p in self.success_set}
        missing = expected_keys - set(self.output_map)
        if missing:
            raise InvalidCircuitError("output map is not total over (m, success outcome)",
                                      {"missing": sorted(missing)[:8]})
        extra = set(self.output_map) - expected_keys
        if extra:
            raise InvalidCircuitError("output map has entries outside (m, success outcome)",
                                      {"unexpected": sorted(extra)[:8]})
        return True

    def output(self, m: int, p: int) -> int:
        """f(m, p) for a successful outcome"""
        return self.output_map[(m, p)]

    def output_values(self) -> Tuple[int, ...]:
        """Distinct output values, ascending"""
        return tuple(sorted(set(self.output_map.values())))

    def has_identity_output(self) -> bool:
        """True if f(m, p) = m for every entry"""
        return all(value == m for (m, _), value in self.output_map.items())

    def with_gates(self, gates: Iterable[GateSpec]) -> "Circuit":
        return replace(self, gates=tuple(gates))

    def __len__(self) -> int:
        return len(self.gates)


def identity_output_map(layout: SubsystemLayout, success_set: Iterable[int]) -> Dict[Tuple[int, int], int]:
    """The shorthand output map f(m, p) = m"""
    return {(m, p): m for m in range(layout.d_m) for p in success_set}


@dataclass(frozen=True)
class AdversaryConfig:
    """
    Parameters of the entangled target state

    Attributes:
        p_star: Successful P outcome prepared in the target; None picks
            the smallest element of the success set
        pairing: pairing[k] is the E basis index entangled with M index k;
            None means the identity pairing
    """
    p_star: Optional[int] = None
    pairing: Optional[Tuple[int, ...]] = None

    def resolve(self, layout: SubsystemLayout,
                success_set: Optional[Iterable[int]] = None) -> "AdversaryConfig":
        """
        Fill in defaults and validate against a layout and success set

        Returns:
            AdversaryConfig: Copy with concrete p_star and pairing

        Raises:
            InvalidAdversaryConfigError: If p_star or the pairing is invalid
        """
        success = tuple(sorted(success_set)) if success_set is not None else None

        p_star = self.p_star
        if p_star is None:
            p_star = success[0] if success else 0
        if not 0 <= p_star < layout.d_p:
            raise InvalidAdversaryConfigError(f"p_star {p_star} out of range for {layout.p_qubits} P qubit(s)",
                                              {"p_star": p_star, "d_p": layout.d_p})
        if success is not None and p_star not in success:
            raise InvalidAdversaryConfigError(f"p_star {p_star} is not in the success set",
                                              {"p_star": p_star, "success_set": list(success)})

        pairing = self.pairing if self.pairing is not None else tuple(range(layout.d_m))
        if not PairingValidator.is_valid_pairing(pairing, layout.d_m):
            raise InvalidAdversaryConfigError("pairing is not a permutation of the M basis",
                                              {"pairing": list(pairing), "d_m": layout.d_m})

        return AdversaryConfig(p_star=p_star, pairing=tuple(int(k) for k in pairing))
