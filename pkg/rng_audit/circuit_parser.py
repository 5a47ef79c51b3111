"""
Circuit file reader and writer

Line-oriented UTF-8 text, ``#`` starts a comment::

    layout M=1 P=1 E=1
    H M0
    CNOT M0 P0
    H M0
    success {0,1}
    output m

Gate lines are ``<KIND> <wire>...`` with wires ``M<i>``/``P<j>``; U1 and
U2 carry a bracketed row-major matrix ``[re,im re,im; re,im re,im]``.
The output map is either the shorthand ``output m`` (f(m,p) = m) or
explicit ``map m=<int> p=<int> -> <int>`` lines. ``serialize_circuit``
writes the canonical form, which parses back to an equal Circuit.
"""

import re
from typing import Dict, List, Optional, Tuple

from rng_audit.exceptions import CircuitParseError, InvalidCircuitError
from rng_audit.gates import EXPLICIT_GATES, GATE_ARITY
from rng_audit.log import get_logger
from rng_audit.models import Circuit, GateSpec, SubsystemLayout
from rng_audit.settings import DEFAULT_SETTINGS
from rng_audit.validators import LayoutValidator, WireValidator


logger = get_logger(__name__)

SUCCESS_PATTERN = re.compile(r'^success\s*\{([^}]*)\}$')
OUTPUT_PATTERN = re.compile(r'^output\s+m$')
MAP_PATTERN = re.compile(r'^map\s+m=(\d+)\s+p=(\d+)\s*->\s*(-?\d+)$')
GATE_PATTERN = re.compile(r'^([A-Za-z][A-Za-z0-9]*)((?:\s+[A-Za-z]+\d+)*)\s*(\[.*\])?$')


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _parse_number(token: str) -> complex:
    """Parse ``re`` or ``re,im`` into a complex number"""
    parts = token.split(",")
    if len(parts) == 1:
        return complex(float(parts[0]), 0.0)
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"bad complex entry '{token}'")


def _format_number(value: complex) -> str:
    return f"{float(value.real)!r},{float(value.imag)!r}"


class CircuitParser:
    """Parser for the circuit text format"""

    def __init__(self, max_qubits: int = DEFAULT_SETTINGS.max_qubits):
        self.max_qubits = max_qubits

    def parse(self, text: str) -> Circuit:
        """
        Parse and validate a circuit

        Args:
            text: Whole file content

        Returns:
            Circuit: Validated circuit

        Raises:
            CircuitParseError: For malformed or invalid lines (with line number)
            ResourceGuardError: If the layout exceeds max_qubits
        """
        layout: Optional[SubsystemLayout] = None
        gates: List[GateSpec] = []
        success: Optional[Tuple[int, ...]] = None
        success_line = 0
        shorthand_line = 0
        explicit_map: Dict[Tuple[int, int], int] = {}
        first_map_line = 0
        last_line = 0

        for line_number, raw in enumerate(text.splitlines(), 1):
            last_line = line_number
            line = _strip_comment(raw)
            if not line:
                continue

            if layout is None:
                layout = self._parse_layout(line, line_number, raw)
                continue

            if line.startswith("layout"):
                raise CircuitParseError(line_number, "duplicate layout line", raw)

            if line.startswith("success"):
                if success is not None:
                    raise CircuitParseError(line_number, "duplicate success set", raw)
                success = self._parse_success(line, line_number, raw, layout)
                success_line = line_number
                continue

            if line.startswith("output"):
                if not OUTPUT_PATTERN.match(line):
                    raise CircuitParseError(line_number, "only the shorthand 'output m' is supported", raw)
                if shorthand_line or explicit_map:
                    raise CircuitParseError(line_number, "output map given more than once", raw)
                shorthand_line = line_number
                continue

            if line.startswith("map"):
                if shorthand_line:
                    raise CircuitParseError(line_number, "explicit map lines conflict with 'output m'", raw)
                key, value = self._parse_map(line, line_number, raw, layout)
                if key in explicit_map:
                    raise CircuitParseError(line_number, f"duplicate map entry for m={key[0]} p={key[1]}", raw)
                explicit_map[key] = value
                first_map_line = first_map_line or line_number
                continue

            gates.append(self._parse_gate(line, line_number, raw, layout))

        if layout is None:
            raise CircuitParseError(max(last_line, 1), "missing layout line")
        if success is None:
            raise CircuitParseError(max(last_line, 1), "missing success set")
        if not shorthand_line and not explicit_map:
            raise CircuitParseError(max(last_line, 1), "missing output map")

        if shorthand_line:
            output_map = {(m, p): m for m in range(layout.d_m) for p in success}
        else:
            output_map = explicit_map
            expected = {(m, p) for m in range(layout.d_m) for p in success}
            missing = sorted(expected - set(output_map))
            if missing:
                raise CircuitParseError(first_map_line, "output map is not total",
                                        context={"missing": [f"m={m} p={p}" for m, p in missing[:8]]})
            extra = sorted(set(output_map) - expected)
            if extra:
                raise CircuitParseError(first_map_line, "output map has entries for p outside the success set",
                                        context={"unexpected": [f"m={m} p={p}" for m, p in extra[:8]]})

        circuit = Circuit(layout, tuple(gates), success, output_map)
        try:
            circuit.validate(self.max_qubits)
        except InvalidCircuitError as e:
            raise CircuitParseError(success_line or last_line, e.reason)
        logger.debug(f"Parsed circuit: layout {layout}, {len(gates)} gate(s), success {list(success)}")
        return circuit

    def _parse_layout(self, line: str, line_number: int, raw: str) -> SubsystemLayout:
        counts = LayoutValidator.parse_layout_line(line)
        if counts is None:
            raise CircuitParseError(line_number, "expected 'layout M=<int> P=<int> E=<int>' as first line", raw)
        try:
            layout = SubsystemLayout(*counts)
        except InvalidCircuitError as e:
            raise CircuitParseError(line_number, e.reason, raw)
        # size guard keeps its own exit code
        layout.check_size(self.max_qubits)
        return layout

    def _parse_success(self, line: str, line_number: int, raw: str,
                       layout: SubsystemLayout) -> Tuple[int, ...]:
        match = SUCCESS_PATTERN.match(line)
        if not match:
            raise CircuitParseError(line_number, "expected 'success {<int>,...}'", raw)
        body = match.group(1).strip()
        if not body:
            raise CircuitParseError(line_number, "success set is empty", raw)
        try:
            values = [int(token.strip()) for token in body.split(",")]
        except ValueError:
            raise CircuitParseError(line_number, "success set entries must be integers", raw)
        for value in values:
            if not 0 <= value < layout.d_p:
                raise CircuitParseError(line_number, f"success outcome {value} out of range for "
                                                     f"{layout.p_qubits} P qubit(s)", raw)
        return tuple(sorted(set(values)))

    def _parse_map(self, line: str, line_number: int, raw: str,
                   layout: SubsystemLayout) -> Tuple[Tuple[int, int], int]:
        match = MAP_PATTERN.match(line)
        if not match:
            raise CircuitParseError(line_number, "expected 'map m=<int> p=<int> -> <int>'", raw)
        m, p, value = int(match.group(1)), int(match.group(2)), int(match.group(3))
        if m >= layout.d_m or p >= layout.d_p:
            raise CircuitParseError(line_number, f"map entry m={m} p={p} out of range", raw)
        return (m, p), value

    def _parse_gate(self, line: str, line_number: int, raw: str, layout: SubsystemLayout) -> GateSpec:
        match = GATE_PATTERN.match(line)
        if not match:
            raise CircuitParseError(line_number, "malformed gate line", raw)

        kind = match.group(1).upper()
        if kind not in GATE_ARITY:
            raise CircuitParseError(line_number, f"unknown gate name: {match.group(1)}", raw)

        wire_tokens = match.group(2).split()
        wires = []
        for token in wire_tokens:
            parts = WireValidator.split_wire(token)
            if parts is None:
                raise CircuitParseError(line_number, f"bad wire name '{token}'", raw)
            if WireValidator.is_environment_wire(token):
                raise CircuitParseError(line_number, "gate touches environment wire", raw)
            try:
                wires.append(layout.wire_index(*parts))
            except InvalidCircuitError as e:
                raise CircuitParseError(line_number, e.reason, raw)

        if len(wires) != GATE_ARITY[kind]:
            raise CircuitParseError(line_number, f"{kind} needs {GATE_ARITY[kind]} wire(s), got {len(wires)}", raw)
        if len(set(wires)) != len(wires):
            raise CircuitParseError(line_number, "duplicate wires", raw)

        matrix_text = match.group(3)
        if kind in EXPLICIT_GATES:
            if matrix_text is None:
                raise CircuitParseError(line_number, f"{kind} requires a bracketed matrix", raw)
            gate = GateSpec.explicit(kind, wires, self._parse_matrix(matrix_text, line_number, raw))
        else:
            if matrix_text is not None:
                raise CircuitParseError(line_number, f"{kind} does not take a matrix", raw)
            gate = GateSpec(kind, tuple(wires))

        try:
            gate.validate(layout)
        except InvalidCircuitError as e:
            raise CircuitParseError(line_number, e.reason, raw)
        return gate

    @staticmethod
    def _parse_matrix(text: str, line_number: int, raw: str) -> List[List[complex]]:
        body = text.strip()[1:-1]
        rows = []
        try:
            for row_text in body.split(";"):
                rows.append([_parse_number(token) for token in row_text.split()])
        except ValueError as e:
            raise CircuitParseError(line_number, f"bad matrix entry: {e}", raw)
        if not rows or any(len(row) != len(rows) for row in rows):
            raise CircuitParseError(line_number, "matrix must be square", raw)
        return rows


def parse_circuit(text: str, max_qubits: int = DEFAULT_SETTINGS.max_qubits) -> Circuit:
    """Parse a circuit file's text; see CircuitParser.parse"""
    return CircuitParser(max_qubits).parse(text)


def serialize_circuit(c: Circuit) -> str:
    """
    Write a circuit in canonical text form

    Floats use their shortest round-trip repr, so parsing the output
    yields an equal Circuit.
    """
    layout = c.layout
    lines = [f"layout M={layout.m_qubits} P={layout.p_qubits} E={layout.e_qubits}"]

    for gate in c.gates:
        wires = " ".join(layout.wire_name(w) for w in gate.wires)
        if gate.matrix is not None:
            rows = "; ".join(" ".join(_format_number(v) for v in row) for row in gate.matrix)
            lines.append(f"{gate.kind} {wires} [{rows}]")
        else:
            lines.append(f"{gate.kind} {wires}")

    lines.append("success {" + ",".join(str(p) for p in c.success_set) + "}")

    if c.has_identity_output():
        lines.append("output m")
    else:
        for (m, p), value in sorted(c.output_map.items()):
            lines.append(f"map m={m} p={p} -> {value}")

    return "\n".join(lines) + "\n"


def parse_amplitudes(text: str) -> List[complex]:
    """
    Parse an amplitude file: one ``re`` or ``re,im`` per line, ``#`` comments

    Raises:
        CircuitParseError: For an unparseable line
    """
    amplitudes = []
    for line_number, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        try:
            amplitudes.append(_parse_number(line.replace(" ", "")))
        except ValueError:
            raise CircuitParseError(line_number, "expected an amplitude 're' or 're,im'", raw,
                                    {"file_kind": "amplitudes"})
    if not amplitudes:
        raise CircuitParseError(1, "amplitude file is empty", context={"file_kind": "amplitudes"})
    return amplitudes
