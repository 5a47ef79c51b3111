"""
Custom exception classes for circuit auditing

This module defines the exception types raised while parsing circuits,
simulating states and building audits. Each exception carries context
information, repair suggestions and the process exit code the CLI uses
when the error reaches the top level.
"""

from typing import Any, Dict, List, Optional


EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_RESOURCE_GUARD = 3
EXIT_INTERNAL_ERROR = 4


class AuditError(Exception):
    """Base class for all rng-audit errors

    Provides basic error information, context management and the exit
    code used by the command-line interface.
    """

    exit_code: int = EXIT_INTERNAL_ERROR

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None,
                 suggestions: Optional[List[str]] = None):
        """Initialize audit error

        Args:
            message: Error description message
            context: Error context information (dims, indices, line numbers)
            suggestions: List of repair suggestions
        """
        super().__init__(message)
        self.message = message
        self.context = context or {}
        self.suggestions = suggestions or []

    def __str__(self) -> str:
        """Return formatted error message"""
        error_msg = self.message

        if self.context:
            error_msg += f"\nContext information: {self.context}"

        if self.suggestions:
            error_msg += "\nRepair suggestions:"
            for i, suggestion in enumerate(self.suggestions, 1):
                error_msg += f"\n  {i}. {suggestion}"

        return error_msg


class InputError(AuditError):
    """Invalid user input: circuit files, state files, flags or operands"""

    exit_code = EXIT_INPUT_ERROR


class CircuitParseError(InputError):
    """Circuit file could not be parsed

    The message always starts with ``line <n>:`` so callers can point the
    user at the offending line.
    """

    def __init__(self, line_number: int, reason: str, line_text: Optional[str] = None,
                 context: Optional[Dict[str, Any]] = None):
        """Initialize parse error

        Args:
            line_number: 1-based line number of the offending line
            reason: What is wrong with the line
            line_text: Raw text of the line, if available
            context: Additional context information
        """
        message = f"line {line_number}: {reason}"

        error_context: Dict[str, Any] = {"line_number": line_number}
        if line_text is not None:
            error_context["line_text"] = line_text.rstrip("\n")
        if context:
            error_context.update(context)

        suggestions = [
            "Check the line against the circuit file format in the README",
            "Wires are named M<i> or P<j>; environment wires cannot be addressed",
        ]

        super().__init__(message, error_context, suggestions)
        self.line_number = line_number
        self.reason = reason


class InvalidCircuitError(InputError):
    """Circuit or layout violates a model invariant"""

    def __init__(self, reason: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(f"Invalid circuit: {reason}", context,
                         ["Fix the circuit definition so that every gate acts on M/P wires only",
                          "Ensure the success set is nonempty and the output map is total"])
        self.reason = reason


class InvalidStateError(InputError):
    """State vector cannot be used as a quantum state"""

    def __init__(self, reason: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(f"Invalid state: {reason}", context,
                         ["Provide 2^(m+p+e) finite amplitudes with a nonzero norm"])
        self.reason = reason


class DimensionMismatchError(InputError):
    """Operands have incompatible dimensions"""

    def __init__(self, operation: str, expected: Any, actual: Any,
                 context: Optional[Dict[str, Any]] = None):
        message = f"{operation}: dimension mismatch (expected {expected}, got {actual})"

        error_context = {
            "operation": operation,
            "expected": expected,
            "actual": actual,
        }
        if context:
            error_context.update(context)

        super().__init__(message, error_context)


class ImpossibleOutcomeError(InputError):
    """Conditioning on an outcome whose probability is effectively zero"""

    def __init__(self, subsystem: str, outcome: int, probability: float):
        message = (f"impossible outcome {outcome} on subsystem {subsystem} "
                   f"(probability {probability!r})")
        super().__init__(message, {
            "subsystem": subsystem,
            "outcome": outcome,
            "probability": probability,
        })


class DegenerateSampleError(InputError):
    """Sample set has too few categories for an independence test"""

    def __init__(self, reason: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(f"Degenerate sample set: {reason}", context,
                         ["Collect more samples or check that both variables vary"])


class InvalidAdversaryConfigError(InputError):
    """Adversary configuration is inconsistent with the circuit"""

    def __init__(self, reason: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(f"Invalid adversary configuration: {reason}", context,
                         ["Choose --p-star from the circuit's success set",
                          "Give --pairing as a permutation of 0..2^m-1"])


class ResourceGuardError(AuditError):
    """Requested size exceeds a configured resource limit"""

    exit_code = EXIT_RESOURCE_GUARD

    def __init__(self, resource: str, requested: int, limit: int,
                 context: Optional[Dict[str, Any]] = None):
        message = f"{resource} {requested} exceeds the configured maximum {limit}"

        error_context = {
            "resource": resource,
            "requested": requested,
            "limit": limit,
        }
        if context:
            error_context.update(context)

        super().__init__(message, error_context,
                         ["Reduce the number of qubits in the layout",
                          "Raise the limit with --max-qubits or RNG_AUDIT_MAX_QUBITS"])


class InvariantViolationError(AuditError):
    """An internal invariant did not hold; indicates a bug or inconsistent input"""

    exit_code = EXIT_INTERNAL_ERROR


class AdversaryConstructionError(InvariantViolationError):
    """The adversarial initial state did not lead to a successful outcome"""

    def __init__(self, success_probability: float, context: Optional[Dict[str, Any]] = None):
        message = (f"adversary construction failed: success probability "
                   f"{success_probability!r} is below threshold")

        error_context: Dict[str, Any] = {"success_probability": success_probability}
        if context:
            error_context.update(context)

        super().__init__(message, error_context,
                         ["If an initial override was given, check that it can reach the success set",
                          "Otherwise report the circuit file; the construction should always succeed"])
