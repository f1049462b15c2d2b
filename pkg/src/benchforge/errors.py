"""Exception types shared across the package.

Each error names the contract it enforces; callers catch the narrow type,
`BenchforgeError` is the umbrella for CLI-level handling.
"""

from __future__ import annotations


class BenchforgeError(Exception):
    """Base class for all package errors."""


# --- problem store ---------------------------------------------------------

class DuplicateId(BenchforgeError):
    pass


class InvariantViolation(BenchforgeError):
    """A problem record violates a structural invariant.

    `name` identifies the failed invariant (e.g. "parallel-arrays").
    """

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        super().__init__(f"{name}: {detail}" if detail else name)


class ParseError(BenchforgeError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {detail}" if detail else f"line {line_no}")


class UnknownBenchmark(BenchforgeError):
    pass


# --- llm gateway -----------------------------------------------------------

class ProviderError(BenchforgeError):
    def __init__(self, message: str, status: int | None = None, attempts: int = 0):
        self.status = status
        self.attempts = attempts
        super().__init__(message)


class ProviderTimeout(ProviderError):
    pass


class MissingBinding(BenchforgeError):
    pass


class UnknownPlaceholder(BenchforgeError):
    pass


# --- evolve engine ---------------------------------------------------------

class ExtractionError(BenchforgeError):
    pass


class CategoryMismatch(BenchforgeError):
    pass


class HeaderParseError(BenchforgeError):
    pass


class TypeMismatch(BenchforgeError):
    pass


class ExecutionFailure(BenchforgeError):
    pass


class NotToolUse(BenchforgeError):
    pass


# --- refine pipeline -------------------------------------------------------

class CompileError(BenchforgeError):
    """Generated source does not compile in the subject runtime."""

    def __init__(self, diagnostic: str):
        self.diagnostic = diagnostic
        super().__init__(diagnostic)


class NoInputsRecovered(BenchforgeError):
    pass


class ArityMismatch(BenchforgeError):
    pass


class FixRejected(BenchforgeError):
    pass


class RefinementExhausted(BenchforgeError):
    """Self-consistency never reached within the iteration budget.

    Carries the full trace so the operator can inspect each attempt.
    """

    def __init__(self, trace):
        self.trace = trace
        super().__init__(f"no agreement after {len(trace.iterations)} iterations")


# --- sandbox ---------------------------------------------------------------

class SandboxFailure(BenchforgeError):
    pass


class ProtocolError(SandboxFailure):
    pass


# --- eval harness ----------------------------------------------------------

class SanitizeFailure(BenchforgeError):
    pass


class UnknownCustomOracle(BenchforgeError):
    pass


class GroundtruthFailure(BenchforgeError):
    pass


class DomainError(BenchforgeError):
    pass


# --- analysis --------------------------------------------------------------

class DegenerateRange(BenchforgeError):
    pass


class MissingLineage(BenchforgeError):
    pass


class EmptyResults(BenchforgeError):
    pass
