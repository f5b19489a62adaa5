"""Exception hierarchy shared across the toolkit.

Every error that callers are expected to branch on gets its own class so the
CLI and HTTP layers can map them to exit codes / status codes without string
matching.
"""

from __future__ import annotations


class XpuPerfError(Exception):
    """Base class for all toolkit errors."""


class ParseError(XpuPerfError):
    """Input file or payload could not be parsed."""


class ValidationError(XpuPerfError):
    """A record violates a schema invariant; message names record and rule."""


class NotFoundError(XpuPerfError):
    """Exact-name lookup failed. Carries close-match suggestions."""

    def __init__(self, message: str, suggestions: list[str] | None = None):
        super().__init__(message)
        self.suggestions = suggestions or []


class MissingFieldError(XpuPerfError):
    """A platform record lacks a field required by the requested analysis."""


class MissingShapeError(XpuPerfError):
    """A model config lacks shape fields required by the parameter oracle."""


class InfeasibleError(XpuPerfError):
    """No device count within the configured maximum satisfies capacity."""


class InfeasiblePlanError(XpuPerfError):
    """A concrete parallelism plan cannot run the scenario.

    ``reason`` is one of: "capacity", "divisibility", "parallelism",
    "layers", "quantum".
    """

    def __init__(self, message: str, reason: str):
        super().__init__(message)
        self.reason = reason


class EmptyPlanSetError(XpuPerfError):
    """Platform/model constraints exclude every (tp, pp) factorization."""


class EmptyInputError(XpuPerfError):
    """An operation that needs at least one data point received none."""


class NoActivityError(XpuPerfError):
    """No power sample in the trace exceeds the idle threshold."""


class NegativeDeltaError(XpuPerfError):
    """Benchmark power below idle power; measurement is unusable."""


class NoParityError(XpuPerfError):
    """No duty cycle in (0, 1] equalizes energy per token."""


class DegenerateInputsError(XpuPerfError):
    """Inputs to the parity solver are out of domain (e.g. zero throughput)."""


class MissingBaselineError(XpuPerfError):
    """Baseline platform lacks records for one or more (operator, shape)."""
