"""
Error handling utilities for the P-entropy laboratory.

Defines the exception hierarchy with machine-readable codes and CLI exit
codes, an error tracker for per-row failures in scans and profiles, and a
decorator that records failures without aborting sibling tasks.
"""

import functools
import threading
import traceback
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence

from .logging import get_logger


class ExitCode:
    """Process exit codes of the command-line runner."""

    SUCCESS = 0
    VALIDATION = 2
    CAP_EXHAUSTION = 3
    INTERNAL = 4


class LabError(Exception):
    """Base class for all laboratory errors."""

    code = "internal"
    exit_code = ExitCode.INTERNAL

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.context = context or {}

    @property
    def messages(self) -> List[str]:
        return [self.message]

    def to_report(self) -> Dict[str, Any]:
        """Machine-readable error report."""
        report: Dict[str, Any] = {
            "code": self.code,
            "exit_code": self.exit_code,
            "messages": self.messages,
        }
        if self.context:
            report["context"] = self.context
        return {"error": report}


class ValidationError(LabError):
    """Invalid input; carries every problem found, not just the first."""

    code = "validation"
    exit_code = ExitCode.VALIDATION

    def __init__(self, errors: Sequence[str], context: Optional[Dict[str, Any]] = None):
        errors = list(errors) or ["validation failed"]
        super().__init__("; ".join(errors), context)
        self.errors = errors

    @property
    def messages(self) -> List[str]:
        return list(self.errors)


class CapExhaustedError(LabError):
    """A configured computational cap was reached."""

    code = "cap_exhausted"
    exit_code = ExitCode.CAP_EXHAUSTION


class SizeCapError(CapExhaustedError):
    """Elementary interval count of a join exceeded the configured cap."""

    code = "size_cap"


class ScheduleExhaustedError(CapExhaustedError):
    """A family member's h_j stayed above 1/j up to the L cap."""

    code = "schedule_exhausted"

    def __init__(
        self,
        message: str,
        witness_index: int,
        witness: str,
        j: int,
        context: Optional[Dict[str, Any]] = None,
    ):
        merged = {"witness_index": witness_index, "witness": witness, "j": j}
        merged.update(context or {})
        super().__init__(message, merged)
        self.witness_index = witness_index
        self.witness = witness
        self.j = j


class RigidityExhaustedError(CapExhaustedError):
    """No time up to m_cap satisfied the rigidity inequality."""

    code = "rigidity_exhausted"


class ErrorSeverity(Enum):
    """Error severity levels."""

    LOW = "low"
    MEDIUM = "medium"
    HIGH = "high"
    CRITICAL = "critical"


class ErrorCategory(Enum):
    """Error categories for classification."""

    VALIDATION = "validation"
    CONFIGURATION = "configuration"
    SIZE_CAP = "size_cap"
    CAP_EXHAUSTION = "cap_exhaustion"
    NUMERICAL = "numerical"
    OUTPUT = "output"
    SYSTEM = "system"


@dataclass
class ErrorInfo:
    """Information about an error occurrence."""

    timestamp: datetime
    component: str
    category: ErrorCategory
    severity: ErrorSeverity
    message: str
    exception_type: str
    traceback: str
    code: str
    context: Dict[str, Any] = field(default_factory=dict)


class ErrorTracker:
    """
    Tracks errors recorded by tasks and provides statistics.
    """

    def __init__(self, max_errors: int = 1000):
        """
        Initialize error tracker.

        Args:
            max_errors: Maximum number of errors to keep in memory
        """
        self.max_errors = max_errors
        self.errors: List[ErrorInfo] = []
        self.error_counts: Dict[str, int] = {}
        self._lock = threading.Lock()
        self.logger = get_logger("error_tracker")

    def record_error(
        self,
        component: str,
        category: ErrorCategory,
        severity: ErrorSeverity,
        message: str,
        exception: Optional[BaseException] = None,
        context: Optional[Dict[str, Any]] = None,
    ) -> ErrorInfo:
        """
        Record an error occurrence.

        Args:
            component: Component where error occurred
            category: Error category
            severity: Error severity
            message: Error message
            exception: Exception object if available
            context: Additional context information

        Returns:
            ErrorInfo object
        """
        error_info = ErrorInfo(
            timestamp=datetime.now(),
            component=component,
            category=category,
            severity=severity,
            message=message,
            exception_type=type(exception).__name__ if exception else "Unknown",
            traceback=(
                "".join(traceback.format_exception(exception)) if exception else ""
            ),
            code=getattr(exception, "code", "internal") if exception else "internal",
            context=context or {},
        )

        error_key = f"{component}.{category.value}.{severity.value}"
        # workers record concurrently
        with self._lock:
            self.errors.append(error_info)
            if len(self.errors) > self.max_errors:
                self.errors.pop(0)
            self.error_counts[error_key] = self.error_counts.get(error_key, 0) + 1

        self.logger.error(
            f"Error recorded: {message}",
            extra={
                "component": component,
                "category": category.value,
                "severity": severity.value,
                "exception_type": error_info.exception_type,
                "context": context,
            },
        )

        return error_info

    def get_error_stats(self) -> Dict[str, Any]:
        """Get error statistics."""
        with self._lock:
            errors = list(self.errors)
            counts = self.error_counts.copy()
        return {
            "total_errors": len(errors),
            "error_counts": counts,
            "severity_breakdown": {
                severity.value: len([e for e in errors if e.severity == severity])
                for severity in ErrorSeverity
            },
            "category_breakdown": {
                category.value: len([e for e in errors if e.category == category])
                for category in ErrorCategory
            },
        }

    def clear(self):
        with self._lock:
            self.errors.clear()
            self.error_counts.clear()


# Global error tracker instance
_error_tracker: Optional[ErrorTracker] = None


def get_error_tracker() -> ErrorTracker:
    """Get global error tracker instance."""
    global _error_tracker
    if _error_tracker is None:
        _error_tracker = ErrorTracker()
    return _error_tracker


def category_for(exc: BaseException) -> ErrorCategory:
    """Map an exception onto an error category."""
    if isinstance(exc, SizeCapError):
        return ErrorCategory.SIZE_CAP
    if isinstance(exc, CapExhaustedError):
        return ErrorCategory.CAP_EXHAUSTION
    if isinstance(exc, (ValidationError, ValueError)):
        return ErrorCategory.VALIDATION
    if isinstance(exc, (ArithmeticError, FloatingPointError)):
        return ErrorCategory.NUMERICAL
    return ErrorCategory.SYSTEM


def with_error_handling(
    component: str,
    category: Optional[ErrorCategory] = None,
    severity: ErrorSeverity = ErrorSeverity.MEDIUM,
    fallback_value: Any = None,
    suppress_exceptions: bool = False,
):
    """
    Decorator recording failures of a task in the global error tracker.

    Args:
        component: Component name
        category: Error category; derived from the exception when None
        severity: Error severity
        fallback_value: Value to return on failure when suppressing
        suppress_exceptions: Whether to suppress exceptions
    """

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except Exception as e:
                get_error_tracker().record_error(
                    component=component,
                    category=category or category_for(e),
                    severity=severity,
                    message=f"Error in {func.__name__}: {e}",
                    exception=e,
                    context={"function": func.__name__},
                )
                if suppress_exceptions:
                    get_logger(component).warning(
                        f"Suppressing exception in {func.__name__}: {e}"
                    )
                    return fallback_value
                raise

        return wrapper

    return decorator
