"""Exception hierarchy shared by every kcurves module.

Exit-code mapping for the CLI lives on the classes (``exit_code``): domain and
class errors map to 1, I/O and schema errors to 2.
"""
from __future__ import annotations

from typing import Any


class KCurvesError(Exception):
    exit_code = 1


class DomainError(KCurvesError, ValueError):
    """Argument outside the domain of an operation."""


class PreconditionError(KCurvesError):
    """Hypotheses of a falsifier check are not met by the input."""


class JointError(DomainError):
    def __init__(self, end_config: Any, start_config: Any, gap: float):
        super().__init__(
            f"curves do not join: end {end_config} vs start {start_config} (gap {gap:.3e})"
        )
        self.end_config = end_config
        self.start_config = start_config
        self.gap = gap


class InfeasibleError(KCurvesError):
    """No CSC word joins the two configurations."""


class MoveInfeasibleError(KCurvesError):
    pass


class NonConvergenceError(KCurvesError):
    pass


class ClassMismatchError(KCurvesError):
    def __init__(self, label_a: Any, label_b: Any):
        super().__init__(f"curves lie in different classes: {label_a} vs {label_b}")
        self.label_a = label_a
        self.label_b = label_b


class GenerationError(KCurvesError):
    pass


class CurveValidationError(KCurvesError):
    def __init__(self, message: str, report: Any = None):
        super().__init__(message)
        self.report = report


class FormatError(KCurvesError):
    exit_code = 2

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class SchemaError(FormatError):
    pass
