from __future__ import annotations

from typing import Any


class QidLabError(Exception):
    """Base class for every error raised by qid_lab."""

    kind = "qid_lab_error"


class SpecError(QidLabError, ValueError):
    kind = "spec_error"


class SpecFormatError(SpecError):
    kind = "spec_format_error"


class MissingPartError(SpecError):
    kind = "missing_part"


class UnsupportedError(QidLabError):
    kind = "unsupported"


class NumericalError(QidLabError, ArithmeticError):
    kind = "numerical_error"


class QuadratureError(NumericalError):
    kind = "quadrature_error"

    def __init__(self, message: str, *, value: float | None = None, error: float | None = None) -> None:
        super().__init__(message)
        self.value = value
        self.error = error


class BudgetExhaustedError(NumericalError):
    kind = "budget_exhausted"

    def __init__(self, message: str, *, certificate: Any = None) -> None:
        super().__init__(message)
        self.certificate = certificate


class ExponentOverflowError(NumericalError):
    kind = "exponent_overflow"


class ZeroHitError(NumericalError):
    kind = "zero_hit"

    def __init__(self, message: str, *, t: float | None = None, modulus: float | None = None) -> None:
        super().__init__(message)
        self.t = t
        self.modulus = modulus


class AliasingError(NumericalError):
    kind = "aliasing"


class FrequencyCollisionError(NumericalError):
    kind = "frequency_collision"


class TranslationSearchError(NumericalError):
    kind = "translation_search"
