"""
Error taxonomy. Every class also derives from the closest builtin so callers
can catch either the specific class or e.g. `ValueError`.

>>> issubclass(TruncationError, BosonicCertError)
True
>>> isinstance(InvalidDimensionError('cutoff', 'cutoff must be >= 2'), ValueError)
True
"""
from __future__ import annotations

from typing import Any, Optional


class BosonicCertError(Exception):
    """Base class. `field` names the offending input, if there is one."""

    kind: str = 'error'

    def __init__(self, field: Optional[str] = None, message: str = '', **context: Any) -> None:
        self.field = field
        self.message = message or field or self.kind
        self.context = context
        super().__init__(self.message)

    def to_dict(self) -> dict[str, Any]:
        """Machine-readable form, written to stderr by the CLI."""
        return {
            'error': self.kind,
            'field': self.field,
            'message': self.message,
            'context': {k: repr(v) for k, v in self.context.items()},
        }


class InvalidDimensionError(BosonicCertError, ValueError):
    kind = 'invalid-dimension'


class InvalidCompositionError(BosonicCertError, ValueError):
    kind = 'invalid-composition'


class InvalidParameterError(BosonicCertError, ValueError):
    kind = 'invalid-parameter'


class PhaseLockError(InvalidParameterError):
    kind = 'invalid-phase-lock'


class ConfigValidationError(BosonicCertError, ValueError):
    kind = 'validation'


class TruncationError(BosonicCertError, ValueError):
    """Tail weight above threshold or parameter outside the truncation guard."""

    kind = 'truncation-unsafe'


class ResourceLimitError(BosonicCertError, MemoryError):
    kind = 'resource-limit'


class NumericsError(BosonicCertError, ArithmeticError):
    kind = 'numerics-failure'


class NormalizationError(NumericsError):
    kind = 'normalization-failure'


class InfeasibleDecompositionError(BosonicCertError, ValueError):
    kind = 'infeasible-decomposition'


class ProposalError(BosonicCertError, RuntimeError):
    """Rejection sampling acceptance rate fell below the configured floor."""

    kind = 'proposal-failure'


class CoverageError(BosonicCertError, KeyError):
    kind = 'missing-coverage'

    def __str__(self) -> str:
        return self.message


VALIDATION_ERRORS = (
    ConfigValidationError,
    InvalidParameterError,
    InvalidDimensionError,
    InvalidCompositionError,
)
"""Errors the CLI maps to exit code 2."""

RESOURCE_ERRORS = (TruncationError, ResourceLimitError)
"""Errors the CLI maps to exit code 3."""


if __name__ == '__main__':
    import doctest

    doctest.testmod()
