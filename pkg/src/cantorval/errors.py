from typing import Any, Dict, Optional

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_REJECTED = 2
EXIT_RESOURCE = 3


class CantorvalError(Exception):
    """Base class for every failure raised by the analyzer."""
    code: str = "INTERNAL_ERROR"
    exit_code: int = EXIT_INTERNAL

    def __init__(self, message: str = "", details: Optional[Dict[str, Any]] = None):
        super().__init__(message or self.code)
        self.message = message or self.code
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {
            'error': self.code,
            'message': self.message,
            'details': self.details,
        }


class RejectedInput(CantorvalError):
    """The input is well formed but outside what can be analyzed."""
    code = "REJECTED_INPUT"
    exit_code = EXIT_REJECTED


class SubstitutionSyntaxError(RejectedInput):
    code = "SYNTAX_ERROR"


class EmptyImage(RejectedInput):
    code = "EMPTY_IMAGE"


class BadLetter(RejectedInput):
    code = "BAD_LETTER"


class NotPrimitive(RejectedInput):
    code = "NOT_PRIMITIVE"


class DegenerateField(RejectedInput):
    """Raised when the inflation factor is rational (periodic case)."""
    code = "DEGENERATE_FIELD"


class NonUnimodular(RejectedInput):
    code = "NON_UNIMODULAR"


class NotPisotUnit(RejectedInput):
    code = "NOT_PISOT"


class NoLegalSeed(RejectedInput):
    code = "NO_LEGAL_SEED"


class NotInvertible(RejectedInput):
    code = "NOT_INVERTIBLE"


class NonIntervalWindow(RejectedInput):
    code = "NON_INTERVAL_WINDOW"


class ConfigError(RejectedInput):
    code = "CONFIG_ERROR"


class BadSampling(RejectedInput):
    """Raised when a sample count, burn-in or stream count cannot produce a cloud."""
    code = "BAD_SAMPLING"


class ResourceLimit(CantorvalError):
    """Raised when an operation would exceed a configured cap."""
    code = "RESOURCE_LIMIT"
    exit_code = EXIT_RESOURCE


class ClosureExplosion(ResourceLimit):
    code = "CLOSURE_EXPLOSION"


class FieldMismatch(CantorvalError):
    code = "FIELD_MISMATCH"


class QuadDivisionByZero(CantorvalError, ZeroDivisionError):
    code = "DIVISION_BY_ZERO"


class SingularSystem(CantorvalError):
    code = "SINGULAR_SYSTEM"


class EmptyGraph(CantorvalError):
    code = "EMPTY_GRAPH"


class NielsenLimit(CantorvalError):
    """Raised when Nielsen reduction hits its hard move cap."""
    code = "NIELSEN_LIMIT"


class RenderError(CantorvalError):
    code = "IO_ERROR"
