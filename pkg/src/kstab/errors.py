"""Exception hierarchy with stable machine-readable codes.

Every error raised by the library carries a ``code`` attribute; the CLI
prints it verbatim so scripts can branch on failures without parsing text.
"""

from __future__ import annotations


class KstabError(Exception):
    code = "E_INTERNAL"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "details": _plain(self.details)}


class ValidationError(KstabError, ValueError):
    code = "E_VALIDATION"


class SchemaError(ValidationError):
    code = "E_SCHEMA"


class DimensionError(ValidationError):
    code = "E_DIMENSION"


class DomainError(KstabError, ValueError):
    """A point or parameter lies outside the region where a metric is positive."""

    code = "E_DOMAIN"


class QuadratureError(KstabError, RuntimeError):
    code = "E_QUADRATURE"


class ConvergenceError(KstabError, RuntimeError):
    code = "E_CONVERGENCE"


class ConventionError(KstabError, RuntimeError):
    code = "E_CONVENTION"


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return repr(obj)


class InputError(KstabError, OSError):
    """A file could not be read or written."""

    code = "E_IO"


class UsageError(KstabError, ValueError):
    code = "E_USAGE"
