"""Exception hierarchy for the contact_pi1 package.

Input problems derive from InvalidInputError (CLI exit code 1); broken
theorem-level properties derive from TheoremViolation (CLI exit code 2).
Indices carried by errors are 0-based positions in the input list.
"""

from typing import Any, Optional, Sequence


class ContactToricError(ValueError):
    """Base class for every error raised by contact_pi1."""

    exit_code = 1

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.context = context

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), **_jsonable(self.context)}


class InvalidInputError(ContactToricError):
    exit_code = 1


class TheoremViolation(ContactToricError):
    exit_code = 2


# lattice kernel
class ZeroVector(InvalidInputError):
    pass


class NotSquare(InvalidInputError):
    pass


class NotPrimitive(InvalidInputError):
    pass


# cone
class ZeroNormal(InvalidInputError):
    def __init__(self, index: int):
        super().__init__(f"normal {index} is the zero vector", index=index)
        self.index = index


class DuplicateNormal(InvalidInputError):
    def __init__(self, first: int, second: int):
        super().__init__(
            f"normals {first} and {second} have the same primitive direction",
            first=first, second=second,
        )
        self.first = first
        self.second = second


class RedundantFacet(InvalidInputError):
    def __init__(self, index: int, face_dim: int):
        super().__init__(
            f"halfspace {index} does not support a facet (its zero-set meets the cone in dimension {face_dim})",
            index=index, face_dim=face_dim,
        )
        self.index = index


class BadDimension(InvalidInputError):
    pass


class NotStrictlyConvex(InvalidInputError):
    pass


class NotGood(InvalidInputError):
    pass


class InvalidMomentCone(InvalidInputError):
    pass


class MissingBundleClass(InvalidInputError):
    pass


class ReebNotPositiveOnCone(InvalidInputError):
    pass


# polytope
class Unbounded(InvalidInputError):
    pass


class Empty(InvalidInputError):
    pass


class NotSimple(InvalidInputError):
    pass


class NotGeneric(InvalidInputError):
    pass


class NotIntegral(InvalidInputError):
    pass


class NotDelzant(InvalidInputError):
    pass


class NonIntegerOffset(InvalidInputError):
    pass


# cli
class ParseError(InvalidInputError):
    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field:
            where.append(f"field '{field}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message, line=line, field=field)
        self.line = line
        self.field = field


# internal
class InteriorVectorNotFound(TheoremViolation):
    pass


class CrossCheckDisagreement(TheoremViolation):
    pass


def _jsonable(context: dict) -> dict:
    out = {}
    for key, value in context.items():
        if isinstance(value, (tuple, list)):
            out[key] = [_scalar(v) for v in value]
        else:
            out[key] = _scalar(value)
    return out


def _scalar(value: Any) -> Any:
    if isinstance(value, (int, str, bool)) or value is None:
        return value
    if isinstance(value, Sequence):
        return [_scalar(v) for v in value]
    return str(value)

