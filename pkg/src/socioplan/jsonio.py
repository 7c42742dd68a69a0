"""Shared JSON document plumbing: canonical serialization and schema errors."""

from __future__ import annotations

import json
import math
import warnings
from typing import Any, Iterable


class FormatError(ValueError):
    """A document failed to parse or violates its schema.

    ``path`` locates the offending element inside the document, e.g.
    ``nodes[2].bbox_extent``.
    """

    def __init__(self, message: str, path: str = "$") -> None:
        super().__init__(f"{path}: {message}")
        self.path = path
        self.reason = message


class UnknownKeyWarning(UserWarning):
    """Unknown key accepted outside strict mode."""


def canonical_json(value: Any) -> str:
    """Serialize with sorted keys and fixed layout; byte-stable for equal values."""
    return json.dumps(value, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def parse_document(document: bytes | str, *, what: str) -> Any:
    if isinstance(document, bytes):
        try:
            document = document.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"{what} is not valid UTF-8: {exc}") from exc
    try:
        return json.loads(document)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{what} is not valid JSON: {exc}") from exc


def check_keys(
    obj: Any,
    *,
    required: Iterable[str],
    optional: Iterable[str],
    path: str,
    strict: bool,
) -> None:
    """Require ``required`` keys; reject (strict) or warn about unknown ones."""
    if not isinstance(obj, dict):
        raise FormatError(f"expected an object, got {type(obj).__name__}", path)
    for key in required:
        if key not in obj:
            raise FormatError(f'missing required field "{key}"', path)
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        message = "unknown field(s): " + ", ".join(unknown)
        if strict:
            raise FormatError(message, path)
        warnings.warn(f"{path}: {message}", UnknownKeyWarning, stacklevel=3)


def require_version(obj: dict, path: str, expected: int) -> None:
    version = obj.get("schema_version", expected)
    if version != expected:
        raise FormatError(
            f"unsupported schema_version {version!r} (expected {expected})",
            f"{path}.schema_version",
        )


def finite_number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"expected a number, got {type(value).__name__}", path)
    number = float(value)
    if not math.isfinite(number):
        raise FormatError("number must be finite", path)
    return number


def vector(value: Any, path: str, length: int) -> tuple[float, ...]:
    if not isinstance(value, list) or len(value) != length:
        raise FormatError(f"expected a list of {length} numbers", path)
    return tuple(finite_number(c, f"{path}[{i}]") for i, c in enumerate(value))


def string(value: Any, path: str, *, allow_empty: bool = False) -> str:
    if not isinstance(value, str):
        raise FormatError(f"expected a string, got {type(value).__name__}", path)
    if not value and not allow_empty:
        raise FormatError("must be non-empty", path)
    return value


def string_list(value: Any, path: str) -> list[str]:
    if not isinstance(value, list):
        raise FormatError("expected a list of strings", path)
    return [string(v, f"{path}[{i}]") for i, v in enumerate(value)]
