"""
Defines ip-trees exception classes grouped by failure mode.
"""

from __future__ import annotations

from typing import Any, Sequence


class IpTreeError(Exception):
    """Base error for all ip-trees exceptions."""


class GeometryError(IpTreeError):
    """Raised for malformed points or arcs, or points that are off the tree."""


class MeasureError(IpTreeError):
    """Raised for malformed, non-probability, or non-uniformized measures."""


class ModelError(IpTreeError):
    """Raised when model parameters fall outside their domain."""


class CrushError(IpTreeError):
    """Raised when a bead-crushing step cannot be applied."""


class TreeValidationError(IpTreeError):
    """Raised when an operation needs a valid tree and receives an invalid one."""

    def __init__(self, message: str, violations: Sequence[Any] = ()) -> None:
        super().__init__(message)
        self.violations = list(violations)


class HierarchyError(IpTreeError):
    """Raised for non-laminar families, unknown labels, or bad label sets."""


class CodecError(IpTreeError):
    """Raised when a JSON document cannot be decoded."""
