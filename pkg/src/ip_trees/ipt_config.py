"""Process-wide numerical tolerances.

Every engine function that compares floating point quantities takes an optional
``tol`` argument. When it is omitted the value comes from
:func:`current_tolerances`, which reads ``IPTREE_TOL`` from the environment the
first time it is called.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from dataclasses import dataclass, replace
from typing import Iterator, Optional

from .ipt_errors import ModelError

ENV_TOLERANCE = "IPTREE_TOL"


@dataclass(frozen=True)
class Tolerances:
    """Numerical tolerances shared by the engine.

    Attributes
    ----------
    eps_tol:
        Mass and spacing tolerance for validators and crush steps.
    eps_canon:
        Rounding grid for mass statistics in canonical forms.
    eps_bis:
        Target width of the Prokhorov bisection bracket.
    max_bisection:
        Iteration cap for the Prokhorov bisection.
    """

    eps_tol: float = 1e-9
    eps_canon: float = 1e-7
    eps_bis: float = 1e-6
    max_bisection: int = 40

    def __post_init__(self) -> None:
        for name in ("eps_tol", "eps_canon", "eps_bis"):
            value = getattr(self, name)
            if not value > 0:
                raise ModelError(f"{name} must be positive, got {value!r}")
        if self.max_bisection < 1:
            raise ModelError("max_bisection must be at least 1")


_current: Optional[Tolerances] = None


def _from_environment() -> Tolerances:
    raw = os.environ.get(ENV_TOLERANCE, "").strip()
    if not raw:
        return Tolerances()
    try:
        return Tolerances(eps_tol=float(raw))
    except ValueError as exc:
        raise ModelError(f"{ENV_TOLERANCE} must be a positive number, got {raw!r}") from exc


def current_tolerances() -> Tolerances:
    """Return the active tolerances, reading ``IPTREE_TOL`` on first use."""

    global _current
    if _current is None:
        _current = _from_environment()
    return _current


def configure(**overrides: float) -> Tolerances:
    """Replace selected tolerance fields process-wide and return the result."""

    global _current
    _current = replace(current_tolerances(), **overrides)
    return _current


@contextmanager
def override(**overrides: float) -> Iterator[Tolerances]:
    """Temporarily replace tolerance fields inside a ``with`` block."""

    global _current
    previous = current_tolerances()
    _current = replace(previous, **overrides)
    try:
        yield _current
    finally:
        _current = previous


def resolve_tol(tol: Optional[float]) -> float:
    return current_tolerances().eps_tol if tol is None else float(tol)
