"""Poisson–Dirichlet stick-breaking, strings of beads, and α-diversity."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gamma

from .ipt_config import resolve_tol
from .ipt_errors import ModelError
from .ipt_measure import FadMeasure1D, uniformize

MIN_DIVERSITY_ATOMS = 10


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ModelError(message)


@dataclass(frozen=True)
class RankedMasses:
    """Nonincreasing positive masses plus the mass lost to truncation."""

    masses: Tuple[float, ...]
    residual: float = 0.0

    def __post_init__(self) -> None:
        _require(all(m > 0 for m in self.masses), "ranked masses must be positive")
        _require(
            all(a >= b for a, b in zip(self.masses, self.masses[1:])),
            "ranked masses must be nonincreasing",
        )
        _require(self.residual >= 0, "residual mass must be nonnegative")
        _require(
            abs(math.fsum(self.masses) + self.residual - 1.0) <= resolve_tol(None),
            "ranked masses and residual must sum to 1",
        )

    def __len__(self) -> int:
        return len(self.masses)


@dataclass(frozen=True)
class StringOfBeads:
    """Atoms at positions in ``[0, diversity]``; the residual sits at ``diversity``."""

    diversity: float
    atoms: Tuple[Tuple[float, float], ...]
    residual: float = 0.0

    def __post_init__(self) -> None:
        _require(self.diversity > 0 and math.isfinite(self.diversity), "string length must be positive")
        _require(
            all(0 <= loc <= self.diversity and mass > 0 for loc, mass in self.atoms),
            "bead locations must lie in [0, L] with positive mass",
        )
        total = math.fsum([mass for _, mass in self.atoms] + [self.residual])
        _require(abs(total - 1.0) <= resolve_tol(None), "bead masses and residual must sum to 1")


def _check_parameters(alpha: float, theta: float, truncation: int) -> None:
    _require(0 <= alpha < 1, f"alpha must lie in [0, 1), got {alpha!r}")
    _require(theta > -alpha, f"theta must exceed -alpha, got {theta!r}")
    _require(truncation >= 1, f"truncation must be at least 1, got {truncation!r}")


def stick_breaking(alpha: float, theta: float, truncation: int, rng: np.random.Generator) -> np.ndarray:
    """First ``truncation`` GEM(α, θ) sticks in size-biased order.

    ``Wᵢ ~ Beta(1 − α, θ + iα)`` and ``Pᵢ = Wᵢ ∏_{j<i} (1 − Wⱼ)``.
    """

    _check_parameters(alpha, theta, truncation)
    i = np.arange(1, truncation + 1, dtype=float)
    b = theta + i * alpha
    # Beta(1, 0+) degenerates at 1; numpy needs a strictly positive parameter.
    b = np.maximum(b, np.finfo(float).tiny)
    w = rng.beta(1.0 - alpha, b)
    remaining = np.concatenate(([1.0], np.cumprod(1.0 - w)[:-1]))
    return w * remaining


def sample_poisson_dirichlet(
    alpha: float,
    theta: float,
    truncation: int,
    rng: np.random.Generator,
) -> RankedMasses:
    """Ranked PD(α, θ) masses from ``truncation`` sticks, plus the residual."""

    sticks = stick_breaking(alpha, theta, truncation, rng)
    ranked = sorted((float(p) for p in sticks if p > 0), reverse=True)
    residual = max(0.0, 1.0 - math.fsum(ranked))
    return RankedMasses(tuple(ranked), residual)


def _as_array(masses: Union[RankedMasses, Sequence[float]]) -> np.ndarray:
    values = masses.masses if isinstance(masses, RankedMasses) else masses
    return np.asarray(values, dtype=float)


def diversity_profile(
    masses: Union[RankedMasses, Sequence[float]],
    alpha: float,
    start: Optional[int] = None,
    stop: Optional[int] = None,
) -> np.ndarray:
    """``n (Pₙ)^α Γ(1 − α)`` for ranks ``n`` in ``[start, stop]`` (1-based).

    Defaults to the averaging window ``[N/2, N]`` of :func:`estimate_alpha_diversity`.
    """

    _require(0 < alpha < 1, f"alpha must lie in (0, 1), got {alpha!r}")
    values = _as_array(masses)
    count = len(values)
    _require(count >= MIN_DIVERSITY_ATOMS, f"too few atoms for a diversity estimate ({count})")
    start = max(1, count // 2) if start is None else start
    stop = count if stop is None else stop
    _require(1 <= start <= stop <= count, f"rank window [{start}, {stop}] outside 1..{count}")
    n = np.arange(start, stop + 1, dtype=float)
    return n * values[start - 1 : stop] ** alpha * gamma(1.0 - alpha)


def estimate_alpha_diversity(masses: Union[RankedMasses, Sequence[float]], alpha: float) -> float:
    """Plug-in α-diversity, averaged over ranks ``n ∈ [N/2, N]``."""

    return float(np.mean(diversity_profile(masses, alpha)))


def sample_string_of_beads(
    alpha: float,
    theta: float,
    truncation: int,
    rng: np.random.Generator,
) -> StringOfBeads:
    """An (α, θ)-string of beads: PD masses at i.i.d. uniform points of ``[0, L]``."""

    _require(0 < alpha < 1, f"strings of beads need alpha in (0, 1), got {alpha!r}")
    _require(
        truncation >= MIN_DIVERSITY_ATOMS,
        f"strings of beads need truncation >= {MIN_DIVERSITY_ATOMS}, got {truncation!r}",
    )
    ranked = sample_poisson_dirichlet(alpha, theta, truncation, rng)
    length = estimate_alpha_diversity(ranked, alpha)
    positions = rng.random(len(ranked)) * length
    atoms = tuple((float(x), m) for x, m in zip(positions, ranked.masses))
    return StringOfBeads(diversity=length, atoms=atoms, residual=ranked.residual)


def string_measure(s: StringOfBeads) -> FadMeasure1D:
    """The raw string as a measure on ``[0, L]``, residual atom at ``L``."""

    atoms = list(s.atoms)
    if s.residual > 0:
        atoms.append((s.diversity, s.residual))
    return FadMeasure1D.build(atoms)


def uniformized_string(s: StringOfBeads) -> FadMeasure1D:
    """Uniformization of the string: purely atomic, same masses, beads in order."""

    return uniformize(string_measure(s))
