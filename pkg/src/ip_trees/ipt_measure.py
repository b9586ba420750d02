"""FAD measures: finitely many atoms plus finitely many unit-rate segments.

Every measure the engine manipulates lives in this class, on an interval
(:class:`FadMeasure1D`) or on an embedded tree (:class:`TreeMeasure`). Infinite
objects such as the fat Cantor set or strings of beads enter through explicit
truncation parameters.

Segments are half-open ``[a, b)`` so that ``q[0, x)`` never double counts an
endpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .ipt_config import resolve_tol
from .ipt_errors import MeasureError
from .ipt_l1geom import Arc, L1Point

if TYPE_CHECKING:
    from .ipt_tree import IpTree

Atom1D = Tuple[float, float]
Segment = Tuple[float, float]

PENDING = "pending"
RESOLVED = "resolved"
TAGS = (PENDING, RESOLVED)


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise MeasureError(message)


@dataclass(frozen=True)
class FadMeasure1D:
    """Atoms ``(location, mass)`` plus Lebesgue measure on disjoint segments.

    Use :meth:`build` to construct from raw pieces: it sorts, merges atoms that
    share a location and joins segments that touch.
    """

    atoms: Tuple[Atom1D, ...] = ()
    segments: Tuple[Segment, ...] = ()

    def __post_init__(self) -> None:
        previous = -math.inf
        for loc, mass in self.atoms:
            _require(math.isfinite(loc) and loc >= 0, f"atom location {loc!r} must be finite and >= 0")
            _require(mass > 0 and math.isfinite(mass), f"atom mass {mass!r} must be positive")
            _require(loc > previous, "atom locations must be distinct and sorted")
            previous = loc
        end = -math.inf
        for a, b in self.segments:
            _require(math.isfinite(a) and math.isfinite(b), "segment endpoints must be finite")
            _require(0 <= a < b, f"segment [{a!r}, {b!r}) must have 0 <= a < b")
            _require(a >= end, "segments must be disjoint and sorted")
            end = b

    @classmethod
    def build(
        cls,
        atoms: Iterable[Sequence[float]] = (),
        segments: Iterable[Sequence[float]] = (),
    ) -> "FadMeasure1D":
        merged: Dict[float, float] = {}
        for loc, mass in atoms:
            loc, mass = float(loc), float(mass)
            _require(mass > 0, f"atom mass {mass!r} must be positive")
            merged[loc] = merged.get(loc, 0.0) + mass
        joined: List[List[float]] = []
        for a, b in sorted((float(a), float(b)) for a, b in segments):
            _require(a < b, f"segment [{a!r}, {b!r}) is empty")
            if joined and a < joined[-1][1]:
                raise MeasureError(f"segments overlap near {a!r}")
            if joined and a == joined[-1][1]:
                joined[-1][1] = b
            else:
                joined.append([a, b])
        return cls(
            atoms=tuple(sorted(merged.items())),
            segments=tuple((a, b) for a, b in joined),
        )

    @classmethod
    def lebesgue(cls, a: float = 0.0, b: float = 1.0) -> "FadMeasure1D":
        return cls(segments=((float(a), float(b)),))

    @classmethod
    def dirac(cls, x: float = 0.0, mass: float = 1.0) -> "FadMeasure1D":
        return cls(atoms=((float(x), float(mass)),))

    @property
    def atom_mass(self) -> float:
        return math.fsum(mass for _, mass in self.atoms)

    @property
    def lebesgue_mass(self) -> float:
        return math.fsum(b - a for a, b in self.segments)

    @property
    def total_mass(self) -> float:
        return math.fsum([mass for _, mass in self.atoms] + [b - a for a, b in self.segments])

    @property
    def max_support(self) -> float:
        candidates = [loc for loc, _ in self.atoms[-1:]] + [b for _, b in self.segments[-1:]]
        _require(bool(candidates), "the zero measure has no support")
        return max(candidates)

    @property
    def min_support(self) -> float:
        candidates = [loc for loc, _ in self.atoms[:1]] + [a for a, _ in self.segments[:1]]
        _require(bool(candidates), "the zero measure has no support")
        return min(candidates)

    def is_probability(self, tol: Optional[float] = None) -> bool:
        return abs(self.total_mass - 1.0) <= resolve_tol(tol)

    def mass_below(self, x: float, inclusive: bool = False) -> float:
        """``q[0, x)``, or ``q[0, x]`` when ``inclusive``."""

        parts = [mass for loc, mass in self.atoms if loc < x or (inclusive and loc == x)]
        parts.extend(min(b, x) - a for a, b in self.segments if a < x)
        return math.fsum(parts)

    def scaled(self, factor: float) -> "FadMeasure1D":
        """Atom masses times ``factor``; segments are left untouched."""

        _require(factor > 0, "scale factor must be positive")
        return FadMeasure1D(atoms=tuple((loc, mass * factor) for loc, mass in self.atoms),
                            segments=self.segments)

    def pieces(self) -> List[Tuple[float, str, float, float]]:
        """Atoms and segments in support order as ``(start, kind, end, mass)``.

        Atoms sort before a segment starting at the same location.
        """

        out = [(loc, "atom", loc, mass) for loc, mass in self.atoms]
        out.extend((a, "segment", b, b - a) for a, b in self.segments)
        out.sort(key=lambda piece: (piece[0], piece[1] != "atom"))
        return out


@dataclass(frozen=True)
class OpenSubset01:
    """A finite union of disjoint open intervals inside ``(0, 1)``."""

    intervals: Tuple[Segment, ...] = ()

    def __post_init__(self) -> None:
        end = 0.0
        for a, b in self.intervals:
            _require(0.0 <= a < b <= 1.0, f"interval ({a!r}, {b!r}) must satisfy 0 <= a < b <= 1")
            _require(a >= end, "intervals must be disjoint and sorted")
            end = b

    @property
    def length(self) -> float:
        return math.fsum(b - a for a, b in self.intervals)


def is_uniformized(q: FadMeasure1D, tol: Optional[float] = None) -> bool:
    """True when ``q[0, x) = x`` at every atom and segment endpoint of ``q``.

    Segments carry rate 1, so matching both endpoints of a segment extends the
    identity to its interior.
    """

    tol = resolve_tol(tol)
    if not q.is_probability(tol):
        raise MeasureError(f"not a probability measure (total mass {q.total_mass!r})")
    running = 0.0
    for start, kind, end, mass in q.pieces():
        if start > 1.0 + tol or abs(running - start) > tol:
            return False
        running += mass
        if kind == "segment" and abs(running - end) > tol:
            return False
    return True


def uniformize(mu: FadMeasure1D, tol: Optional[float] = None) -> FadMeasure1D:
    """The uniformization ``q`` of a FAD probability measure ``mu``.

    Pieces are packed left to right from 0: an atom of mass ``m`` preceded by
    mass ``c`` moves to ``c``; a segment of length ``ℓ`` becomes Lebesgue measure
    on ``[c, c + ℓ)``. Gaps in the support close up. Segments are first split at
    any atoms inside them. An input that is already uniformized is returned as
    is.
    """

    tol = resolve_tol(tol)
    if not mu.is_probability(tol):
        raise MeasureError(f"not a probability measure (total mass {mu.total_mass!r})")
    if is_uniformized(mu, tol):
        return mu

    cuts = [loc for loc, _ in mu.atoms]
    pieces: List[Tuple[float, str, float]] = [(loc, "atom", mass) for loc, mass in mu.atoms]
    for a, b in mu.segments:
        inner = sorted(c for c in cuts if a < c < b)
        bounds = [a, *inner, b]
        pieces.extend((lo, "segment", hi - lo) for lo, hi in zip(bounds, bounds[1:]))
    pieces.sort(key=lambda piece: (piece[0], piece[1] != "atom"))

    atoms: List[Atom1D] = []
    segments: List[Segment] = []
    cursor = 0.0
    for _, kind, mass in pieces:
        if kind == "atom":
            atoms.append((cursor, mass))
        else:
            segments.append((cursor, cursor + mass))
        cursor += mass
    return FadMeasure1D.build(atoms, segments)


def open_set_to_uniformized(U: OpenSubset01) -> FadMeasure1D:
    """Gnedin's map: ``Σ (bᵢ − aᵢ) δ_{aᵢ}`` plus Lebesgue measure on ``[0, 1) ∖ U``."""

    atoms = [(a, b - a) for a, b in U.intervals]
    segments: List[Segment] = []
    cursor = 0.0
    for a, b in U.intervals:
        if a > cursor:
            segments.append((cursor, a))
        cursor = b
    if cursor < 1.0:
        segments.append((cursor, 1.0))
    return FadMeasure1D(atoms=tuple(atoms), segments=tuple(segments))


def uniformized_to_open_set(q: FadMeasure1D, tol: Optional[float] = None) -> OpenSubset01:
    """Inverse of :func:`open_set_to_uniformized`.

    Each atom at ``a`` opens the interval from ``a`` to the start of the next
    piece of the support, or to 1 when nothing follows. Endpoints are copied,
    never recomputed, so the round trip is exact.
    """

    if not is_uniformized(q, tol):
        raise MeasureError("measure is not uniformized")
    pieces = q.pieces()
    intervals: List[Segment] = []
    for position, (start, kind, _, _) in enumerate(pieces):
        if kind != "atom":
            continue
        following = pieces[position + 1][0] if position + 1 < len(pieces) else 1.0
        intervals.append((start, following))
    return OpenSubset01(tuple(intervals))


def random_open_subset(rng: np.random.Generator, max_intervals: int = 8) -> OpenSubset01:
    """A random finite open subset of ``(0, 1)`` with at most ``max_intervals`` pieces."""

    count = int(rng.integers(0, max_intervals + 1))
    ends = sorted(float(x) for x in rng.random(2 * count))
    intervals = [(a, b) for a, b in zip(ends[::2], ends[1::2]) if a < b]
    # Occasionally touch the ends of (0, 1).
    if intervals and rng.random() < 0.25:
        intervals[-1] = (intervals[-1][0], 1.0)
    if intervals and rng.random() < 0.25:
        intervals[0] = (0.0, intervals[0][1])
    return OpenSubset01(tuple(intervals))


def fat_cantor_removed_intervals(depth: int) -> Tuple[np.ndarray, np.ndarray]:
    """Left and right ends of the open intervals removed up to ``depth``.

    Level ``n`` (0-based) removes the middle open interval of length
    ``4^-(n+1)`` from each of the ``2^n`` closed components left so far. Every
    value is a dyadic rational, exact in double precision up to depth 20.
    """

    if depth < 1:
        raise MeasureError("fat Cantor depth must be at least 1")
    lefts = np.array([0.0])
    rights = np.array([1.0])
    removed_a: List[np.ndarray] = []
    removed_b: List[np.ndarray] = []
    for level in range(depth):
        half_gap = 0.5 * 0.25 ** (level + 1)
        centers = 0.5 * (lefts + rights)
        gap_a, gap_b = centers - half_gap, centers + half_gap
        removed_a.append(gap_a)
        removed_b.append(gap_b)
        lefts, rights = (
            np.column_stack([lefts, gap_b]).ravel(),
            np.column_stack([gap_a, rights]).ravel(),
        )
    a = np.concatenate(removed_a)
    b = np.concatenate(removed_b)
    order = np.argsort(a)
    return a[order], b[order]


def fat_cantor_lebesgue_mass(depth: int) -> float:
    """Lebesgue measure of the depth-``depth`` approximation, ``½ + 2^(−depth−1)``."""

    a, b = fat_cantor_removed_intervals(depth)
    return 1.0 - math.fsum((b - a).tolist())


def fat_cantor_measure(depth: int) -> FadMeasure1D:
    """Uniformized measure of the fat Cantor approximation ``A_depth``.

    Lebesgue measure on ``A_depth`` plus an atom at the left end of every
    removed interval carrying that interval's length.
    """

    a, b = fat_cantor_removed_intervals(depth)
    return open_set_to_uniformized(OpenSubset01(tuple(zip(a.tolist(), b.tolist()))))


# ---------------------------------------------------------------------------
# Measures on trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TreeAtom:
    point: L1Point
    mass: float
    tag: str = PENDING

    def __post_init__(self) -> None:
        _require(self.mass > 0 and math.isfinite(self.mass), f"atom mass {self.mass!r} must be positive")
        _require(self.tag in TAGS, f"atom tag {self.tag!r} must be one of {TAGS}")


@dataclass(frozen=True)
class DensityArc:
    """Length measure along ``arc`` at ``rate``.

    Every arc the engine creates has rate 1; the field exists so that a
    perturbed weight can be represented and reported by the validators.
    """

    arc: Arc
    rate: float = 1.0

    def __post_init__(self) -> None:
        _require(self.rate > 0 and math.isfinite(self.rate), f"density rate {self.rate!r} must be positive")

    @property
    def mass(self) -> float:
        return self.rate * self.arc.length


@dataclass(frozen=True)
class TreeMeasure:
    """Weight of an embedded tree: tagged atoms plus density arcs."""

    atoms: Tuple[TreeAtom, ...] = ()
    density: Tuple[DensityArc, ...] = ()
    _lookup: Dict[L1Point, int] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        lookup: Dict[L1Point, int] = {}
        for position, atom in enumerate(self.atoms):
            _require(atom.point not in lookup, f"duplicate atom at {atom.point.describe()}")
            lookup[atom.point] = position
        object.__setattr__(self, "_lookup", lookup)

    @classmethod
    def build(
        cls,
        atoms: Iterable[TreeAtom] = (),
        density: Iterable[DensityArc] = (),
    ) -> "TreeMeasure":
        """Merge atoms sharing a point; the merged atom is pending if any part was."""

        merged: Dict[L1Point, TreeAtom] = {}
        for atom in atoms:
            existing = merged.get(atom.point)
            if existing is None:
                merged[atom.point] = atom
                continue
            tag = PENDING if PENDING in (existing.tag, atom.tag) else RESOLVED
            merged[atom.point] = TreeAtom(atom.point, existing.mass + atom.mass, tag)
        return cls(atoms=tuple(merged.values()), density=tuple(density))

    @classmethod
    def dirac(cls, point: Optional[L1Point] = None, mass: float = 1.0) -> "TreeMeasure":
        return cls(atoms=(TreeAtom(point or L1Point.origin(), mass),))

    @property
    def total_mass(self) -> float:
        return math.fsum([atom.mass for atom in self.atoms] + [arc.mass for arc in self.density])

    @property
    def is_atomic(self) -> bool:
        return not self.density

    def atom_at(self, point: L1Point) -> Optional[TreeAtom]:
        position = self._lookup.get(point)
        return None if position is None else self.atoms[position]

    def pending_atoms(self) -> List[TreeAtom]:
        return [atom for atom in self.atoms if atom.tag == PENDING]

    def restricted_to(self, tag: str) -> "TreeMeasure":
        _require(tag in TAGS, f"unknown atom tag {tag!r}")
        return TreeMeasure(atoms=tuple(atom for atom in self.atoms if atom.tag == tag))


def decompose(p: TreeMeasure, tree: Optional["IpTree"] = None) -> Tuple[TreeMeasure, TreeMeasure, TreeMeasure]:
    """Split a tree weight into (resolved atoms, density arcs, pending atoms).

    The pending part stands in for the diffuse leaf mass that a finite build
    cannot represent. ``tree`` is accepted for symmetry with the other tree
    operations; when given, ``p`` must be its weight.
    """

    if tree is not None:
        _require(tree.weight == p, "decompose expects the weight of the given tree")
    atomic = p.restricted_to(RESOLVED)
    skeleton = TreeMeasure(density=p.density)
    leaf_pending = p.restricted_to(PENDING)
    return atomic, skeleton, leaf_pending

