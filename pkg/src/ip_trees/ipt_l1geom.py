"""Sparse nonnegative points of ℓ₁ and the axis-path geometry built on them.

A point ``x`` is stored as its nonzero coordinates ``((i₁, v₁), (i₂, v₂), ...)``
with ``i₁ < i₂ < ...``. The root path ``[[0, x]]`` runs from the origin along
``e_{i₁}`` up to ``v₁``, then along ``e_{i₂}`` up to ``v₂`` and so on. Two root
paths agree up to the first coordinate where the points differ, which makes
:func:`wedge` a single left-to-right scan.

Point identity is exact float equality. Trees only ever copy coordinates or
append new ones, so no epsilon is needed to tell points apart.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .ipt_errors import GeometryError

Coordinate = Tuple[int, float]


@dataclass(frozen=True)
class L1Point:
    """A finitely supported point of ℓ₁ with nonnegative coordinates."""

    coords: Tuple[Coordinate, ...] = ()

    def __post_init__(self) -> None:
        previous = 0
        for entry in self.coords:
            if len(entry) != 2:
                raise GeometryError(f"coordinate {entry!r} must be an (index, value) pair")
            index, value = entry
            if isinstance(index, bool) or not isinstance(index, int):
                raise GeometryError(f"coordinate index {index!r} must be an integer")
            if index <= previous:
                raise GeometryError(
                    f"coordinate indices must be positive and strictly increasing: {self.coords!r}"
                )
            if not (isinstance(value, float) or isinstance(value, int)) or isinstance(value, bool):
                raise GeometryError(f"coordinate value {value!r} must be a real number")
            if not value > 0 or not math.isfinite(value):
                raise GeometryError(f"coordinate values must be positive and finite: {self.coords!r}")
            previous = index

    @classmethod
    def origin(cls) -> "L1Point":
        return _ORIGIN

    @classmethod
    def basis(cls, index: int, value: float = 1.0) -> "L1Point":
        return cls(((index, float(value)),))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[float]]) -> "L1Point":
        """Build a point from ``[index, value]`` pairs, dropping zero values."""

        coords = []
        for index, value in pairs:
            if value == 0:
                continue
            coords.append((int(index), float(value)))
        return cls(tuple(coords))

    @property
    def norm(self) -> float:
        return math.fsum(value for _, value in self.coords)

    @property
    def is_origin(self) -> bool:
        return not self.coords

    @property
    def last_axis(self) -> Optional[int]:
        return self.coords[-1][0] if self.coords else None

    @property
    def base(self) -> "L1Point":
        """The point with the last coordinate removed."""

        return L1Point(self.coords[:-1])

    def value(self, index: int) -> float:
        for i, v in self.coords:
            if i == index:
                return v
        return 0.0

    def with_coordinate(self, index: int, value: float) -> "L1Point":
        """Return a copy whose coordinate ``index`` is ``value``.

        ``index`` must be the last stored index or larger; setting an earlier
        coordinate would move the point off every root path through it.
        """

        last = self.last_axis
        if last is not None and index < last:
            raise GeometryError(f"cannot set axis {index} below the last axis {last}")
        head = self.coords[:-1] if last == index else self.coords
        if value == 0:
            return L1Point(head)
        return L1Point(head + ((index, float(value)),))

    def relabel(self, mapping: Mapping[int, int]) -> "L1Point":
        """Rename axes through an increasing ``mapping``."""

        coords = tuple((mapping[i], v) for i, v in self.coords)
        return L1Point(coords)

    def to_pairs(self) -> List[List[float]]:
        return [[i, v] for i, v in self.coords]

    def describe(self) -> str:
        if not self.coords:
            return "0"
        return "+".join(f"{v:.6g}e{i}" for i, v in self.coords)


_ORIGIN = L1Point()


def norm(p: L1Point) -> float:
    """Sum of the coordinate values of ``p``."""

    return p.norm


def wedge(x: L1Point, y: L1Point) -> L1Point:
    """Meet of ``x`` and ``y``: the point where their root paths separate."""

    xs, ys = x.coords, y.coords
    out: List[Coordinate] = []
    for (i, u), (j, v) in zip(xs, ys):
        if i != j:
            break
        if u != v:
            out.append((i, min(u, v)))
            break
        out.append((i, u))
    else:
        # One coordinate list is a prefix of the other.
        return x if len(xs) <= len(ys) else y
    return L1Point(tuple(out))


def is_on_root_path(z: L1Point, w: L1Point) -> bool:
    """True when ``z`` lies on ``[[0, w]]``."""

    zs, ws = z.coords, w.coords
    if not zs:
        return True
    k = len(zs) - 1
    if len(ws) <= k:
        return False
    if zs[:k] != ws[:k]:
        return False
    (i, v), (j, u) = zs[k], ws[k]
    return i == j and v <= u


def path_distance(x: L1Point, y: L1Point) -> float:
    """Tree distance ``‖x‖ + ‖y‖ − 2‖x ∧ y‖``."""

    if x == y:
        return 0.0
    return max(x.norm + y.norm - 2.0 * wedge(x, y).norm, 0.0)


@dataclass(frozen=True)
class Arc:
    """An axis-parallel piece ``[[lower, upper]]`` of a root path."""

    lower: L1Point
    upper: L1Point
    axis: int

    def __post_init__(self) -> None:
        if self.upper.last_axis != self.axis:
            raise GeometryError(
                f"arc upper {self.upper.describe()} must end on axis {self.axis}"
            )
        if self.lower.coords and self.lower.coords[-1][0] == self.axis:
            head = self.lower.coords[:-1]
        else:
            head = self.lower.coords
        if head != self.upper.coords[:-1]:
            raise GeometryError(
                f"arc {self.lower.describe()} -> {self.upper.describe()} is not axis-parallel"
            )
        if not self.lower.value(self.axis) < self.upper.value(self.axis):
            raise GeometryError(
                f"arc {self.lower.describe()} -> {self.upper.describe()} has no positive length"
            )

    @property
    def length(self) -> float:
        return self.upper.value(self.axis) - self.lower.value(self.axis)

    @property
    def start(self) -> float:
        """Value of the arc's axis coordinate at its lower end."""

        return self.lower.value(self.axis)

    @property
    def end(self) -> float:
        return self.upper.value(self.axis)

    def contains(self, point: L1Point) -> bool:
        return is_on_root_path(self.lower, point) and is_on_root_path(point, self.upper)

    def point_at(self, offset: float) -> L1Point:
        """Point at distance ``offset`` above ``lower`` along the arc."""

        if offset < 0 or offset > self.length:
            raise GeometryError(f"offset {offset!r} outside arc of length {self.length!r}")
        if offset == 0:
            return self.lower
        return self.lower.with_coordinate(self.axis, self.start + offset)

    def relabel(self, mapping: Mapping[int, int]) -> "Arc":
        return Arc(self.lower.relabel(mapping), self.upper.relabel(mapping), mapping[self.axis])


def span_arcs(points: Iterable[L1Point]) -> List[Arc]:
    """Arcs of the union of root paths ``[[0, t]]``, split at every node.

    The resulting arcs meet only at their endpoints.
    """

    stops: Dict[Tuple[Tuple[Coordinate, ...], int], set] = defaultdict(set)
    for point in points:
        coords = point.coords
        for k, (index, value) in enumerate(coords):
            stops[(coords[:k], index)].add(value)
    arcs: List[Arc] = []
    for (head, axis), values in sorted(stops.items(), key=lambda item: (len(item[0][0]), item[0])):
        lower = L1Point(head)
        for value in sorted(values):
            upper = L1Point(head + ((axis, value),))
            arcs.append(Arc(lower, upper, axis))
            lower = upper
    return arcs


def relabel_map(axes: Iterable[int], mapping: Mapping[int, int]) -> Dict[int, int]:
    """Validate that ``mapping`` is defined and strictly increasing on ``axes``."""

    ordered = sorted(set(axes))
    missing = [axis for axis in ordered if axis not in mapping]
    if missing:
        raise GeometryError(f"axis relabeling is missing axes {missing}")
    images = [mapping[axis] for axis in ordered]
    if any(image < 1 for image in images) or any(b <= a for a, b in zip(images, images[1:])):
        raise GeometryError("axis relabeling must be positive and strictly increasing")
    return {axis: mapping[axis] for axis in ordered}
