"""Embedded IP trees and the bead-crushing step.

An :class:`IpTree` is a finite set of axis-parallel arcs rooted at the origin of
ℓ₁ together with a :class:`~ip_trees.ipt_measure.TreeMeasure` weight and the log
of crush steps that produced it. All values are immutable: :func:`crush`
returns a new tree.

Mass queries go through :class:`MassIndex`, built lazily once per tree. Points
are grouped by *ray*: the pair ``(coords[:-1], last axis)``. Every point of a
tree other than the origin sits on exactly one ray at a position given by its
last coordinate, so fringe and root-path masses reduce to prefix and suffix
sums over a handful of sorted lists.
"""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from itertools import accumulate
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .ipt_config import resolve_tol
from .ipt_errors import CrushError, GeometryError, MeasureError, TreeValidationError
from .ipt_l1geom import Arc, Coordinate, L1Point, wedge
from .ipt_logger import BuildLogger
from .ipt_measure import (
    PENDING,
    RESOLVED,
    DensityArc,
    FadMeasure1D,
    TreeAtom,
    TreeMeasure,
    is_uniformized,
)

RayKey = Tuple[Tuple[Coordinate, ...], int]

KIND_ATOM = "atom"
KIND_BRANCH = "branch"
KIND_LEAF = "isolated_leaf"

ORIGIN = L1Point.origin()


def ray_of(point: L1Point) -> Tuple[RayKey, float]:
    coords = point.coords
    return (coords[:-1], coords[-1][0]), coords[-1][1]


@dataclass(frozen=True)
class CrushStep:
    """One recorded bead-crushing step."""

    site: L1Point
    site_mass: float
    crushed_mass: float
    string: FadMeasure1D
    new_axis: int
    paused: bool = False
    tag: str = PENDING


@dataclass(frozen=True)
class Violation:
    """A failed Spanning, Spacing or structural check."""

    kind: str
    point: Optional[L1Point]
    residual: float
    message: str

    def describe(self) -> str:
        where = self.point.describe() if self.point is not None else "-"
        return f"{self.kind} at {where}: {self.message} (residual {self.residual:.3g})"


@dataclass(frozen=True)
class SpecialPoint:
    point: L1Point
    kind: str
    path_mass: float
    atom_mass: float
    fringe_mass: float

    @property
    def stats(self) -> Tuple[float, float, float]:
        return (self.path_mass, self.atom_mass, self.fringe_mass)


class _Ray:
    __slots__ = (
        "atoms",
        "children",
        "density",
        "atom_values",
        "atom_prefix",
        "child_values",
        "child_suffix",
        "dens_starts",
        "dens_ends",
        "dens_rates",
        "dens_prefix",
        "local",
        "subtree",
    )

    def __init__(self) -> None:
        self.atoms: List[Tuple[float, float]] = []
        self.children: List[Tuple[float, RayKey]] = []
        self.density: List[Tuple[float, float, float]] = []
        self.local = 0.0
        self.subtree = 0.0

    def finalize(self, subtree_of: Callable[[RayKey], float]) -> None:
        self.atoms.sort()
        self.atom_values = [v for v, _ in self.atoms]
        self.atom_prefix = [0.0, *accumulate(m for _, m in self.atoms)]
        weighted = sorted((v, subtree_of(key)) for v, key in self.children)
        self.child_values = [v for v, _ in weighted]
        suffix = list(accumulate(reversed([m for _, m in weighted])))
        self.child_suffix = [*reversed(suffix), 0.0]
        self.density.sort()
        self.dens_starts = [a for a, _, _ in self.density]
        self.dens_ends = [b for _, b, _ in self.density]
        self.dens_rates = [r for _, _, r in self.density]
        self.dens_prefix = [0.0, *accumulate(r * (b - a) for a, b, r in self.density)]
        self.local = self.atom_prefix[-1] + self.dens_prefix[-1]

    def mass_from(self, v: float) -> float:
        """Mass at positions ``>= v`` on this ray and in every subtree hanging there."""

        i = bisect_left(self.atom_values, v)
        total = self.atom_prefix[-1] - self.atom_prefix[i]
        total += self.child_suffix[bisect_left(self.child_values, v)]
        j = bisect_left(self.dens_starts, v)
        total += self.dens_prefix[-1] - self.dens_prefix[j]
        if j > 0 and self.dens_ends[j - 1] > v:
            total += self.dens_rates[j - 1] * (self.dens_ends[j - 1] - v)
        return total

    def mass_upto(self, v: float) -> float:
        """Mass on this ray at positions ``<= v``, excluding hanging subtrees."""

        total = self.atom_prefix[bisect_right(self.atom_values, v)]
        j = bisect_right(self.dens_ends, v)
        total += self.dens_prefix[j]
        if j < len(self.dens_starts) and self.dens_starts[j] < v:
            total += self.dens_rates[j] * (v - self.dens_starts[j])
        return total


class MassIndex:
    """Ray-organized view of a tree's arcs and weight."""

    def __init__(self, arcs: Iterable[Arc], weight: TreeMeasure) -> None:
        self.total = weight.total_mass
        origin_atom = weight.atom_at(ORIGIN)
        self.origin_mass = origin_atom.mass if origin_atom is not None else 0.0
        self._rays: Dict[RayKey, _Ray] = defaultdict(_Ray)
        self.arcs_by_ray: Dict[RayKey, List[Arc]] = defaultdict(list)
        self.lower_count: Dict[L1Point, int] = defaultdict(int)
        self.upper_count: Dict[L1Point, int] = defaultdict(int)
        for arc in arcs:
            self.arcs_by_ray[ray_of(arc.upper)[0]].append(arc)
            self.lower_count[arc.lower] += 1
            self.upper_count[arc.upper] += 1
        for chain in self.arcs_by_ray.values():
            chain.sort(key=lambda arc: arc.start)
        self.cover = {key: max(arc.end for arc in chain) for key, chain in self.arcs_by_ray.items()}

        for atom in weight.atoms:
            if atom.point.is_origin:
                continue
            key, v = ray_of(atom.point)
            self._rays[key].atoms.append((v, atom.mass))
        for entry in weight.density:
            key = ray_of(entry.arc.upper)[0]
            self._rays[key].density.append((entry.arc.start, entry.arc.end, entry.rate))

        pending = list(self._rays)
        while pending:
            key = pending.pop()
            head = key[0]
            if not head:
                continue
            parent = (head[:-1], head[-1][0])
            if parent not in self._rays:
                pending.append(parent)
            self._rays[parent].children.append((head[-1][1], key))
        for key in sorted(self._rays, key=lambda k: len(k[0]), reverse=True):
            ray = self._rays[key]
            ray.finalize(lambda child: self._rays[child].subtree)
            ray.subtree = ray.local + ray.child_suffix[0]

    def on_tree(self, point: L1Point) -> bool:
        if point.is_origin:
            return True
        key, v = ray_of(point)
        return self.cover.get(key, 0.0) >= v

    def fringe(self, point: L1Point) -> float:
        if point.is_origin:
            return self.total
        key, v = ray_of(point)
        ray = self._rays.get(key)
        return 0.0 if ray is None else ray.mass_from(v)

    def path_mass(self, point: L1Point) -> float:
        total = self.origin_mass
        coords = point.coords
        for k, (axis, value) in enumerate(coords):
            ray = self._rays.get((coords[:k], axis))
            if ray is not None:
                total += ray.mass_upto(value)
        return total

    def interior_count(self, point: L1Point) -> int:
        if point.is_origin:
            return 0
        key, v = ray_of(point)
        return sum(1 for arc in self.arcs_by_ray.get(key, ()) if arc.start < v < arc.end)

    def degree(self, point: L1Point) -> int:
        return self.lower_count.get(point, 0) + self.upper_count.get(point, 0) + 2 * self.interior_count(point)


@dataclass(frozen=True)
class IpTree:
    """Arc set, weight and crush log of an embedded rooted weighted tree."""

    arcs: Tuple[Arc, ...] = ()
    weight: TreeMeasure = field(default_factory=TreeMeasure.dirac)
    build_log: Tuple[CrushStep, ...] = ()

    @cached_property
    def index(self) -> MassIndex:
        return MassIndex(self.arcs, self.weight)

    @property
    def axes(self) -> List[int]:
        return sorted({arc.axis for arc in self.arcs} | {step.new_axis for step in self.build_log})

    @property
    def next_axis(self) -> int:
        axes = self.axes
        return max(len(self.build_log), axes[-1] if axes else 0) + 1

    def endpoints(self) -> List[L1Point]:
        """Origin plus every arc endpoint, each once, in arc order."""

        seen = {ORIGIN: None}
        for arc in self.arcs:
            seen.setdefault(arc.lower, None)
            seen.setdefault(arc.upper, None)
        return list(seen)


def new_tree() -> IpTree:
    """The initial tree: a single pending unit atom at the origin."""

    return IpTree()


def _require_on_tree(tree: IpTree, x: L1Point) -> None:
    if not tree.index.on_tree(x):
        raise GeometryError(f"point {x.describe()} is not on the tree")


def fringe_mass(tree: IpTree, x: L1Point) -> float:
    """Weight of the fringe subtree ``F_x``: everything whose root path passes ``x``."""

    _require_on_tree(tree, x)
    return tree.index.fringe(x)


def path_mass(tree: IpTree, x: L1Point) -> float:
    """Weight of the root path ``[[0, x]]``, endpoints included."""

    _require_on_tree(tree, x)
    return tree.index.path_mass(x)


def atom_mass(tree: IpTree, x: L1Point) -> float:
    atom = tree.weight.atom_at(x)
    return 0.0 if atom is None else atom.mass


def crush_embedding(
    site: L1Point,
    fringe: float,
    a: float,
    axis: int,
    tol: float,
) -> Callable[[float], L1Point]:
    """``φ(z) = site + (fringe + (z − 1) a) e_axis``.

    Offsets at or below ``tol`` map to ``site`` itself.
    """

    def phi(z: float) -> L1Point:
        offset = fringe + (z - 1.0) * a
        if offset <= tol:
            return site
        return site.with_coordinate(axis, offset)

    return phi


def crush(
    tree: IpTree,
    site: L1Point,
    a: float,
    q: FadMeasure1D,
    *,
    tag: str = PENDING,
    tol: Optional[float] = None,
    logger: Optional[BuildLogger] = None,
) -> IpTree:
    """Replace mass ``a`` of the pending atom at ``site`` by a branch carrying ``q``.

    The new arc leaves ``site`` along a fresh axis and ends at ``φ(L)``, where
    ``L`` is the top of the support of ``q``. Atoms of ``q`` become atoms tagged
    ``tag`` and its segments become unit-rate density arcs. When ``φ(L)`` is the
    site itself the step is recorded as a pause and the geometry is unchanged.
    """

    tol = resolve_tol(tol)
    atom = tree.weight.atom_at(site)
    if atom is None or atom.tag != PENDING:
        raise CrushError(f"site {site.describe()} is not a pending atom")
    if not a > 0:
        raise CrushError(f"crushed mass must be positive, got {a!r}")
    if a > atom.mass + tol:
        raise CrushError(f"crushed mass {a!r} exceeds the atom mass {atom.mass!r}")
    a = min(a, atom.mass)
    try:
        uniform = is_uniformized(q, tol)
    except MeasureError as exc:
        raise CrushError(str(exc)) from exc
    if not uniform:
        raise CrushError("string measure is not uniformized")

    axis = tree.next_axis
    fringe = tree.index.fringe(site)
    top = q.max_support
    if fringe + (top - 1.0) * a <= tol:
        step = CrushStep(site, atom.mass, a, q, axis, paused=True, tag=tag)
        if logger is not None:
            logger.log_pause(step)
        return IpTree(tree.arcs, tree.weight, tree.build_log + (step,))

    phi = crush_embedding(site, fringe, a, axis, tol)
    kept: List[TreeAtom] = []
    for existing in tree.weight.atoms:
        if existing.point != site:
            kept.append(existing)
        elif existing.mass - a > tol:
            kept.append(TreeAtom(site, existing.mass - a, existing.tag))
    kept.extend(TreeAtom(phi(z), a * w, tag) for z, w in q.atoms)
    density = list(tree.weight.density)
    density.extend(DensityArc(Arc(phi(c), phi(d), axis)) for c, d in q.segments)

    step = CrushStep(site, atom.mass, a, q, axis, paused=False, tag=tag)
    if logger is not None:
        logger.log_crush(step)
    return IpTree(
        arcs=tree.arcs + (Arc(site, phi(top), axis),),
        weight=TreeMeasure.build(kept, density),
        build_log=tree.build_log + (step,),
    )


def resolve_atom(tree: IpTree, site: L1Point) -> IpTree:
    """Mark the atom at ``site`` as resolved: it stays in the final weight."""

    atom = tree.weight.atom_at(site)
    if atom is None:
        raise CrushError(f"no atom at {site.describe()}")
    atoms = tuple(
        TreeAtom(a.point, a.mass, RESOLVED) if a.point == site else a for a in tree.weight.atoms
    )
    return IpTree(tree.arcs, TreeMeasure(atoms, tree.weight.density), tree.build_log)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def tree_leaves(tree: IpTree) -> List[L1Point]:
    index = tree.index
    return [p for p in tree.endpoints() if not p.is_origin and index.degree(p) == 1]


def branch_points(tree: IpTree) -> List[L1Point]:
    index = tree.index
    return [p for p in tree.endpoints() if index.degree(p) >= 3]


def check_structure(tree: IpTree, tol: Optional[float] = None) -> List[Violation]:
    """Connectivity, total mass, unit rates and Spanning; everything but Spacing."""

    tol = resolve_tol(tol)
    index = tree.index
    out: List[Violation] = []

    for key, chain in index.arcs_by_ray.items():
        base = L1Point(key[0])
        if chain[0].start != 0.0:
            out.append(Violation("structure", chain[0].lower, chain[0].start,
                                 "arc does not start at its ray's base"))
        for prev, nxt in zip(chain, chain[1:]):
            if nxt.start != prev.end:
                out.append(Violation("structure", nxt.lower, abs(nxt.start - prev.end),
                                     "arcs along one axis overlap or leave a gap"))
        if not index.on_tree(base):
            out.append(Violation("structure", base, 0.0, "arc hangs from a point off the tree"))

    for atom in tree.weight.atoms:
        if not index.on_tree(atom.point):
            out.append(Violation("structure", atom.point, atom.mass, "atom lies off the arc set"))
    by_ray: Dict[RayKey, List[DensityArc]] = defaultdict(list)
    for entry in tree.weight.density:
        by_ray[ray_of(entry.arc.upper)[0]].append(entry)
        if not index.on_tree(entry.arc.upper):
            out.append(Violation("structure", entry.arc.upper, entry.mass,
                                 "density arc lies off the arc set"))
        if abs(entry.rate - 1.0) > tol:
            out.append(Violation("rate", entry.arc.lower, abs(1.0 - entry.rate) * entry.arc.length,
                                 f"density rate {entry.rate:.6g} is not 1"))
    for entries in by_ray.values():
        entries.sort(key=lambda e: e.arc.start)
        for prev, nxt in zip(entries, entries[1:]):
            if nxt.arc.start < prev.arc.end:
                out.append(Violation("structure", nxt.arc.lower, prev.arc.end - nxt.arc.start,
                                     "density arcs overlap"))

    total = tree.weight.total_mass
    if abs(total - 1.0) > tol:
        out.append(Violation("mass", None, abs(total - 1.0), f"total mass {total!r} is not 1"))

    tips = {entry.arc.upper for entry in tree.weight.density}
    for leaf in tree_leaves(tree):
        if tree.weight.atom_at(leaf) is None and leaf not in tips:
            out.append(Violation("spanning", leaf, 0.0, "leaf is outside the closed support"))
    return out


def spacing_points(tree: IpTree) -> List[L1Point]:
    seen: Dict[L1Point, None] = {}
    for p in branch_points(tree):
        seen.setdefault(p, None)
    for atom in tree.weight.atoms:
        seen.setdefault(atom.point, None)
    for entry in tree.weight.density:
        seen.setdefault(entry.arc.lower, None)
        seen.setdefault(entry.arc.upper, None)
    return list(seen)


def is_ip_tree(
    tree: IpTree,
    tol: Optional[float] = None,
    logger: Optional[BuildLogger] = None,
) -> Tuple[bool, List[Violation]]:
    """Check Spanning and Spacing; return ``(ok, violations)``.

    Spacing, ``‖x‖ + p(F_x) = 1``, is tested at branch points, atoms and both
    ends of every density arc. Unit density rate carries it across arc
    interiors, so the rate is checked too.
    """

    tol = resolve_tol(tol)
    violations = check_structure(tree, tol)
    index = tree.index
    for point in spacing_points(tree):
        residual = abs(point.norm + index.fringe(point) - 1.0)
        if residual > tol:
            violations.append(Violation("spacing", point, residual,
                                        "distance from root plus fringe mass is not 1"))
    if logger is not None:
        for violation in violations:
            logger.log_violation(violation)
    return not violations, violations


def require_valid(tree: IpTree, *, ip: bool = True, tol: Optional[float] = None) -> None:
    """Raise :class:`TreeValidationError` unless ``tree`` passes the chosen check."""

    if ip:
        ok, violations = is_ip_tree(tree, tol)
    else:
        violations = check_structure(tree, tol)
        ok = not violations
    if not ok:
        summary = "; ".join(v.describe() for v in violations[:3])
        raise TreeValidationError(f"invalid tree: {summary}", violations)


# ---------------------------------------------------------------------------
# Special points
# ---------------------------------------------------------------------------


def special_points(
    tree: IpTree,
    *,
    require_ip: bool = True,
    tol: Optional[float] = None,
) -> List[SpecialPoint]:
    """Atoms, branch points and isolated leaves with their mass statistics.

    Each point carries ``(p[[0, x]], p{x}, p(F_x))``. A point that is both an
    atom and a branch point is reported as an atom. With ``require_ip=False``
    only the structural checks apply, which admits trees without Spacing.
    """

    require_valid(tree, ip=require_ip, tol=tol)
    index = tree.index
    kinds: Dict[L1Point, str] = {}
    for atom in tree.weight.atoms:
        kinds[atom.point] = KIND_ATOM
    for point in tree.endpoints():
        if point in kinds:
            continue
        degree = index.degree(point)
        if degree >= 3:
            kinds[point] = KIND_BRANCH
        elif degree == 1 and not point.is_origin:
            kinds[point] = KIND_LEAF
    out = [
        SpecialPoint(
            point=point,
            kind=kind,
            path_mass=index.path_mass(point),
            atom_mass=atom_mass(tree, point),
            fringe_mass=index.fringe(point),
        )
        for point, kind in kinds.items()
    ]
    out.sort(key=lambda sp: (sp.point.norm, sp.point.coords))
    return out


def nearest_special_ancestors(points: Iterable[L1Point]) -> Dict[L1Point, Optional[L1Point]]:
    """Map each point to the closest other point of the set on its root path."""

    members = set(points)
    by_ray: Dict[RayKey, List[float]] = defaultdict(list)
    for point in members:
        if not point.is_origin:
            key, v = ray_of(point)
            by_ray[key].append(v)
    for values in by_ray.values():
        values.sort()

    parents: Dict[L1Point, Optional[L1Point]] = {}
    for point in members:
        parent: Optional[L1Point] = None
        current = point
        strict = True
        while not current.is_origin:
            key, v = ray_of(current)
            values = by_ray.get(key, [])
            i = bisect_left(values, v) if strict else bisect_right(values, v)
            if i > 0:
                parent = L1Point(key[0] + ((key[1], values[i - 1]),))
                break
            current = L1Point(key[0])
            if current in members:
                parent = current
                break
            strict = False
        parents[point] = parent
    return parents


# ---------------------------------------------------------------------------
# Spinal diversity
# ---------------------------------------------------------------------------


def bush_masses(tree: IpTree, y: L1Point) -> Dict[L1Point, float]:
    """Project the weight onto ``[[0, y]]``: mass of the bush hanging at each spine point.

    Density lying on the spine itself is diffuse and is left out.
    """

    _require_on_tree(tree, y)
    bushes: Dict[L1Point, float] = defaultdict(float)
    for atom in tree.weight.atoms:
        bushes[wedge(atom.point, y)] += atom.mass
    for entry in tree.weight.density:
        arc = entry.arc
        w = wedge(arc.upper, y)
        if w == arc.upper:
            continue
        mass = entry.rate * (arc.upper.norm - max(arc.lower.norm, w.norm))
        if mass > 0:
            bushes[w] += mass
    return dict(bushes)


def spinal_diversity(tree: IpTree, y: L1Point, h: float) -> float:
    """``√(π h)`` times the number of spine points of ``[[0, y]]`` with bush mass above ``h``."""

    if not h > 0:
        raise GeometryError(f"resolution h must be positive, got {h!r}")
    count = sum(1 for mass in bush_masses(tree, y).values() if mass > h)
    return math.sqrt(math.pi * h) * count

