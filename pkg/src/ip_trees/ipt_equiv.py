"""Mass-structural canonical forms, IP representatives and Prokhorov distance."""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from .ipt_config import current_tolerances, resolve_tol
from .ipt_errors import MeasureError
from .ipt_l1geom import L1Point, path_distance
from .ipt_measure import RESOLVED, FadMeasure1D, TreeAtom, TreeMeasure
from .ipt_tree import (
    KIND_BRANCH,
    IpTree,
    crush,
    crush_embedding,
    nearest_special_ancestors,
    new_tree,
    special_points,
)

Fingerprint = Tuple

FLOW_SCALE = 10**12


@dataclass(frozen=True)
class MsCanonicalForm:
    """Nested fingerprint of a tree's special points.

    Each node is ``(kind, path, atom, fringe, children)`` with masses rounded to
    integer multiples of ``eps_canon`` and children sorted. Distances never
    enter the fingerprint.
    """

    fingerprint: Fingerprint
    point_count: int

    @property
    def digest(self) -> str:
        return hashlib.sha256(repr(self.fingerprint).encode("utf-8")).hexdigest()


def _grid(value: float, step: float) -> int:
    return int(round(value / step))


def _is_massless_branch(node: Fingerprint) -> bool:
    kind, path, atom = node[:3]
    return kind == KIND_BRANCH and path == 0 and atom == 0


def canonical_form(
    tree: IpTree,
    *,
    tol: Optional[float] = None,
    eps_canon: Optional[float] = None,
) -> MsCanonicalForm:
    """Fingerprint the special points, ordered by the root-path relation.

    Only the structural checks are required, so trees without Spacing (for
    example CRT-style builds) can be compared with IP trees.
    """

    step = current_tolerances().eps_canon if eps_canon is None else eps_canon
    points = special_points(tree, require_ip=False, tol=tol)
    parents = nearest_special_ancestors(sp.point for sp in points)
    children: Dict[Optional[L1Point], List[Fingerprint]] = {}
    # Sorted by norm, so every child is finished before its parent.
    for sp in reversed(points):
        node = (
            sp.kind,
            _grid(sp.path_mass, step),
            _grid(sp.atom_mass, step),
            _grid(sp.fringe_mass, step),
            tuple(sorted(children.pop(sp.point, []))),
        )
        children.setdefault(parents[sp.point], []).append(node)
    top = children.get(None, [])
    count = len(points)
    # A massless branch above everything else is the root itself.
    while len(top) == 1 and _is_massless_branch(top[0]):
        top = list(top[0][4])
        count -= 1
    return MsCanonicalForm(("root", tuple(sorted(top))), count)


def ms_equivalent(a: IpTree, b: IpTree, *, tol: Optional[float] = None) -> bool:
    return canonical_form(a, tol=tol) == canonical_form(b, tol=tol)


def ip_representative(tree: IpTree, *, tol: Optional[float] = None) -> IpTree:
    """The IP tree mass-structurally equivalent to a purely atomic ``tree``.

    Special points are rebuilt top-down: the image of ``u`` carries the whole
    fringe mass of ``u`` as one pending atom, and every child ``v`` is split off
    by crushing ``p(F_v)`` of it with ``δ₀``, which lands ``v`` at distance
    ``1 − p(F_v)`` from the root.
    """

    if tree.weight.density:
        raise MeasureError("IP representatives need a purely atomic weight")
    tol = resolve_tol(tol)
    points = special_points(tree, require_ip=False, tol=tol)
    parents = nearest_special_ancestors(sp.point for sp in points)
    root = L1Point.origin()

    delta = FadMeasure1D.dirac(0.0)
    ip = new_tree()
    image: Dict[Optional[L1Point], L1Point] = {None: root}
    for sp in points:
        if sp.point.is_origin:
            image[sp.point] = root
            continue
        anchor = image[parents[sp.point]]
        phi = crush_embedding(anchor, ip.index.fringe(anchor), sp.fringe_mass, ip.next_axis, tol)
        ip = crush(ip, anchor, sp.fringe_mass, delta, tol=tol)
        image[sp.point] = phi(0.0)
    return ip


def discretize(measure: TreeMeasure, grid: float) -> TreeMeasure:
    """Replace each density arc by cell-midpoint atoms, cells no longer than ``grid``."""

    if not grid > 0:
        raise MeasureError(f"discretization grid must be positive, got {grid!r}")
    atoms: List[TreeAtom] = list(measure.atoms)
    for entry in measure.density:
        arc = entry.arc
        cells = max(1, math.ceil(arc.length / grid))
        width = arc.length / cells
        for k in range(cells):
            atoms.append(TreeAtom(arc.point_at((k + 0.5) * width), entry.rate * width, RESOLVED))
    return TreeMeasure.build(atoms)


def _feasible(
    p: List[TreeAtom],
    q: List[TreeAtom],
    distances: np.ndarray,
    eps: float,
) -> bool:
    """Can all but ``eps`` of ``p`` move at most ``eps`` onto ``q``?"""

    graph = nx.DiGraph()
    total = 0
    for i, atom in enumerate(p):
        capacity = int(round(atom.mass * FLOW_SCALE))
        total += capacity
        graph.add_edge("source", ("p", i), capacity=capacity)
    for j, atom in enumerate(q):
        graph.add_edge(("q", j), "sink", capacity=int(round(atom.mass * FLOW_SCALE)))
    for i, j in zip(*np.nonzero(distances <= eps)):
        graph.add_edge(("p", int(i)), ("q", int(j)))
    if "sink" not in graph:
        return False
    flow = nx.maximum_flow_value(graph, "source", "sink")
    return flow + eps * FLOW_SCALE + 1 >= total


def prokhorov_distance(
    p: TreeMeasure,
    q: TreeMeasure,
    *,
    grid: Optional[float] = None,
    eps_bis: Optional[float] = None,
) -> float:
    """Prokhorov distance of two weights embedded in the same ℓ₁.

    Bisects on ``ε`` with a max-flow feasibility test over tree distances.
    Density arcs must be discretized first, either beforehand or via ``grid``.
    """

    if grid is not None:
        p, q = discretize(p, grid), discretize(q, grid)
    if p.density or q.density:
        raise MeasureError("Prokhorov distance needs atomic measures; pass a discretization grid")
    settings = current_tolerances()
    width = settings.eps_bis if eps_bis is None else eps_bis
    p_atoms, q_atoms = list(p.atoms), list(q.atoms)
    distances = np.array(
        [[path_distance(a.point, b.point) for b in q_atoms] for a in p_atoms],
        dtype=float,
    ).reshape(len(p_atoms), len(q_atoms))

    if _feasible(p_atoms, q_atoms, distances, 0.0):
        return 0.0
    lo, hi = 0.0, 1.0
    for _ in range(settings.max_bisection):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        if _feasible(p_atoms, q_atoms, distances, mid):
            hi = mid
        else:
            lo = mid
    return hi
