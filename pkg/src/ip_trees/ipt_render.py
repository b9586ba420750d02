"""SVG drawings of embedded trees and hierarchies.

Trees are drawn root at the top with depth given by the ℓ₁ norm. Arcs are thin
black lines, density arcs thick gray lines, and each atom is a black wedge whose
size grows with its mass. Leaves are spread evenly across the width and every
internal node sits above the mean of its children.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import defaultdict
from html import escape
from pathlib import Path
from typing import Callable, Dict, Hashable, List, Optional, Sequence, Tuple, Union

from .ipt_hierarchy import Block, Hierarchy
from .ipt_l1geom import L1Point
from .ipt_tree import IpTree, ray_of

Node = Hashable

ARC_STROKE = "#000000"
DENSITY_STROKE = "#8c8c8c"
ATOM_FILL = "#000000"


class SvgCanvas:
    """Accumulates SVG elements; coordinates are already in pixels."""

    def __init__(self, width: int, height: int) -> None:
        self.width = width
        self.height = height
        self._parts: List[str] = []

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str, width: float) -> None:
        self._parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{stroke}" stroke-width="{width:.2f}" stroke-linecap="round"/>'
        )

    def polyline(self, points: Sequence[Tuple[float, float]], stroke: str, width: float) -> None:
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self._parts.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{width:.2f}" stroke-linecap="round"/>'
        )

    def polygon(self, points: Sequence[Tuple[float, float]], fill: str) -> None:
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in points)
        self._parts.append(f'<polygon points="{coords}" fill="{fill}"/>')

    def text(self, x: float, y: float, content: str, size: int = 11) -> None:
        self._parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="middle">{escape(content)}</text>'
        )

    def render(self, title: Optional[str] = None) -> str:
        head = (
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>\n'
            f'<svg version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}" xmlns="http://www.w3.org/2000/svg">\n'
        )
        if title:
            head += f"<title>{escape(title)}</title>\n"
        return head + "\n".join(self._parts) + "\n</svg>\n"


def layout(
    root: Node,
    children: Dict[Node, List[Node]],
    depth: Callable[[Node], float],
) -> Dict[Node, Tuple[float, float]]:
    """Unit-free positions: leaves at ``x = 0, 1, 2, ...`` in depth-first order."""

    positions: Dict[Node, Tuple[float, float]] = {}
    next_leaf = 0
    order: List[Node] = []
    stack = [root]
    while stack:
        node = stack.pop()
        order.append(node)
        stack.extend(reversed(children.get(node, [])))
    for node in order:
        if not children.get(node):
            positions[node] = (float(next_leaf), depth(node))
            next_leaf += 1
    for node in reversed(order):
        kids = children.get(node)
        if kids:
            positions[node] = (sum(positions[k][0] for k in kids) / len(kids), depth(node))
    return positions


class _Frame:
    def __init__(self, positions: Dict[Node, Tuple[float, float]], width: int, height: int, margin: int) -> None:
        xs = [x for x, _ in positions.values()]
        ys = [y for _, y in positions.values()]
        self.x0, self.y0 = min(xs), min(ys)
        self.sx = (width - 2 * margin) / max(max(xs) - self.x0, 1.0)
        self.sy = (height - 2 * margin) / max(max(ys) - self.y0, 1e-12)
        self.margin = margin
        if max(xs) == self.x0:
            self.x0 -= 0.5 * (width - 2 * margin) / self.sx

    def __call__(self, position: Tuple[float, float]) -> Tuple[float, float]:
        x, y = position
        return self.margin + (x - self.x0) * self.sx, self.margin + (y - self.y0) * self.sy


def _tree_nodes(tree: IpTree) -> Tuple[Dict[L1Point, List[L1Point]], Dict[L1Point, L1Point]]:
    nodes = set(tree.endpoints())
    nodes.update(atom.point for atom in tree.weight.atoms)
    for entry in tree.weight.density:
        nodes.update((entry.arc.lower, entry.arc.upper))
    by_ray: Dict[tuple, List[float]] = defaultdict(list)
    for node in nodes:
        if not node.is_origin:
            key, v = ray_of(node)
            by_ray[key].append(v)
    for values in by_ray.values():
        values.sort()
    parent: Dict[L1Point, L1Point] = {}
    for node in nodes:
        if node.is_origin:
            continue
        key, v = ray_of(node)
        values = by_ray[key]
        i = bisect_left(values, v)
        parent[node] = L1Point(key[0] + ((key[1], values[i - 1]),)) if i > 0 else L1Point(key[0])
    children: Dict[L1Point, List[L1Point]] = defaultdict(list)
    for node, up in parent.items():
        children[up].append(node)
    for kids in children.values():
        kids.sort(key=lambda p: (p.coords[-1][0], p.coords[-1][1]))
    return children, parent


def render_tree_svg(
    tree: IpTree,
    *,
    width: int = 640,
    height: int = 480,
    margin: int = 24,
    title: Optional[str] = None,
) -> str:
    children, parent = _tree_nodes(tree)
    origin = L1Point.origin()
    positions = layout(origin, children, lambda p: p.norm)
    frame = _Frame(positions, width, height, margin)
    canvas = SvgCanvas(width, height)

    for entry in tree.weight.density:
        path = [entry.arc.upper]
        while path[-1] != entry.arc.lower and path[-1] in parent:
            path.append(parent[path[-1]])
        canvas.polyline([frame(positions[p]) for p in path], DENSITY_STROKE, 6.0)
    for node, up in parent.items():
        (x1, y1), (x2, y2) = frame(positions[up]), frame(positions[node])
        canvas.polyline([(x1, y1), (x2, y1), (x2, y2)], ARC_STROKE, 1.2)

    scale = 0.25 * min(width, height)
    for atom in tree.weight.atoms:
        x, y = frame(positions[atom.point])
        size = max(2.0, scale * math.sqrt(atom.mass) / 4)
        canvas.polygon([(x, y), (x - size / 2, y + size), (x + size / 2, y + size)], ATOM_FILL)
    return canvas.render(title)


def render_hierarchy_svg(
    h: Hierarchy,
    *,
    width: int = 640,
    height: int = 480,
    margin: int = 24,
    title: Optional[str] = None,
) -> str:
    """Block tree of ``h``: one level per nesting depth, singletons labeled."""

    children: Dict[Block, List[Block]] = {}
    level: Dict[Block, float] = {h.root: 0.0}
    stack = [h.root]
    while stack:
        block = stack.pop()
        kids = h.children(block)
        children[block] = kids
        for kid in kids:
            level[kid] = level[block] + 1.0
            stack.append(kid)
    positions = layout(h.root, children, lambda b: level[b])
    frame = _Frame(positions, width, height - 14, margin)
    canvas = SvgCanvas(width, height)
    for block, kids in children.items():
        for kid in kids:
            (x1, y1), (x2, y2) = frame(positions[block]), frame(positions[kid])
            canvas.polyline([(x1, y1), (x2, y1), (x2, y2)], ARC_STROKE, 1.2)
    for label in h.labels:
        x, y = frame(positions[frozenset((label,))])
        canvas.text(x, y + 14, str(label))
    return canvas.render(title)


def write_svg(path: Union[str, Path], document: str) -> None:
    Path(path).write_text(document, encoding="utf-8")
