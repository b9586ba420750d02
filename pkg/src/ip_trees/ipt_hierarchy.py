"""Finite hierarchies: sampling them from trees and rebuilding trees from them.

A :class:`Hierarchy` is a laminar family of label blocks that holds the full
label set and every singleton. Sampled hierarchies use labels ``1..n``; the
reconstruction recursion works on labels ``-n..n`` obtained through
:func:`relabel_to_Z`.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .ipt_config import resolve_tol
from .ipt_errors import HierarchyError
from .ipt_l1geom import L1Point, is_on_root_path, span_arcs, wedge
from .ipt_logger import CHANNEL_RECONSTRUCT, CHANNEL_SAMPLE, BuildLogger
from .ipt_measure import TreeAtom, TreeMeasure
from .ipt_stdlib import weighted_index
from .ipt_tree import IpTree, require_valid

Block = FrozenSet[int]

ORACLE_LIMIT = 10


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise HierarchyError(message)


@dataclass(frozen=True)
class Hierarchy:
    """A laminar family on ``labels`` with the full set and all singletons.

    The empty block is implicit and never stored.
    """

    labels: Tuple[int, ...]
    blocks: FrozenSet[Block]

    def __post_init__(self) -> None:
        _require(len(self.labels) > 0, "a hierarchy needs at least one label")
        _require(len(set(self.labels)) == len(self.labels), "hierarchy labels must be distinct")
        universe = frozenset(self.labels)
        _require(universe in self.blocks, "hierarchy must contain the full label set")
        for label in self.labels:
            _require(frozenset((label,)) in self.blocks, f"hierarchy is missing the singleton {{{label}}}")
        for block in self.blocks:
            _require(len(block) > 0, "hierarchy blocks must be nonempty")
            _require(block <= universe, f"block {sorted(block)} has labels outside the label set")
        # Walking blocks from largest to smallest, each block must sit inside
        # the smallest block seen so far for every one of its labels.
        owner: Dict[int, Block] = {}
        parents: Dict[Block, Optional[Block]] = {}
        for block in self._ordered():
            owners = {owner.get(label) for label in block}
            _require(len(owners) == 1, f"block {sorted(block)} overlaps another block")
            parent = owners.pop()
            _require(parent is None or block < parent, f"block {sorted(block)} overlaps another block")
            parents[block] = parent
            for label in block:
                owner[label] = block
        object.__setattr__(self, "_parents", parents)

    def _ordered(self) -> List[Block]:
        return sorted(self.blocks, key=lambda b: (-len(b), sorted(b)))

    @classmethod
    def build(cls, labels: Iterable[int], blocks: Iterable[Iterable[int]] = ()) -> "Hierarchy":
        """Normalize ``blocks``: drop empties, add the full set and singletons."""

        labels = tuple(sorted(set(labels)))
        family = {frozenset(block) for block in blocks}
        family.discard(frozenset())
        family.add(frozenset(labels))
        family.update(frozenset((label,)) for label in labels)
        return cls(labels, frozenset(family))

    @property
    def root(self) -> Block:
        return frozenset(self.labels)

    def parent(self, block: Iterable[int]) -> Optional[Block]:
        block = frozenset(block)
        _require(block in self.blocks, f"{sorted(block)} is not a block")
        return self._parents[block]

    @cached_property
    def _children(self) -> Dict[Block, List[Block]]:
        children: Dict[Block, List[Block]] = defaultdict(list)
        for block in self._ordered():
            parent = self._parents[block]
            if parent is not None:
                children[parent].append(block)
        return children

    def children(self, block: Iterable[int]) -> List[Block]:
        block = frozenset(block)
        _require(block in self.blocks, f"{sorted(block)} is not a block")
        return sorted(self._children.get(block, []), key=lambda b: sorted(b))

    @cached_property
    def _chains(self) -> Dict[int, Tuple[Block, ...]]:
        chains: Dict[int, Tuple[Block, ...]] = {}
        for label in self.labels:
            chain = []
            block: Optional[Block] = frozenset((label,))
            while block is not None:
                chain.append(block)
                block = self._parents[block]
            chains[label] = tuple(reversed(chain))
        return chains

    def blocks_containing(self, label: int) -> Tuple[Block, ...]:
        """Blocks holding ``label``, from the full set down to ``{label}``."""

        _require(label in self._chains, f"label {label!r} is not in the hierarchy")
        return self._chains[label]

    def __len__(self) -> int:
        return len(self.labels)

    def describe(self) -> str:
        inner = [sorted(b) for b in self._ordered() if 1 < len(b) < len(self.labels)]
        return f"Hierarchy(n={len(self.labels)}, blocks={inner})"


def mrca(h: Hierarchy, i: int, j: int) -> Block:
    """Smallest block holding both ``i`` and ``j``."""

    common = h.root
    for a, b in zip(h.blocks_containing(i), h.blocks_containing(j)):
        if a != b:
            break
        common = a
    return common


def restrict(h: Hierarchy, subset: Iterable[int]) -> Hierarchy:
    """``{B ∩ A : B ∈ h}``, the hierarchy induced on ``A``."""

    subset = frozenset(subset)
    _require(len(subset) > 0, "cannot restrict a hierarchy to the empty set")
    outside = subset - h.root
    _require(not outside, f"labels {sorted(outside)} are not in the hierarchy")
    return Hierarchy.build(subset, (block & subset for block in h.blocks))


# ---------------------------------------------------------------------------
# Hierarchies of sampled points
# ---------------------------------------------------------------------------


def hierarchy_from_samples(samples: Sequence[L1Point], labels: Optional[Sequence[int]] = None) -> Hierarchy:
    """Blocks ``{i : v ∈ [[0, tᵢ]]}`` for every node ``v`` of the sampled subtree.

    Samples are walked as a trie on their coordinates. At each depth the labels
    still sharing a prefix are grouped by their next axis; along one axis the
    fringe of the point at value ``v`` is the set of labels whose value there is
    at least ``v``.
    """

    labels = tuple(range(1, len(samples) + 1)) if labels is None else tuple(labels)
    _require(len(labels) == len(samples), "need exactly one label per sample")
    points = dict(zip(labels, samples))
    blocks = set()
    stack: List[Tuple[List[int], int]] = [(list(labels), 0)]
    while stack:
        group, depth = stack.pop()
        by_axis: Dict[int, List[int]] = defaultdict(list)
        for label in group:
            coords = points[label].coords
            if len(coords) > depth:
                by_axis[coords[depth][0]].append(label)
        for members in by_axis.values():
            by_value: Dict[float, List[int]] = defaultdict(list)
            for label in members:
                by_value[points[label].coords[depth][1]].append(label)
            above = set(members)
            for value in sorted(by_value):
                blocks.add(frozenset(above))
                above.difference_update(by_value[value])
                stack.append((by_value[value], depth + 1))
    return Hierarchy.build(labels, blocks)


def brute_force_hierarchy_oracle(samples: Sequence[L1Point]) -> Hierarchy:
    """Test every label subset against the fringe of its iterated wedge."""

    n = len(samples)
    _require(n <= ORACLE_LIMIT, f"brute-force oracle handles at most {ORACLE_LIMIT} samples, got {n}")
    labels = list(range(1, n + 1))
    blocks = []
    for size in range(1, n + 1):
        for subset in itertools.combinations(labels, size):
            meet = samples[subset[0] - 1]
            for label in subset[1:]:
                meet = wedge(meet, samples[label - 1])
            fringe = frozenset(i for i in labels if is_on_root_path(meet, samples[i - 1]))
            if fringe == frozenset(subset):
                blocks.append(fringe)
    return Hierarchy.build(labels, blocks)


def sample_points(tree: IpTree, draws: np.ndarray) -> List[L1Point]:
    """Map rows ``(u, v)`` of uniforms to points of the weight.

    ``u`` picks an atom or density arc by mass, ``v`` the position along an arc.
    """

    pieces: List[Tuple[float, object]] = [(atom.mass, atom) for atom in tree.weight.atoms]
    pieces.extend((entry.mass, entry) for entry in tree.weight.density)
    masses = [mass for mass, _ in pieces]
    out: List[L1Point] = []
    for u, v in draws:
        _, piece = pieces[weighted_index(masses, float(u))]
        if isinstance(piece, TreeAtom):
            out.append(piece.point)
        else:
            out.append(piece.arc.point_at(float(v) * piece.arc.length))
    return out


def derive_hierarchy(
    tree: IpTree,
    n: int,
    seed: Union[int, np.random.SeedSequence, None],
    *,
    tol: Optional[float] = None,
    logger: Optional[BuildLogger] = None,
) -> Tuple[Hierarchy, List[L1Point]]:
    """Sample ``n`` points from the weight and return their hierarchy on ``1..n``.

    Draws are consumed row by row, so the first ``n`` samples of a run with
    ``n + 1`` points match a run with ``n`` points under the same seed.
    """

    require_valid(tree, ip=True, tol=tol)
    _require(n >= 1, f"need at least one sample, got {n!r}")
    rng = np.random.default_rng(seed)
    samples = sample_points(tree, rng.random((n, 2)))
    h = hierarchy_from_samples(samples)
    if logger is not None:
        logger.log(f"sampled n={n}, {len(h.blocks)} blocks", channel=CHANNEL_SAMPLE)
    return h, samples


def sample_law(tree: IpTree, n: int = 3) -> Dict[Hierarchy, float]:
    """Exact law of the ``n``-sample hierarchy of a purely atomic tree."""

    _require(not tree.weight.density, "exact sampling laws need a purely atomic weight")
    _require(n >= 1, f"need at least one sample, got {n!r}")
    atoms = tree.weight.atoms
    law: Dict[Hierarchy, float] = defaultdict(float)
    for combo in itertools.product(atoms, repeat=n):
        probability = math.prod(atom.mass for atom in combo)
        law[hierarchy_from_samples([atom.point for atom in combo])] += probability
    return dict(law)


def total_variation(law_a: Dict[Hierarchy, float], law_b: Dict[Hierarchy, float]) -> float:
    keys = set(law_a) | set(law_b)
    return 0.5 * math.fsum(abs(law_a.get(k, 0.0) - law_b.get(k, 0.0)) for k in keys)


# ---------------------------------------------------------------------------
# Labels on ℤ and spinal coordinates
# ---------------------------------------------------------------------------


def _z_range(h: Hierarchy) -> int:
    n = (len(h.labels) - 1) // 2
    _require(
        n >= 1 and h.labels == tuple(range(-n, n + 1)),
        "expected labels -n..n for some n >= 1",
    )
    return n


def relabel_to_Z(h: Hierarchy) -> Hierarchy:
    """Send odd labels ``2m + 1`` to ``-m`` and even labels ``2m`` to ``m``."""

    count = len(h.labels)
    _require(count % 2 == 1 and count >= 3, f"need an odd number (>= 3) of labels, got {count}")
    _require(h.labels == tuple(range(1, count + 1)), "expected labels 1..2n+1")

    def move(label: int) -> int:
        return -(label // 2) if label % 2 else label // 2

    return Hierarchy.build((move(label) for label in h.labels),
                           ({move(label) for label in block} for block in h.blocks))


def relabel_from_Z(h: Hierarchy) -> Hierarchy:
    _z_range(h)

    def move(label: int) -> int:
        return 2 * label if label > 0 else 1 - 2 * label

    return Hierarchy.build((move(label) for label in h.labels),
                           ({move(label) for label in block} for block in h.blocks))


@dataclass(frozen=True, eq=False)
class SpinalMatrix:
    """``X̂ⁱⱼ = 1 − #(i ∧ j) / 2n``, clipped to ``[0, 1]``.

    Rows are computed on demand from the ancestor chain of ``i``.
    """

    hierarchy: Hierarchy
    n: int
    _rows: Dict[int, Dict[int, float]] = field(default_factory=dict, repr=False)

    def row(self, i: int) -> Dict[int, float]:
        cached = self._rows.get(i)
        if cached is not None:
            return cached
        chain = self.hierarchy.blocks_containing(i)
        scale = 2.0 * self.n
        out: Dict[int, float] = {}
        for block, inner in zip(chain, (*chain[1:], frozenset())):
            value = min(max(1.0 - len(block) / scale, 0.0), 1.0)
            for j in block - inner:
                out[j] = value
        out[i] = min(max(1.0 - 1.0 / scale, 0.0), 1.0)
        self._rows[i] = out
        return out

    def value(self, i: int, j: int) -> float:
        return self.row(i)[j]


def estimate_spinal(h: Hierarchy) -> SpinalMatrix:
    return SpinalMatrix(h, _z_range(h))


def order_compatible(h: Hierarchy, i: int, j: int, k: int, spinal: Optional[SpinalMatrix] = None) -> bool:
    """``X̂ⁱⱼ ≤ X̂ⁱₖ`` exactly when ``k ∈ i ∧ j``; ties pass either way."""

    spinal = estimate_spinal(h) if spinal is None else spinal
    x_ij, x_ik = spinal.value(i, j), spinal.value(i, k)
    if x_ij == x_ik:
        return True
    return (x_ij <= x_ik) == (k in mrca(h, i, j))


# ---------------------------------------------------------------------------
# Reconstruction
# ---------------------------------------------------------------------------


def reconstruct_tree(
    h: Hierarchy,
    depth: int,
    *,
    return_trajectory: bool = False,
    tol: Optional[float] = None,
    logger: Optional[BuildLogger] = None,
):
    """Rebuild an embedded tree from a hierarchy on ``-n..n``.

    Step ``k = 0, -1, ..., -depth + 1`` picks the spine label ``k - 1`` and pushes
    every other tracked label ``j`` out along ``e_{|k-1|}`` by
    ``(X̂^{k-1}_j − ‖t_j‖)₊``. The result spans the final positions of labels
    ``1..n`` and weights each with ``1/n``; returns ``(tree, samples)`` or, with
    ``return_trajectory``, ``(tree, samples, trajectory)`` where the trajectory
    lists every tracked position before the first and after each step.
    """

    tol = resolve_tol(tol)
    n = _z_range(h)
    _require(1 <= depth <= n, f"reconstruction depth must lie in 1..{n}, got {depth!r}")
    spinal = estimate_spinal(h)

    tracked = list(range(1, n + 1)) + list(range(-1, -depth - 1, -1))
    positions: Dict[int, L1Point] = {label: L1Point.origin() for label in tracked}
    trajectory: List[Dict[int, L1Point]] = [dict(positions)]
    for step in range(depth):
        spine = -step - 1
        axis = step + 1
        row = spinal.row(spine)
        moved = 0
        for label in tracked:
            if -step - 1 <= label <= 0:
                continue
            point = positions[label]
            push = row[label] - point.norm
            if push > tol:
                positions[label] = point.with_coordinate(axis, push)
                moved += 1
        if logger is not None:
            logger.log(f"spine {spine} axis {axis}: pushed {moved} labels", channel=CHANNEL_RECONSTRUCT)
        if return_trajectory:
            trajectory.append(dict(positions))

    samples = [positions[label] for label in range(1, n + 1)]
    mass = 1.0 / n
    weight = TreeMeasure.build([TreeAtom(point, mass) for point in samples])
    tree = IpTree(tuple(span_arcs(samples)), weight)
    if return_trajectory:
        return tree, samples, trajectory
    return tree, samples


def line_breaking_holds(trajectory: Sequence[Dict[int, L1Point]]) -> bool:
    """Every label that moves in a step starts where that step's spine label sits."""

    for step, (before, after) in enumerate(zip(trajectory, trajectory[1:])):
        spine = -step - 1
        anchor = before[spine]
        for label, point in after.items():
            if point != before[label] and before[label] != anchor:
                return False
    return True
