"""Randomized and scheduled bead-crushing builds.

``build_model`` drives :func:`~ip_trees.ipt_tree.crush` with one of four
string models. Randomness comes from a :class:`numpy.random.SeedSequence`: one
stream picks crush sites, and each step spawns its own stream for the string it
crushes in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .ipt_beads import sample_string_of_beads, string_measure, uniformized_string
from .ipt_config import resolve_tol
from .ipt_errors import CrushError, ModelError
from .ipt_l1geom import Arc, L1Point, relabel_map
from .ipt_logger import BuildLogger
from .ipt_measure import (
    DensityArc,
    FadMeasure1D,
    TreeAtom,
    TreeMeasure,
    fat_cantor_measure,
    is_uniformized,
)
from .ipt_stdlib import weighted_index
from .ipt_tree import CrushStep, IpTree, crush, crush_embedding, new_tree

MODEL_BROWNIAN = "brownian"
MODEL_ALPHA_THETA = "alpha_theta"
MODEL_FAT_CANTOR = "fat_cantor"
MODEL_CUSTOM = "custom"
MODEL_KINDS = (MODEL_BROWNIAN, MODEL_ALPHA_THETA, MODEL_FAT_CANTOR, MODEL_CUSTOM)

DEFAULT_TRUNCATION = 32


@dataclass(frozen=True)
class Model:
    """Which strings a build crushes in, and how sites are chosen.

    Random models pick a size-biased pending atom and crush all of it. The
    custom model crushes the heaviest pending atom with the given measures in
    turn.
    """

    kind: str
    alpha: float = 0.5
    theta: float = 0.5
    depth: int = 1
    measures: Tuple[FadMeasure1D, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in MODEL_KINDS:
            raise ModelError(f"unknown model {self.kind!r}; expected one of {MODEL_KINDS}")
        if self.kind in (MODEL_BROWNIAN, MODEL_ALPHA_THETA):
            if not 0 < self.alpha < 1:
                raise ModelError(f"alpha must lie in (0, 1), got {self.alpha!r}")
            if not self.theta > -self.alpha:
                raise ModelError(f"theta must exceed -alpha, got {self.theta!r}")
        if self.kind == MODEL_FAT_CANTOR and self.depth < 1:
            raise ModelError(f"fat Cantor depth must be at least 1, got {self.depth!r}")
        if self.kind == MODEL_CUSTOM:
            if not self.measures:
                raise ModelError("custom model needs at least one measure")
            for q in self.measures:
                if not is_uniformized(q):
                    raise ModelError("custom model measures must be uniformized")

    @classmethod
    def brownian(cls) -> "Model":
        return cls(MODEL_BROWNIAN, alpha=0.5, theta=0.5)

    @classmethod
    def alpha_theta(cls, alpha: float, theta: float) -> "Model":
        return cls(MODEL_ALPHA_THETA, alpha=alpha, theta=theta)

    @classmethod
    def fat_cantor(cls, depth: int) -> "Model":
        return cls(MODEL_FAT_CANTOR, depth=depth)

    @classmethod
    def custom(cls, measures: Sequence[FadMeasure1D]) -> "Model":
        return cls(MODEL_CUSTOM, measures=tuple(measures))

    def describe(self) -> str:
        if self.kind == MODEL_ALPHA_THETA:
            return f"alpha_theta(alpha={self.alpha:g}, theta={self.theta:g})"
        if self.kind == MODEL_FAT_CANTOR:
            return f"fat_cantor(depth={self.depth})"
        if self.kind == MODEL_CUSTOM:
            return f"custom({len(self.measures)} measures)"
        return self.kind


def build_model(
    model: Model,
    steps: int,
    seed: int,
    *,
    truncation: int = DEFAULT_TRUNCATION,
    tol: Optional[float] = None,
    logger: Optional[BuildLogger] = None,
) -> IpTree:
    """Run ``steps`` crush steps of ``model`` from :func:`new_tree`.

    The build stops early if no pending atom is left.
    """

    if steps < 0:
        raise ModelError(f"steps must be nonnegative, got {steps!r}")
    root = np.random.SeedSequence(seed)
    site_seq, string_seq = root.spawn(2)
    site_rng = np.random.default_rng(site_seq)
    fixed = fat_cantor_measure(model.depth) if model.kind == MODEL_FAT_CANTOR else None

    tree = new_tree()
    if logger is not None:
        logger.log(f"build {model.describe()} steps={steps} seed={seed}")
    for step in range(steps):
        pending = tree.weight.pending_atoms()
        if not pending:
            if logger is not None:
                logger.log(f"no pending atoms left after {step} steps")
            break
        if model.kind == MODEL_CUSTOM:
            site = max(pending, key=lambda atom: atom.mass)
            q = model.measures[step % len(model.measures)]
        else:
            site = pending[weighted_index([atom.mass for atom in pending], site_rng.random())]
            if fixed is not None:
                q = fixed
            else:
                rng = np.random.default_rng(string_seq.spawn(1)[0])
                q = uniformized_string(sample_string_of_beads(model.alpha, model.theta, truncation, rng))
        tree = crush(tree, site.point, site.mass, q, tol=tol, logger=logger)
    return tree


def reembed(tree: IpTree, mapping: Dict[int, int]) -> IpTree:
    """Rename every axis through an increasing ``mapping``; an isometric copy."""

    mapping = relabel_map(tree.axes, mapping)
    arcs = tuple(arc.relabel(mapping) for arc in tree.arcs)
    atoms = [TreeAtom(a.point.relabel(mapping), a.mass, a.tag) for a in tree.weight.atoms]
    density = [DensityArc(d.arc.relabel(mapping), d.rate) for d in tree.weight.density]
    log = tuple(
        CrushStep(
            step.site.relabel(mapping),
            step.site_mass,
            step.crushed_mass,
            step.string,
            mapping[step.new_axis],
            step.paused,
            step.tag,
        )
        for step in tree.build_log
    )
    return IpTree(arcs, TreeMeasure(tuple(atoms), tuple(density)), log)


def replay(
    build_log: Sequence[CrushStep],
    order: Optional[Sequence[int]] = None,
    axis_map: Optional[Dict[int, int]] = None,
    *,
    tol: Optional[float] = None,
) -> IpTree:
    """Re-run a recorded build, optionally in another order and with renamed axes.

    ``order`` lists step positions; a step may only run after the steps that
    created its site. Axes are handed out in execution order, so the result is
    an isometric copy of the original tree.
    """

    steps = list(build_log)
    order = list(range(len(steps))) if order is None else list(order)
    if sorted(order) != list(range(len(steps))):
        raise CrushError("replay order must be a permutation of the build steps")

    tree = new_tree()
    renamed: Dict[int, int] = {}
    for position in order:
        step = steps[position]
        site_axes = [axis for axis, _ in step.site.coords]
        missing = [axis for axis in site_axes if axis not in renamed]
        if missing:
            raise CrushError(f"step {position} runs before the steps creating axes {missing}")
        site = step.site.relabel(renamed)
        renamed[step.new_axis] = tree.next_axis
        tree = crush(tree, site, step.crushed_mass, step.string, tag=step.tag, tol=tol)
    if axis_map is not None:
        tree = reembed(tree, axis_map)
    return tree


def _attach_string(tree: IpTree, site: L1Point, mass: float, beads: FadMeasure1D) -> Tuple[IpTree, List[L1Point]]:
    """Hang the raw string from ``site`` at its sampled offsets, stretched by ``√mass``.

    The segment from ``site`` to the lowest bead carries no mass.
    """

    axis = tree.next_axis
    scale = math.sqrt(mass)
    points = [site.with_coordinate(axis, loc * scale) for loc, _ in beads.atoms]
    atoms = [a for a in tree.weight.atoms if a.point != site]
    atoms.extend(TreeAtom(point, mass * w) for point, (_, w) in zip(points, beads.atoms))
    top = max(points, key=lambda p: p.norm)
    arcs = tree.arcs if top == site else tree.arcs + (Arc(site, top, axis),)
    return IpTree(arcs, TreeMeasure.build(atoms, tree.weight.density), tree.build_log), points


def build_coupled(
    steps: int,
    seed: int,
    *,
    alpha: float = 0.5,
    theta: Optional[float] = None,
    truncation: int = DEFAULT_TRUNCATION,
    tol: Optional[float] = None,
) -> Tuple[IpTree, IpTree]:
    """Build a CRT-style tree and its IP twin from the same strings.

    The CRT-style tree hangs each raw (α, θ)-string from the crushed atom,
    stretched by the square root of the atom's mass. The twin crushes the same
    atom with the uniformized string. Beads and uniformized atoms are paired in
    order, and later steps crush paired atoms in both trees, so the two stay
    mass-structurally equivalent.
    """

    if steps < 0:
        raise ModelError(f"steps must be nonnegative, got {steps!r}")
    theta = alpha if theta is None else theta
    tol = resolve_tol(tol)
    root = np.random.SeedSequence(seed)
    site_seq, string_seq = root.spawn(2)
    site_rng = np.random.default_rng(site_seq)

    crt, ip = new_tree(), new_tree()
    pairs: List[Tuple[L1Point, L1Point]] = [(L1Point.origin(), L1Point.origin())]
    masses: List[float] = [1.0]
    for _ in range(steps):
        i = weighted_index(masses, site_rng.random())
        crt_site, ip_site = pairs.pop(i)
        mass = masses.pop(i)
        rng = np.random.default_rng(string_seq.spawn(1)[0])
        string = sample_string_of_beads(alpha, theta, truncation, rng)
        beads = string_measure(string)
        q = uniformized_string(string)

        crt, crt_points = _attach_string(crt, crt_site, mass, beads)
        phi = crush_embedding(ip_site, ip.index.fringe(ip_site), mass, ip.next_axis, tol)
        ip = crush(ip, ip_site, mass, q, tol=tol)
        for crt_point, (z, w) in zip(crt_points, q.atoms):
            pairs.append((crt_point, phi(z)))
            masses.append(mass * w)
    return crt, ip
