import math

import numpy as np
import pytest

from ip_trees import (
    Arc,
    CrushError,
    DensityArc,
    FadMeasure1D,
    GeometryError,
    IpTree,
    L1Point,
    TreeAtom,
    TreeMeasure,
    TreeValidationError,
    crush,
    estimate_alpha_diversity,
    fringe_mass,
    is_ip_tree,
    new_tree,
    sample_string_of_beads,
    special_points,
    spinal_diversity,
)
from ip_trees.ipt_beads import uniformized_string
from ip_trees.ipt_build import Model, build_model, reembed
from ip_trees.ipt_logger import CHANNEL_CRUSH, CHANNEL_PAUSE, BuildLogger
from ip_trees.ipt_measure import RESOLVED
from ip_trees.ipt_tree import (
    KIND_ATOM,
    KIND_BRANCH,
    branch_points,
    bush_masses,
    path_mass,
    resolve_atom,
    tree_leaves,
)

ORIGIN = L1Point.origin()
HALVES = FadMeasure1D.build([(0.0, 0.5), (0.5, 0.5)])
THIRDS = FadMeasure1D.build([(0.0, 1 / 3), (1 / 3, 1 / 3), (2 / 3, 1 / 3)])


def atom_points(tree):
    return sorted((atom.point for atom in tree.weight.atoms), key=lambda p: (p.norm, p.coords))


def line_of_thirds():
    return crush(new_tree(), ORIGIN, 1.0, THIRDS)


def interior_branch_tree():
    tree = line_of_thirds()
    middle = atom_points(tree)[1]
    return crush(tree, middle, tree.weight.atom_at(middle).mass, FadMeasure1D.dirac(0.0)), middle


def test_new_tree_is_a_unit_atom_at_the_root():
    tree = new_tree()
    assert tree.arcs == ()
    assert tree.weight.atom_at(ORIGIN).mass == 1.0
    assert fringe_mass(tree, ORIGIN) == 1.0
    assert is_ip_tree(tree) == (True, [])
    [root] = special_points(tree)
    assert root.kind == KIND_ATOM
    assert root.stats == (1.0, 1.0, 1.0)


def test_crush_with_lebesgue_gives_a_unit_segment():
    tree = crush(new_tree(), ORIGIN, 1.0, FadMeasure1D.lebesgue())
    tip = L1Point.basis(1, 1.0)
    assert tree.arcs == (Arc(ORIGIN, tip, 1),)
    assert tree.weight.atoms == ()
    assert tree.weight.density == (DensityArc(Arc(ORIGIN, tip, 1)),)
    assert fringe_mass(tree, L1Point.basis(1, 0.5)) == pytest.approx(0.5)
    assert is_ip_tree(tree)[0]
    [leaf] = special_points(tree)
    assert leaf.point == tip
    assert leaf.stats == pytest.approx((1.0, 0.0, 0.0))


def test_crush_with_dirac_at_zero_pauses():
    logger = BuildLogger()
    tree = crush(new_tree(), ORIGIN, 1.0, FadMeasure1D.dirac(0.0), logger=logger)
    assert tree.arcs == ()
    assert tree.weight == new_tree().weight
    assert tree.build_log[0].paused
    assert tree.next_axis == 2
    assert [entry.channel for entry in logger] == [CHANNEL_PAUSE]


def test_crush_with_two_atoms():
    logger = BuildLogger()
    tree = crush(new_tree(), ORIGIN, 1.0, HALVES, logger=logger)
    half = L1Point.basis(1, 0.5)
    assert tree.arcs == (Arc(ORIGIN, half, 1),)
    assert tree.weight.atom_at(ORIGIN).mass == 0.5
    assert tree.weight.atom_at(half).mass == 0.5
    assert fringe_mass(tree, half) == 0.5
    assert path_mass(tree, half) == 1.0
    assert is_ip_tree(tree)[0]
    assert [entry.channel for entry in logger] == [CHANNEL_CRUSH]


def test_partial_crush_keeps_the_rest_of_the_atom():
    tree = crush(new_tree(), ORIGIN, 0.5, HALVES)
    assert tree.weight.atom_at(ORIGIN).mass == pytest.approx(0.5)
    # φ(z) = (1 + (z - 1)/2) e1 sends the two atoms to 1/2 and 3/4.
    assert tree.weight.atom_at(L1Point.basis(1, 0.5)).mass == pytest.approx(0.25)
    assert tree.weight.atom_at(L1Point.basis(1, 0.75)).mass == pytest.approx(0.25)
    assert is_ip_tree(tree)[0]


def test_interior_branch_statistics():
    tree, middle = interior_branch_tree()
    ok, violations = is_ip_tree(tree)
    assert ok, [v.describe() for v in violations]
    points = special_points(tree)
    kinds = [sp.kind for sp in points]
    assert kinds.count(KIND_ATOM) == 3
    assert kinds.count(KIND_BRANCH) == 1
    branch = next(sp for sp in points if sp.kind == KIND_BRANCH)
    assert branch.point == middle
    assert branch.stats == pytest.approx((1 / 3, 0.0, 2 / 3))
    assert branch_points(tree) == [middle]
    assert len(tree_leaves(tree)) == 2


def test_line_of_thirds_statistics():
    tree = line_of_thirds()
    stats = [sp.stats for sp in special_points(tree)]
    assert stats == [
        pytest.approx((1 / 3, 1 / 3, 1.0)),
        pytest.approx((2 / 3, 1 / 3, 2 / 3)),
        pytest.approx((1.0, 1 / 3, 1 / 3)),
    ]


def test_crush_rejects_bad_sites_and_strings():
    tree = crush(new_tree(), ORIGIN, 1.0, HALVES)
    with pytest.raises(CrushError) as excinfo:
        crush(tree, L1Point.basis(1, 0.25), 0.1, HALVES)
    assert "not a pending atom" in str(excinfo.value)
    with pytest.raises(CrushError) as excinfo:
        crush(tree, ORIGIN, 0.75, HALVES)
    assert "exceeds the atom mass" in str(excinfo.value)
    with pytest.raises(CrushError) as excinfo:
        crush(tree, ORIGIN, 0.5, FadMeasure1D.build([(0.0, 0.5), (0.25, 0.5)]))
    assert "not uniformized" in str(excinfo.value)
    with pytest.raises(CrushError):
        crush(tree, ORIGIN, 0.5, FadMeasure1D.dirac(0.0, 0.5))
    resolved = resolve_atom(tree, ORIGIN)
    assert resolved.weight.atom_at(ORIGIN).tag == RESOLVED
    with pytest.raises(CrushError):
        crush(resolved, ORIGIN, 0.5, HALVES)


def test_crush_preserves_existing_fringe_masses():
    tree = build_model(Model.brownian(), 4, seed=21, truncation=12)
    before = {atom.point: fringe_mass(tree, atom.point) for atom in tree.weight.atoms}
    site = max(tree.weight.pending_atoms(), key=lambda atom: atom.mass)
    after = crush(tree, site.point, site.mass, THIRDS)
    for point, mass in before.items():
        assert fringe_mass(after, point) == pytest.approx(mass, abs=1e-12)
    assert is_ip_tree(after)[0]


def test_density_rate_below_one_breaks_spacing():
    tip = L1Point.basis(1, 1.0)
    tree = IpTree(
        arcs=(Arc(ORIGIN, tip, 1),),
        weight=TreeMeasure(density=(DensityArc(Arc(ORIGIN, tip, 1), 0.9),)),
    )
    ok, violations = is_ip_tree(tree)
    assert not ok
    kinds = {v.kind for v in violations}
    assert "spacing" in kinds
    assert "rate" in kinds


def test_leaf_without_mass_breaks_spanning():
    tree = crush(new_tree(), ORIGIN, 1.0, HALVES)
    half = L1Point.basis(1, 0.5)
    stray = half.with_coordinate(2, 0.2)
    tree = IpTree(tree.arcs + (Arc(half, stray, 2),), tree.weight, tree.build_log)
    ok, violations = is_ip_tree(tree)
    assert not ok
    assert any(v.kind == "spanning" and v.point == stray for v in violations)
    with pytest.raises(TreeValidationError) as excinfo:
        special_points(tree)
    assert excinfo.value.violations


def test_special_points_survive_axis_relabeling():
    tree = build_model(Model.brownian(), 5, seed=8, truncation=12)
    moved = reembed(tree, {axis: 3 * axis for axis in tree.axes})
    expected = [pytest.approx(sp.stats) for sp in special_points(tree)]
    assert [sp.stats for sp in special_points(moved)] == expected


def test_fringe_mass_off_tree_raises():
    tree = crush(new_tree(), ORIGIN, 1.0, HALVES)
    with pytest.raises(GeometryError):
        fringe_mass(tree, L1Point.basis(2, 0.1))


def test_spinal_diversity_counts_heavy_bushes():
    quarters = FadMeasure1D.build([(0.0, 0.25), (0.25, 0.25), (0.5, 0.25), (0.75, 0.25)])
    tree = crush(new_tree(), ORIGIN, 1.0, quarters)
    top = L1Point.basis(1, 0.75)
    assert sorted(bush_masses(tree, top).values()) == [0.25] * 4
    assert spinal_diversity(tree, top, 0.125) == pytest.approx(4 * math.sqrt(math.pi * 0.125))
    assert spinal_diversity(tree, top, 0.25) == 0.0
    with pytest.raises(GeometryError):
        spinal_diversity(tree, top, 0.0)


def test_spinal_diversity_ignores_mass_on_the_spine():
    tree = crush(new_tree(), ORIGIN, 1.0, FadMeasure1D.lebesgue())
    assert spinal_diversity(tree, L1Point.basis(1, 1.0), 0.01) == 0.0


def test_spinal_diversity_along_one_string_matches_its_diversity():
    string = sample_string_of_beads(0.5, 0.5, 200, np.random.default_rng(17))
    tree = crush(new_tree(), ORIGIN, 1.0, uniformized_string(string))
    top = max((atom.point for atom in tree.weight.atoms), key=lambda p: p.norm)
    masses = [mass for _, mass in string.atoms]
    # Just below the n-th ranked mass the spine carries n heavier bushes, plus the residual.
    estimates = [spinal_diversity(tree, top, masses[n - 1] * (1 - 1e-9)) for n in range(100, 201)]
    assert np.mean(estimates) == pytest.approx(estimate_alpha_diversity(masses, 0.5), rel=0.02)


def test_spinal_diversity_stabilizes_on_brownian_builds():
    coarse, fine = [], []
    for seed in range(16):
        tree = build_model(Model.brownian(), 40, seed=seed)
        deepest = max((atom.point for atom in tree.weight.atoms), key=lambda p: p.norm)
        heavy = sum(1 for mass in bush_masses(tree, deepest).values() if mass > 1e-2)
        light = sum(1 for mass in bush_masses(tree, deepest).values() if mass > 1e-3)
        assert light >= heavy
        coarse.append(spinal_diversity(tree, deepest, 1e-2))
        fine.append(spinal_diversity(tree, deepest, 1e-3))
    assert np.mean(coarse) > 0
    assert 0.5 <= np.mean(fine) / np.mean(coarse) <= 2.0


def test_tree_atoms_must_lie_on_arcs():
    tree = IpTree(arcs=(), weight=TreeMeasure((TreeAtom(L1Point.basis(1, 0.5), 1.0),)))
    ok, violations = is_ip_tree(tree)
    assert not ok
    assert any("off the arc set" in v.message for v in violations)
