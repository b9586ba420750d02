import math

import numpy as np
import pytest

from ip_trees import (
    ModelError,
    RankedMasses,
    estimate_alpha_diversity,
    is_uniformized,
    sample_poisson_dirichlet,
    sample_string_of_beads,
    stick_breaking,
)
from ip_trees.ipt_beads import diversity_profile, string_measure, uniformized_string


def test_stick_breaking_returns_positive_sticks_below_one():
    sticks = stick_breaking(0.5, 0.5, 50, np.random.default_rng(3))
    assert len(sticks) == 50
    assert np.all(sticks > 0)
    assert sticks.sum() < 1.0


def test_stick_breaking_handles_theta_at_the_boundary():
    sticks = stick_breaking(0.0, 1e-12, 5, np.random.default_rng(1))
    assert len(sticks) == 5
    with pytest.raises(ModelError):
        stick_breaking(0.5, -0.5, 5, np.random.default_rng(1))
    with pytest.raises(ModelError):
        stick_breaking(1.0, 0.5, 5, np.random.default_rng(1))


def test_poisson_dirichlet_is_ranked_and_accounts_for_all_mass():
    ranked = sample_poisson_dirichlet(0.5, 0.5, 64, np.random.default_rng(5))
    masses = list(ranked.masses)
    assert masses == sorted(masses, reverse=True)
    assert ranked.residual >= 0
    assert math.fsum(masses) + ranked.residual == pytest.approx(1.0)


def test_ranked_masses_validation():
    with pytest.raises(ModelError):
        RankedMasses((0.25, 0.5), 0.25)
    with pytest.raises(ModelError):
        RankedMasses((0.5, 0.25), 0.0)


def test_diversity_estimator_on_exact_power_law():
    alpha, c = 0.5, 0.01
    n = np.arange(1, 10_001, dtype=float)
    masses = c * n ** (-1.0 / alpha)
    expected = c**alpha * math.gamma(1.0 - alpha)
    assert estimate_alpha_diversity(masses, alpha) == pytest.approx(expected, abs=1e-6)
    profile = diversity_profile(masses, alpha, start=1, stop=10)
    assert np.allclose(profile, expected)


def test_diversity_estimator_needs_enough_atoms():
    with pytest.raises(ModelError) as excinfo:
        estimate_alpha_diversity([0.5, 0.25, 0.25], 0.5)
    assert "too few atoms" in str(excinfo.value)
    with pytest.raises(ModelError):
        estimate_alpha_diversity([0.1] * 10, 1.0)


def test_diversity_estimator_is_stable_on_poisson_dirichlet_samples():
    rng = np.random.default_rng(2024)
    ranked = sample_poisson_dirichlet(0.5, 0.5, 20_000, rng)
    # Ranks far below the truncation are unaffected by it.
    profile = diversity_profile(ranked, 0.5, start=1_000, stop=2_000)
    assert np.all(np.isfinite(profile))
    assert profile.min() > 0
    assert (profile.max() - profile.min()) / profile.mean() < 0.2


def test_string_of_beads_and_its_uniformization():
    rng = np.random.default_rng(11)
    string = sample_string_of_beads(0.5, 0.5, 32, rng)
    assert string.diversity > 0
    assert all(0 <= loc <= string.diversity for loc, _ in string.atoms)

    raw = string_measure(string)
    q = uniformized_string(string)
    assert raw.total_mass == pytest.approx(1.0)
    assert not q.segments
    assert is_uniformized(q)
    assert len(q.atoms) == len(raw.atoms)
    assert sorted(m for _, m in q.atoms) == pytest.approx(sorted(m for _, m in raw.atoms))
    # Beads keep their order along the string.
    assert [m for _, m in q.atoms] == pytest.approx([m for _, m in raw.atoms])


def test_string_of_beads_parameter_domain():
    rng = np.random.default_rng(0)
    with pytest.raises(ModelError):
        sample_string_of_beads(0.0, 0.5, 32, rng)
    with pytest.raises(ModelError) as excinfo:
        sample_string_of_beads(0.5, 0.5, 5, rng)
    assert "truncation" in str(excinfo.value)
