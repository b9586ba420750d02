import pytest

from ip_trees import ModelError, Tolerances, configure, current_tolerances, override
from ip_trees.ipt_config import resolve_tol
from ip_trees.ipt_stdlib import derive_seeds, weighted_index


def test_default_tolerances():
    tolerances = Tolerances()
    assert tolerances.eps_tol == 1e-9
    assert tolerances.eps_canon == 1e-7
    assert tolerances.eps_bis == 1e-6
    assert tolerances.max_bisection == 40


def test_tolerances_must_be_positive():
    with pytest.raises(ModelError):
        Tolerances(eps_tol=0.0)
    with pytest.raises(ModelError):
        Tolerances(max_bisection=0)


def test_override_restores_previous_values():
    before = current_tolerances()
    with override(eps_tol=1e-6) as active:
        assert active.eps_tol == 1e-6
        assert resolve_tol(None) == 1e-6
        assert resolve_tol(0.5) == 0.5
    assert current_tolerances() == before


def test_configure_replaces_fields_process_wide():
    before = current_tolerances()
    try:
        assert configure(eps_canon=1e-5).eps_canon == 1e-5
        assert current_tolerances().eps_canon == 1e-5
    finally:
        configure(eps_canon=before.eps_canon)
    assert current_tolerances() == before


def test_weighted_index():
    assert weighted_index([1.0, 1.0], 0.25) == 0
    assert weighted_index([1.0, 1.0], 0.5) == 1
    assert weighted_index([0.0, 2.0, 0.0], 0.0) == 1
    assert weighted_index([1.0, 1.0], 0.999999) == 1
    with pytest.raises(ValueError):
        weighted_index([], 0.5)
    with pytest.raises(ValueError):
        weighted_index([0.0, 0.0], 0.5)


def test_derive_seeds_is_a_stable_stream():
    seeds = derive_seeds(5, 4)
    assert seeds == derive_seeds(5, 4)
    assert seeds[:2] == derive_seeds(5, 2)
    assert len(set(seeds)) == 4
    assert derive_seeds(6, 4) != seeds
    assert all(0 <= s < 2**64 for s in seeds)
