import random

import pytest

from contact_pi1.crossval import (
    AGREE,
    SKIPPED,
    CrossValidator,
    build_polytope,
    check_cone,
    check_polytope,
    good_corpus_cones,
    parse_range,
    random_recipe,
    run_trial,
    shrink_recipe,
)
from contact_pi1.src.cone import apply_unimodular
from contact_pi1.src.errors import ParseError
from contact_pi1.src.lattice import IntMatrix, random_elementary_ops, unimodular_from_ops
from contact_pi1.src.pi1 import pi1_lerman, pi1_thmB


def test_parse_range():
    assert parse_range("1..3") == (1, 3)
    assert parse_range("4") == (4, 4)
    with pytest.raises(ParseError):
        parse_range("one..three")


def test_build_polytope_recipes():
    recipe = {
        "builder": "product",
        "left": {"builder": "box", "lengths": [2]},
        "right": {"builder": "simplex", "n": 2, "dilate": 3},
        "dilate": 1,
    }
    p = build_polytope(recipe)
    assert p.dim == 3
    assert p.d == 5


def test_random_recipes_build():
    rng = random.Random(1)
    for _ in range(30):
        dim = rng.randint(1, 3)
        assert build_polytope(random_recipe(rng, dim)).dim == dim


def test_shrink_recipe_is_strictly_smaller():
    recipe = {"builder": "box", "lengths": [1, 3], "dilate": 2}
    smaller = list(shrink_recipe(recipe))
    assert {"builder": "box", "lengths": [1, 3], "dilate": 1} in smaller
    assert {"builder": "box", "lengths": [1, 2], "dilate": 2} in smaller
    assert list(shrink_recipe({"builder": "simplex", "n": 2, "dilate": 1})) == []


def test_checks_pass_on_known_inputs():
    assert check_polytope(build_polytope({"builder": "hirzebruch", "a": 5, "b": 2, "k": 1, "dilate": 2})) == ""
    for c in good_corpus_cones()[:8]:
        assert check_cone(c, IntMatrix.identity(c.ambient_dim)) == ""


def test_trials_are_deterministic():
    first = run_trial(7, 3, (1, 3), (2, 8))
    second = run_trial(7, 3, (1, 3), (2, 8))
    assert first == second


def test_empty_dimension_range_is_skipped():
    result = run_trial(7, 0, (4, 3), (2, 8))
    assert result.status == SKIPPED
    assert "empty dimension range" in result.reason


def test_count_zero_runs_only_the_corpus():
    summary = CrossValidator(seed=7, workers=1).run(0)
    assert summary["statistics"]["trials"] == 0
    assert summary["corpus_failures"] == []
    assert summary["success"] is True


def test_small_run_agrees():
    summary = CrossValidator(seed=7, workers=1).run(12)
    assert summary["statistics"]["disagree"] == 0
    assert summary["statistics"]["agree"] + summary["statistics"]["skipped"] == 12
    assert summary["reproduction"] is None
    assert summary["success"] is True


def test_sharding_does_not_change_results():
    serial = CrossValidator(seed=11, workers=1).run_trials(8)
    sharded = CrossValidator(seed=11, workers=2).run_trials(8)
    assert [(r.index, r.status, r.recipe) for r in serial] == [(r.index, r.status, r.recipe) for r in sharded]


def test_narrow_facet_range_skips():
    results = CrossValidator(seed=3, workers=1, dim_range=(1, 1), facet_range=(9, 9)).run_trials(5)
    assert all(result.status == SKIPPED for result in results)
    assert not any(result.status == AGREE for result in results)


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("CONTACT_PI1_SEED", "42")
    monkeypatch.setenv("CONTACT_PI1_WORKERS", "3")
    validator = CrossValidator()
    assert (validator.seed, validator.workers) == (42, 3)


def test_corpus_cones_under_seeded_unimodular_images():
    rng = random.Random(7)
    cones = good_corpus_cones()
    for trial in range(200):
        c = cones[trial % len(cones)]
        U = unimodular_from_ops(c.ambient_dim, random_elementary_ops(c.ambient_dim, rng))
        assert check_cone(c, U) == ""
        image = apply_unimodular(c, U)
        lerman = pi1_lerman(image)
        assert lerman.is_cyclic
        assert pi1_thmB(image).order == lerman.order == pi1_lerman(c).order


def test_two_hundred_trials_agree():
    summary = CrossValidator(seed=7, workers=1).run(200)
    assert summary["statistics"]["trials"] == 200
    assert summary["statistics"]["disagree"] == 0
    assert summary["statistics"]["agree"] + summary["statistics"]["skipped"] == 200
    assert summary["success"] is True
