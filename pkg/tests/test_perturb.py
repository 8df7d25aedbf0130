from fractions import Fraction as F

import pytest

from corpus import CORPUS_BY_NAME
from extremenu.extremality import is_extreme_finite
from extremenu.model import extended_menu, validate_scenario
from extremenu.perturb import (
    PerturbationError,
    hausdorff_bound,
    is_general_position,
    perturb_to_extreme,
)
from extremenu.presets import simplex_space
from extremenu.model import unrestricted_cone


def test_few_points_always_general():
    assert is_general_position([(0, 0, 0), (1, 0, 0), (0, 1, 0)]).general


def test_pyramid_base_violates_general_position():
    case = CORPUS_BY_NAME["pyramid_delta3"]
    rep = is_general_position(case.scenario.menu.items)
    assert not rep.general
    normal, offset = rep.violating_hyperplane
    # witness plane contains all violating points
    from extremenu.geometry import as_vec, dot

    for p in rep.violating_points:
        assert dot(as_vec(normal), p) == offset
    assert len(rep.violating_points) == 4


def test_simplex_vertices_general():
    case = CORPUS_BY_NAME["delta3_dictator"]
    s3 = case.scenario.space
    assert is_general_position(s3.poly.points).general


def test_perturb_idempotent_on_extreme():
    case = CORPUS_BY_NAME["pyramid_delta3"]
    sc = case.scenario
    res = perturb_to_extreme(sc.menu, sc.space, sc.cone, F(1, 100), seed=5)
    assert res.already_extreme
    assert res.menu == sc.menu.items
    assert all(all(c == 0 for c in mv) for mv in res.moved)


def test_perturb_prism_certified_extreme():
    case = CORPUS_BY_NAME["prism_delta3"]
    sc = case.scenario
    res = perturb_to_extreme(sc.menu, sc.space, sc.cone, F(1, 20), seed=3)
    assert not res.already_extreme
    assert res.extremality.extreme
    assert len(res.menu) == len(sc.menu.items)
    assert hausdorff_bound(sc.menu.items, res.menu) <= F(1, 400)  # delta^2
    # the result is independently certified, not inferred from positions
    em = extended_menu(validate_scenario(sc.space, sc.cone, res.menu))
    assert is_extreme_finite(em, sc.space).extreme


def test_perturb_rejects_d2():
    case = CORPUS_BY_NAME["delta2_strike_quadrilateral"]
    sc = case.scenario
    with pytest.raises(PerturbationError, match="d = 2"):
        perturb_to_extreme(sc.menu, sc.space, sc.cone, F(1, 20), seed=1)


def test_perturb_rejects_non_exhaustive():
    space = simplex_space(3)
    cone = unrestricted_cone(3)
    sc = validate_scenario(space, cone, [(F(1, 4), F(1, 4), F(1, 4)),
                                         (F(1, 8), F(1, 8), F(1, 8)),
                                         (F(1, 2), F(1, 8), F(1, 8)),
                                         (F(1, 8), F(1, 2), F(1, 8))])
    with pytest.raises(PerturbationError, match="exhaustive"):
        perturb_to_extreme(sc.menu, sc.space, sc.cone, F(1, 20), seed=1)


def test_perturb_rejects_nonpositive_delta():
    case = CORPUS_BY_NAME["prism_delta3"]
    sc = case.scenario
    with pytest.raises(PerturbationError):
        perturb_to_extreme(sc.menu, sc.space, sc.cone, 0, seed=1)


def test_perturb_deterministic():
    case = CORPUS_BY_NAME["prism_delta3"]
    sc = case.scenario
    a = perturb_to_extreme(sc.menu, sc.space, sc.cone, F(1, 20), seed=11)
    b = perturb_to_extreme(sc.menu, sc.space, sc.cone, F(1, 20), seed=11)
    assert a.menu == b.menu and a.retries == b.retries
    c = perturb_to_extreme(sc.menu, sc.space, sc.cone, F(1, 20), seed=12)
    assert c.extremality.extreme
