import random
from fractions import Fraction as F

import pytest

from corpus import CORPUS_BY_NAME
from extremenu import applications as apps
from extremenu.applications import (
    TypeSample,
    delegation_classify,
    dominance_check,
    expected_principal_utility,
    force_exhaustive,
    genericity_experiment,
    make_type_sample,
    monopoly_nudge,
    monopoly_pricing_analysis,
    seeded_type_sample,
    veto_undominated,
)
from extremenu.exhaustive import is_exhaustive
from extremenu.model import (
    ConstantObjective,
    Menu,
    ScenarioError,
    extended_menu,
    unrestricted_cone,
    validate_scenario,
)
from extremenu.presets import monopoly_cone, monopoly_space, simplex_space


# -- delegation -----------------------------------------------------------


def test_dictator_menu():
    rep = delegation_classify(CORPUS_BY_NAME["delta3_dictator"].scenario)
    assert rep.kind == "dictates" and rep.extreme


def test_strike_triangle_extreme():
    rep = delegation_classify(CORPUS_BY_NAME["delta2_strike_triangle"].scenario)
    assert rep.kind == "grants_strike" and rep.menu_size == 3 and rep.extreme


def test_strike_quadrilateral_not_extreme():
    rep = delegation_classify(CORPUS_BY_NAME["delta2_strike_quadrilateral"].scenario)
    assert rep.kind == "grants_strike" and not rep.extreme


def test_prism_grants_strike_not_extreme():
    rep = delegation_classify(CORPUS_BY_NAME["prism_delta3"].scenario)
    assert rep.kind == "grants_strike" and not rep.extreme
    assert rep.source == "deformation-system"


def test_floating_menu_neither():
    rep = delegation_classify(CORPUS_BY_NAME["delta2_floating_triangle"].scenario)
    assert rep.kind == "neither" and not rep.extreme


def test_delegation_requires_simplex():
    with pytest.raises(ScenarioError):
        delegation_classify(CORPUS_BY_NAME["posted_price_1_2"].scenario)


# -- monopoly pricing --------------------------------------------------------


def test_posted_price_margins():
    for p in (F(1, 4), F(1, 2), F(3, 4)):
        name = f"posted_price_{p.numerator}_{p.denominator}"
        analysis = monopoly_pricing_analysis(CORPUS_BY_NAME[name].scenario)
        assert analysis.gradients == ((p,),)
        assert analysis.delta_margin == min(p, 1 - p)
        assert analysis.undominated_sufficient


def test_three_item_menu_two_gradients():
    analysis = monopoly_pricing_analysis(CORPUS_BY_NAME["monopoly_three_item"].scenario)
    assert analysis.gradients == ((F(1, 4),), (F(3, 4),))
    assert analysis.delta_margin == F(1, 4)


def test_free_good_inconclusive():
    analysis = monopoly_pricing_analysis(CORPUS_BY_NAME["monopoly_free_good"].scenario)
    assert analysis.delta_margin == 0
    assert not analysis.undominated_sufficient


def test_absorbed_item_does_not_distort_pricing():
    # the overpriced item vanishes from the schedule before gradients are read
    analysis = monopoly_pricing_analysis(CORPUS_BY_NAME["figa1_monopoly_absorbed"].scenario)
    assert analysis.gradients == ((F(1, 4),), (F(3, 4),))


def test_gradients_stay_in_unit_interval_random():
    rng = random.Random(23)
    space = monopoly_space(2, 1)
    cone = monopoly_cone(2)
    for _ in range(30):
        items = {(F(0),) * 3}
        for _ in range(rng.randrange(1, 5)):
            items.add(tuple(F(rng.randrange(0, 9), 8) for _ in range(3)))
        sc = validate_scenario(space, cone, sorted(items))
        analysis = monopoly_pricing_analysis(sc)
        for g in analysis.gradients:
            assert all(0 <= gi <= 1 for gi in g)


# -- nudge ---------------------------------------------------------------------


def test_nudge_free_good():
    rep = monopoly_nudge(CORPUS_BY_NAME["monopoly_free_good"].scenario, F(1, 10), F(1, 20))
    items = dict((tuple(p[:1]), p[1]) for p in rep.scenario.menu.items)
    assert items[(F(1),)] == F(1, 20)
    assert rep.margin > 0


def test_nudge_posted_price_arithmetic():
    rep = monopoly_nudge(CORPUS_BY_NAME["posted_price_1_2"].scenario, F(1, 10), F(1, 100))
    items = dict((tuple(p[:1]), p[1]) for p in rep.scenario.menu.items)
    assert items[(F(1),)] == F(9, 20) + F(1, 100)  # (1-eps) p + delta


def test_nudge_displacement_bound_shrinks_with_parameters():
    sc = CORPUS_BY_NAME["posted_price_1_2"].scenario
    b1 = monopoly_nudge(sc, F(1, 10), F(1, 100)).displacement_bound
    b2 = monopoly_nudge(sc, F(1, 100), F(1, 1000)).displacement_bound
    assert b2 < b1


def test_nudge_margin_floor():
    sc = CORPUS_BY_NAME["monopoly_three_item"].scenario
    eps, delta = F(1, 10), F(1, 20)
    rep = monopoly_nudge(sc, eps, delta)
    assert rep.margin >= min(delta, eps - delta)


def test_nudge_parameter_order_enforced():
    sc = CORPUS_BY_NAME["posted_price_1_2"].scenario
    with pytest.raises(ScenarioError):
        monopoly_nudge(sc, F(1, 20), F(1, 10))


# -- veto bargaining --------------------------------------------------------


def veto_scenario(menu):
    space = simplex_space(2, veto=(0, 0))
    return validate_scenario(space, unrestricted_cone(2), menu,
                             ConstantObjective(v=(F(1), F(2))))


def test_veto_verdicts():
    assert veto_undominated(veto_scenario([(0, 0), (0, 1)]))
    assert not veto_undominated(veto_scenario([(0, 0)]))
    assert not veto_undominated(veto_scenario([(0, 0), (1, 0)]))


def test_veto_requires_unique_argmax():
    space = simplex_space(2, veto=(0, 0))
    sc = validate_scenario(space, unrestricted_cone(2), [(0, 0), (0, 1)],
                           ConstantObjective(v=(F(1), F(1))))
    with pytest.raises(ScenarioError, match="unique"):
        veto_undominated(sc)


def test_veto_domination_exhibited():
    sc0 = veto_scenario([(0, 0)])
    sc1 = veto_scenario([(0, 0), (0, 1)])
    sample = seeded_type_sample(sc0.cone, 100, seed=4)
    rep = dominance_check(sc0.menu, sc1.menu, sc0.objective, sample, sc0.cone)
    assert rep.dominates
    assert rep.counterexample_types == ()
    assert rep.sample_only


# -- evaluation ---------------------------------------------------------------


def test_posted_price_revenue_enumeration():
    # valuations w/10 for w = 1..10; the tie at w = 5 resolves to no-trade by
    # the lexicographic rule, so exactly five types buy at price 1/2.
    sc = CORPUS_BY_NAME["posted_price_1_2"].scenario
    entries = [((F(w, 10), F(-1)), F(1, 10)) for w in range(1, 11)]
    sample = make_type_sample(entries, sc.cone)
    # independent oracle: direct enumeration of buyers
    buyers = [w for w in range(1, 11) if F(w, 10) * 1 - F(1, 2) > 0]
    expected = F(len(buyers), 10) * F(1, 2)
    assert expected == F(1, 4)
    value = expected_principal_utility(sc.menu, sc.objective, sample, sc.cone)
    assert value == expected


def test_dictator_menu_value():
    space = simplex_space(2)
    sc = validate_scenario(space, unrestricted_cone(2), [(1, 0)],
                           ConstantObjective(v=(F(3), F(1))))
    sample = seeded_type_sample(sc.cone, 10, seed=9)
    assert expected_principal_utility(sc.menu, sc.objective, sample, sc.cone) == 3


def test_empty_trade_menu_zero_revenue():
    sc = CORPUS_BY_NAME["posted_price_1_2"].scenario
    menu = Menu(items=((F(0), F(0)),))
    sample = seeded_type_sample(sc.cone, 16, seed=2)
    assert expected_principal_utility(menu, sc.objective, sample, sc.cone) == 0


def test_type_outside_cone_rejected():
    sc = CORPUS_BY_NAME["posted_price_1_2"].scenario
    sample = TypeSample(entries=(((F(0), F(1)), F(1)),))  # upward type: invalid
    with pytest.raises(ScenarioError):
        expected_principal_utility(sc.menu, sc.objective, sample, sc.cone)


def test_identical_menus_no_domination():
    sc = CORPUS_BY_NAME["posted_price_1_2"].scenario
    sample = seeded_type_sample(sc.cone, 50, seed=13)
    rep = dominance_check(sc.menu, sc.menu, sc.objective, sample, sc.cone)
    assert not rep.dominates and rep.counterexample_types == ()


def test_posted_price_revenues_cross():
    # prices 1/4 and 1/2 each win somewhere on a valuation grid
    space = monopoly_space(1, 1)
    cone = monopoly_cone(1)
    m_cheap = Menu(items=((F(0), F(0)), (F(1), F(1, 4))))
    m_dear = Menu(items=((F(0), F(0)), (F(1), F(1, 2))))
    obj = ConstantObjective(v=(F(0), F(1)))
    entries = [((F(w, 10), F(-1)), F(1, 10)) for w in range(1, 11)]
    sample = make_type_sample(entries, cone)
    a = dominance_check(m_cheap, m_dear, obj, sample, cone)
    b = dominance_check(m_dear, m_cheap, obj, sample, cone)
    assert not a.dominates and not b.dominates
    assert a.counterexample_types and b.counterexample_types


# -- sampling and the experiment harness -----------------------------------


def test_make_type_sample_validates_weights():
    cone = unrestricted_cone(2)
    with pytest.raises(ScenarioError, match="sum"):
        make_type_sample([((1, 0), F(1, 2))], cone)


def test_force_exhaustive_produces_exhaustive_menus():
    rng = random.Random(31)
    space = simplex_space(3)
    cone = unrestricted_cone(3)
    for i in range(20):
        items = apps.sample_menu("simplex", 3, 5, apps._instance_rng(55, i))
        items = force_exhaustive(items, space, cone)
        sc = validate_scenario(space, cone, dict.fromkeys(tuple(p) for p in items))
        assert is_exhaustive(extended_menu(sc), space).exhaustive


def test_experiment_d3_general_position_fraction_one():
    summary = genericity_experiment("simplex", 3, 6, 25, seed=101)
    assert summary.exhaustive_after_forcing >= 20
    assert summary.extreme == summary.exhaustive_after_forcing
    assert summary.mean_nullity == 0


def test_experiment_d2_strike_quads_fraction_zero():
    summary = genericity_experiment("simplex", 2, 4, 25, seed=7)
    # size-4 strike menus in the plane are never extreme
    assert summary.extreme <= summary.exhaustive_after_forcing
    # some instances may collapse to 3 essential items; none with 4 are extreme
    assert summary.extreme_fraction < 1


def test_experiment_deterministic():
    a = genericity_experiment("cube", 3, 5, 10, seed=42)
    b = genericity_experiment("cube", 3, 5, 10, seed=42)
    assert a == b


def test_expected_utility_linear_under_minkowski_average():
    # value(avg menu) = avg of values when no sample type is tied on either
    # summand (ties are excluded by filtering the sample)
    import random as _random

    space = monopoly_space(1, 1)
    cone = monopoly_cone(1)
    obj = ConstantObjective(v=(F(0), F(1)))
    rng = _random.Random(64)
    checked = 0
    for _ in range(20):
        m1 = sorted({(F(0), F(0))} | {
            (F(rng.randrange(0, 17), 16), F(rng.randrange(0, 17), 16))
            for _ in range(rng.randrange(1, 4))})
        m2 = sorted({(F(0), F(0))} | {
            (F(rng.randrange(0, 17), 16), F(rng.randrange(0, 17), 16))
            for _ in range(rng.randrange(1, 4))})
        avg = sorted({tuple((a + b) / 2 for a, b in zip(p, q)) for p in m1 for q in m2})
        menus = [Menu(items=tuple(m)) for m in (m1, m2, avg)]
        entries = []
        for w in range(1, 17):
            theta = (F(w, 16), F(-1))
            # exclude types tied on either summand
            tied = False
            for m in (m1, m2):
                vals = sorted({sum(a * b for a, b in zip(item, theta)) for item in m})
                if len(vals) != len(m):
                    tied = True
            if not tied:
                entries.append(theta)
        if not entries:
            continue
        w = F(1, len(entries))
        sample = TypeSample(entries=tuple((t, w) for t in entries))
        v1 = expected_principal_utility(menus[0], obj, sample, cone)
        v2 = expected_principal_utility(menus[1], obj, sample, cone)
        va = expected_principal_utility(menus[2], obj, sample, cone)
        assert va == (v1 + v2) / 2
        checked += 1
    assert checked >= 10
