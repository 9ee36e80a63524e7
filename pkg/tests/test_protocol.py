import numpy as np
import pytest

from stabagree.adversary import Scenario, enumerate_runs, max_drops
from stabagree.checker import Condition, check_condition
from stabagree.formula import PrimitiveValueFormula, enumerate_phi, parse
from stabagree.model import ConfigurationError
from stabagree.protocol import ValueSelectionStrategy, assign_choices, parse_strategy, select_value
from stabagree.semantics import eval_system, mutually_known_primitive
from conftest import find_run

PHI = PrimitiveValueFormula


@pytest.mark.parametrize("name, phi, expected", [
    ("min", {1: 0, 2: 1}, 0),
    ("max", {1: 0, 2: 1}, 1),
    ("min", {2: 1}, 1),
    ("custom:2,0,1", {1: 0, 2: 1}, 0),
    ("custom:2,0,1", {1: 2, 2: 1}, 2),
])
def test_select_value(name, phi, expected):
    assert select_value(parse_strategy(name), PHI(phi)) == expected


@pytest.mark.parametrize("name", ["min", "max", "custom:1,2,0"])
def test_selected_value_is_always_present(name):
    strategy = parse_strategy(name)
    for phi in enumerate_phi(3, 3):
        assert strategy.select(phi) in phi.values


def test_strategy_parsing():
    assert str(parse_strategy("custom: 1,0")) == "custom:1,0"
    for bad in ["median", "custom:", "custom:1,1", "custom:a"]:
        with pytest.raises(ConfigurationError):
            parse_strategy(bad)
    with pytest.raises(ConfigurationError):
        parse_strategy("custom:1,0").check_values(3)


def test_no_choice_at_time_zero(tg_system):
    assert (tg_system.choices[:, 0] == -1).all()


def test_choice_after_two_rounds(tg_system):
    run = find_run(tg_system, (0, 1), [{(1, 2)}, {(2, 1)}, set()])
    assert tg_system.runs[run].states[2].choices[1] == 0


def test_single_agent_chooses_own_input_immediately():
    system = enumerate_runs(Scenario(1, 3, "all", max_drops(1), horizon=1))
    for r, run in enumerate(system.runs):
        assert run.states[0].choices == (run.input[0],)


def test_choices_only_where_mutual_knowledge(tg_system):
    for r, t in tg_system.points():
        for a in (1, 2):
            star = mutually_known_primitive(tg_system, a, (r, t))
            chosen = tg_system.choices[r, t, a - 1]
            assert (chosen == -1) == (star is None)
            if star is not None:
                assert chosen == min(star.values)


def test_choice_determinism_valuation(tg_system):
    assert check_condition(tg_system, Condition.CHOICE_DETERMINISM).passed


def test_choices_constant_after_fixpoint(tg_system, tri_system):
    for system in (tg_system, tri_system):
        for r, run in enumerate(system.runs):
            tail = system.choices[r, run.fixpoint_time:]
            assert (tail == tail[0]).all()


def test_strategy_swap_changes_only_agreed_value(tri_system, tri_system_max):
    from stabagree.checker import agreement_value, verify_theorem
    a = verify_theorem(tri_system)
    b = verify_theorem(tri_system_max)
    assert a.all_passed and b.all_passed
    differ = 0
    for r, run in enumerate(tri_system.runs):
        lo, hi = agreement_value(tri_system, r), agreement_value(tri_system_max, r)
        assert lo <= hi
        differ += lo != hi
    assert differ > 0


def test_guard_ignores_existing_choices(tg_system):
    # recomputing from a system that already carries choices changes nothing
    again = assign_choices(tg_system, parse_strategy("min"))
    assert np.array_equal(again, tg_system.choices)
