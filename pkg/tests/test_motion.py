from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import joints, models
from spacelogic.errors import BudgetExhausted, UnsupportedFragment
from spacelogic.generate import FormulaGenerator
from spacelogic.modelcheck import check
from spacelogic.models import SpatialModel
from spacelogic.motion import (
    Neighborhood,
    check_motion,
    check_sees,
    expand_coalition,
    inverse_move,
    joint_actions,
    red,
    simulate,
)
from spacelogic.sat import reduce_star_free
from spacelogic.syntax import (
    TOP,
    Atom,
    BoxM,
    BoxS,
    Coalition,
    Here,
    Move,
    Not,
    Sees,
    Test as Guard,
    conj,
    disj,
    is_static,
    iterate_box,
    joint,
    modal_degree,
    parse_formula,
    parse_program,
)

I_AT_ORIGIN = SpatialModel({"i": (0, 0)})


class TestInverse:
    def test_examples(self):
        assert inverse_move("i", joint({"i": "up"})) == Move("D")
        assert inverse_move("i", joint({"i": "skip"})) == Guard(TOP)
        assert inverse_move("i", joint({"i": "right"})) == Move("L")
        assert inverse_move("i", joint({"j": "right"})) == Guard(TOP)


class TestRed:
    def test_examples(self):
        assert red(parse_formula("[{i:up}]p")) == Atom("p")
        assert red(parse_formula("[{i:up}]here(i)")) == parse_formula("[D]here(i)")
        assert red(parse_formula("[{i:up}][R]here(i)")) == parse_formula("[R][D]here(i)")

    def test_skip_leaves_a_trivial_test(self):
        out = reduce_star_free(red(parse_formula("[{i:stay}]here(i)")))
        assert out == reduce_star_free(BoxS(Guard(TOP), Here("i")))

    def test_output_is_static(self):
        f = parse_formula("[{i:up};{j:left}+p?]<<i>>(here(j) & [U]p)")
        assert is_static(red(f))

    def test_star_rejected(self):
        with pytest.raises(UnsupportedFragment):
            red(parse_formula("[{i:up}][R*]here(i)"))

    @settings(max_examples=300, deadline=None)
    @given(st.data(), models())
    def test_sound(self, data, m):
        rng = data.draw(st.randoms(use_true_random=False))
        f = FormulaGenerator(rng, kind="motion").formula(2, 10)
        pos = data.draw(st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
        assert check_motion(m, pos, f) == check(m, pos, reduce_star_free(red(f, m.agents)))

    @settings(max_examples=80, deadline=None)
    @given(st.data(), models())
    def test_sound_with_coalitions(self, data, m):
        rng = data.draw(st.randoms(use_true_random=False))
        body = FormulaGenerator(rng, kind="motion").formula(1, 6)
        members = data.draw(st.frozensets(st.sampled_from(("i", "j"))))
        f = Coalition(members, body)
        pos = data.draw(st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
        assert check_motion(m, pos, f) == check(m, pos, reduce_star_free(red(f, m.agents)))


class TestCheckMotion:
    def test_update_then_check(self):
        assert check_motion(I_AT_ORIGIN, (0, 1), parse_formula("[{i:up}]here(i)"))
        assert not check_motion(I_AT_ORIGIN, (0, 0), parse_formula("[{i:up}]here(i)"))

    def test_up_then_down(self):
        assert check_motion(I_AT_ORIGIN, (0, 0), parse_formula("[{i:up};{i:down}]here(i)"))

    def test_test_is_anchored(self):
        f = parse_formula("[{i:up};here(i)?]false")
        # the test fails at the anchor (i has left it), so the box holds vacuously
        assert check_motion(I_AT_ORIGIN, (0, 0), f)
        assert not check_motion(I_AT_ORIGIN, (0, 1), f)

    @given(st.data(), models())
    def test_skip_is_identity(self, data, m):
        f = FormulaGenerator(data.draw(st.randoms(use_true_random=False)), kind="atomic").formula(2, 8)
        pos = data.draw(st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
        stay = BoxM(joint({"i": "skip", "j": "skip"}), f)
        assert check_motion(m, pos, stay) == check_motion(m, pos, f)

    @given(st.data(), models(), joints)
    def test_box_is_functional(self, data, m, delta):
        f = FormulaGenerator(data.draw(st.randoms(use_true_random=False)), kind="motion").formula(1, 6)
        pos = data.draw(st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
        assert check_motion(m, pos, BoxM(delta, Not(f))) == (not check_motion(m, pos, BoxM(delta, f)))


class TestCoalition:
    def test_single_agent(self):
        f = expand_coalition({"i"}, Here("i"), {"i"})
        expected = disj(*[BoxM(joint({"i": a}), Here("i"))
                          for a in ("up", "down", "left", "right", "skip")])
        assert f == expected

    def test_empty_coalition(self):
        f = expand_coalition(set(), Atom("p"), {"i", "j"})
        assert f == disj(conj(*[BoxM(d, Atom("p")) for d in joint_actions({"i", "j"})]))

    def test_shape(self):
        assert len(joint_actions({"i", "j"})) == 25

    @given(models(), st.tuples(st.integers(-3, 3), st.integers(-3, 3)))
    def test_outsiders_cannot_place_an_agent(self, m, pos):
        assert not check_motion(m, pos, Coalition(frozenset({"j"}), Here("i")))
        assert not check_motion(m, pos, Coalition(frozenset(), Here("i")))

    def test_agent_reaches_adjacent_cell(self):
        m = SpatialModel({"i": (1, 0), "j": (5, 5)})
        assert check_motion(m, (0, 0), Coalition(frozenset({"i"}), Here("i")))
        assert not check_motion(m, (-1, 0), Coalition(frozenset({"i"}), Here("i")))


def brute_force_sees(model, agent, k, body):
    """Vary every cell within reach of the body (outside D) and every outsider's position."""
    cx, cy = model.position(agent)
    hood = Neighborhood((cx, cy), k)
    d = modal_degree(body)
    reach = [(cx + dx, cy + dy) for dx in range(-d, d + 1) for dy in range(-d, d + 1)
             if abs(dx) + abs(dy) <= d and (cx + dx, cy + dy) not in hood]
    atoms = sorted({"p", "q"} | model.atoms)
    slots = [(p, c) for p in atoms for c in reach]
    outsiders = [a for a in sorted(model.agents) if model.position(a) not in hood]
    far = (cx + k + d + 5, cy)
    for bits in itertools.product((False, True), repeat=len(slots)):
        val = {c: set(s) for c, s in model.valuation.items()}
        for (p, c), on in zip(slots, bits):
            cell = val.setdefault(c, set())
            (cell.add if on else cell.discard)(p)
        for places in itertools.product(reach + [far], repeat=len(outsiders)):
            pos = model.positions
            pos.update(zip(outsiders, places))
            if not check(SpatialModel(pos, val), (cx, cy), body):
                return False
    return True


class TestSees:
    def test_top(self):
        assert check_sees(I_AT_ORIGIN, "i", 0, TOP)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_atom_beyond_range_is_unknown(self, k):
        m = SpatialModel({"i": (0, 0)}, {(0, k + 1): {"p"}})
        assert not check_sees(m, "i", k, iterate_box("U", k + 1, Atom("p")))
        assert check_sees(m, "i", k + 1, iterate_box("U", k + 1, Atom("p")))

    def test_agent_above(self):
        m = SpatialModel({"i": (0, 0), "j": (0, 1)})
        assert check_sees(m, "i", 1, parse_formula("[U]here(j)"))
        assert not check_sees(m, "i", 0, parse_formula("[U]here(j)"))
        far = SpatialModel({"i": (0, 0), "j": (0, 4)})
        # j is outside the neighbourhood, so it cannot be seen above i
        assert check_sees(far, "i", 1, parse_formula("~[U]here(j)"))

    def test_independent_of_evaluation_point(self):
        m = SpatialModel({"i": (1, 0), "j": (0, 1)}, {(2, 0): {"p"}})
        f = Sees("i", 1, parse_formula("[R]p & [L][U]here(j)"))
        assert {check_motion(m, c, f) for c in [(0, 0), (5, -3), (1, 0)]} == {True}

    def test_nested_and_budget(self):
        with pytest.raises(UnsupportedFragment):
            check_sees(I_AT_ORIGIN, "i", 1, Sees("i", 0, TOP))
        with pytest.raises(BudgetExhausted):
            check_sees(I_AT_ORIGIN, "i", 0, parse_formula("[U][U][U](p & q)"), max_variants=2)

    @settings(max_examples=80, deadline=None)
    @given(st.data(), models(max_bound=2, atoms=("p",)), st.integers(0, 1))
    def test_matches_brute_force(self, data, m, k):
        rng = data.draw(st.randoms(use_true_random=False))
        body = FormulaGenerator(rng, atoms=("p",), kind="atomic").formula(2, 8)
        assert check_sees(m, "i", k, body) == brute_force_sees(m, "i", k, body)

    @settings(max_examples=60, deadline=None)
    @given(st.data(), models(), st.integers(0, 2))
    def test_perceived_facts_hold(self, data, m, k):
        # S is factive: the actual model is one of the indistinguishable ones
        rng = data.draw(st.randoms(use_true_random=False))
        body = FormulaGenerator(rng, kind="atomic").formula(2, 8)
        if check_sees(m, "i", k, body):
            assert check(m, m.position("i"), body)


class TestSimulate:
    def test_single_step(self):
        trace, blocked = simulate(I_AT_ORIGIN, parse_program("{i:up}"))
        assert not blocked and trace[-1][1].position("i") == (0, 1)

    def test_all_skip(self):
        m = SpatialModel({"i": (0, 0), "j": (2, 1)})
        trace, blocked = simulate(m, parse_program("{i:stay,j:stay};{i:stay,j:stay}"))
        assert not blocked and all(s == m for _, s in trace)

    def test_blocked_test(self):
        trace, blocked = simulate(I_AT_ORIGIN, parse_program("{i:up};here(i)?"))
        assert blocked and trace[-1][1].position("i") == (0, 1)

    def test_choice_falls_through(self):
        trace, blocked = simulate(I_AT_ORIGIN, parse_program("(false?;{i:up})+{i:left}"))
        assert not blocked and trace[-1][1].position("i") == (-1, 0)
