from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import compass_formulas, models, sparse_models, star_free_formulas
from spacelogic.errors import BudgetExhausted, UnsupportedFragment
from spacelogic.generate import FormulaGenerator
from spacelogic.modelcheck import check
from spacelogic.models import Gap, PositionModel, remove_gap, truncate
from spacelogic.sat import (
    detect_fragment,
    in_positions_fragment,
    reduce_star_free,
    sat_positions,
    sat_star_free,
    satisfiable,
    validity,
)
from spacelogic.syntax import (
    And,
    Atom,
    Bottom,
    BoxS,
    Here,
    Move,
    Not,
    iff,
    implies,
    modal_degree,
    parse_formula,
)

OFFSETS = {"U": (0, 1), "D": (0, -1), "R": (1, 0), "L": (-1, 0)}


def holds(f, val, pos, cell):
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Atom):
        return (f.name, cell) in val
    if isinstance(f, Here):
        return pos.get(f.agent) == cell
    if isinstance(f, Not):
        return not holds(f.sub, val, pos, cell)
    if isinstance(f, And):
        return holds(f.left, val, pos, cell) and holds(f.right, val, pos, cell)
    dx, dy = OFFSETS[f.program.direction]
    return holds(f.body, val, pos, (cell[0] + dx, cell[1] + dy))


def brute_force_sat(f):
    """Enumerate every model over the degree-d diamond around the origin."""
    d = modal_degree(f)
    cells = [(x, y) for x in range(-d, d + 1) for y in range(-d, d + 1) if abs(x) + abs(y) <= d]
    slots = [(p, c) for p in ("p", "q") for c in cells]
    places = cells + [(d + 1, 0)]
    for bits in itertools.product((False, True), repeat=len(slots)):
        val = {s for s, on in zip(slots, bits) if on}
        for pi in places:
            if holds(f, val, {"i": pi}, (0, 0)):
                return True
    return False


tiny = st.recursive(
    st.sampled_from([Atom("p"), Atom("q"), Here("i"), Bottom()]),
    lambda sub: st.one_of(sub.map(Not), st.builds(And, sub, sub),
                          st.builds(BoxS, st.sampled_from("UDLR").map(Move), sub)),
    max_leaves=6,
).filter(lambda f: modal_degree(f) <= 1)


class TestStarFree:
    def test_reduce_examples(self):
        assert reduce_star_free(parse_formula("[U;R]p")) == parse_formula("[U][R]p")
        assert reduce_star_free(parse_formula("[U+R]p")) == parse_formula("[U]p & [R]p")
        assert reduce_star_free(parse_formula("[q?]p")) == implies(Atom("q"), Atom("p"))

    def test_nominal_instance_unsat(self):
        assert satisfiable(parse_formula("here(i) & [U]here(i)")).verdict == "unsat"

    def test_here_then_elsewhere(self):
        r = sat_star_free(parse_formula("here(i) & [U]~here(i)"))
        assert r.satisfiable and r.witness.position("i") == (0, 0)

    def test_one_atom_witness(self):
        r = sat_star_free(parse_formula("p & [R]~p"))
        assert r.satisfiable
        assert r.witness.holds("p", (0, 0)) and not r.witness.holds("p", (1, 0))
        assert r.witness.atoms == {"p"}

    def test_motion_formulas_are_reduced_first(self):
        assert satisfiable(parse_formula("[{i:up}]here(i) & here(i)")).verdict == "unsat"
        assert satisfiable(parse_formula("[{i:up}][U]here(i) & here(i)")).satisfiable

    def test_star_rejected(self):
        with pytest.raises(UnsupportedFragment):
            sat_star_free(parse_formula("[R*]p"))
        with pytest.raises(UnsupportedFragment):
            detect_fragment(parse_formula("[R*]p & p"))

    def test_cell_budget_gives_inconclusive(self):
        r = sat_star_free(parse_formula("[U][U][U]p"), budget_cells=3)
        assert r.verdict == "inconclusive"

    @settings(max_examples=40, deadline=None)
    @given(tiny)
    def test_matches_brute_force(self, f):
        assert sat_star_free(f).satisfiable == brute_force_sat(f)

    @settings(max_examples=150, deadline=None)
    @given(star_free_formulas(max_leaves=8))
    def test_witness_verifies(self, f):
        r = sat_star_free(f)
        assert r.verdict in ("sat", "unsat")
        if r.satisfiable:
            assert check(r.witness, r.position, f)
        else:
            assert sat_star_free(Not(f)).satisfiable  # an unsatisfiable formula has a valid negation

    @settings(max_examples=150, deadline=None)
    @given(st.data(), sparse_models(max_bound=10), star_free_formulas(max_leaves=8))
    def test_truncation_preserves_truth_at_origin(self, data, m, f):
        n = data.draw(st.integers(modal_degree(f), modal_degree(f) + 2))
        assert check(m, (0, 0), f) == check(truncate(m, n), (0, 0), f)

    @settings(max_examples=100, deadline=None)
    @given(st.data(), models())
    def test_reduce_preserves_truth(self, data, m):
        g = FormulaGenerator(data.draw(st.randoms(use_true_random=False)), kind="compound")
        f = g.formula(2, 10)
        pos = data.draw(st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
        assert check(m, pos, f) == check(m, pos, reduce_star_free(f))


class TestPositions:
    def test_fragment(self):
        assert in_positions_fragment(parse_formula("<R*>here(i)"))
        assert not in_positions_fragment(parse_formula("<R*>p"))
        assert not in_positions_fragment(parse_formula("[(R;R)*]here(i)"))

    def test_here(self):
        r = sat_positions(Here("i"))
        assert r.satisfiable and r.witness.as_dict() == {"i": (0, 0)}

    def test_strictly_right_and_up_unsat(self):
        assert sat_positions(parse_formula("<R><R*>here(i) & <U><U*>here(i)")).verdict == "unsat"

    def test_two_agents_on_the_axis(self):
        r = sat_positions(parse_formula("<R*>here(i) & <R*><R*>here(j)"))
        assert r.satisfiable and r.bound_used <= 2
        pos = r.witness.as_dict()
        assert pos["i"][1] == 0 and pos["i"][0] >= 0
        assert pos["j"][1] == 0 and pos["j"][0] >= 0

    def test_distance_needs_larger_bound(self):
        f = parse_formula("<R><R><R><R><R>here(i) & [R*]~here(j) & <L><L*>here(j)")
        r = sat_positions(f)
        assert r.satisfiable and check(r.witness_model(), (0, 0), f)

    def test_candidate_budget(self):
        f = parse_formula("<R><R*>here(i) & <U><U*>here(i)")
        assert sat_positions(f, budget_candidates=3).verdict == "inconclusive"

    @settings(max_examples=60, deadline=None)
    @given(compass_formulas(max_leaves=5).filter(in_positions_fragment))
    def test_witness_verifies(self, f):
        r = sat_positions(f, budget_candidates=20_000)
        if r.satisfiable:
            assert check(r.witness_model(), (0, 0), f)

    @settings(max_examples=100, deadline=None)
    @given(st.data(), st.integers(0, 3))
    def test_gap_removal_preserves_truth(self, data, m):
        rng = data.draw(st.randoms(use_true_random=False))
        f = FormulaGenerator(rng, agents=("i", "j", "k"), kind="positions").formula(m, 10)
        left = rng.randint(-6, 0)
        width = 2 * m + 1 + rng.randint(0, 4)
        right = left + width + 1
        outer = Gap("vertical", left + 1, right - 1)  # agent-free, width > 2m
        inner = outer.inner(m)
        pm = PositionModel.of({
            "i": (left - rng.randint(0, 2), rng.randint(-3, 3)),
            "j": (right + rng.randint(0, 2), rng.randint(-3, 3)),
            "k": (rng.choice([left, right]), rng.randint(-3, 3)),
        })
        out, rho = remove_gap(pm, inner)
        x = (rng.randint(left - 3, right + 3), rng.randint(-4, 4))
        assert check(pm.to_spatial(), x, f) == check(out.to_spatial(), rho(x), f)


class TestValidity:
    def test_examples(self):
        assert validity(parse_formula("p -> [U]<D>p"))
        assert validity(parse_formula("[U][R]p <-> [R][U]p"))
        assert not validity(Atom("p"))

    def test_positions_validity(self):
        assert validity(parse_formula("here(i) -> <R*>here(i)"))
        assert not validity(parse_formula("<R*>here(i)"))

    def test_inconclusive_raises(self):
        with pytest.raises(BudgetExhausted):
            validity(parse_formula("[U][U]p -> p"), budget_cells=2)

    def test_iff_of_equal_sides(self):
        f = parse_formula("[U;R]p & [q?]here(i)")
        assert validity(iff(f, reduce_star_free(f)))
