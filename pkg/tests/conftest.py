from __future__ import annotations

from hypothesis import strategies as st

from spacelogic.models import SpatialModel
from spacelogic.syntax import (
    BOTTOM,
    DIRECTIONS,
    And,
    Atom,
    BoxM,
    BoxS,
    Choice,
    Coalition,
    Here,
    Move,
    Not,
    Sees,
    Seq,
    Star,
    Test,
    joint,
)

ATOMS = ("p", "q")
AGENTS = ("i", "j")

moves = st.sampled_from(DIRECTIONS).map(Move)
leaves = st.one_of(
    st.sampled_from(ATOMS).map(Atom),
    st.sampled_from(AGENTS).map(Here),
    st.just(BOTTOM),
)


def compass_formulas(max_leaves=12):
    """Formulas over single moves and their stars."""
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(Not),
            st.builds(And, sub, sub),
            st.builds(BoxS, moves, sub),
            st.builds(BoxS, moves.map(Star), sub),
        ),
        max_leaves=max_leaves,
    )


def star_free_formulas(max_leaves=10):
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            sub.map(Not),
            st.builds(And, sub, sub),
            st.builds(BoxS, moves, sub),
        ),
        max_leaves=max_leaves,
    )


def spatial_programs(formulas):
    return st.recursive(
        st.one_of(moves, formulas.map(Test)),
        lambda sub: st.one_of(
            st.builds(Seq, sub, sub),
            st.builds(Choice, sub, sub),
        ),
        max_leaves=4,
    )


joints = st.fixed_dictionaries(
    {a: st.sampled_from(("up", "down", "left", "right", "skip")) for a in AGENTS}
).map(joint)


def any_formulas(max_leaves=8):
    """Every constructor of the grammar, including motion, perception and coalitions.

    Motion boxes always contain a joint action: a box over tests alone is
    written the same way for both program sorts and parses as a spatial box.
    """

    def extend(sub):
        tests = sub.map(Test)
        progs = st.one_of(
            moves, tests,
            st.builds(Seq, moves, st.one_of(moves, tests)),
            st.builds(Choice, st.one_of(moves, tests), moves),
        )
        mprogs = st.one_of(
            joints,
            st.builds(Seq, joints, st.one_of(joints, tests)),
            st.builds(Choice, st.one_of(joints, tests), joints),
        )
        return st.one_of(
            sub.map(Not),
            st.builds(And, sub, sub),
            st.builds(BoxS, progs, sub),
            st.builds(BoxS, moves.map(Star), sub),
            st.builds(BoxM, mprogs, sub),
            st.builds(Sees, st.sampled_from(AGENTS), st.integers(0, 3), sub),
            st.builds(Coalition, st.frozensets(st.sampled_from(AGENTS)), sub),
        )

    return st.recursive(leaves, extend, max_leaves=max_leaves)


@st.composite
def models(draw, max_bound=2, atoms=ATOMS, agents=AGENTS):
    n = draw(st.integers(0, max_bound))
    coord = st.integers(-n, n)
    positions = {a: (draw(coord), draw(coord)) for a in agents}
    valuation = {}
    for x in range(-n, n + 1):
        for y in range(-n, n + 1):
            here = draw(st.frozensets(st.sampled_from(atoms)))
            if here:
                valuation[(x, y)] = set(here)
    return SpatialModel(positions, valuation, n)


@st.composite
def sparse_models(draw, max_bound=10, atoms=ATOMS, agents=AGENTS):
    """Wide models with a few marked cells; cheaper to draw than a full grid."""
    n = draw(st.integers(0, max_bound))
    coord = st.integers(-n, n)
    positions = {a: (draw(coord), draw(coord)) for a in agents}
    marks = draw(st.lists(st.tuples(st.sampled_from(atoms), coord, coord), max_size=40))
    valuation = {}
    for p, x, y in marks:
        valuation.setdefault((x, y), set()).add(p)
    return SpatialModel(positions, valuation, n)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
