"""Random models, programs and formulas for probing and property tests.

Every generator takes a ``random.Random`` so runs are reproducible from a seed.
"""

from __future__ import annotations

import random

from .models import PositionModel, SpatialModel
from .syntax import (
    ACTIONS,
    BOTTOM,
    DIRECTIONS,
    TOP,
    And,
    Atom,
    BoxM,
    BoxS,
    Choice,
    Here,
    Move,
    Not,
    Seq,
    Star,
    Test,
    is_motion_program,
    joint,
)

KINDS = ("atomic", "compass", "compound", "motion", "positions")


def as_rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_model(bound: int, atoms=("p", "q"), agents=("i", "j"), seed=None,
                 density: float = 0.5, agent_range: int | None = None) -> SpatialModel:
    """An ``bound``-bounded model; each atom holds at each cell with probability ``density``.

    With the default density every model over the vocabulary is equally likely.
    ``agent_range`` places agents in a smaller box than the valuation.
    """
    rng = as_rng(seed)
    reach = bound if agent_range is None else min(agent_range, bound)
    positions = {a: (rng.randint(-reach, reach), rng.randint(-reach, reach)) for a in agents}
    valuation = {}
    for x in range(-bound, bound + 1):
        for y in range(-bound, bound + 1):
            here = {p for p in atoms if rng.random() < density}
            if here:
                valuation[(x, y)] = here
    return SpatialModel(positions, valuation, bound)


def random_position_model(agents, limit: int, seed=None) -> PositionModel:
    rng = as_rng(seed)
    return PositionModel.of(
        {a: (rng.randint(-limit, limit), rng.randint(-limit, limit)) for a in agents}
    )


def random_joint(agents, seed=None):
    rng = as_rng(seed)
    return joint({a: rng.choice(ACTIONS) for a in agents})


class FormulaGenerator:
    """Grows formulas with modal degree at most a given budget.

    ``kind`` selects the program language: ``atomic`` (single compass moves),
    ``compass`` (moves and their stars), ``compound`` (star-free programs with
    tests), ``motion`` (compound spatial programs plus motion programs) and
    ``positions`` (compass programs, no atoms).
    """

    def __init__(self, rng, atoms=("p", "q"), agents=("i", "j"), kind="atomic",
                 leaf_bias=0.25):
        if kind not in KINDS:
            raise ValueError(f"unknown kind {kind!r}")
        self.rng = as_rng(rng)
        self.atoms = tuple(atoms) if kind != "positions" else ()
        self.agents = tuple(agents)
        self.kind = kind
        self.leaf_bias = leaf_bias

    def leaf(self):
        rng = self.rng
        choices = [Atom(p) for p in self.atoms] + [Here(a) for a in self.agents]
        if rng.random() < 0.08 or not choices:
            return rng.choice([TOP, BOTTOM])
        return rng.choice(choices)

    def formula(self, degree: int, size: int = 12):
        rng = self.rng
        if size <= 1 or rng.random() < self.leaf_bias:
            return self.leaf()
        r = rng.random()
        if degree == 0 or r < 0.25:
            if rng.random() < 0.4:
                return Not(self.formula(degree, size - 1))
            half = max(1, (size - 1) // 2)
            return And(self.formula(degree, half), self.formula(degree, half))
        return self.boxed(degree, size - 1)

    def boxed(self, degree: int, size: int):
        rng = self.rng
        if self.kind in ("atomic", "positions", "compass"):
            prog = Move(rng.choice(DIRECTIONS))
            if self.kind != "atomic" and rng.random() < 0.5:
                prog = Star(prog)
            return BoxS(prog, self.formula(degree - 1, size - 1))
        test_budget = rng.randint(0, degree - 1) if rng.random() < 0.3 else 0
        body = self.formula(degree - 1 - test_budget, size // 2)
        if self.kind == "motion" and self.agents and rng.random() < 0.5:
            return BoxM(self.motion_program(test_budget, 3), body)
        return BoxS(self.spatial_program(test_budget, 3), body)

    def spatial_program(self, test_degree: int, depth: int):
        rng = self.rng
        r = rng.random()
        if depth <= 0 or r < 0.45:
            return Move(rng.choice(DIRECTIONS))
        if r < 0.65:
            return Seq(self.spatial_program(test_degree, depth - 1),
                       self.spatial_program(test_degree, depth - 1))
        if r < 0.85:
            return Choice(self.spatial_program(test_degree, depth - 1),
                          self.spatial_program(test_degree, depth - 1))
        return Test(self.formula(test_degree, 4))

    def motion_program(self, test_degree: int, depth: int):
        """A motion program with at least one joint action in it."""
        prog = self._motion_program(test_degree, depth)
        if not is_motion_program(prog):
            prog = Seq(prog, random_joint(self.agents, self.rng))
        return prog

    def _motion_program(self, test_degree: int, depth: int):
        rng = self.rng
        r = rng.random()
        if depth <= 0 or r < 0.5:
            return random_joint(self.agents, rng)
        if r < 0.7:
            return Seq(self._motion_program(test_degree, depth - 1),
                       self._motion_program(test_degree, depth - 1))
        if r < 0.88:
            return Choice(self._motion_program(test_degree, depth - 1),
                          self._motion_program(test_degree, depth - 1))
        return Test(self.formula(test_degree, 4))


def random_formula(seed=None, degree: int = 2, kind: str = "atomic", size: int = 12,
                   atoms=("p", "q"), agents=("i", "j")):
    return FormulaGenerator(as_rng(seed), atoms, agents, kind).formula(degree, size)
