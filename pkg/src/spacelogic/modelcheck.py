"""Model checking compass formulas over bounded spatial models.

Truth of a formula of degree ``d`` in an ``n``-bounded model does not change
once a coordinate leaves the window ``[-(n+d+1), n+d+1]``: the column just
outside is bisimilar to its inner neighbour up to depth ``d``.  So each
subformula gets a finite boolean table over its own window, filled bottom-up,
and every lookup clamps coordinates into the window of the subformula it
reads.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import UnsupportedFragment
from .models import SpatialModel
from .syntax import (
    And,
    Atom,
    Bottom,
    BoxS,
    Choice,
    Formula,
    Here,
    Move,
    Not,
    Seq,
    Star,
    Test,
    enumerate_subformulas,
    expand_programs,
    is_static,
    modal_degree,
    render_formula,
)

OFFSETS = {"U": (0, 1), "D": (0, -1), "R": (1, 0), "L": (-1, 0)}


def clamp(z: int, n: int, d: int) -> int:
    """Clamp ``z`` into ``[-(n+d+1), n+d+1]``."""
    w = n + d + 1
    return max(-w, min(w, z))


def successors(pos, direction) -> tuple:
    """The unique successor of ``pos`` under a compass move."""
    if isinstance(direction, Move):
        direction = direction.direction
    dx, dy = OFFSETS[direction]
    return (pos[0] + dx, pos[1] + dy)


@lru_cache(maxsize=4096)
def _clamped_index(w_src: int, w_out: int, shift: int) -> np.ndarray:
    """Row indices into a table of half-width ``w_src`` for coordinates
    ``-w_out+shift .. w_out+shift``, clamped into that table's window."""
    z = np.arange(-w_out, w_out + 1) + shift
    out = np.clip(z, -w_src, w_src) + w_src
    out.setflags(write=False)
    return out


class TruthTable:
    """Per-subformula truth arrays over clamped windows.

    ``table[g]`` is a boolean array indexed ``[x + w, y + w]`` with
    ``w = n + deg(g) + 1``.
    """

    def __init__(self, model: SpatialModel, formula: Formula, subformulas=None):
        self.model = model
        self.formula = formula
        self.n = model.bound
        self.windows = {}
        self.tables = {}
        self.cells_touched = 0
        for g in subformulas if subformulas is not None else enumerate_subformulas(formula):
            self._fill(g)

    def degree(self, g) -> int:
        return modal_degree(g)

    def value(self, g: Formula, x: int, y: int) -> bool:
        w = self.windows[g]
        return bool(self.tables[g][max(-w, min(w, x)) + w, max(-w, min(w, y)) + w])

    def __call__(self, x: int, y: int) -> bool:
        return self.value(self.formula, x, y)

    def _read(self, g, w_out, dx=0, dy=0):
        # the block of g's table seen from a window of half-width w_out, shifted by (dx, dy)
        w = self.windows[g]
        return self.tables[g].take(_clamped_index(w, w_out, dx), axis=0).take(
            _clamped_index(w, w_out, dy), axis=1
        )

    def _fill(self, g):
        w = self.n + self.degree(g) + 1
        side = 2 * w + 1
        if isinstance(g, Bottom):
            t = np.zeros((side, side), dtype=bool)
        elif isinstance(g, Atom):
            t = np.zeros((side, side), dtype=bool)
            for (x, y), atoms in self.model.valuation.items():
                if g.name in atoms and abs(x) <= w and abs(y) <= w:
                    t[x + w, y + w] = True
        elif isinstance(g, Here):
            t = np.zeros((side, side), dtype=bool)
            if g.agent in self.model.agents:
                x, y = self.model.position(g.agent)
                if abs(x) <= w and abs(y) <= w:
                    t[x + w, y + w] = True
        elif isinstance(g, Not):
            t = ~self._read(g.sub, w)
        elif isinstance(g, And):
            t = self._read(g.left, w) & self._read(g.right, w)
        elif isinstance(g, BoxS) and isinstance(g.program, Move):
            dx, dy = OFFSETS[g.program.direction]
            t = self._read(g.body, w, dx, dy)
        elif isinstance(g, BoxS) and isinstance(g.program, Star) and isinstance(g.program.body, Move):
            t = self._read_star(g.body, g.program.body.direction, w)
        else:
            raise UnsupportedFragment(f"no table rule for {render_formula(g)}")
        self.windows[g] = w
        self.tables[g] = t
        self.cells_touched += side * side

    def _read_star(self, body, direction, w_out):
        # all-of-ray table on the body's own window, then clamp-read
        src = self.tables[body]
        acc = np.logical_and.accumulate
        if direction == "R":
            ray = acc(src[::-1, :], axis=0)[::-1, :]
        elif direction == "L":
            ray = acc(src, axis=0)
        elif direction == "U":
            ray = acc(src[:, ::-1], axis=1)[:, ::-1]
        else:
            ray = acc(src, axis=1)
        ix = _clamped_index(self.windows[body], w_out, 0)
        return ray.take(ix, axis=0).take(ix, axis=1)


def _prepare(formula: Formula) -> Formula:
    if not is_static(formula):
        raise UnsupportedFragment(
            "motion, perception and coalition operators need motion.check_motion"
        )
    return expand_programs(formula, keep_stars=True)


def truth_table(model: SpatialModel, formula: Formula) -> TruthTable:
    """Build the table for ``formula`` after expanding star-free compound programs."""
    return TruthTable(model, _prepare(formula))


def check(model: SpatialModel, pos, formula: Formula) -> bool:
    """Decide ``model, pos |= formula`` in time polynomial in formula size and bound."""
    return truth_table(model, formula)(pos[0], pos[1])


def check_naive(model: SpatialModel, pos, formula: Formula) -> bool:
    """Direct recursive evaluation of the truth conditions.

    Compound star-free programs are evaluated as reachability sets.  A star
    over a compass move walks along the ray until it has stepped past the
    body's window, beyond which the body's truth no longer changes.
    """
    n = model.bound

    @lru_cache(maxsize=None)
    def deg(g):
        return modal_degree(g)

    @lru_cache(maxsize=None)
    def ev(g, x, y) -> bool:
        if isinstance(g, Bottom):
            return False
        if isinstance(g, Atom):
            return model.holds(g.name, (x, y))
        if isinstance(g, Here):
            return model.is_at(g.agent, (x, y))
        if isinstance(g, Not):
            return not ev(g.sub, x, y)
        if isinstance(g, And):
            return ev(g.left, x, y) and ev(g.right, x, y)
        if isinstance(g, BoxS):
            prog = g.program
            if isinstance(prog, Star):
                if not isinstance(prog.body, Move):
                    raise UnsupportedFragment("star over a compound program")
                return all(ev(g.body, cx, cy) for cx, cy in ray(prog.body.direction, x, y, g.body))
            return all(ev(g.body, cx, cy) for cx, cy in reach(prog, x, y))
        raise UnsupportedFragment(f"not a static formula: {render_formula(g)}")

    def ray(direction, x, y, body):
        horizon = n + deg(body) + 1
        dx, dy = OFFSETS[direction]
        cx, cy = x, y
        while True:
            yield cx, cy
            coord = cx * dx + cy * dy  # signed coordinate along the ray
            if coord > horizon:
                return
            cx, cy = cx + dx, cy + dy

    def reach(prog, x, y) -> set:
        if isinstance(prog, Move):
            return {successors((x, y), prog)}
        if isinstance(prog, Seq):
            out = set()
            for cx, cy in reach(prog.first, x, y):
                out |= reach(prog.second, cx, cy)
            return out
        if isinstance(prog, Choice):
            return reach(prog.left, x, y) | reach(prog.right, x, y)
        if isinstance(prog, Test):
            return {(x, y)} if ev(prog.cond, x, y) else set()
        if isinstance(prog, Star):
            raise UnsupportedFragment("star inside a compound program")
        raise UnsupportedFragment(f"not a spatial program: {prog!r}")

    return ev(formula, int(pos[0]), int(pos[1]))


def bounded_bisim(m1: SpatialModel, pos1, m2: SpatialModel, pos2, n: int,
                  atoms=None, agents=None) -> bool:
    """Decide ``n``-bisimilarity of two pointed models for the four compass moves.

    ``atoms`` and ``agents`` default to everything occurring in either model.
    Each compass relation is a total function, so forth and back both reduce
    to a single recursive comparison of successors.
    """
    atoms = frozenset(m1.atoms | m2.atoms if atoms is None else atoms)
    agents = frozenset(m1.agents | m2.agents if agents is None else agents)

    def label(m, cell):
        return (m.atoms_at(cell) & atoms, m.agents_at(cell) & agents)

    @lru_cache(maxsize=None)
    def bis(c1, c2, k) -> bool:
        if label(m1, c1) != label(m2, c2):
            return False
        if k == 0:
            return True
        return all(
            bis(successors(c1, d), successors(c2, d), k - 1) for d in OFFSETS
        )

    return bis(tuple(pos1), tuple(pos2), n)
