"""Motion programs: model-update semantics, reduction to static formulas,
coalition expansion and the perception operator.

A joint action moves every agent one step (or not at all) while facts stay
put.  ``[delta]here(i)`` therefore holds exactly where ``here(i)`` held one
inverse step away, which is what ``inverse_move`` returns and what lets
``red`` push every motion box down to the atoms and remove it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import BudgetExhausted, UnsupportedFragment
from .modelcheck import check, successors
from .models import SpatialModel, apply_joint_action
from .sat import reduce_star_free
from .syntax import (
    ACTIONS,
    TOP,
    And,
    Atom,
    Bottom,
    BoxM,
    BoxS,
    Choice,
    Coalition,
    Formula,
    Here,
    Joint,
    Move,
    Not,
    Program,
    Sees,
    Seq,
    Star,
    Test,
    conj,
    disj,
    enumerate_subformulas,
    joint,
    modal_degree,
    render_formula,
    vocabulary,
)

_INVERSE = {"down": "U", "up": "D", "left": "R", "right": "L"}


def inverse_move(agent: str, delta: Joint) -> Program:
    """The spatial program undoing ``agent``'s part of ``delta`` (``true?`` for skip)."""
    act = delta.action(agent)
    if act == "skip":
        return Test(TOP)
    return Move(_INVERSE[act])


# -- coalitions ---------------------------------------------------------------


def joint_actions(agents) -> list:
    """Every joint action over ``agents`` (one entry per agent)."""
    agents = sorted(agents)
    return [joint(zip(agents, acts)) for acts in itertools.product(ACTIONS, repeat=len(agents))]


def expand_coalition(members, body: Formula, agents) -> Formula:
    """``<<C>>body`` as a disjunction over C's actions of conjunctions over the rest.

    The result has ``5^|C|`` disjuncts of ``5^|Agt - C|`` conjuncts each.
    """
    members = frozenset(members)
    agents = frozenset(agents) | members
    others = agents - members
    disjuncts = []
    for own in joint_actions(members):
        conjuncts = [
            BoxM(joint(own.actions + rest.actions), body) for rest in joint_actions(others)
        ]
        disjuncts.append(conj(*conjuncts))
    return disj(*disjuncts)


# -- reduction ----------------------------------------------------------------


def red(formula: Formula, agents=None) -> Formula:
    """Eliminate motion modalities, innermost first.

    Coalition operators are expanded over ``agents`` (default: the agents
    occurring in ``formula``).  Compound spatial programs are unfolded as
    they are met, so the output only has boxes over single moves and the
    ``true?`` boxes produced for agents that skip.
    """
    if agents is None:
        agents = vocabulary(formula)[1]
    agents = frozenset(agents)
    cache = {}

    def r(f):
        out = cache.get(f)
        if out is None:
            out = cache[f] = _red(f)
        return out

    def _red(f):
        if isinstance(f, (Atom, Bottom, Here)):
            return f
        if isinstance(f, Not):
            return Not(r(f.sub))
        if isinstance(f, And):
            return And(r(f.left), r(f.right))
        if isinstance(f, (BoxS, BoxM)):
            p, body = f.program, f.body
            if isinstance(p, Move):
                return BoxS(p, r(body))
            if isinstance(p, Joint):
                return push(p, r(body))
            if isinstance(p, Seq):
                inner = r(type(f)(p.second, body))
                return r(type(f)(p.first, inner))
            if isinstance(p, Choice):
                return And(r(type(f)(p.left, body)), r(type(f)(p.right, body)))
            if isinstance(p, Test):
                return r(Not(And(p.cond, Not(body))))
            if isinstance(p, Star):
                raise UnsupportedFragment("iteration cannot be reduced away")
        if isinstance(f, Coalition):
            return r(expand_coalition(f.members, f.body, agents))
        raise UnsupportedFragment(f"cannot reduce {render_formula(f)}")

    def push(delta, f):
        # f is already static
        if isinstance(f, (Atom, Bottom)):
            return f
        if isinstance(f, Here):
            return BoxS(inverse_move(f.agent, delta), f)
        if isinstance(f, Not):
            return Not(push(delta, f.sub))
        if isinstance(f, And):
            return And(push(delta, f.left), push(delta, f.right))
        if isinstance(f, BoxS) and isinstance(f.program, Move):
            return BoxS(f.program, push(delta, f.body))
        if isinstance(f, BoxS) and isinstance(f.program, Test):
            return push(delta, Not(And(f.program.cond, Not(f.body))))
        raise UnsupportedFragment(f"cannot push a joint action over {render_formula(f)}")

    return r(formula)


# -- direct semantics ---------------------------------------------------------


def check_motion(model: SpatialModel, pos, formula: Formula, agents=None,
                 max_variants: int = 1 << 16) -> bool:
    """Evaluate ``formula`` by updating the model along motion programs.

    Tests inside motion programs are evaluated at ``pos``, the point the
    enclosing motion box is evaluated at.  Coalitions range over ``agents``
    (default: the model's agents plus those occurring in ``formula``).
    """
    if agents is None:
        agents = model.agents | vocabulary(formula)[1]
    agents = frozenset(agents)

    def ev(m, cell, f) -> bool:
        if isinstance(f, Bottom):
            return False
        if isinstance(f, Atom):
            return m.holds(f.name, cell)
        if isinstance(f, Here):
            return m.is_at(f.agent, cell)
        if isinstance(f, Not):
            return not ev(m, cell, f.sub)
        if isinstance(f, And):
            return ev(m, cell, f.left) and ev(m, cell, f.right)
        if isinstance(f, BoxS):
            return all(ev(m, c, f.body) for c in reach(m, cell, f.program))
        if isinstance(f, BoxM):
            return all(ev(m2, cell, f.body) for m2 in update(m, cell, f.program))
        if isinstance(f, Sees):
            return check_sees(m, f.agent, f.k, f.body, max_variants=max_variants)
        if isinstance(f, Coalition):
            return ev(m, cell, expand_coalition(f.members, f.body, agents))
        raise TypeError(f"not a formula: {f!r}")

    def reach(m, cell, p) -> set:
        if isinstance(p, Move):
            return {successors(cell, p)}
        if isinstance(p, Seq):
            return {c2 for c1 in reach(m, cell, p.first) for c2 in reach(m, c1, p.second)}
        if isinstance(p, Choice):
            return reach(m, cell, p.left) | reach(m, cell, p.right)
        if isinstance(p, Test):
            return {cell} if ev(m, cell, p.cond) else set()
        raise UnsupportedFragment(f"no direct semantics for {p!r}")

    def update(m, anchor, p) -> set:
        if isinstance(p, Joint):
            return {apply_joint_action(m, p)}
        if isinstance(p, Seq):
            return {m2 for m1 in update(m, anchor, p.first) for m2 in update(m1, anchor, p.second)}
        if isinstance(p, Choice):
            return update(m, anchor, p.left) | update(m, anchor, p.right)
        if isinstance(p, Test):
            return {m} if ev(m, anchor, p.cond) else set()
        raise UnsupportedFragment(f"not a motion program: {p!r}")

    return ev(model, tuple(pos), formula)


# -- perception ---------------------------------------------------------------


@dataclass(frozen=True)
class Neighborhood:
    """The ``(2k+1)``-square of cells around ``center``."""

    center: tuple
    k: int

    def __contains__(self, cell) -> bool:
        return abs(cell[0] - self.center[0]) <= self.k and abs(cell[1] - self.center[1]) <= self.k

    def cells(self) -> list:
        cx, cy = self.center
        return [
            (x, y)
            for x in range(cx - self.k, cx + self.k + 1)
            for y in range(cy - self.k, cy + self.k + 1)
        ]


def neighborhood(model: SpatialModel, agent: str, k: int) -> Neighborhood:
    return Neighborhood(model.position(agent), k)


def _read_cells(g: Formula, start) -> tuple:
    """(atom, cell) and (agent, cell) pairs a star-free single-move formula inspects."""
    atom_reads, agent_reads, seen = set(), set(), set()
    stack = [(g, start)]
    while stack:
        f, cell = stack.pop()
        if (f, cell) in seen:
            continue
        seen.add((f, cell))
        if isinstance(f, Atom):
            atom_reads.add((f.name, cell))
        elif isinstance(f, Here):
            agent_reads.add((f.agent, cell))
        elif isinstance(f, Not):
            stack.append((f.sub, cell))
        elif isinstance(f, And):
            stack += [(f.left, cell), (f.right, cell)]
        elif isinstance(f, BoxS):
            stack.append((f.body, successors(cell, f.program)))
    return atom_reads, agent_reads


def sees_variants(model: SpatialModel, agent: str, k: int, formula: Formula,
                  max_variants: int = 1 << 16):
    """Models indistinguishable from ``model`` for ``agent`` with range ``k``,
    restricted to what ``formula`` can observe from the agent's cell.

    Returns ``(static_formula, variants)``.  Agents outside the neighbourhood
    may only move to cells outside it; cells outside it may take any values.
    Cells the formula never reads are left as they are.
    """
    if any(isinstance(f, Sees) for f in enumerate_subformulas(formula)):
        raise UnsupportedFragment("nested perception operators are not supported")
    g = reduce_star_free(red(formula, model.agents | vocabulary(formula)[1]))
    hood = neighborhood(model, agent, k)
    center = hood.center
    atom_reads, agent_reads = _read_cells(g, center)
    free_atoms = sorted((p, c) for p, c in atom_reads if c not in hood)
    movable = sorted(
        a for a in vocabulary(g)[1] if a in model.agents and model.position(a) not in hood
    )
    far = (center[0] + k + modal_degree(g) + 1, center[1])
    options = {
        a: sorted({c for b, c in agent_reads if b == a and c not in hood}) + [far]
        for a in movable
    }
    count = 2 ** len(free_atoms)
    for a in movable:
        count *= len(options[a])
    if count > max_variants:
        raise BudgetExhausted(f"{count} indistinguishable variants exceed budget {max_variants}")

    def variants():
        base_val = model.valuation
        for bits in itertools.product((False, True), repeat=len(free_atoms)):
            val = {c: set(s) for c, s in base_val.items()}
            for (p, c), on in zip(free_atoms, bits):
                cell = val.setdefault(c, set())
                (cell.add if on else cell.discard)(p)
            for places in itertools.product(*(options[a] for a in movable)):
                pos = model.positions
                pos.update(zip(movable, places))
                yield SpatialModel(pos, val)

    return g, variants()


def check_sees(model: SpatialModel, agent: str, k: int, formula: Formula,
               max_variants: int = 1 << 16) -> bool:
    """Truth of ``S(agent,k) formula``: ``formula`` holds at the agent's cell in
    every model the agent cannot tell apart from ``model`` with range ``k``.

    Only cells the (reduced) formula can reach are varied; this finite slice
    of the variant space is an implementation choice, not part of the logic.
    Raises BudgetExhausted rather than guessing when it is too large.
    """
    if agent not in model.agents:
        raise UnsupportedFragment(f"agent {agent!r} has no position in the model")
    g, variants = sees_variants(model, agent, k, formula, max_variants)
    center = model.position(agent)
    return all(check(m, center, g) for m in variants)


# -- simulation ---------------------------------------------------------------


def simulate(model: SpatialModel, program: Program, anchor=(0, 0)):
    """Run a motion program, resolving choices left-first.

    Returns ``(trace, blocked)`` where ``trace`` lists ``(joint_action, model)``
    after every update, starting with ``(None, model)``.
    """

    def run(m, p):
        if isinstance(p, Joint):
            return [(p, apply_joint_action(m, p))], False
        if isinstance(p, Test):
            ok = check_motion(m, anchor, p.cond)
            return [], not ok
        if isinstance(p, Seq):
            first, blocked = run(m, p.first)
            if blocked:
                return first, True
            cur = first[-1][1] if first else m
            second, blocked = run(cur, p.second)
            return first + second, blocked
        if isinstance(p, Choice):
            left, blocked = run(m, p.left)
            if not blocked:
                return left, False
            return run(m, p.right)
        raise UnsupportedFragment(f"cannot simulate {p!r}")

    steps, blocked = run(model, program)
    return [(None, model)] + steps, blocked
