"""Satisfiability for the star-free fragment and for compass logic of positions.

Star-free formulas of degree ``d`` only look at cells within ``d`` steps of
the evaluation point, so a satisfiable formula has a witness whose agents and
atoms sit in that neighbourhood (agents out of sight are parked just outside).
The search grounds the formula over the neighbourhood, turns it into CNF and
runs a small DPLL that branches on agent placements first.

Position-only compass formulas are decided by model checking candidate
placements in increasing coordinate bounds.  Agent-free strips wider than
``2m+1`` can be collapsed without changing truth of degree-``m`` formulas,
so only placements whose occupied coordinates are at most ``2m+2`` apart
need to be tried.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

from .errors import BudgetExhausted, UnsupportedFragment
from .modelcheck import OFFSETS, TruthTable, check
from .models import PositionModel, SpatialModel
from .syntax import (
    And,
    Atom,
    Bottom,
    BoxS,
    Formula,
    Here,
    Move,
    Not,
    enumerate_subformulas,
    expand_programs,
    formula_size,
    has_star,
    is_static,
    modal_degree,
    render_formula,
    vocabulary,
)

ORIGIN = (0, 0)

DEFAULT_BUDGET_CELLS = 4096
DEFAULT_BUDGET_CANDIDATES = 200_000
DEFAULT_TIME_LIMIT = 120.0


@dataclass
class SatResult:
    verdict: str  # "sat", "unsat" or "inconclusive"
    witness: object = None  # SpatialModel or PositionModel
    position: tuple = ORIGIN
    bound_used: int = 0
    reason: str = ""
    stats: dict = field(default_factory=dict)

    @property
    def satisfiable(self) -> bool:
        return self.verdict == "sat"

    def witness_model(self) -> SpatialModel | None:
        if isinstance(self.witness, PositionModel):
            return self.witness.to_spatial()
        return self.witness


def reduce_star_free(formula: Formula) -> Formula:
    """Rewrite a star-free static formula into boxes over single compass moves."""
    if not is_static(formula):
        raise UnsupportedFragment("reduce_star_free expects a static formula")
    return expand_programs(formula, keep_stars=False)


def _to_static(formula: Formula, agents=None) -> Formula:
    if is_static(formula):
        return formula
    from .motion import red

    return red(formula, agents)


# -- CNF search for the star-free fragment -----------------------------------


class _Cnf:
    def __init__(self):
        self.clauses = []
        self.names = {}  # var -> key
        self.keys = {}  # key -> var

    def var(self, key) -> int:
        v = self.keys.get(key)
        if v is None:
            v = len(self.keys) + 1
            self.keys[key] = v
            self.names[v] = key
        return v

    def fresh(self) -> int:
        return self.var(("gate", len(self.keys)))


def _ground(formula: Formula, cnf: _Cnf) -> int:
    """Tseitin-encode ``formula`` at the origin; returns its literal."""
    memo = {}
    false_lit = cnf.var(("false",))
    cnf.clauses.append([-false_lit])

    def lit(g, cell):
        key = (g, cell)
        if key in memo:
            return memo[key]
        if isinstance(g, Bottom):
            out = false_lit
        elif isinstance(g, Atom):
            out = cnf.var(("atom", g.name, cell))
        elif isinstance(g, Here):
            out = cnf.var(("at", g.agent, cell))
        elif isinstance(g, Not):
            out = -lit(g.sub, cell)
        elif isinstance(g, And):
            a, b = lit(g.left, cell), lit(g.right, cell)
            out = cnf.fresh()
            cnf.clauses += [[-out, a], [-out, b], [out, -a, -b]]
        elif isinstance(g, BoxS) and isinstance(g.program, Move):
            dx, dy = OFFSETS[g.program.direction]
            out = lit(g.body, (cell[0] + dx, cell[1] + dy))
        else:
            raise UnsupportedFragment(f"cannot ground {render_formula(g)}")
        memo[key] = out
        return out

    return lit(formula, ORIGIN)


def _ball(d: int) -> list:
    return [
        (x, y)
        for x in range(-d, d + 1)
        for y in range(-d, d + 1)
        if abs(x) + abs(y) <= d
    ]


class _Dpll:
    """Recursive DPLL with unit propagation over a fixed branching order."""

    def __init__(self, clauses, order, max_decisions, deadline):
        self.clauses = clauses
        self.order = order
        self.max_decisions = max_decisions
        self.deadline = deadline
        self.decisions = 0

    @staticmethod
    def _assign(clauses, lit):
        out = []
        for c in clauses:
            if lit in c:
                continue
            if -lit in c:
                c = [x for x in c if x != -lit]
                if not c:
                    return None
            out.append(c)
        return out

    def _propagate(self, clauses, model):
        while True:
            unit = next((c[0] for c in clauses if len(c) == 1), None)
            if unit is None:
                return clauses
            model[abs(unit)] = unit > 0
            clauses = self._assign(clauses, unit)
            if clauses is None:
                return None

    def solve(self):
        return self._solve(self.clauses, {})

    def _solve(self, clauses, model):
        clauses = self._propagate(clauses, model)
        if clauses is None:
            return None
        if not clauses:
            return model
        live = {abs(x) for c in clauses for x in c}
        var = next((v for v in self.order if v in live and v not in model), None)
        if var is None:
            var = min(live)
        for value in (True, False):
            self.decisions += 1
            if self.decisions > self.max_decisions:
                raise BudgetExhausted(f"more than {self.max_decisions} decisions")
            if time.monotonic() > self.deadline:
                raise BudgetExhausted("time limit reached")
            lit = var if value else -var
            reduced = self._assign(clauses, lit)
            if reduced is None:
                continue
            found = self._solve(reduced, {**model, var: value})
            if found is not None:
                return found
        return None


def sat_star_free(
    formula: Formula,
    budget_cells: int = DEFAULT_BUDGET_CELLS,
    budget_candidates: int = DEFAULT_BUDGET_CANDIDATES,
    time_limit: float = DEFAULT_TIME_LIMIT,
    agents=None,
) -> SatResult:
    """Decide satisfiability of a star-free formula at the origin.

    Motion operators are first eliminated by the reduction in ``motion``.
    Budget exhaustion yields an ``inconclusive`` verdict, never ``unsat``.
    """
    static = _to_static(formula, agents)
    if has_star(static):
        raise UnsupportedFragment("the star-free procedure does not accept iteration")
    g = reduce_star_free(static)
    d = modal_degree(g)
    atoms, occurring = vocabulary(g)
    cells = _ball(d)
    outside = (d + 1, 0)
    if len(cells) * max(1, len(atoms)) > budget_cells:
        return SatResult("inconclusive", bound_used=d + 1,
                         reason=f"{len(cells)} cells x {len(atoms)} atoms exceeds budget")

    cnf = _Cnf()
    root = _ground(g, cnf)
    cnf.clauses.append([root])
    agent_vars = []
    for a in sorted(occurring):
        slots = [cnf.var(("at", a, c)) for c in cells] + [cnf.var(("at", a, outside))]
        agent_vars += slots
        cnf.clauses.append(list(slots))
        cnf.clauses += [[-u, -v] for u, v in itertools.combinations(slots, 2)]
    atom_vars = [cnf.keys[k] for k in sorted(cnf.keys, key=repr) if k[0] == "atom"]
    solver = _Dpll(cnf.clauses, agent_vars + atom_vars, budget_candidates,
                   time.monotonic() + time_limit)
    try:
        model = solver.solve()
    except BudgetExhausted as exc:
        return SatResult("inconclusive", bound_used=d + 1, reason=str(exc),
                         stats={"decisions": solver.decisions})
    stats = {"decisions": solver.decisions, "variables": len(cnf.keys),
             "clauses": len(cnf.clauses)}
    if model is None:
        return SatResult("unsat", bound_used=d + 1, stats=stats)

    positions, valuation = {}, {}
    for v, value in model.items():
        key = cnf.names[v]
        if not value:
            continue
        if key[0] == "at":
            positions[key[1]] = key[2]
        elif key[0] == "atom":
            valuation.setdefault(key[2], set()).add(key[1])
    for a in occurring:
        positions.setdefault(a, outside)
    witness = SpatialModel(positions, valuation, d + 1)
    if not check(witness, ORIGIN, g):
        raise AssertionError(f"witness fails to verify for {render_formula(g)}")
    return SatResult("sat", witness, ORIGIN, d + 1, stats=stats)


# -- position models ----------------------------------------------------------


def in_positions_fragment(formula: Formula) -> bool:
    if not is_static(formula):
        return False
    try:
        g = expand_programs(formula, keep_stars=True)
    except UnsupportedFragment:
        return False
    return not vocabulary(g)[0]


def _axis_configs(k: int, spread: int, limit: int):
    """Coordinate tuples for ``k`` agents whose occupied values, with 0,
    are at most ``spread`` apart when sorted, all within ``[-limit, limit]``."""
    rng = range(-limit, limit + 1)
    for combo in itertools.product(rng, repeat=k):
        values = sorted(set(combo) | {0})
        if all(b - a <= spread for a, b in zip(values, values[1:])):
            yield combo


def sat_positions(
    formula: Formula,
    budget_candidates: int = DEFAULT_BUDGET_CANDIDATES,
    time_limit: float = DEFAULT_TIME_LIMIT,
) -> SatResult:
    """Decide satisfiability of a position-only compass formula at the origin.

    Bounds grow geometrically from the modal degree; every placement with
    coordinates inside the current bound (and no oversized empty strip) is
    model checked.  ``unsat`` is reported once the bound covering all such
    placements has been exhausted; that bound never exceeds ``2(|phi|+1)^2``.
    """
    if not in_positions_fragment(formula):
        raise UnsupportedFragment("formula is not in the position-only compass fragment")
    g = expand_programs(formula, keep_stars=True)
    m = modal_degree(g)
    agents = sorted(vocabulary(g)[1])
    k = len(agents)
    spread = 2 * m + 2
    size_cap = 2 * (formula_size(formula) + 1) ** 2
    cap = min(size_cap, k * spread)
    deadline = time.monotonic() + time_limit
    subformulas = enumerate_subformulas(g)
    tried = 0

    b, prev = max(1, m), -1
    while True:
        b = min(b, cap)
        axis = [c for c in _axis_configs(k, spread, b)]
        for xs in axis:
            for ys in axis:
                if max([abs(v) for v in xs + ys], default=0) <= prev:
                    continue  # already tried at a smaller bound
                tried += 1
                if tried > budget_candidates or time.monotonic() > deadline:
                    return SatResult("inconclusive", bound_used=prev,
                                     reason=f"budget exhausted after {tried - 1} candidates",
                                     stats={"candidates": tried - 1})
                pm = PositionModel.of(dict(zip(agents, zip(xs, ys))))
                if TruthTable(pm.to_spatial(), g, subformulas)(*ORIGIN):
                    return SatResult("sat", pm, ORIGIN, b, stats={"candidates": tried})
        if b >= cap:
            return SatResult("unsat", bound_used=cap, stats={"candidates": tried})
        prev, b = b, 2 * b


# -- validity -----------------------------------------------------------------


def detect_fragment(formula: Formula) -> str:
    if in_positions_fragment(formula) and has_star(formula):
        return "positions"
    if not has_star(formula):
        return "starfree"
    raise UnsupportedFragment(
        "iteration is only decidable in the position-only compass fragment"
    )


def satisfiable(formula: Formula, fragment: str = "auto", **budget) -> SatResult:
    if fragment == "auto":
        fragment = detect_fragment(formula)
    if fragment == "starfree":
        return sat_star_free(formula, **budget)
    if fragment == "positions":
        budget.pop("budget_cells", None)
        budget.pop("agents", None)
        return sat_positions(formula, **budget)
    raise UnsupportedFragment(f"unknown fragment {fragment!r}")


def validity(formula: Formula, fragment: str = "auto", **budget) -> bool:
    """``formula`` is valid iff its negation is unsatisfiable.

    Raises BudgetExhausted when the search for a countermodel is inconclusive.
    """
    result = satisfiable(Not(formula), fragment, **budget)
    if result.verdict == "inconclusive":
        raise BudgetExhausted(result.reason)
    return not result.satisfiable
