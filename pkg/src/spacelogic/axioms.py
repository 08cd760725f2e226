"""Axiom schemas and validities, instantiated at random and probed on random models.

A schema is a template with named holes (moves, formulas, programs, agents,
coalitions, offsets).  Holes left open are drawn at random; any of them can be
pinned by passing a value to ``instantiate``.  Each schema also names the
evaluator that decides its instances: the table-based checker for compass
formulas, the direct evaluator for compound programs, or the model-update
semantics for motion, perception and coalitions.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .generate import FormulaGenerator, as_rng, random_joint, random_model
from .modelcheck import check, check_naive
from .models import SpatialModel, render_model
from .motion import check_motion, inverse_move, red
from .syntax import (
    BOTTOM,
    DIRECTIONS,
    TOP,
    And,
    Atom,
    BoxM,
    BoxS,
    Choice,
    Coalition,
    Formula,
    Here,
    Move,
    Not,
    Sees,
    Seq,
    Test,
    diamond,
    disj,
    iff,
    implies,
    iterate_box,
    modal_degree,
    parse_formula,
    parse_program,
    render_formula,
    seq,
)

__all__ = [
    "CORRUPTED",
    "EVALUATORS",
    "SCHEMAS",
    "Hole",
    "ProbeParams",
    "ProbeReport",
    "Schema",
    "get_schema",
    "instantiate",
    "prg",
    "probe",
    "probe_all",
    "random_model",
]

EVALUATORS = {
    "check": check,
    "naive": check_naive,
    "motion": check_motion,
}

_CONVERSE = {"U": "D", "D": "U", "R": "L", "L": "R"}


@dataclass
class ProbeParams:
    bound: int = 2
    atoms: tuple = ("p", "q")
    agents: tuple = ("i", "j")
    degree: int = 2
    max_offset: int = 3  # cap for the nominal schema offsets
    max_range: int = 2  # largest vision range tried


def prg(k: int) -> list:
    """Programs ``L^h;U^h``, ``R^h;U^h``, ``L^h;D^h``, ``R^h;D^h`` for ``0 <= h <= k``.

    ``h = 0`` gives the empty program ``true?`` once; the list has ``4k + 1`` entries.
    """
    out = [seq()]
    for h in range(1, k + 1):
        for horizontal in ("L", "R"):
            for vertical in ("U", "D"):
                out.append(seq(*[Move(horizontal)] * h, *[Move(vertical)] * h))
    return out


# -- holes --------------------------------------------------------------------


def _coerce(kind, value):
    if kind == "move" and isinstance(value, str):
        return Move(value)
    if kind in ("formula", "mformula") and isinstance(value, str):
        return parse_formula(value)
    if kind in ("program", "mprogram") and isinstance(value, str):
        return parse_program(value)
    if kind == "atom" and isinstance(value, str):
        return Atom(value)
    if kind == "coalition":
        return frozenset(value)
    if kind == "nat":
        return int(value)
    if kind == "offsets":
        return tuple(int(v) for v in value)
    return value


@dataclass(frozen=True)
class Hole:
    name: str
    kind: str  # move, formula, mformula, program, mprogram, atom, agent, coalition, nat, ...
    sample: Callable  # (rng, params, chosen) -> value


def _gen(rng, params, kind):
    return FormulaGenerator(rng, params.atoms, params.agents, kind)


def move_hole(name):
    return Hole(name, "move", lambda rng, params, chosen: Move(rng.choice(DIRECTIONS)))


def formula_hole(name, degree=None, kind="atomic"):
    def sample(rng, params, chosen):
        d = params.degree if degree is None else min(degree, params.degree)
        return _gen(rng, params, kind).formula(rng.randint(0, d), 8)

    return Hole(name, "mformula" if kind == "motion" else "formula", sample)


def atom_hole(name):
    return Hole(name, "atom", lambda rng, params, chosen: Atom(rng.choice(params.atoms)))


def program_hole(name):
    return Hole(name, "program",
                lambda rng, params, chosen: _gen(rng, params, "compound").spatial_program(0, 2))


def motion_program_hole(name):
    return Hole(name, "mprogram",
                lambda rng, params, chosen: _gen(rng, params, "motion").motion_program(0, 2))


def joint_hole(name):
    return Hole(name, "mprogram", lambda rng, params, chosen: random_joint(params.agents, rng))


def agent_hole(name, distinct_from=None):
    def sample(rng, params, chosen):
        pool = [a for a in params.agents if a != chosen.get(distinct_from)]
        return rng.choice(pool or list(params.agents))

    return Hole(name, "agent", sample)


def coalition_hole(name, excluding=None):
    def sample(rng, params, chosen):
        banned = chosen.get(excluding)
        return frozenset(a for a in params.agents if a != banned and rng.random() < 0.5)

    return Hole(name, "coalition", sample)


def nat_hole(name, upper: str):
    return Hole(name, "nat", lambda rng, params, chosen: rng.randint(0, getattr(params, upper)))


@dataclass(frozen=True)
class Schema:
    id: str
    description: str
    holes: tuple
    template: Callable  # keyword per hole -> Formula
    evaluator: str = "check"
    legal: Callable | None = None  # rejects illegal substitutions

    @property
    def arity(self) -> int:
        return len(self.holes)

    def instantiate(self, seed=None, params: ProbeParams | None = None, **fixed) -> Formula:
        rng = as_rng(seed)
        params = params or ProbeParams()
        unknown = set(fixed) - {h.name for h in self.holes}
        if unknown:
            raise ValueError(f"schema {self.id} has no hole(s) {sorted(unknown)}")
        chosen = {}
        for hole in self.holes:
            if hole.name in fixed:
                chosen[hole.name] = _coerce(hole.kind, fixed[hole.name])
            else:
                chosen[hole.name] = hole.sample(rng, params, chosen)
        if self.legal is not None and not self.legal(**chosen):
            raise ValueError(f"illegal substitution for schema {self.id}: {chosen}")
        return self.template(**chosen)


def instantiate(schema: Schema, seed=None, params: ProbeParams | None = None, **fixed) -> Formula:
    return schema.instantiate(seed, params, **fixed)


# -- templates ----------------------------------------------------------------


def _converse(direction):
    back = Move(_CONVERSE[direction])
    return lambda phi: implies(phi, BoxS(Move(direction), diamond(back, phi)))


def _nominal(i, xy):
    x, y = xy
    return implies(Here(i), iterate_box("U", x, iterate_box("R", y, Not(Here(i)))))


def _offsets(rng, params, chosen):
    while True:
        x, y = rng.randint(0, params.max_offset), rng.randint(0, params.max_offset)
        if x or y:
            return x, y


def _necessitation(a, phi, b):
    # [a] over a conjunction of functionality, commutation and converse instances
    inner = And(iff(BoxS(b, phi), diamond(b, phi)),
                And(iff(BoxS(a, BoxS(b, phi)), BoxS(b, BoxS(a, phi))),
                    _converse(b.direction)(phi)))
    return BoxS(a, inner)


def _prg_program(rng, params, chosen):
    return rng.choice(prg(chosen["k"]))


def _in_prg(k, alpha, **_):
    return alpha in prg(k)


def _twin(rng, params, chosen):
    phi = chosen["phi"]
    return rng.choice([Not(Not(phi)), And(phi, phi), red(phi, params.agents)])


def _split(rng, params, chosen):
    c1, c2 = set(), set()
    for a in params.agents:
        rng.choice([c1, c2, set()]).add(a)
    return frozenset(c1), frozenset(c2)


def _around(i):
    return disj(*[BoxS(Move(d), Here(i)) for d in ("U", "R", "D", "L")])


def _sees(i, k, alpha, target):
    return implies(Here(i), iff(BoxS(alpha, target), Sees(i, k, BoxS(alpha, target))))


def _schemas():
    f = formula_hole

    def m(name):
        return formula_hole(name, 1, "motion")

    yield Schema("K", "[a](f->g) -> ([a]f -> [a]g)",
                 (move_hole("a"), f("phi", 1), f("psi", 1)),
                 lambda a, phi, psi: implies(BoxS(a, implies(phi, psi)),
                                             implies(BoxS(a, phi), BoxS(a, psi))))
    yield Schema("necessitation", "[a]g for g a conjunction of valid instances",
                 (move_hole("a"), f("phi", 1), move_hole("b")), _necessitation)
    yield Schema("functionality", "[a]f <-> <a>f", (move_hole("a"), f("phi")),
                 lambda a, phi: iff(BoxS(a, phi), diamond(a, phi)))
    for d in DIRECTIONS:
        yield Schema(f"converse-{d}", f"f -> [{d}]<{_CONVERSE[d]}>f", (f("phi"),), _converse(d))
    yield Schema("commutation", "[a][b]f <-> [b][a]f",
                 (move_hole("a1"), move_hole("a2"), f("phi", 1)),
                 lambda a1, a2, phi: iff(BoxS(a1, BoxS(a2, phi)), BoxS(a2, BoxS(a1, phi))))
    yield Schema("nominal", "here(i) -> [U]^x[R]^y~here(i), x,y >= 0 not both 0",
                 (agent_hole("i"), Hole("xy", "offsets", _offsets)), _nominal,
                 legal=lambda i, xy: min(xy) >= 0 and max(xy) > 0)
    yield Schema("reduce-seq", "[a;b]f <-> [a][b]f",
                 (program_hole("a"), program_hole("b"), f("phi", 1)),
                 lambda a, b, phi: iff(BoxS(Seq(a, b), phi), BoxS(a, BoxS(b, phi))), "naive")
    yield Schema("reduce-choice", "[a+b]f <-> [a]f & [b]f",
                 (program_hole("a"), program_hole("b"), f("phi", 1)),
                 lambda a, b, phi: iff(BoxS(Choice(a, b), phi), And(BoxS(a, phi), BoxS(b, phi))),
                 "naive")
    yield Schema("reduce-test", "[t?]f <-> (t -> f)", (f("t", 1), f("phi", 1)),
                 lambda t, phi: iff(BoxS(Test(t), phi), implies(t, phi)), "naive")

    # reduction equivalences for motion
    yield Schema("motion-1", "[a;b]f <-> [a][b]f over motion formulas",
                 (program_hole("a"), program_hole("b"), m("phi")),
                 lambda a, b, phi: iff(BoxS(Seq(a, b), phi), BoxS(a, BoxS(b, phi))), "motion")
    yield Schema("motion-2", "[a+b]f <-> [a]f & [b]f over motion formulas",
                 (program_hole("a"), program_hole("b"), m("phi")),
                 lambda a, b, phi: iff(BoxS(Choice(a, b), phi), And(BoxS(a, phi), BoxS(b, phi))),
                 "motion")
    yield Schema("motion-3", "[d;e]f <-> [d][e]f for motion programs",
                 (motion_program_hole("d"), motion_program_hole("e"), m("phi")),
                 lambda d, e, phi: iff(BoxM(Seq(d, e), phi), BoxM(d, BoxM(e, phi))), "motion")
    yield Schema("motion-4", "[d+e]f <-> [d]f & [e]f for motion programs",
                 (motion_program_hole("d"), motion_program_hole("e"), m("phi")),
                 lambda d, e, phi: iff(BoxM(Choice(d, e), phi), And(BoxM(d, phi), BoxM(e, phi))),
                 "motion")
    # a box over a bare test reads the same for both program sorts
    yield Schema("motion-5", "[f?]g <-> (f -> g) over motion formulas", (m("phi"), m("psi")),
                 lambda phi, psi: iff(BoxS(Test(phi), psi), implies(phi, psi)), "motion")
    yield Schema("motion-6", "[delta]p <-> p", (joint_hole("delta"), atom_hole("p")),
                 lambda delta, p: iff(BoxM(delta, p), p), "motion")
    yield Schema("motion-7", "[delta]here(i) <-> [inverse of i's move]here(i)",
                 (joint_hole("delta"), agent_hole("i")),
                 lambda delta, i: iff(BoxM(delta, Here(i)), BoxS(inverse_move(i, delta), Here(i))),
                 "motion")
    yield Schema("motion-8", "[delta]~f <-> ~[delta]f", (joint_hole("delta"), m("phi")),
                 lambda delta, phi: iff(BoxM(delta, Not(phi)), Not(BoxM(delta, phi))), "motion")
    yield Schema("motion-9", "[delta](f & g) <-> [delta]f & [delta]g",
                 (joint_hole("delta"), m("phi"), m("psi")),
                 lambda delta, phi, psi: iff(BoxM(delta, And(phi, psi)),
                                             And(BoxM(delta, phi), BoxM(delta, psi))), "motion")
    yield Schema("motion-10", "[delta][a]f <-> [a][delta]f",
                 (joint_hole("delta"), move_hole("a"), m("phi")),
                 lambda delta, a, phi: iff(BoxM(delta, BoxS(a, phi)), BoxS(a, BoxM(delta, phi))),
                 "motion")

    # perception
    sees_holes = (agent_hole("i"), nat_hole("k", "max_range"),
                  Hole("alpha", "program", _prg_program))
    yield Schema("sees-atom", "here(i) -> ([a]p <-> S(i,k)[a]p) for a in Prg(k)",
                 sees_holes + (atom_hole("p"),),
                 lambda i, k, alpha, p: _sees(i, k, alpha, p), "motion", legal=_in_prg)
    yield Schema("sees-agent", "here(i) -> ([a]here(j) <-> S(i,k)[a]here(j)) for a in Prg(k)",
                 sees_holes + (agent_hole("j", distinct_from="i"),),
                 lambda i, k, alpha, j: _sees(i, k, alpha, Here(j)), "motion", legal=_in_prg)
    yield Schema("sees-above", "here(i) -> ([U]here(j) <-> S(i,1)[U]here(j))",
                 (agent_hole("i"), agent_hole("j", distinct_from="i")),
                 lambda i, j: _sees(i, 1, Move("U"), Here(j)), "motion")

    # coalitions
    yield Schema("coalition-bottom", "~<<C>>false", (coalition_hole("C"),),
                 lambda C: Not(Coalition(C, BOTTOM)), "motion")
    yield Schema("coalition-top", "<<C>>true", (coalition_hole("C"),),
                 lambda C: Coalition(C, TOP), "motion")
    yield Schema("coalition-maximality", "~<<>>~f -> <<Agt>>f",
                 (m("phi"), Hole("everyone", "coalition", lambda r, p, c: frozenset(p.agents))),
                 lambda phi, everyone: implies(Not(Coalition(frozenset(), Not(phi))),
                                               Coalition(everyone, phi)), "motion")
    yield Schema("coalition-monotonicity", "<<C>>(f & g) -> <<C>>f",
                 (coalition_hole("C"), m("phi"), m("psi")),
                 lambda C, phi, psi: implies(Coalition(C, And(phi, psi)), Coalition(C, phi)),
                 "motion")
    yield Schema("coalition-superadditivity", "<<C>>f & <<D>>g -> <<C+D>>(f & g), C and D disjoint",
                 (Hole("pair", "coalitions", _split), m("phi"), m("psi")),
                 lambda pair, phi, psi: implies(
                     And(Coalition(pair[0], phi), Coalition(pair[1], psi)),
                     Coalition(pair[0] | pair[1], And(phi, psi))),
                 "motion", legal=lambda pair, **_: not pair[0] & pair[1])
    yield Schema("coalition-congruence", "<<C>>f <-> <<C>>g for equivalent f, g",
                 (coalition_hole("C"), m("phi"), Hole("twin", "mformula", _twin)),
                 lambda C, phi, twin: iff(Coalition(C, phi), Coalition(C, twin)), "motion")
    yield Schema("coalition-exclusive", "~<<C>>here(i) when i is not in C",
                 (agent_hole("i"), coalition_hole("C", excluding="i")),
                 lambda i, C: Not(Coalition(C, Here(i))), "motion",
                 legal=lambda i, C: i not in C)
    yield Schema("coalition-reach", "(<some move>here(i)) -> <<i>>here(i)",
                 (agent_hole("i"),),
                 lambda i: implies(_around(i), Coalition(frozenset({i}), Here(i))), "motion")


SCHEMAS = {s.id: s for s in _schemas()}

CORRUPTED = Schema(
    "corrupted-commutation", "[U][R]p <-> [R][U]q (not valid)", (),
    lambda: iff(BoxS(Move("U"), BoxS(Move("R"), Atom("p"))),
                BoxS(Move("R"), BoxS(Move("U"), Atom("q")))),
)


def get_schema(name: str) -> Schema:
    if name == CORRUPTED.id:
        return CORRUPTED
    try:
        return SCHEMAS[name]
    except KeyError:
        raise KeyError(f"unknown schema {name!r}") from None


# -- probing ------------------------------------------------------------------


@dataclass
class ProbeReport:
    schema: str
    trials: int
    counterexamples: list = field(default_factory=list)  # (model, position, formula)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def to_text(self) -> str:
        lines = [
            f"schema {self.schema}",
            f"trials {self.trials}",
            f"counterexamples {len(self.counterexamples)}",
        ]
        for n, (model, pos, f) in enumerate(self.counterexamples, 1):
            lines.append(f"--- counterexample {n}")
            lines.extend(render_model(model).rstrip("\n").splitlines())
            lines.append(f"position {pos[0]},{pos[1]}")
            lines.append(f"formula {render_formula(f)}")
        return "\n".join(lines) + "\n"


def _pick_position(rng, model: SpatialModel, formula):
    # half the time stand on an agent so here(i) antecedents get exercised
    if model.agents and rng.random() < 0.5:
        return model.position(rng.choice(sorted(model.agents)))
    w = model.bound + modal_degree(formula) + 1
    return (rng.randint(-w, w), rng.randint(-w, w))


def probe(schema: Schema, trials: int = 200, params: ProbeParams | None = None,
          seed=0) -> ProbeReport:
    """Evaluate ``trials`` random instances at random points of random models.

    Each trial draws from its own generator seeded off the master seed, so
    reports are reproducible and independent of trial order.
    """
    params = params or ProbeParams()
    master = random.Random(seed)
    evaluate = EVALUATORS[schema.evaluator]
    report = ProbeReport(schema.id, trials)
    for _ in range(trials):
        rng = random.Random(master.getrandbits(64))
        formula = schema.instantiate(rng, params)
        model = random_model(rng.randint(0, params.bound), params.atoms, params.agents, rng)
        pos = _pick_position(rng, model, formula)
        if not evaluate(model, pos, formula):
            report.counterexamples.append((model, pos, formula))
    return report


def probe_all(trials: int = 200, params: ProbeParams | None = None, seed=0) -> list:
    return [probe(s, trials, params, seed) for s in SCHEMAS.values()]
