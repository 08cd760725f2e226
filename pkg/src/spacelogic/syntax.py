"""Formulas and programs of the spatial dynamic logic, with parser and printer.

One AST serves all three grammars: spatial programs (compass moves, ``;``,
``+``, ``*``, tests), motion programs (joint actions, ``;``, ``+``, tests)
and formulas.  Derived connectives are desugared while parsing, so every
downstream algorithm only sees ``Bottom``, ``Atom``, ``Here``, ``Not``,
``And`` and the modal nodes.

Concrete syntax::

    p  here(i)  true  false  ~f  (f & g)  (f | g)  (f -> g)  (f <-> g)
    [pi]f  <pi>f  S(i,k)f  <<i,j>>f
    pi ::= U | D | L | R | pi;pi | pi+pi | pi* | f? | {i:up,j:stay}

Unary operators bind tightest, ``;`` binds tighter than ``+``.  Binary
formula connectives may be written without parentheses; they then bind
``&`` > ``|`` > ``->`` > ``<->``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

from .errors import ParseError, UnsupportedFragment

ACTIONS = ("up", "down", "left", "right", "skip")
DIRECTIONS = ("U", "D", "R", "L")
KEYWORDS = frozenset({"here", "true", "false"})
ATOM_RE = re.compile(r"[a-z][a-z0-9_]*\Z")


class Formula:
    """Base class of formula nodes."""

    __slots__ = ()


class Program:
    """Base class of spatial and motion program nodes."""

    __slots__ = ()


def _node(cls):
    """Frozen dataclass whose hash is computed once; ASTs are hashed constantly."""
    cls = dataclass(frozen=True)(cls)
    field_hash = cls.__hash__

    def __hash__(self):
        try:
            return self.__dict__["_hash"]
        except KeyError:
            h = field_hash(self)
            object.__setattr__(self, "_hash", h)
            return h

    def __getstate__(self):
        # string hashes differ between processes, so never ship the cached one
        state = dict(self.__dict__)
        state.pop("_hash", None)
        return state

    cls.__hash__ = __hash__
    cls.__getstate__ = __getstate__
    return cls


# -- formulas -----------------------------------------------------------------


@_node
class Bottom(Formula):
    pass


@_node
class Atom(Formula):
    name: str


@_node
class Here(Formula):
    agent: str


@_node
class Not(Formula):
    sub: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class BoxS(Formula):
    """``[alpha]body`` for a spatial program ``alpha``."""

    program: Program
    body: Formula


@_node
class BoxM(Formula):
    """``[beta]body`` for a motion program ``beta``."""

    program: Program
    body: Formula


@_node
class Sees(Formula):
    """Agent ``agent`` with vision range ``k`` sees that ``body``."""

    agent: str
    k: int
    body: Formula


@_node
class Coalition(Formula):
    """``<<C>>body``: coalition ``members`` can force ``body`` in one step."""

    members: frozenset
    body: Formula


# -- programs -----------------------------------------------------------------


@_node
class Move(Program):
    direction: str  # one of U, D, R, L


@_node
class Seq(Program):
    first: Program
    second: Program


@_node
class Choice(Program):
    left: Program
    right: Program


@_node
class Star(Program):
    body: Program


@_node
class Test(Program):
    cond: Formula


@_node
class Joint(Program):
    """A joint action; ``actions`` is a tuple of ``(agent, action)`` sorted by agent.

    Agents missing from the tuple do nothing.
    """

    actions: tuple

    def action(self, agent: str) -> str:
        for name, act in self.actions:
            if name == agent:
                return act
        return "skip"

    @property
    def agents(self) -> frozenset:
        return frozenset(name for name, _ in self.actions)


UP, DOWN, RIGHT, LEFT = (Move(d) for d in DIRECTIONS)
BOTTOM = Bottom()
TOP = Not(BOTTOM)


def joint(mapping) -> Joint:
    """Build a Joint from a mapping or iterable of pairs."""
    items = mapping.items() if hasattr(mapping, "items") else mapping
    out = {}
    for agent, act in items:
        act = "skip" if act == "stay" else act
        if act not in ACTIONS:
            raise ValueError(f"unknown action {act!r}")
        out[str(agent)] = act
    return Joint(tuple(sorted(out.items())))


# -- derived connectives ------------------------------------------------------


def neg(f: Formula) -> Formula:
    return Not(f)


def conj(*fs: Formula) -> Formula:
    """Conjunction folded to the right; the empty conjunction is ``true``."""
    if not fs:
        return TOP
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = And(f, out)
    return out


def disj(*fs: Formula) -> Formula:
    """Disjunction via De Morgan; the empty disjunction is ``false``."""
    if not fs:
        return BOTTOM
    out = fs[-1]
    for f in reversed(fs[:-1]):
        out = Not(And(Not(f), Not(out)))
    return out


def implies(a: Formula, b: Formula) -> Formula:
    return Not(And(a, Not(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def box(program: Program, body: Formula) -> Formula:
    """``[program]body``, choosing the motion box when a joint action occurs."""
    if is_motion_program(program):
        return BoxM(program, body)
    return BoxS(program, body)


def diamond(program: Program, body: Formula) -> Formula:
    return Not(box(program, Not(body)))


def seq(*programs: Program) -> Program:
    """Sequential composition of one or more programs, left-associated.

    The empty sequence is the no-op test ``true?``.
    """
    if not programs:
        return Test(TOP)
    out = programs[0]
    for p in programs[1:]:
        out = Seq(out, p)
    return out


def iterate_box(direction: str, count: int, body: Formula) -> Formula:
    """``[U]^x`` style iterated boxes; a negative count flips the direction."""
    opposite = {"U": "D", "D": "U", "R": "L", "L": "R"}
    if count < 0:
        direction, count = opposite[direction], -count
    for _ in range(count):
        body = BoxS(Move(direction), body)
    return body


# -- structural measures ------------------------------------------------------


def is_motion_program(p: Program) -> bool:
    return any(isinstance(q, Joint) for q in program_nodes(p))


def program_nodes(p: Program) -> Iterator[Program]:
    """Pre-order traversal of program nodes (not descending into tests)."""
    stack = [p]
    while stack:
        q = stack.pop()
        yield q
        if isinstance(q, (Seq, Choice)):
            stack.append(q.second if isinstance(q, Seq) else q.right)
            stack.append(q.first if isinstance(q, Seq) else q.left)
        elif isinstance(q, Star):
            stack.append(q.body)


def _test_formulas(p: Program) -> list:
    return [q.cond for q in program_nodes(p) if isinstance(q, Test)]


@lru_cache(maxsize=1 << 16)
def modal_degree(f: Formula) -> int:
    """Nesting depth of modal operators.

    A box counts 1, plus the largest degree of any test inside its program.
    """
    if isinstance(f, (Bottom, Atom, Here)):
        return 0
    if isinstance(f, Not):
        return modal_degree(f.sub)
    if isinstance(f, And):
        return max(modal_degree(f.left), modal_degree(f.right))
    if isinstance(f, (BoxS, BoxM)):
        tests = [modal_degree(c) for c in _test_formulas(f.program)]
        return 1 + max(tests, default=0) + modal_degree(f.body)
    if isinstance(f, (Sees, Coalition)):
        return 1 + modal_degree(f.body)
    raise TypeError(f"not a formula: {f!r}")


def program_size(p: Program) -> int:
    if isinstance(p, (Move, Joint)):
        return 1
    if isinstance(p, Seq):
        return 1 + program_size(p.first) + program_size(p.second)
    if isinstance(p, Choice):
        return 1 + program_size(p.left) + program_size(p.right)
    if isinstance(p, Star):
        return 1 + program_size(p.body)
    if isinstance(p, Test):
        return 1 + formula_size(p.cond)
    raise TypeError(f"not a program: {p!r}")


def formula_size(f: Formula) -> int:
    """Number of AST nodes, program nodes included."""
    if isinstance(f, (Bottom, Atom, Here)):
        return 1
    if isinstance(f, Not):
        return 1 + formula_size(f.sub)
    if isinstance(f, And):
        return 1 + formula_size(f.left) + formula_size(f.right)
    if isinstance(f, (BoxS, BoxM)):
        return 1 + program_size(f.program) + formula_size(f.body)
    if isinstance(f, (Sees, Coalition)):
        return 1 + formula_size(f.body)
    raise TypeError(f"not a formula: {f!r}")


def children(f: Formula) -> list:
    """Immediate formula children, tests inside programs included."""
    if isinstance(f, Not):
        return [f.sub]
    if isinstance(f, And):
        return [f.left, f.right]
    if isinstance(f, (BoxS, BoxM)):
        return _test_formulas(f.program) + [f.body]
    if isinstance(f, (Sees, Coalition)):
        return [f.body]
    return []


def enumerate_subformulas(f: Formula) -> list:
    """Distinct subformulas, each listed after all of its strict subformulas."""
    seen = set()
    order = []

    def visit(g):
        if g in seen:
            return
        for c in children(g):
            visit(c)
        seen.add(g)
        order.append(g)

    visit(f)
    return order


def vocabulary(f: Formula) -> tuple:
    """The (atoms, agents) occurring anywhere in ``f`` as two frozensets of names."""
    atoms, agents = set(), set()
    for g in enumerate_subformulas(f):
        if isinstance(g, Atom):
            atoms.add(g.name)
        elif isinstance(g, Here):
            agents.add(g.agent)
        elif isinstance(g, Sees):
            agents.add(g.agent)
        elif isinstance(g, Coalition):
            agents.update(g.members)
        elif isinstance(g, (BoxS, BoxM)):
            for q in program_nodes(g.program):
                if isinstance(q, Joint):
                    agents.update(q.agents)
    return frozenset(atoms), frozenset(agents)


def has_star(f: Formula) -> bool:
    return any(
        isinstance(q, Star)
        for g in enumerate_subformulas(f)
        if isinstance(g, (BoxS, BoxM))
        for q in program_nodes(g.program)
    )


def is_static(f: Formula) -> bool:
    """True when ``f`` has no motion, perception or coalition operators."""
    return not any(isinstance(g, (BoxM, Sees, Coalition)) for g in enumerate_subformulas(f))


def expand_programs(f: Formula, keep_stars: bool = True) -> Formula:
    """Rewrite boxes over ``;``, ``+`` and tests into boxes over single moves.

    Uses ``[a;b]g <-> [a][b]g``, ``[a+b]g <-> [a]g & [b]g`` and
    ``[t?]g <-> (t -> g)``.  Stars over a single move survive when
    ``keep_stars`` is set; any other star raises UnsupportedFragment.
    """
    cache = {}

    def rw(g):
        if g in cache:
            return cache[g]
        if isinstance(g, (Bottom, Atom, Here)):
            out = g
        elif isinstance(g, Not):
            out = Not(rw(g.sub))
        elif isinstance(g, And):
            out = And(rw(g.left), rw(g.right))
        elif isinstance(g, BoxS):
            out = rw_box(g.program, g.body)
        else:
            raise UnsupportedFragment(f"not a static formula: {render_formula(g)}")
        cache[g] = out
        return out

    def rw_box(p, body):
        if isinstance(p, Move):
            return BoxS(p, rw(body))
        if isinstance(p, Seq):
            return rw_box(p.first, BoxS(p.second, body))
        if isinstance(p, Choice):
            return And(rw_box(p.left, body), rw_box(p.right, body))
        if isinstance(p, Test):
            return Not(And(rw(p.cond), Not(rw(body))))
        if isinstance(p, Star):
            if keep_stars and isinstance(p.body, Move):
                return BoxS(p, rw(body))
            raise UnsupportedFragment(f"star over {render_program(p.body)} is not supported")
        raise UnsupportedFragment(f"not a spatial program: {render_program(p)}")

    return rw(f)


# -- printing -----------------------------------------------------------------


def render_formula(f: Formula) -> str:
    if isinstance(f, Bottom):
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Here):
        return f"here({f.agent})"
    if isinstance(f, Not):
        if isinstance(f.sub, Bottom):
            return "true"
        return "~" + render_formula(f.sub)
    if isinstance(f, And):
        return f"({render_formula(f.left)} & {render_formula(f.right)})"
    if isinstance(f, (BoxS, BoxM)):
        return f"[{render_program(f.program)}]{render_formula(f.body)}"
    if isinstance(f, Sees):
        return f"S({f.agent},{f.k}){render_formula(f.body)}"
    if isinstance(f, Coalition):
        return f"<<{','.join(sorted(f.members))}>>{render_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


_PREC = {Choice: 1, Seq: 2, Star: 3}


def _prec(p):
    return _PREC.get(type(p), 4)


def render_program(p: Program) -> str:
    def wrap(q, paren):
        s = render_program(q)
        return f"({s})" if paren else s

    if isinstance(p, Move):
        return p.direction
    if isinstance(p, Joint):
        acts = ",".join(f"{a}:{'stay' if act == 'skip' else act}" for a, act in p.actions)
        return "{" + acts + "}"
    if isinstance(p, Test):
        return render_formula(p.cond) + "?"
    if isinstance(p, Star):
        return wrap(p.body, _prec(p.body) < 3) + "*"
    if isinstance(p, Seq):
        return wrap(p.first, _prec(p.first) < 2) + ";" + wrap(p.second, _prec(p.second) <= 2)
    if isinstance(p, Choice):
        return wrap(p.left, False) + "+" + wrap(p.right, _prec(p.right) <= 1)
    raise TypeError(f"not a program: {p!r}")


# -- parsing ------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<word>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><->|->|[~&|\[\]()<>{};+*?,:])"
)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, agents):
        self.toks = tokenize(text)
        self.i = 0
        self.agents = None if agents is None else frozenset(str(a) for a in agents)

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k=1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text) -> bool:
        return self.tok.kind in ("op", "word") and self.tok.text == text

    def expect(self, text) -> _Tok:
        if not self.at(text):
            got = self.tok.text or "end of input"
            raise ParseError(f"expected {text!r}, got {got!r}", self.tok.pos)
        t = self.tok
        self.i += 1
        return t

    def agent_id(self) -> str:
        t = self.tok
        if t.kind not in ("word", "int"):
            raise ParseError(f"expected an agent name, got {t.text!r}", t.pos)
        if self.agents is not None and t.text not in self.agents:
            raise ParseError(f"undeclared agent {t.text!r}", t.pos)
        self.i += 1
        return t.text

    # formulas
    def formula(self) -> Formula:
        left = self.implication()
        while self.at("<->"):
            self.i += 1
            left = iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.i += 1
            return implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("|"):
            self.i += 1
            left = disj(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        t = self.tok
        if self.at("~"):
            self.i += 1
            return Not(self.unary())
        if self.at("["):
            self.i += 1
            prog = self.program()
            self.expect("]")
            return self._make_box(prog, self.unary(), t.pos)
        if self.at("<"):
            if self.peek().text == "<":
                members = self._try(self._coalition_head)
                if members is not None:
                    return Coalition(members, self.unary())
            self.i += 1
            prog = self.program()
            self.expect(">")
            body = self.unary()
            return Not(self._make_box(prog, Not(body), t.pos))
        if t.kind == "word" and t.text == "S" and self.peek().text == "(":
            self.i += 2
            agent = self.agent_id()
            self.expect(",")
            if self.tok.kind != "int":
                raise ParseError("expected a vision range", self.tok.pos)
            k = int(self.tok.text)
            self.i += 1
            self.expect(")")
            return Sees(agent, k, self.unary())
        return self.primary()

    def _coalition_head(self) -> frozenset:
        self.expect("<")
        self.expect("<")
        members = []
        if not self.at(">"):
            members.append(self.agent_id())
            while self.at(","):
                self.i += 1
                members.append(self.agent_id())
        self.expect(">")
        self.expect(">")
        return frozenset(members)

    def primary(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "word":
            if t.text == "true":
                self.i += 1
                return TOP
            if t.text == "false":
                self.i += 1
                return BOTTOM
            if t.text == "here":
                self.i += 1
                self.expect("(")
                agent = self.agent_id()
                self.expect(")")
                return Here(agent)
            if ATOM_RE.match(t.text):
                self.i += 1
                return Atom(t.text)
        raise ParseError(f"unexpected {t.text or 'end of input'!r}", t.pos)

    def _make_box(self, prog, body, pos) -> Formula:
        kinds = {type(q) for q in program_nodes(prog)}
        if Joint in kinds:
            if Move in kinds:
                raise ParseError("program mixes compass moves and joint actions", pos)
            if Star in kinds:
                raise ParseError("motion programs cannot be iterated", pos)
            return BoxM(prog, body)
        return BoxS(prog, body)

    # programs
    def program(self) -> Program:
        left = self.pseq()
        while self.at("+"):
            self.i += 1
            left = Choice(left, self.pseq())
        return left

    def pseq(self) -> Program:
        left = self.ppostfix()
        while self.at(";"):
            self.i += 1
            left = Seq(left, self.ppostfix())
        return left

    def ppostfix(self) -> Program:
        p = self.pprimary()
        while self.at("*"):
            self.i += 1
            p = Star(p)
        return p

    def pprimary(self) -> Program:
        t = self.tok
        if t.kind == "word" and t.text in DIRECTIONS:
            self.i += 1
            return Move(t.text)
        if self.at("{"):
            return self.joint_action()
        if self.at("("):
            p = self._try(self._paren_program)
            if p is not None:
                return p
        cond = self.unary()
        self.expect("?")
        return Test(cond)

    def _paren_program(self) -> Program:
        self.expect("(")
        p = self.program()
        self.expect(")")
        return p

    def joint_action(self) -> Joint:
        self.expect("{")
        acts = {}
        while True:
            pos = self.tok.pos
            agent = self.agent_id()
            self.expect(":")
            act = self.tok.text
            if self.tok.kind != "word" or act not in ACTIONS + ("stay",):
                raise ParseError(f"unknown action {act!r}", self.tok.pos)
            self.i += 1
            if agent in acts:
                raise ParseError(f"agent {agent!r} acts twice", pos)
            acts[agent] = "skip" if act == "stay" else act
            if not self.at(","):
                break
            self.i += 1
        self.expect("}")
        if self.agents is not None:
            for a in self.agents:
                acts.setdefault(a, "skip")
        return joint(acts)

    def _try(self, fn):
        saved = self.i
        try:
            return fn()
        except ParseError:
            self.i = saved
            return None


def parse_formula(text: str, agents: Iterable[str] | None = None) -> Formula:
    """Parse ``text`` into a Formula.

    When ``agents`` is given, references to other agents are rejected and
    every joint action is completed with ``stay`` for unmentioned agents.
    """
    p = _Parser(text, agents)
    f = p.formula()
    if p.tok.kind != "eof":
        raise ParseError(f"trailing input {p.tok.text!r}", p.tok.pos)
    return f


def parse_program(text: str, agents: Iterable[str] | None = None) -> Program:
    p = _Parser(text, agents)
    prog = p.program()
    if p.tok.kind != "eof":
        raise ParseError(f"trailing input {p.tok.text!r}", p.tok.pos)
    return prog
