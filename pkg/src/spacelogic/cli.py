"""Command-line interface: ``spacelogic <command> [flags]``.

The verdict is always the first line of standard output; diagnostics go to
standard error.  Exit status: 0 success, 1 negative verdict for ``bisim`` and
``probe``, 2 bad input, 3 unsupported fragment, 4 budget exhausted.
"""

from __future__ import annotations

import argparse
import sys

from . import axioms
from .errors import BudgetExhausted, ParseError, SpaceLogicError, UnsupportedFragment
from .modelcheck import bounded_bisim, check
from .models import SpatialModel, parse_model, render_model
from .motion import check_motion, red, simulate
from .sat import (
    DEFAULT_BUDGET_CANDIDATES,
    DEFAULT_BUDGET_CELLS,
    DEFAULT_TIME_LIMIT,
    reduce_star_free,
    satisfiable,
)
from .syntax import Not, is_static, parse_formula, parse_program, render_formula

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_UNSUPPORTED = 3
EXIT_BUDGET = 4

DEFAULT_SEED = 20240101


class InputError(SpaceLogicError):
    pass


def _position(text: str) -> tuple:
    try:
        x, y = text.split(",")
        return int(x), int(y)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected x,y but got {text!r}") from None


def _read_text(value: str) -> str:
    if value.startswith("@"):
        with open(value[1:], encoding="utf-8") as fh:
            return fh.read()
    return value


def _formula_text(args) -> str:
    text = args.formula if args.formula is not None else args.formula_arg
    if text is None:
        raise InputError("no formula given")
    return _read_text(text).strip()


def _load_model(path) -> SpatialModel:
    if path is None:
        return SpatialModel({}, {})
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read())


def _evaluate(model, pos, formula) -> bool:
    if is_static(formula):
        return check(model, pos, formula)
    return check_motion(model, pos, formula)


# -- commands -----------------------------------------------------------------


def cmd_check(args) -> int:
    model = _load_model(args.model)
    formula = parse_formula(_formula_text(args))
    print("true" if _evaluate(model, args.at, formula) else "false")
    return EXIT_OK


def _budget(args) -> dict:
    return {
        "budget_cells": args.budget_cells,
        "budget_candidates": args.budget_candidates,
        "time_limit": args.time_limit,
    }


def _print_witness(result):
    sys.stdout.write(render_model(result.witness_model()))
    print(f"# position {result.position[0]},{result.position[1]}")


def cmd_sat(args) -> int:
    formula = parse_formula(_formula_text(args))
    result = satisfiable(formula, args.fragment, **_budget(args))
    if result.verdict == "inconclusive":
        print(f"INCONCLUSIVE({result.reason})")
        return EXIT_BUDGET
    if result.verdict == "unsat":
        print("UNSAT")
        return EXIT_OK
    print("SAT")
    _print_witness(result)
    return EXIT_OK


def cmd_valid(args) -> int:
    formula = parse_formula(_formula_text(args))
    result = satisfiable(Not(formula), args.fragment, **_budget(args))
    if result.verdict == "inconclusive":
        print(f"INCONCLUSIVE({result.reason})")
        return EXIT_BUDGET
    if result.verdict == "unsat":
        print("VALID")
        return EXIT_OK
    print("INVALID")
    print("# countermodel")
    _print_witness(result)
    return EXIT_OK


def cmd_reduce(args) -> int:
    formula = parse_formula(_formula_text(args))
    print(render_formula(reduce_star_free(red(formula))))
    return EXIT_OK


def _positions_line(model) -> str:
    return " ".join(f"{a}=({x},{y})" for a, (x, y) in sorted(model.positions.items()))


def cmd_simulate(args) -> int:
    model = _load_model(args.model)
    program = parse_program(_read_text(args.program).strip(), model.agents or None)
    formula = parse_formula(_read_text(args.formula).strip()) if args.formula else None
    trace, blocked = simulate(model, program, args.at)
    steps = len(trace) - 1
    print(f"blocked after {steps} step(s)" if blocked else f"completed {steps} step(s)")
    for n, (delta, m) in enumerate(trace):
        label = "start" if delta is None else f"{{{','.join(f'{a}:{x}' for a, x in delta.actions)}}}"
        line = f"{n} {label} {_positions_line(m)}"
        if formula is not None:
            line += f" {'true' if _evaluate(m, args.at, formula) else 'false'}"
        print(line)
    if blocked:
        print("blocked")
    return EXIT_OK


def cmd_bisim(args) -> int:
    m1 = _load_model(args.model)
    m2 = _load_model(args.model2) if args.model2 else m1
    ok = bounded_bisim(m1, args.at, m2, args.at2, args.depth)
    print("bisimilar" if ok else "not bisimilar")
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_probe(args) -> int:
    if args.list:
        print(f"{len(axioms.SCHEMAS)} schemas")
        for s in axioms.SCHEMAS.values():
            print(f"{s.id}\t{s.description}")
        return EXIT_OK
    params = axioms.ProbeParams(bound=args.bound)
    if args.schema == "all":
        schemas = list(axioms.SCHEMAS.values())
    else:
        try:
            schemas = [axioms.get_schema(args.schema)]
        except KeyError as exc:
            raise InputError(str(exc)) from None
    reports = [axioms.probe(s, args.trials, params, args.seed) for s in schemas]
    bad = sum(len(r.counterexamples) for r in reports)
    print("ok" if not bad else f"counterexamples {bad}")
    for r in reports:
        sys.stdout.write(r.to_text())
    return EXIT_OK if not bad else EXIT_NEGATIVE


# -- parser -------------------------------------------------------------------


def _add_formula(p):
    p.add_argument("formula_arg", nargs="?", metavar="FORMULA",
                   help="formula text or @file (alternative to --formula)")
    p.add_argument("-f", "--formula", help="formula text or @file")


def _add_at(p, *names, dest="at"):
    p.add_argument(*names, dest=dest, type=_position, default=(0, 0), metavar="X,Y",
                   help="evaluation position (default 0,0)")


def _add_budget(p):
    p.add_argument("--fragment", choices=["auto", "starfree", "positions"], default="auto")
    p.add_argument("--budget-cells", type=int, default=DEFAULT_BUDGET_CELLS)
    p.add_argument("--budget-candidates", type=int, default=DEFAULT_BUDGET_CANDIDATES)
    p.add_argument("--time-limit", type=float, default=DEFAULT_TIME_LIMIT, help="seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spacelogic",
        description="Model checking, satisfiability and reduction for logics of the discrete plane.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="evaluate a formula at a position of a model")
    p.add_argument("--model", help="model file (default: empty model)")
    _add_formula(p)
    _add_at(p, "--at", "-at")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sat", help="decide satisfiability (SAT prints a witness)")
    _add_formula(p)
    _add_budget(p)
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("valid", help="decide validity (INVALID prints a countermodel)")
    _add_formula(p)
    _add_budget(p)
    p.set_defaults(func=cmd_valid)

    p = sub.add_parser("reduce", help="rewrite a motion formula into boxes over single moves")
    _add_formula(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("simulate", help="run a motion program and print the trace")
    p.add_argument("--model", help="model file (default: empty model)")
    p.add_argument("-p", "--program", required=True, help="motion program text or @file")
    p.add_argument("-f", "--formula", help="formula to evaluate after every step")
    _add_at(p, "--at", "-at")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bisim", help="decide bounded bisimilarity of two pointed models")
    p.add_argument("--model", help="first model file")
    p.add_argument("--model2", help="second model file (default: the first)")
    _add_at(p, "--at", "-at")
    _add_at(p, "--at2", dest="at2")
    p.add_argument("--depth", type=int, default=1)
    p.set_defaults(func=cmd_bisim)

    p = sub.add_parser("probe", help="search random models for counterexamples to a schema")
    p.add_argument("--schema", default="all", help="schema id or 'all'")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--bound", type=int, default=2, help="largest model bound sampled")
    p.add_argument("--list", action="store_true", help="list schema ids and exit")
    p.set_defaults(func=cmd_probe)
    return parser


def _glue_negative_positions(argv):
    # argparse takes "-1,0" for an option; bind it to its flag as "--at=-1,0"
    out = []
    it = iter(argv)
    for tok in it:
        if tok in ("--at", "-at", "--at2"):
            nxt = next(it, None)
            if nxt is not None:
                out.append(f"{tok}={nxt}")
                continue
        out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_positions(argv))
    try:
        return args.func(args)
    except UnsupportedFragment as exc:
        print("unsupported")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except BudgetExhausted as exc:
        print(f"INCONCLUSIVE({exc})")
        return EXIT_BUDGET
    except (ParseError, InputError, ValueError, OSError) as exc:
        print("error")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
