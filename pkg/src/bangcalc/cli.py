"""Command-line interface: ``bangcalc <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys

from . import harness, relsem, rewrite, translate
from .reltypes import Bound, enumerate_types, parse_type, show_type
from .syntax import ParseError, from_json, parse_bang, parse_lambda, print_term, to_json


def _dump(data) -> str:
    return json.dumps(data, sort_keys=True, ensure_ascii=False, indent=2)


def _term(text: str, calculus: str):
    return parse_lambda(text) if calculus == "lambda" else parse_bang(text)


def _bound(args) -> Bound:
    return Bound(args.depth, args.width, args.budget, args.copy_cap)


def _add_bound(p: argparse.ArgumentParser, budget: int = 12) -> None:
    p.add_argument("--depth", type=int, default=2, help="maximum arrow nesting")
    p.add_argument("--width", type=int, default=2, help="maximum multiset cardinality")
    p.add_argument("--budget", type=int, default=budget, help="maximum nodes per judgement")
    p.add_argument("--copy-cap", type=int, default=None, help="copies tried for boxes of unknown size")


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")


def cmd_parse(args) -> int:
    t = _term(args.term, args.calculus)
    print(_dump(to_json(t)) if args.format == "json" else print_term(t))
    return 0


def cmd_print(args) -> int:
    text = sys.stdin.read() if args.ast == "-" else args.ast
    print(print_term(from_json(json.loads(text))))
    return 0


def cmd_reduce(args) -> int:
    calculus = args.calculus
    relation = args.relation or ("b" if calculus == "bang" else "beta")
    spec = rewrite.RelationSpec(calculus, relation, args.ground)
    trace = rewrite.reduce(_term(args.term, calculus), spec, args.max_steps, not args.no_cycles)
    if args.format == "json":
        print(_dump(trace.to_json()))
        return 0
    print(print_term(trace.initial))
    for st in trace.steps:
        where = ".".join(st.redex.position) or "root"
        print(f"  ->{st.redex.kind} [{where}] {print_term(st.result)}")
    out = trace.outcome
    print(f"outcome: {out.kind}" + (f" (period {out.period})" if out.kind == "cycle" else ""))
    return 0


def cmd_translate(args) -> int:
    t = parse_lambda(args.term)
    image = translate.cbv(t) if args.cbv else translate.cbn(t)
    print(_dump(to_json(image)) if args.format == "json" else print_term(image))
    return 0


def cmd_untranslate(args) -> int:
    t = parse_bang(args.term)
    back = translate.forgetful(t) if args.forgetful else translate.cbn_inverse(t)
    print(_dump(to_json(back)) if args.format == "json" else print_term(back))
    return 0


def _vars(args, t):
    from .syntax import free_vars

    if args.vars is not None:
        return tuple(v for v in args.vars.split(",") if v)
    return tuple(sorted(free_vars(t)))


def cmd_check(args) -> int:
    what = args.what
    terms = args.terms
    if what == "simulation":
        t = parse_lambda(terms[0])
        reports = translate.check_simulation(t, args.mode, args.max_steps, not args.strategy_only)
        print(_dump({"ok": all(r.ok for r in reports), "reports": [r.to_json() for r in reports]}))
        return 0 if all(r.ok for r in reports) else 1
    if what == "confluence":
        t = parse_bang(terms[0])
        spec = rewrite.bang(args.relation or "b", args.ground)
        if len(terms) >= 2:
            result = rewrite.join(t, parse_bang(terms[1]), spec, args.join_budget)
            if result is None:
                print(_dump({"joined": False}))
                return 1
            print(_dump({
                "joined": True,
                "common": print_term(result.common),
                "trace1": result.trace1.to_json(),
                "trace2": result.trace2.to_json(),
            }))
            return 0
        bad = rewrite.peak_failures(t, spec)
        print(_dump({"ok": not bad, "open_peaks": [[print_term(a), print_term(b)] for a, b in bad]}))
        return 0 if not bad else 1
    if what == "equiv":
        if len(terms) != 2:
            raise SystemExit("check equiv needs two lambda terms")
        try:
            verdict = translate.check_equiv_preservation(
                parse_lambda(terms[0]), parse_lambda(terms[1]), args.mode.split("_")[0], args.join_budget
            )
        except translate.Inconclusive as exc:
            print(_dump({"joined": None, "inconclusive": str(exc)}))
            return 1
        print(_dump(verdict.to_json()))
        return 0
    bound = _bound(args)
    if what == "factorization":
        t = parse_lambda(terms[0])
        vars_ = _vars(args, t)
        v = relsem.check_factorization_cbn(t, vars_, bound)
        print(_dump(v.to_json(vars_)))
        return 0 if v.equal else 1
    if what == "inclusion":
        t = parse_lambda(terms[0])
        r = relsem.check_cbv_inclusion(t, _vars(args, t), bound)
        print(_dump(r.to_json()))
        return 0 if r.inclusion_holds else 1
    if what == "invariance":
        t = parse_bang(terms[0])
        vars_ = _vars(args, t)
        v = relsem.check_invariance(t, args.steps, vars_, bound)
        print(_dump(v.to_json(vars_)))
        return 0 if v.equal else 1
    raise SystemExit(f"unknown check {what!r}")


def cmd_types(args) -> int:
    bound = _bound(args)
    if args.term is None:
        items = [show_type(t) for t in enumerate_types(bound)]
        print(_dump(items) if args.format == "json" else "\n".join(items))
        return 0
    system = {"bang": "bang", "cbv": "cbv", "cbn": "cbn_oracle"}[args.system]
    t = parse_bang(args.term) if system == "bang" else parse_lambda(args.term)
    vars_ = _vars(args, t)
    if args.type is not None:
        env = {}
        for item in args.env or []:
            name, _, ty = item.partition(":")
            env[name.strip()] = parse_type(ty)
        ok = relsem.derivable(system, env, t, parse_type(args.type), bound)
        print(_dump({"derivable": ok}))
        return 0 if ok else 1
    js = relsem.interpret(system, t, vars_, bound)
    if args.format == "json":
        print(_dump({"vars": list(vars_), "judgements": js.to_json()}))
    else:
        for env, ty in js:
            ctx = ", ".join(f"{x}:{show_type(a)}" for x, a in zip(vars_, env))
            print(f"{ctx} |- {show_type(ty)}" if ctx else f"|- {show_type(ty)}")
    return 0


def cmd_suite(args) -> int:
    budgets = {}
    for item in args.budget or []:
        key, _, value = item.partition("=")
        budgets[key] = int(value)
    report = harness.run_suite(args.name, args.cases, args.seed, budgets, args.only)
    data = report.to_json(timings=not args.no_timings)
    if args.format == "json":
        print(_dump(data))
    else:
        for p in report.properties:
            status = "ok" if p.ok else f"FAILED ({len(p.failures)})"
            print(f"{p.name:32} {p.cases_run:6} cases  {p.elapsed:7.2f}s  {status}")
            for f in p.failures[:3]:
                print(f"    case {f.case} seed {f.case_seed}: {f.detail}")
                print(f"      shrunk: {f.shrunk}")
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bangcalc", description="Bang calculus toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse a term and print it back")
    p.add_argument("term")
    p.add_argument("--calculus", choices=("bang", "lambda"), default="bang")
    _add_format(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("print", help="print a JSON AST as text ('-' reads stdin)")
    p.add_argument("ast")
    p.set_defaults(func=cmd_print)

    p = sub.add_parser("reduce", help="leftmost-outermost reduction trace")
    p.add_argument("term")
    p.add_argument("--calculus", choices=("bang", "lambda"), default="bang")
    p.add_argument("--relation", choices=("v", "d", "b", "beta", "betav"))
    p.add_argument("--ground", action="store_true")
    p.add_argument("--max-steps", type=int, default=100)
    p.add_argument("--no-cycles", action="store_true", help="disable cycle detection")
    _add_format(p)
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("translate", help="translate a lambda term")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cbn", action="store_true")
    g.add_argument("--cbv", action="store_true")
    p.add_argument("term")
    _add_format(p)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("untranslate", help="map a translation image back")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cbn", action="store_true")
    g.add_argument("--forgetful", "--cbv-forgetful", dest="forgetful", action="store_true")
    p.add_argument("term")
    _add_format(p)
    p.set_defaults(func=cmd_untranslate)

    p = sub.add_parser("check", help="run a checker")
    p.add_argument(
        "what",
        choices=("simulation", "confluence", "equiv", "factorization", "inclusion", "invariance"),
    )
    p.add_argument("terms", nargs="+")
    p.add_argument("--mode", choices=translate.MODES, default="cbn")
    p.add_argument("--max-steps", type=int, default=10)
    p.add_argument("--strategy-only", action="store_true", help="follow only the deterministic strategy")
    p.add_argument("--relation", choices=("v", "d", "b"))
    p.add_argument("--ground", action="store_true")
    p.add_argument("--join-budget", type=int, default=10_000)
    p.add_argument("--steps", type=int, default=3)
    p.add_argument("--vars", help="comma-separated environment variables")
    _add_bound(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("types", help="enumerate types or interpret a term")
    p.add_argument("--system", choices=("bang", "cbv", "cbn"), default="bang")
    p.add_argument("--term")
    p.add_argument("--type", help="check a single judgement instead")
    p.add_argument("--env", action="append", help="NAME:TYPE entry of the environment")
    p.add_argument("--vars", help="comma-separated environment variables")
    _add_bound(p, budget=8)
    _add_format(p)
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("suite", help="run a property suite")
    p.add_argument("--name", choices=("rewrite", "translate", "relsem", "all"), default="all")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=None, help="overridden by BANGCALC_SEED")
    p.add_argument("--only", action="append", help="restrict to the named property")
    p.add_argument("--budget", action="append", help="KEY=N override, e.g. join_budget=5000")
    p.add_argument("--no-timings", action="store_true", help="omit elapsed times from JSON")
    _add_format(p)
    p.set_defaults(func=cmd_suite)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
