"""Redexes, one-step contraction and reduction traces.

Bang-calculus relations are selected by a :class:`RelationSpec` with
``calculus="bang"`` and ``kind`` one of ``v``, ``d``, ``b``; with
``ground=True`` no reduction happens under ``!``.  The lambda calculus uses
``kind`` ``beta`` (call-by-name) or ``betav`` (call-by-value); its ground
variants reduce in the contexts ``[] | \\x.c | c t`` and ``[] | v t | t v`` (``v`` a value)
respectively.
"""

from __future__ import annotations

import functools
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from .syntax import (
    App,
    Bang,
    Der,
    Lam,
    Path,
    Term,
    Var,
    alpha_eq,
    alpha_key,
    fresh_name,
    is_value,
    all_vars,
    replace_at,
    substitute,
    subterm,
)

BANG_KINDS = ("v", "d", "b")
LAMBDA_KINDS = ("beta", "betav")


class InvalidRedex(ValueError):
    pass


@dataclass(frozen=True)
class RelationSpec:
    calculus: str = "bang"
    kind: str = "b"
    ground: bool = False

    def __post_init__(self):
        allowed = BANG_KINDS if self.calculus == "bang" else LAMBDA_KINDS
        if self.calculus not in ("bang", "lambda") or self.kind not in allowed:
            raise ValueError(f"invalid relation {self.calculus}/{self.kind}")

    def __str__(self) -> str:
        return f"{'ground ' if self.ground else ''}{self.kind}"


def bang(kind: str = "b", ground: bool = False) -> RelationSpec:
    return RelationSpec("bang", kind, ground)


def lam(kind: str = "beta", ground: bool = False) -> RelationSpec:
    return RelationSpec("lambda", kind, ground)


@dataclass(frozen=True)
class Redex:
    position: Path
    kind: str
    ground: bool

    def to_json(self) -> dict:
        return {"path": list(self.position), "kind": self.kind, "ground": self.ground}


# ------------------------------------------------------------- enumeration


def redexes(t: Term, spec: RelationSpec) -> list[Redex]:
    """Redexes of ``t`` for ``spec`` in leftmost-outermost order."""
    out: list[Redex] = []
    if spec.calculus == "bang":
        _bang_redexes(t, (), True, spec, out)
    else:
        _lambda_redexes(t, (), True, spec, out)
    return out


def _bang_redexes(t: Term, path: Path, ground: bool, spec: RelationSpec, out: list[Redex]) -> None:
    match t:
        case App(Lam(), Bang()) if spec.kind in ("v", "b"):
            out.append(Redex(path, "v", ground))
        case Der(Bang()) if spec.kind in ("d", "b"):
            out.append(Redex(path, "d", ground))
    match t:
        case Lam(_, body) | Der(body):
            _bang_redexes(body, path + ("body",), ground, spec, out)
        case Bang(body) if not spec.ground:
            _bang_redexes(body, path + ("body",), False, spec, out)
        case App(f, a):
            _bang_redexes(f, path + ("fun",), ground, spec, out)
            _bang_redexes(a, path + ("arg",), ground, spec, out)


def _lambda_redexes(t: Term, path: Path, ground: bool, spec: RelationSpec, out: list[Redex]) -> None:
    cbv = spec.kind == "betav"
    match t:
        case App(Lam(), a) if not cbv or is_value(a):
            out.append(Redex(path, spec.kind, ground))
    match t:
        case Lam(_, body):
            # CbN ground contexts go under lambda, CbV ones do not.
            inside = ground and not cbv
            if inside or not spec.ground:
                _lambda_redexes(body, path + ("body",), inside, spec, out)
        case App(f, a):
            _lambda_redexes(f, path + ("fun",), ground, spec, out)
            inside = ground and cbv
            if inside or not spec.ground:
                _lambda_redexes(a, path + ("arg",), inside, spec, out)
        case Der() | Bang():
            raise TypeError("bang construct in a lambda term")


def contract(t: Term, kind: str) -> Term:
    """Root step of the given kind; raises InvalidRedex on a shape mismatch."""
    match (kind, t):
        case ("v", App(Lam(x, body), Bang(r))):
            return substitute(body, x, r)
        case ("d", Der(Bang(body))):
            return body
        case ("beta", App(Lam(x, body), a)):
            return substitute(body, x, a)
        case ("betav", App(Lam(x, body), a)) if is_value(a):
            return substitute(body, x, a)
    raise InvalidRedex(f"no {kind}-redex here")


def step(t: Term, r: Redex) -> Term:
    try:
        target = subterm(t, r.position)
    except KeyError as exc:
        raise InvalidRedex(str(exc)) from None
    return replace_at(t, r.position, contract(target, r.kind))


def successors(t: Term, spec: RelationSpec) -> list[tuple[Redex, Term]]:
    return [(r, step(t, r)) for r in redexes(t, spec)]


def is_normal(t: Term, spec: RelationSpec) -> bool:
    return not redexes(t, spec)


# ------------------------------------------------------------------ traces


@dataclass(frozen=True)
class Step:
    redex: Redex
    result: Term


@dataclass(frozen=True)
class Outcome:
    kind: str  # normal | budget_exhausted | cycle | joined
    period: int | None = None

    def to_json(self):
        if self.kind == "cycle":
            return {"cycle": self.period}
        return self.kind


@dataclass
class Trace:
    initial: Term
    steps: list[Step] = field(default_factory=list)
    outcome: Outcome = Outcome("normal")

    @property
    def final(self) -> Term:
        return self.steps[-1].result if self.steps else self.initial

    def terms(self) -> list[Term]:
        return [self.initial] + [s.result for s in self.steps]

    def to_json(self) -> dict:
        from .syntax import print_term

        return {
            "initial": print_term(self.initial),
            "steps": [
                {
                    "path": list(s.redex.position),
                    "kind": s.redex.kind,
                    "result": print_term(s.result),
                }
                for s in self.steps
            ],
            "outcome": self.outcome.to_json(),
        }


def reduce(
    t: Term,
    spec: RelationSpec,
    max_steps: int = 1000,
    detect_cycles: bool = True,
    strategy: str = "leftmost_outermost",
) -> Trace:
    """Iterate leftmost-outermost steps until normal, cyclic or out of budget."""
    if strategy != "leftmost_outermost":
        raise ValueError(f"unknown strategy {strategy!r}")
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    trace = Trace(t)
    seen = {alpha_key(t): 0}
    current = t
    while True:
        rs = redexes(current, spec)
        if not rs:
            trace.outcome = Outcome("normal")
            return trace
        if len(trace.steps) >= max_steps:
            trace.outcome = Outcome("budget_exhausted")
            return trace
        current = step(current, rs[0])
        trace.steps.append(Step(rs[0], current))
        if detect_cycles:
            key = alpha_key(current)
            index = len(trace.steps)
            if key in seen:
                trace.outcome = Outcome("cycle", index - seen[key])
                return trace
            seen[key] = index


def reduce_lambda(t: Term, spec: RelationSpec, max_steps: int = 1000) -> Trace:
    if spec.calculus != "lambda":
        raise ValueError("reduce_lambda needs a lambda relation")
    return reduce(t, spec, max_steps)


# ------------------------------------------------------ parallel reduction


def development(t: Term) -> Term:
    """Contract every v-redex of ``t`` simultaneously."""
    match t:
        case Var():
            return t
        case App(Lam(x, body), Bang(r)):
            return substitute(development(body), x, development(r))
        case App(f, a):
            return App(development(f), development(a))
        case Lam(x, body):
            return Lam(x, development(body))
        case Der(body):
            return Der(development(body))
        case Bang(body):
            return Bang(development(body))
    raise TypeError(f"not a term: {t!r}")


@functools.lru_cache(maxsize=1 << 14)
def parallel_reducts(t: Term) -> tuple[Term, ...]:
    """Every parallel v-reduct of ``t``, one per alpha class."""
    match t:
        case Var():
            found = [t]
        case Lam(x, body):
            found = [Lam(x, s) for s in parallel_reducts(body)]
        case Der(body):
            found = [Der(s) for s in parallel_reducts(body)]
        case Bang(body):
            found = [Bang(s) for s in parallel_reducts(body)]
        case App(f, a):
            found = [App(g, b) for g in parallel_reducts(f) for b in parallel_reducts(a)]
            if isinstance(f, Lam) and isinstance(a, Bang):
                found += [
                    substitute(s, f.var, q)
                    for s in parallel_reducts(f.body)
                    for q in parallel_reducts(a.body)
                ]
        case _:
            raise TypeError(f"not a term: {t!r}")
    unique: dict[tuple, Term] = {}
    for s in found:
        unique.setdefault(alpha_key(s), s)
    return tuple(unique.values())


def parallel_related(t: Term, s: Term) -> bool:
    """Decide whether ``t`` parallel-v-reduces to ``s``."""
    match (t, s):
        case (Var(x), Var(y)):
            return x == y
        case (Lam(x, b), Lam(y, c)):
            z = fresh_name("z", all_vars(b) | all_vars(c) | {x, y})
            return parallel_related(substitute(b, x, Var(z)), substitute(c, y, Var(z)))
        case (Der(b), Der(c)) | (Bang(b), Bang(c)):
            return parallel_related(b, c)
    if not isinstance(t, App):
        return False
    if isinstance(s, App) and parallel_related(t.fun, s.fun) and parallel_related(t.arg, s.arg):
        return True
    if isinstance(t.fun, Lam) and isinstance(t.arg, Bang):
        target = alpha_key(s)
        for body in parallel_reducts(t.fun.body):
            for q in parallel_reducts(t.arg.body):
                if alpha_key(substitute(body, t.fun.var, q)) == target:
                    return True
    return False


# ------------------------------------------------------------ confluence


@dataclass
class JoinResult:
    common: Term
    trace1: Trace
    trace2: Trace


def join(
    t1: Term,
    t2: Term,
    spec: RelationSpec,
    budget: int = 10_000,
) -> JoinResult | None:
    """Breadth-first search, from both ends, for a common reduct.

    ``budget`` bounds the number of distinct terms visited on both sides;
    ``None`` means no common reduct was found within it.
    """
    return join_by(t1, t2, lambda t: successors(t, spec), budget)


def join_by(
    t1: Term,
    t2: Term,
    succ: Callable[[Term], Iterable[tuple[Redex, Term]]],
    budget: int,
) -> JoinResult | None:
    k1, k2 = alpha_key(t1), alpha_key(t2)
    # key -> (parent key, step into this term)
    parents: list[dict[tuple, tuple | None]] = [{k1: None}, {k2: None}]
    terms: dict[tuple, Term] = {k1: t1, k2: t2}
    frontiers = [deque([k1]), deque([k2])]
    if k1 == k2:
        return _witness(k1, parents, terms)
    visited = 2
    while frontiers[0] or frontiers[1]:
        side = 0 if (len(frontiers[0]) <= len(frontiers[1]) and frontiers[0]) or not frontiers[1] else 1
        level = frontiers[side]
        next_level: deque = deque()
        while level:
            key = level.popleft()
            for redex, s in succ(terms[key]):
                sk = alpha_key(s)
                if sk in parents[side]:
                    continue
                parents[side][sk] = (key, Step(redex, s))
                terms.setdefault(sk, s)
                visited += 1
                if sk in parents[1 - side]:
                    return _witness(sk, parents, terms)
                if visited > budget:
                    return None
                next_level.append(sk)
        frontiers[side] = next_level
    return None


def _witness(key: tuple, parents: list[dict], terms: dict) -> JoinResult:
    traces = []
    for side in (0, 1):
        steps = []
        k = key
        while parents[side][k] is not None:
            k, st = parents[side][k]
            steps.append(st)
        steps.reverse()
        traces.append(Trace(terms[k], steps, Outcome("joined")))
    return JoinResult(terms[key], traces[0], traces[1])


def peak_failures(t: Term, spec: RelationSpec) -> list[tuple[Term, Term]]:
    """One-step peaks of ``t`` that do not close in at most one step per side."""
    reducts = {}
    for _, s in successors(t, spec):
        reducts.setdefault(alpha_key(s), s)
    items = list(reducts.items())
    nexts = {
        k: {alpha_key(r) for _, r in successors(s, spec)} | {k} for k, s in items
    }
    failures = []
    for i, (k1, s1) in enumerate(items):
        for k2, s2 in items[i + 1 :]:
            if not nexts[k1] & nexts[k2]:
                failures.append((s1, s2))
    return failures


def commutation_failures(t: Term, ground: bool = True) -> list[tuple[Term, Term]]:
    """Peaks ``s1 <-d t ->v s2`` with no ``r`` such that ``s1 ->v r <-d s2``."""
    d_spec, v_spec = bang("d", ground), bang("v", ground)
    failures = []
    for _, s1 in successors(t, d_spec):
        via_v = {alpha_key(r) for _, r in successors(s1, v_spec)}
        for _, s2 in successors(t, v_spec):
            via_d = {alpha_key(r) for _, r in successors(s2, d_spec)}
            if not via_v & via_d:
                failures.append((s1, s2))
    return failures


def one_step_reducts(t: Term, spec: RelationSpec) -> list[Term]:
    """Distinct (up to alpha) one-step reducts."""
    out: dict[tuple, Term] = {}
    for _, s in successors(t, spec):
        out.setdefault(alpha_key(s), s)
    return list(out.values())


def steps_to(t: Term, s: Term, spec: RelationSpec) -> bool:
    """Whether ``t`` reduces to ``s`` in exactly one step."""
    key = alpha_key(s)
    return any(alpha_key(r) == key for _, r in successors(t, spec))


def is_alpha_in(t: Term, terms: Iterable[Term]) -> bool:
    return any(alpha_eq(t, s) for s in terms)
