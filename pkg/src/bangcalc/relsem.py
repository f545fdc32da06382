"""Bounded relational interpretations.

Three type systems are implemented over the universe of :mod:`reltypes`:

``bang``        the system for bang terms (axiom ``x:[a] |- x:a``, boxes
                sum k copies, dereliction opens a singleton multiset);
``cbv``         the call-by-value system on lambda terms, whose types are
                always multisets;
``cbn_oracle``  the usual call-by-name multiset system on lambda terms.

A fourth engine, ``cbv_macro``, types lambda terms with the three rules that
the bang system derives for call-by-value translations; it exists to cross
check ``bang`` on translated terms.

Each subterm is interpreted bottom-up as a list of *schemes*: judgements with
type variables, produced by unification.  Multisets inside schemes have a
fixed length, so environment sums are concatenations.  Copy counts are fixed
by the surrounding type whenever it is known and otherwise range over
``0..bound.copies``.  Ground judgements are obtained at the root by
instantiating the variables with every type that keeps the judgement within
the bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator

from .reltypes import (
    Arrow,
    Bound,
    Mset,
    RelType,
    arrow_depth,
    judgement_in_bound,
    show_type,
    types_of_size,
)
from .syntax import App, Bang, Der, Lam, Term, Var, free_vars, is_lambda, rename_apart

SYSTEMS = ("bang", "cbv", "cbn_oracle", "cbv_macro")
MODES = {"psem": "bang", "intv": "cbv", "intn_oracle": "cbn_oracle", "cbv_macro": "cbv_macro"}

# Scheme types are tuples:
#   ("L", (t1, ..., tn))   multiset of fixed length
#   ("A", src, res)        arrow; src is an "L" or an "X" variable
#   ("x", n)               variable ranging over all types
#   ("X", n)               variable ranging over multisets


class SchemeExplosion(RuntimeError):
    """The symbolic search exceeded its size guard; raise the guard or
    shrink the term instead of trusting a truncated answer."""


MAX_SCHEMES = 200_000
ROOT = (0, frozenset(), (), 0)


class _Fresh:
    def __init__(self):
        self.next = 0

    def var(self, kind: str = "x") -> tuple:
        self.next += 1
        return (kind, self.next)

    def vars(self, n: int) -> tuple:
        return tuple(self.var() for _ in range(n))


# ------------------------------------------------------------ unification


def _walk(t, s: dict):
    while t[0] in "xX" and t in s:
        t = s[t]
    return t


def _resolve(t, s: dict):
    t = _walk(t, s)
    if t[0] == "L":
        return ("L", tuple(_resolve(e, s) for e in t[1]))
    if t[0] == "A":
        return ("A", _resolve(t[1], s), _resolve(t[2], s))
    return t


def _occurs(v, t, s) -> bool:
    t = _walk(t, s)
    if t == v:
        return True
    if t[0] == "L":
        return any(_occurs(v, e, s) for e in t[1])
    if t[0] == "A":
        return _occurs(v, t[1], s) or _occurs(v, t[2], s)
    return False


def _bind(v, t, s):
    if _occurs(v, t, s):
        return None
    s2 = dict(s)
    s2[v] = t
    return s2


def _unify(a, b, s: dict) -> Iterator[dict]:
    a, b = _walk(a, s), _walk(b, s)
    if a == b:
        yield s
        return
    ka, kb = a[0], b[0]
    if ka == "x" or (ka == "X" and kb == "X"):
        s2 = _bind(a, b, s)
    elif kb == "x":
        s2 = _bind(b, a, s)
    elif ka == "X":
        s2 = _bind(a, b, s) if kb == "L" else None
    elif kb == "X":
        s2 = _bind(b, a, s) if ka == "L" else None
    elif ka == "A" and kb == "A":
        for s1 in _unify(a[1], b[1], s):
            yield from _unify(a[2], b[2], s1)
        return
    elif ka == "L" and kb == "L":
        if len(a[1]) == len(b[1]):
            yield from _unify_lists(a[1], b[1], s)
        return
    else:
        return
    if s2 is not None:
        yield s2


def _unify_lists(xs, ys, s) -> Iterator[dict]:
    """Unify two multisets given as lists: try every bijection."""
    if not xs:
        yield s
        return
    tried = set()
    for j, y in enumerate(ys):
        ry = _resolve(y, s)
        if ry in tried:
            continue
        tried.add(ry)
        rest = ys[:j] + ys[j + 1 :]
        for s2 in _unify(xs[0], y, s):
            yield from _unify_lists(xs[1:], rest, s2)


# ---------------------------------------------------------------- schemes

# A scheme is (env, ty) with env a tuple of (name, elements) sorted by name.


def _env_sum(*envs):
    out: dict[str, tuple] = {}
    for env in envs:
        for name, elems in env:
            out[name] = out.get(name, ()) + elems
    return tuple(sorted(out.items()))


def _shape(t):
    if t[0] in "xX":
        return (0, t[0])
    if t[0] == "L":
        return (1, len(t[1]), tuple(sorted(_shape(e) for e in t[1])))
    return (2, _shape(t[1]), _shape(t[2]))


def _canon(env, ty, s):
    """Resolve, order multiset elements, and number variables from 0."""
    names: dict = {}

    def sort_list(elems):
        return tuple(sorted(elems, key=_shape))

    def norm(t):
        t = _walk(t, s)
        if t[0] == "L":
            return ("L", sort_list(norm(e) for e in t[1]))
        if t[0] == "A":
            return ("A", norm(t[1]), norm(t[2]))
        return t

    def number(t):
        if t[0] in "xX":
            if t not in names:
                names[t] = (t[0], len(names))
            return names[t]
        if t[0] == "L":
            return ("L", tuple(number(e) for e in t[1]))
        return ("A", number(t[1]), number(t[2]))

    env_n = tuple((x, sort_list(norm(e) for e in elems)) for x, elems in env)
    ty_n = norm(ty)
    env_c = tuple((x, tuple(number(e) for e in elems)) for x, elems in env_n)
    return (env_c, number(ty_n)), len(names)


def _rename(scheme, nvars: int, fresh: _Fresh):
    base = fresh.next
    fresh.next += nvars

    def go(t):
        if t[0] in "xX":
            return (t[0], t[1] + base + 1)
        if t[0] == "L":
            return ("L", tuple(go(e) for e in t[1]))
        return ("A", go(t[1]), go(t[2]))

    env, ty = scheme
    return tuple((x, tuple(go(e) for e in elems)) for x, elems in env), go(ty)


# ------------------------------------------------------------------ lower bounds


def _min_nodes(t) -> int:
    if t[0] in "xX":
        return 1
    if t[0] == "L":
        return 1 + sum(_min_nodes(e) for e in t[1])
    return 1 + _min_nodes(t[1]) + _min_nodes(t[2])


def _min_depth(t) -> int:
    if t[0] in "xX":
        return 0
    if t[0] == "L":
        return max((_min_depth(e) for e in t[1]), default=0)
    return 1 + max(_min_depth(t[1]), _min_depth(t[2]))


def _max_len(t) -> int:
    if t[0] in "xX":
        return 0
    if t[0] == "L":
        return max([len(t[1])] + [_max_len(e) for e in t[1]])
    return max(_max_len(t[1]), _max_len(t[2]))


class _Engine:
    def __init__(self, system: str, bound: Bound, globals_: tuple[str, ...]):
        if system not in SYSTEMS:
            raise ValueError(f"unknown system {system!r}")
        self.system = system
        self.bound = bound
        self.globals = frozenset(globals_)
        # every global variable costs at least its empty multiset
        self.base_cost = len(globals_)
        self.fresh = _Fresh()
        self.cache: dict = {}
        self.created = 0

    # -- bookkeeping
    #
    # ``vis`` is None for a subterm whose type may be consumed by an enclosing
    # application, and otherwise ``(offset, names, path, extra)``: projecting
    # the subterm's type along ``path`` ("res" of an arrow, "elem" of a
    # singleton) gives a type that survives into the root judgement under
    # ``offset`` arrows, next to at least ``extra`` other nodes.  The
    # multisets of the lambda-bound ``names`` survive as well.  Whatever
    # survives can be pruned against the bound early.

    def _admit(self, env, vis=None, ty=None) -> bool:
        """False when the visible part of a judgement already breaks the bound."""
        b = self.bound
        watched = self.globals if vis is None else self.globals | vis[1]
        if vis is not None and vis[2]:
            ty = None
        cost = self.base_cost + (vis[3] if vis is not None else 0)
        for x, elems in env:
            if x not in watched:
                continue
            if len(elems) > b.max_width:
                return False
            for e in elems:
                if _min_depth(e) > b.max_depth or _max_len(e) > b.max_width:
                    return False
                cost += _min_nodes(e)
        if vis is not None and ty is not None:
            if _min_depth(ty) + vis[0] > b.max_depth or _max_len(ty) > b.max_width:
                return False
            cost += _min_nodes(ty)
        return cost <= b.budget

    def _finish(self, results, vis) -> list:
        seen = {}
        for env, ty, s in results:
            if not self._admit(env, vis):
                continue
            key, n = _canon(env, ty, s)
            if key not in seen and self._admit(key[0], vis, key[1]):
                seen[key] = n
                if len(seen) > MAX_SCHEMES:
                    raise SchemeExplosion("too many derivation schemes")
        return list(seen.items())

    def _cached(self, t, demand, vis=None):
        if demand is None and vis is not None and vis[2][:1] == ("elem",):
            # only singletons are ever projected on their element
            demand = 1
        key = (t, demand, vis)
        if key not in self.cache:
            self.cache[key] = self._finish(self._rule(t, demand, vis), vis)
        return self.cache[key]

    def schemes(self, t: Term, demand=None, vis=None) -> list:
        """Fresh copies of the schemes of ``t``; ``demand`` is the shape of
        the result type when the context knows it (see ``_shape``)."""
        return [self._renamed(sc, n) for sc, n in self._cached(t, demand, vis)]

    def _renamed(self, scheme, n):
        return _rename(scheme, n, self.fresh)

    def _with_demand(self, env, ty, s, demand):
        if demand is None:
            yield env, ty, s
            return
        for s2 in _unify(ty, self._shape(demand), s):
            yield env, ty, s2

    def _shape(self, demand):
        """Type pattern of a demand: a multiset length, or a path of
        ``res``/``elem`` projections ending in one."""
        if demand is None:
            return self.fresh.var()
        if isinstance(demand, int):
            return ("L", self.fresh.vars(demand))
        head, rest = _split(demand)
        if head == "res":
            return ("A", self.fresh.var("X"), self._shape(rest))
        return ("L", (self._shape(rest),))

    def _copies(self, demand, vis=None):
        if isinstance(demand, tuple):
            return [1] if demand[0] == "elem" else []
        if demand is not None:
            return [demand]
        cap = self.bound.copies
        if vis is not None and not vis[2]:
            cap = min(cap, self.bound.max_width)
        return range(cap + 1)

    def _boxes(self, t: Term, demand, wrap, vis=None, body_vis=None, lead=("elem",)):
        """Sum ``k`` copies of the derivations of ``t``; ``wrap`` maps a
        copy's (env, ty, subst) to (env, element, subst) triples."""
        for k in self._copies(demand, vis):
            if k == 0:
                yield (), ("L", ()), {}
                continue
            body = self._cached(t, _pop(demand, lead), body_vis)
            for combo in itertools.combinations_with_replacement(range(len(body)), k):
                copies = [self._renamed(*body[i]) for i in combo]
                yield from self._sum_copies(copies, wrap, (), [], {}, vis)

    def _sum_copies(self, copies, wrap, env, elems, s, vis):
        if not copies:
            yield env, ("L", tuple(elems)), s
            return
        (cenv, cty), rest = copies[0], copies[1:]
        for e_env, elem, s2 in wrap(cenv, cty, s):
            env2 = _env_sum(env, e_env)
            if self._admit(env2, vis):
                yield from self._sum_copies(rest, wrap, env2, elems + [elem], s2, vis)

    @staticmethod
    def _inside(vis, x, lead=("res",)):
        """Visibility of a lambda body when the lambda (or, with ``lead``
        ``("elem", "res")``, a box of lambdas) has ``vis``."""
        if vis is None:
            return None
        offset, names, path, _ = vis
        if not path:
            return (offset + 1, names | {x}, (), vis[3])
        if path[: len(lead)] == lead:
            return (offset, names, path[len(lead) :], vis[3])
        return None

    @staticmethod
    def _proj(vis, *steps):
        return None if vis is None else (vis[0], vis[1], steps + vis[2], vis[3])

    @staticmethod
    def _unbox(vis):
        """Visibility of a box body when the box has ``vis``."""
        if vis is None or not vis[2]:
            return vis
        if vis[2][0] == "elem":
            return (vis[0], vis[1], vis[2][1:], vis[3])
        return None

    # -- rules

    def _rule(self, t: Term, demand, vis):
        self.created += 1
        if self.system == "bang":
            return self._bang_rule(t, demand, vis)
        if self.system == "cbn_oracle":
            return self._cbn_rule(t, demand, vis)
        return self._cbv_rule(t, demand, vis, strict=self.system == "cbv")

    def _lam(self, x, body, demand, vis):
        if demand is not None and (isinstance(demand, int) or demand[0] != "res"):
            return
        for env, ty in self.schemes(body, _pop(demand, ("res",)), self._inside(vis, x)):
            src = dict(env).get(x, ())
            rest = tuple(p for p in env if p[0] != x)
            yield rest, ("A", ("L", src), ty), {}

    def _bang_rule(self, t, demand, vis):
        match t:
            case Var(x):
                a = self.fresh.var()
                yield from self._with_demand(((x, (a,)),), a, {}, demand)
            case Bang(body):
                same = lambda env, ty, s: [(env, ty, s)]  # noqa: E731
                yield from self._boxes(body, demand, same, vis, self._unbox(vis))
            case Der(Lam()) | App(Bang(), _):
                return  # arrows are not multisets and boxes are not arrows
            case Der(body):
                for env, ty in self.schemes(body, 1 if demand is None else _push(("elem",), demand), self._proj(vis, "elem")):
                    yield from self._with_demand(env, ty[1][0], {}, demand)
            case Lam(x, body):
                yield from self._lam(x, body, demand, vis)
            case App(f, a):
                for fenv, fty in self.schemes(f, _push(("res",), demand), self._proj(vis, "res")):
                    yield from self._apply(fenv, fty, lambda d, v: self.schemes(a, d, v), demand, vis)
            case _:
                raise TypeError(f"not a term: {t!r}")

    def _apply(self, fenv, fty, arg_schemes, demand, vis):
        """Application: unify the function type with ``argty -o result``."""
        res = self.fresh.var()
        src = self.fresh.var("X")
        for s in _unify(fty, ("A", src, res), {}):
            w = _walk(src, s)
            need = len(w[1]) if w[0] == "L" else None
            for aenv, aty in arg_schemes(need, self._arg_vis(fenv, src, s, vis)):
                env = _env_sum(fenv, aenv)
                if not self._admit(env):
                    continue
                for s2 in _unify(aty, src, s):
                    yield from self._with_demand(env, res, s2, demand)

    def _arg_vis(self, fenv, src, s, vis):
        """Visibility of an argument whose type is ``src``: it survives when
        ``src`` occurs in a surviving environment entry of the function."""
        names = vis[1] if vis is not None else frozenset()
        watched = self.globals | names
        depth = None
        cost = 0
        for x, elems in fenv:
            if x not in watched:
                continue
            for e in elems:
                r = _resolve(e, s)
                cost += _min_nodes(r)
                d = _occurrence_depth(src, r)
                if d is not None and (depth is None or d > depth):
                    depth = d
        if depth is None:
            return None
        return (depth, names, (), cost - 1)

    def _cbn_rule(self, t, demand, vis):
        match t:
            case Var(x):
                a = self.fresh.var()
                yield from self._with_demand(((x, (a,)),), a, {}, demand)
            case Lam(x, body):
                yield from self._lam(x, body, demand, vis)
            case App(f, a):
                # The argument is typed once per element of the source multiset.
                def args(need, avis):
                    same = lambda e, ty, s: [(e, ty, s)]  # noqa: E731
                    for env, ty, s in self._boxes(a, need, same, avis, avis):
                        yield _resolve_env(env, s), _resolve(ty, s)

                for fenv, fty in self.schemes(f, _push(("res",), demand), self._proj(vis, "res")):
                    yield from self._apply(fenv, fty, args, demand, vis)
            case _:
                raise TypeError("bang construct in a lambda term")

    def _cbv_rule(self, t, demand, vis, strict: bool):
        match t:
            case Var(x):
                for n in self._copies(demand, vis):
                    vs = self.fresh.vars(n)
                    if isinstance(demand, tuple):
                        yield from self._with_demand(((x, vs),), ("L", vs), {}, demand)
                    else:
                        yield ((x, vs),), ("L", vs), {}
            case Lam(x, body):

                def copy(env, ty, s):
                    src = dict(env).get(x, ())
                    rest = tuple(p for p in env if p[0] != x)
                    if strict:
                        for s2 in _unify(ty, self.fresh.var("X"), s):
                            yield rest, ("A", ("L", src), ty), s2
                    else:
                        yield rest, ("A", ("L", src), ty), s

                if isinstance(demand, tuple) and demand[:2] != ("elem", "res"):
                    return
                body_vis = self._inside(vis, x, ("elem", "res"))
                yield from self._boxes(body, demand, copy, vis, body_vis, ("elem", "res"))
            case App(f, a):
                for fenv, fty in self.schemes(f, _push(("elem", "res"), demand), self._proj(vis, "elem", "res")):
                    res = self.fresh.var("X" if strict else "x")
                    src = self.fresh.var("X")
                    for s in _unify(fty[1][0], ("A", src, res), {}):
                        w = _walk(src, s)
                        need = len(w[1]) if w[0] == "L" else None
                        avis = self._arg_vis(fenv, src, s, vis)
                        for aenv, aty in self.schemes(a, need, avis):
                            env = _env_sum(fenv, aenv)
                            if not self._admit(env):
                                continue
                            for s2 in _unify(aty, src, s):
                                yield from self._with_demand(env, res, s2, demand)
            case _:
                raise TypeError("bang construct in a lambda term")


def _split(demand):
    rest = demand[1:]
    return demand[0], rest[0] if len(rest) == 1 else rest


def _push(steps, demand):
    """Demand on a term whose ``steps`` projection carries ``demand``."""
    if demand is None and steps[0] == "res":
        return None
    if isinstance(demand, tuple):
        return steps + demand
    return steps + (demand,)


def _pop(demand, steps):
    """Demand on the ``steps`` projection of a term under ``demand``."""
    if not isinstance(demand, tuple) or demand[: len(steps)] != steps:
        return None
    rest = demand[len(steps) :]
    return rest[0] if len(rest) == 1 else rest


def _occurrence_depth(v, t, depth=0):
    """Deepest arrow nesting at which variable ``v`` occurs in ``t``."""
    if t == v:
        return depth
    if t[0] == "L":
        found = [_occurrence_depth(v, e, depth) for e in t[1]]
    elif t[0] == "A":
        found = [_occurrence_depth(v, t[1], depth + 1), _occurrence_depth(v, t[2], depth + 1)]
    else:
        return None
    found = [d for d in found if d is not None]
    return max(found) if found else None


def _resolve_env(env, s):
    return tuple((x, tuple(_resolve(e, s) for e in elems)) for x, elems in env)


# ---------------------------------------------------------- instantiation


class _Universe:
    """Ground types within depth/width, grouped by node count."""

    def __init__(self, bound: Bound):
        self.bound = bound

    def candidates(self, kind: str, max_nodes: int, max_depth: int):
        b = self.bound
        for n in range(1, max_nodes + 1):
            for t in types_of_size(n, max_depth, b.max_width):
                if kind == "X" and t[0] != 0:
                    continue
                yield n, t


def _ground(scheme, vars_: tuple[str, ...], bound: Bound, universe: _Universe):
    """All in-bound ground judgements instantiating ``scheme``."""
    env, ty = scheme
    envd = dict(env)
    if any(x not in vars_ for x in envd):
        raise ValueError(f"free variable outside {vars_}")
    tops = [("L", envd.get(x, ())) for x in vars_] + [ty]
    occ: dict = {}
    ctx: dict = {}
    fixed = 0

    def scan(t, depth):
        nonlocal fixed
        if t[0] in "xX":
            occ[t] = occ.get(t, 0) + 1
            ctx[t] = max(ctx.get(t, 0), depth)
            return
        fixed += 1
        if t[0] == "L":
            if len(t[1]) > bound.max_width:
                raise _Reject
            for e in t[1]:
                scan(e, depth)
        else:
            scan(t[1], depth + 1)
            scan(t[2], depth + 1)

    try:
        for top in tops:
            if _min_depth(top) > bound.max_depth:
                raise _Reject
            scan(top, 0)
    except _Reject:
        return
    order = sorted(occ, key=lambda v: -occ[v])
    spare = bound.budget - fixed
    if spare < 0:
        return

    def assign(i, spare, s):
        if i == len(order):
            yield s
            return
        v = order[i]
        for n, g in universe.candidates(v[0], spare // occ[v], bound.max_depth - ctx[v]):
            s[v] = g
            yield from assign(i + 1, spare - n * occ[v], s)
        s.pop(v, None)

    for s in assign(0, spare, {}):
        ground_env = tuple(_to_ground(t, s) for t in tops[:-1])
        ground_ty = _to_ground(ty, s)
        if judgement_in_bound(ground_env, ground_ty, bound):
            yield ground_env, ground_ty


class _Reject(Exception):
    pass


def _to_ground(t, s):
    if t[0] in "xX":
        return s[t]
    if t[0] == "L":
        return Mset(_to_ground(e, s) for e in t[1])
    return Arrow(_to_ground(t[1], s), _to_ground(t[2], s))


def _from_ground(t: RelType):
    if t[0] == 0:
        return ("L", tuple(_from_ground(e) for e in t[2]))
    return ("A", _from_ground(t[1]), _from_ground(t[2]))


# ------------------------------------------------------------ public API


Judgement = tuple  # (tuple of Mset per variable, RelType)


@dataclass(frozen=True)
class JudgementSet:
    vars: tuple[str, ...]
    items: frozenset

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, j) -> bool:
        return j in self.items

    def __iter__(self):
        return iter(sorted(self.items))

    def to_json(self) -> list:
        return [judgement_to_json(j, self.vars) for j in sorted(self.items)]


def judgement_to_json(j: Judgement, vars_: tuple[str, ...]) -> dict:
    env, ty = j
    return {"env": {x: show_type(a) for x, a in zip(vars_, env)}, "type": show_type(ty)}


def _system_for(mode: str) -> str:
    if mode in MODES:
        return MODES[mode]
    if mode in SYSTEMS:
        return mode
    raise ValueError(f"unknown interpretation {mode!r}")


def _prepare(system: str, subject: Term, vars_) -> tuple[Term, tuple[str, ...]]:
    vars_ = tuple(vars_)
    if len(set(vars_)) != len(vars_):
        raise ValueError("variable list has repetitions")
    if not free_vars(subject) <= set(vars_):
        raise ValueError("free variables of the subject must be listed")
    if system != "bang" and not is_lambda(subject):
        raise TypeError(f"system {system} types lambda terms only")
    return rename_apart(subject, set(vars_)), vars_


def schemes(mode: str, subject: Term, vars_, bound: Bound) -> list:
    """Canonical symbolic judgements of ``subject`` (mostly for inspection)."""
    system = _system_for(mode)
    subject, vars_ = _prepare(system, subject, vars_)
    engine = _Engine(system, bound, vars_)
    return [sc for sc, _ in engine._cached(subject, None, ROOT)]


def interpret(mode: str, subject: Term, vars_, bound: Bound) -> JudgementSet:
    """Every judgement ``(env, type)`` within ``bound`` derivable for
    ``subject``, with environments listed in the order of ``vars_``."""
    system = _system_for(mode)
    subject, vars_ = _prepare(system, subject, vars_)
    engine = _Engine(system, bound, vars_)
    universe = _Universe(bound)
    out = set()
    for sc, _ in engine._cached(subject, None, ROOT):
        out.update(_ground(sc, vars_, bound, universe))
    return JudgementSet(vars_, frozenset(out))


def derivable(system: str, env: dict, subject: Term, ty: RelType, bound: Bound) -> bool:
    """Whether ``env |- subject : ty`` is derivable with ``env`` and ``ty``
    inside ``bound``; variables missing from ``env`` get ``[]``."""
    system = _system_for(system)
    vars_ = tuple(sorted(set(env) | free_vars(subject)))
    ground_env = tuple(env.get(x, Mset()) for x in vars_)
    if not judgement_in_bound(ground_env, ty, bound):
        return False
    subject, vars_ = _prepare(system, subject, vars_)
    engine = _Engine(system, bound, vars_)
    demand = len(ty[2]) if ty[0] == 0 else None
    target_env = tuple((x, _from_ground(a)[1]) for x, a in zip(vars_, ground_env))
    target_ty = _from_ground(ty)
    for (senv, sty), _ in engine._cached(subject, demand, ROOT):
        senvd = dict(senv)
        pairs = [(("L", senvd.get(x, ())), ("L", elems)) for x, elems in target_env]
        pairs.append((sty, target_ty))
        if _unify_all(pairs, {}):
            return True
    return False


def _unify_all(pairs, s) -> bool:
    if not pairs:
        return True
    a, b = pairs[0]
    return any(_unify_all(pairs[1:], s2) for s2 in _unify(a, b, s))


# --------------------------------------------------------------- checkers


@dataclass
class FactorizationVerdict:
    equal: bool
    counterexample: tuple | None = None  # (side, judgement)
    sizes: tuple[int, int] = (0, 0)

    def to_json(self, vars_=()) -> dict:
        out = {"equal": self.equal, "sizes": list(self.sizes)}
        if self.counterexample:
            side, j = self.counterexample
            out["counterexample"] = {"only_in": side, **judgement_to_json(j, tuple(vars_))}
        return out


def check_factorization_cbn(t: Term, vars_, bound: Bound) -> FactorizationVerdict:
    """Compare the bang interpretation of ``cbn(t)`` with the call-by-name
    oracle on ``t``."""
    from .translate import cbn

    left = interpret("psem", cbn(t), vars_, bound)
    right = interpret("intn_oracle", t, vars_, bound)
    sizes = (len(left), len(right))
    for side, a, b in (("psem", left, right), ("intn_oracle", right, left)):
        diff = sorted(a.items - b.items)
        if diff:
            return FactorizationVerdict(False, (side, diff[0]), sizes)
    return FactorizationVerdict(True, None, sizes)


@dataclass
class InclusionReport:
    inclusion_holds: bool
    missing: list = field(default_factory=list)  # in intv, not in psem
    strict_witnesses: list = field(default_factory=list)  # in psem, not in intv
    vars: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "inclusion_holds": self.inclusion_holds,
            "missing": [judgement_to_json(j, self.vars) for j in self.missing],
            "strict_witnesses": [judgement_to_json(j, self.vars) for j in self.strict_witnesses],
        }


def check_cbv_inclusion(t: Term, vars_, bound: Bound) -> InclusionReport:
    from .translate import cbv

    intv = interpret("intv", t, vars_, bound)
    psem = interpret("psem", cbv(t), vars_, bound)
    missing = sorted(intv.items - psem.items)
    strict = sorted(psem.items - intv.items)
    return InclusionReport(not missing, missing, strict, intv.vars)


@dataclass
class InvarianceVerdict:
    equal: bool
    reducts_checked: int
    counterexample: tuple | None = None  # (reduct, judgement, side)

    def to_json(self, vars_=()) -> dict:
        from .syntax import print_term

        out = {"equal": self.equal, "reducts_checked": self.reducts_checked}
        if self.counterexample:
            reduct, j, side = self.counterexample
            out["counterexample"] = {
                "reduct": print_term(reduct),
                "only_in": side,
                **judgement_to_json(j, tuple(vars_)),
            }
        return out


def check_invariance(
    t: Term,
    steps: int,
    vars_,
    bound: Bound,
    max_reducts: int = 12,
) -> InvarianceVerdict:
    """Compare the interpretation of ``t`` with those of its reducts in at
    most ``steps`` b-steps (breadth-first, at most ``max_reducts`` of them)."""
    from .rewrite import bang as bang_spec, one_step_reducts
    from .syntax import alpha_key

    spec = bang_spec("b")
    seen = {alpha_key(t)}
    layer = [t]
    reducts = []
    for _ in range(steps):
        nxt = []
        for u in layer:
            for r in one_step_reducts(u, spec):
                k = alpha_key(r)
                if k not in seen and len(reducts) < max_reducts:
                    seen.add(k)
                    reducts.append(r)
                    nxt.append(r)
        layer = nxt
    reference = interpret("psem", t, vars_, bound)
    for r in reducts:
        other = interpret("psem", r, vars_, bound)
        if other.items != reference.items:
            only_t = sorted(reference.items - other.items)
            if only_t:
                return InvarianceVerdict(False, len(reducts), (r, only_t[0], "original"))
            return InvarianceVerdict(False, len(reducts), (r, sorted(other.items - reference.items)[0], "reduct"))
    return InvarianceVerdict(True, len(reducts))


__all__ = [
    "Bound",
    "JudgementSet",
    "SchemeExplosion",
    "arrow_depth",
    "check_cbv_inclusion",
    "check_factorization_cbn",
    "check_invariance",
    "derivable",
    "interpret",
    "schemes",
]
