"""Random term generation and the property suites."""

from __future__ import annotations

import os
import random
import time
from dataclasses import dataclass, field
from typing import Callable

from . import relsem, rewrite, translate
from .reltypes import Bound
from .syntax import (
    App,
    Bang,
    Der,
    Lam,
    Term,
    Var,
    alpha_eq,
    alpha_key,
    free_vars,
    parse_bang,
    parse_lambda,
    positions,
    print_term,
    replace_at,
    size,
    substitute,
)

NAMES = ("x", "y", "z", "w", "u", "v", "f", "g", "h", "k")


@dataclass(frozen=True)
class GenConfig:
    max_size: int = 12
    var_pool: int = 3
    closed: bool = False
    calculus: str = "bang"
    seed: int = 0
    # probability of forcing a redex shape at an inner node
    redex_bias: float = 0.3

    def __post_init__(self):
        if self.calculus not in ("bang", "lambda"):
            raise ValueError("calculus must be bang or lambda")
        if self.var_pool < 1 or self.var_pool > len(NAMES):
            raise ValueError(f"var_pool must be in 1..{len(NAMES)}")
        if self.max_size < 1:
            raise ValueError("max_size must be positive")


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.pool = NAMES[: cfg.var_pool]

    def min_size(self, scope) -> int:
        return 1 if scope or not self.cfg.closed else 2

    def term(self, n: int, scope: tuple[str, ...]) -> Term:
        rng, cfg = self.rng, self.cfg
        n = max(n, self.min_size(scope))
        if n == 1:
            return Var(rng.choice(scope if cfg.closed else self.pool))
        m = self.min_size(scope)
        options = ["lam"]
        if n >= 1 + 2 * m:
            options.append("app")
        if cfg.calculus == "bang":
            if n >= 1 + m:
                options += ["der", "bang"]
            if n >= 3 + m + self.min_size(scope + ("_",)):
                options.append("vredex")
            if n >= 2 + m:
                options.append("dredex")
        elif n >= 2 + m + self.min_size(scope + ("_",)):
            options.append("beta")
        redexes = [o for o in options if o in ("vredex", "dredex", "beta")]
        if redexes and rng.random() < cfg.redex_bias:
            choice = rng.choice(redexes)
        else:
            plain = [o for o in options if o not in redexes]
            choice = rng.choice(plain)
        if choice == "lam":
            x = rng.choice(self.pool)
            return Lam(x, self.term(n - 1, scope + (x,)))
        if choice == "der":
            return Der(self.term(n - 1, scope))
        if choice == "bang":
            return Bang(self.term(n - 1, scope))
        if choice == "dredex":
            return Der(Bang(self.term(n - 2, scope)))
        if choice == "app":
            k = rng.randint(m, n - 1 - m)
            return App(self.term(k, scope), self.term(n - 1 - k, scope))
        x = rng.choice(self.pool)
        inner = scope + (x,)
        if choice == "vredex":
            k = rng.randint(self.min_size(inner), n - 3 - m)
            return App(Lam(x, self.term(k, inner)), Bang(self.term(n - 3 - k, scope)))
        k = rng.randint(self.min_size(inner), n - 2 - m)
        return App(Lam(x, self.term(k, inner)), self.term(n - 2 - k, scope))


def gen_terms(cfg: GenConfig, count: int) -> list[Term]:
    """``count`` terms, a pure function of ``cfg``."""
    rng = random.Random(cfg.seed)
    g = _Gen(cfg, rng)
    lo = g.min_size(())
    return [g.term(rng.randint(lo, max(lo, cfg.max_size)), ()) for _ in range(count)]


def gen_term(cfg: GenConfig) -> Term:
    """One term of size at most ``max_size``.  A closed term needs two nodes,
    so closed generation with ``max_size == 1`` yields an identity."""
    return gen_terms(cfg, 1)[0]


# --------------------------------------------------------------- shrinking


def shrink(t: Term, fails: Callable[[Term], bool], max_rounds: int = 200) -> Term:
    """Greedily replace subterms by variable stubs or by their own children
    while the property keeps failing."""
    current = t
    for _ in range(max_rounds):
        for cand in _candidates(current):
            if size(cand) < size(current) and _still_fails(fails, cand):
                current = cand
                break
        else:
            return current
    return current


def _still_fails(fails, t) -> bool:
    try:
        return fails(t)
    except Exception:
        return False


def _candidates(t: Term):
    stubs = sorted(free_vars(t)) or ["x"]
    for path, sub in positions(t):
        if path and not isinstance(sub, Var):
            for name in stubs:
                yield replace_at(t, path, Var(name))
        match sub:
            case Lam(_, b) | Der(b) | Bang(b):
                yield replace_at(t, path, b)
            case App(f, a):
                yield replace_at(t, path, f)
                yield replace_at(t, path, a)


# ------------------------------------------------------------------ reports


@dataclass
class Failure:
    case: int
    case_seed: str
    term: str
    shrunk: str
    detail: str = ""

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "case_seed": self.case_seed,
            "term": self.term,
            "shrunk": self.shrunk,
            "detail": self.detail,
        }


@dataclass
class PropertyReport:
    name: str
    cases_run: int = 0
    failures: list[Failure] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cases_run": self.cases_run,
            "failures": [f.to_json() for f in self.failures],
            "elapsed": round(self.elapsed, 3),
        }


@dataclass
class SuiteReport:
    name: str
    seed: int
    cases: int
    properties: list[PropertyReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(p.ok for p in self.properties)

    def property(self, name: str) -> PropertyReport:
        for p in self.properties:
            if p.name == name:
                return p
        raise KeyError(name)

    def to_json(self, timings: bool = True) -> dict:
        props = [p.to_json() for p in self.properties]
        if not timings:
            for p in props:
                p.pop("elapsed")
        return {"name": self.name, "seed": self.seed, "cases": self.cases, "ok": self.ok, "properties": props}


# --------------------------------------------------------------- properties
#
# A property takes (term, rng, budgets) and returns None on success or a
# failure description.  ``rng`` carries any extra randomness of the case.


DEFAULT_BUDGETS = {
    "bang_size": 20,
    "lambda_size": 25,
    "relsem_size": 10,
    "invariance_size": 8,
    "steps": 5,
    "join_budget": 10_000,
    "sim_nodes": 8,
    "depth": 3,
    "width": 2,
    "budget": 20,
    "redex_bias_pct": 50,
    "invariance_steps": 3,
}


def _bang_spec(kind, ground):
    return rewrite.bang(kind, ground)


def prop_roundtrip(t, rng, b):
    parse = parse_bang if not _is_lambda_term(t) else parse_lambda
    back = parse(print_term(t))
    return None if alpha_eq(back, t) else f"reparsed as {print_term(back)}"


def _is_lambda_term(t) -> bool:
    from .syntax import is_lambda

    return is_lambda(t)


def prop_quasi_strong(t, rng, b):
    for kind, ground in (("b", True), ("v", True), ("d", True), ("d", False)):
        bad = rewrite.peak_failures(t, _bang_spec(kind, ground))
        if bad:
            s1, s2 = bad[0]
            return f"{'ground ' if ground else ''}{kind} peak {print_term(s1)} / {print_term(s2)}"
    return None


def prop_commutation(t, rng, b):
    bad = rewrite.commutation_failures(t, ground=True)
    if bad:
        return f"d/v peak {print_term(bad[0][0])} / {print_term(bad[0][1])}"
    return None


def prop_ground_in_full(t, rng, b):
    for kind in ("v", "d", "b"):
        full = {(r.position, r.kind) for r in rewrite.redexes(t, _bang_spec(kind, False))}
        for r in rewrite.redexes(t, _bang_spec(kind, True)):
            if (r.position, r.kind) not in full:
                return f"ground {kind}-redex at {list(r.position)} missing from full"
    return None


def prop_deterministic(t, rng, b):
    spec = _bang_spec("b", True)
    one = rewrite.reduce(t, spec, 20).to_json()
    two = rewrite.reduce(t, spec, 20).to_json()
    return None if one == two else "leftmost-outermost trace differs between runs"


def _sample_parallel(t, rng, cap=64):
    reducts = rewrite.parallel_reducts(t)
    return rng.choice(reducts[:cap])


def prop_development(t, rng, b):
    s = _sample_parallel(t, rng)
    if not rewrite.parallel_related(t, s):
        return f"sampled parallel reduct {print_term(s)} not recognised"
    dev = rewrite.development(t)
    if not rewrite.parallel_related(s, dev):
        return f"{print_term(s)} does not parallel-reduce to {print_term(dev)}"
    return None


def prop_v_in_parallel(t, rng, b):
    for _, s in rewrite.successors(t, _bang_spec("v", False)):
        if not rewrite.parallel_related(t, s):
            return f"v-step to {print_term(s)} is not parallel"
    return None


def prop_parallel_in_v_star(t, rng, b):
    s = _sample_parallel(t, rng)
    spec = _bang_spec("v", False)
    target = alpha_key(s)
    seen = {alpha_key(t)}
    layer = [t]
    if target in seen:
        return None
    while layer and len(seen) < b["join_budget"]:
        nxt = []
        for u in layer:
            for _, r in rewrite.successors(u, spec):
                k = alpha_key(r)
                if k == target:
                    return None
                if k not in seen:
                    seen.add(k)
                    nxt.append(r)
        layer = nxt
    return f"{print_term(s)} not reached by v-steps"


def _random_walk(t, spec, rng, steps):
    for _ in range(rng.randint(0, steps)):
        succ = rewrite.successors(t, spec)
        if not succ:
            break
        t = rng.choice(succ)[1]
    return t


def prop_confluence(t, rng, b):
    spec = _bang_spec("b", False)
    s1 = _random_walk(t, spec, rng, b["steps"])
    s2 = _random_walk(t, spec, rng, b["steps"])
    if rewrite.join(s1, s2, spec, b["join_budget"]) is None:
        return f"{print_term(s1)} and {print_term(s2)} not joined"
    return None


def _lambda_side(rng, b, cfg_seed):
    cfg = GenConfig(max_size=max(1, b["lambda_size"] // 3), calculus="lambda", seed=cfg_seed)
    return gen_term(cfg)


def prop_substitution_cbn(t, rng, b):
    u = _lambda_side(rng, b, rng.getrandbits(32))
    x = rng.choice(sorted(free_vars(t)) or ["x"])
    lhs = substitute(translate.cbn(t), x, translate.cbn(u))
    rhs = translate.cbn(substitute(t, x, u))
    return None if alpha_eq(lhs, rhs) else f"u = {print_term(u)}, x = {x}"


def prop_substitution_cbv(t, rng, b):
    u = _lambda_side(rng, b, rng.getrandbits(32))
    if not isinstance(u, (Var, Lam)):
        u = Lam("x", u)
    x = rng.choice(sorted(free_vars(t)) or ["x"])
    boxed = translate.cbv(u)
    lhs = substitute(translate.cbv(t), x, boxed.body)
    rhs = translate.cbv(substitute(t, x, u))
    return None if alpha_eq(lhs, rhs) else f"u = {print_term(u)}, x = {x}"


def prop_cbv_v_normal(t, rng, b):
    return None if rewrite.is_normal(translate.cbv(t), _bang_spec("v", False)) else "cbv image has a v-redex"


def prop_cbn_bijection(t, rng, b):
    image = translate.cbn(t)
    if not translate.classify(image, "cbn_image"):
        return "cbn image outside its grammar"
    if not alpha_eq(translate.cbn_inverse(image), t):
        return "inverse does not recover the term"
    if not alpha_eq(translate.cbn(translate.cbn_inverse(image)), image):
        return "translation of the inverse differs"
    return None


def prop_forgetful_inverse(t, rng, b):
    image = translate.cbv(t)
    if not translate.classify(image, "cbv_closure"):
        return "cbv image outside its grammar"
    return None if alpha_eq(translate.forgetful(image), t) else "forgetful map does not recover the term"


def prop_forgetful_reduction(t, rng, b):
    spec = _bang_spec("b", False)
    lam_spec = rewrite.lam("betav")
    current = translate.cbv(t)
    for _ in range(b["steps"]):
        succ = rewrite.successors(current, spec)
        if not succ:
            return None
        _, nxt = rng.choice(succ)
        if not translate.classify(nxt, "cbv_closure"):
            return f"reduct {print_term(nxt)} leaves the closure grammar"
        before, after = translate.forgetful(current), translate.forgetful(nxt)
        if not (alpha_eq(before, after) or rewrite.steps_to(before, after, lam_spec)):
            return f"{print_term(before)} does not betav-reduce to {print_term(after)}"
        current = nxt
    return None


def _simulation(mode):
    def prop(t, rng, b):
        for rep in translate.check_simulation(t, mode, exhaustive=True, node_budget=b["sim_nodes"]):
            if not rep.ok:
                return f"{rep.direction}: {rep.detail}"
        return None

    prop.__name__ = f"simulation_{mode}"
    return prop


def prop_cbn_normal_forms(t, rng, b):
    image = translate.cbn(t)
    for ground in (False, True):
        lam_normal = rewrite.is_normal(t, rewrite.lam("beta", ground))
        bang_normal = rewrite.is_normal(image, _bang_spec("b", ground))
        if lam_normal != bang_normal:
            return f"normality differs ({'ground' if ground else 'full'})"
    return None


def _bound(b) -> Bound:
    return Bound(b["depth"], b["width"], b["budget"])


def prop_factorization(t, rng, b):
    v = relsem.check_factorization_cbn(t, sorted(free_vars(t)), _bound(b))
    return None if v.equal else f"judgement only in {v.counterexample[0]}"


def prop_inclusion(t, rng, b):
    r = relsem.check_cbv_inclusion(t, sorted(free_vars(t)), _bound(b))
    return None if r.inclusion_holds else f"{len(r.missing)} judgements of intv missing"


def prop_derived_rules(t, rng, b):
    vars_ = sorted(free_vars(t))
    bound = _bound(b)
    direct = relsem.interpret("psem", translate.cbv(t), vars_, bound)
    macro = relsem.interpret("cbv_macro", t, vars_, bound)
    return None if direct.items == macro.items else "macro rules disagree with the translated term"


def prop_intv_multisets(t, rng, b):
    js = relsem.interpret("intv", t, sorted(free_vars(t)), _bound(b))
    return None if all(ty[0] == 0 for _, ty in js.items) else "non-multiset result type"


def prop_invariance(t, rng, b):
    v = relsem.check_invariance(t, b["invariance_steps"], sorted(free_vars(t)), _bound(b))
    return None if v.equal else "interpretation changes along reduction"


# (property name, function, calculus, size key, closed)
SUITES: dict[str, list[tuple[str, Callable, str, str, bool]]] = {
    "rewrite": [
        ("roundtrip", prop_roundtrip, "bang", "bang_size", False),
        ("quasi_strong_confluence", prop_quasi_strong, "bang", "bang_size", False),
        ("strong_commutation", prop_commutation, "bang", "bang_size", False),
        ("ground_in_full", prop_ground_in_full, "bang", "bang_size", False),
        ("deterministic_strategy", prop_deterministic, "bang", "bang_size", False),
        ("development", prop_development, "bang", "bang_size", False),
        ("v_in_parallel", prop_v_in_parallel, "bang", "bang_size", False),
        ("parallel_in_v_star", prop_parallel_in_v_star, "bang", "bang_size", False),
        ("confluence", prop_confluence, "bang", "bang_size", False),
    ],
    "translate": [
        ("roundtrip", prop_roundtrip, "lambda", "lambda_size", False),
        ("substitution_cbn", prop_substitution_cbn, "lambda", "lambda_size", False),
        ("substitution_cbv", prop_substitution_cbv, "lambda", "lambda_size", False),
        ("cbv_v_normal", prop_cbv_v_normal, "lambda", "lambda_size", False),
        ("cbn_bijection", prop_cbn_bijection, "lambda", "lambda_size", False),
        ("forgetful_inverse", prop_forgetful_inverse, "lambda", "lambda_size", False),
        ("forgetful_reduction", prop_forgetful_reduction, "lambda", "lambda_size", False),
        ("cbn_normal_forms", prop_cbn_normal_forms, "lambda", "lambda_size", False),
    ]
    + [(f"simulation_{m}", _simulation(m), "lambda", "lambda_size", False) for m in translate.MODES],
    "relsem": [
        ("factorization", prop_factorization, "lambda", "relsem_size", False),
        ("inclusion", prop_inclusion, "lambda", "relsem_size", False),
        ("derived_rules", prop_derived_rules, "lambda", "relsem_size", False),
        ("intv_multisets", prop_intv_multisets, "lambda", "relsem_size", False),
        ("invariance", prop_invariance, "bang", "invariance_size", False),
    ],
}


def suite_seed(seed: int | None) -> int:
    env = os.environ.get("BANGCALC_SEED")
    if env is not None:
        return int(env)
    return 0 if seed is None else seed


def case_term(calculus: str, max_size: int, closed: bool, case_seed: str, bias_pct: int = 50) -> Term:
    rng = random.Random(case_seed)
    cfg = GenConfig(
        max_size=max_size,
        calculus=calculus,
        closed=closed,
        seed=rng.getrandbits(64),
        redex_bias=bias_pct / 100,
    )
    return gen_term(cfg)


def run_property(name: str, prop, calculus, max_size, closed, cases, seed, budgets, suite) -> PropertyReport:
    report = PropertyReport(name)
    start = time.perf_counter()
    for i in range(cases):
        case_seed = f"{suite}:{seed}:{i}"
        t = case_term(calculus, max_size, closed, case_seed, budgets["redex_bias_pct"])
        detail = _run_case(prop, t, case_seed, name, budgets)
        report.cases_run += 1
        if detail is not None:
            shrunk = shrink(t, lambda u: _run_case(prop, u, case_seed, name, budgets) is not None)
            report.failures.append(Failure(i, case_seed, print_term(t), print_term(shrunk), detail))
    report.elapsed = time.perf_counter() - start
    return report


def _run_case(prop, t, case_seed, name, budgets):
    rng = random.Random(f"{case_seed}:{name}")
    try:
        return prop(t, rng, budgets)
    except Exception as exc:  # a crash is a failure of the property
        return f"{type(exc).__name__}: {exc}"


def run_suite(name: str, cases: int, seed: int | None = None, budgets: dict | None = None, only: list[str] | None = None) -> SuiteReport:
    """Run every property of suite ``name`` (or of all suites) on ``cases``
    generated terms."""
    seed = suite_seed(seed)
    b = dict(DEFAULT_BUDGETS)
    b.update(budgets or {})
    names = list(SUITES) if name == "all" else [name]
    if any(n not in SUITES for n in names):
        raise ValueError(f"unknown suite {name!r}")
    report = SuiteReport(name, seed, cases)
    for suite in names:
        for pname, prop, calculus, size_key, closed in SUITES[suite]:
            if only and pname not in only:
                continue
            label = pname if name != "all" else f"{suite}.{pname}"
            report.properties.append(
                run_property(label, prop, calculus, b[size_key], closed, cases, seed, b, suite)
            )
    return report


def replay(suite: str, prop_name: str, case_seed: str, budgets: dict | None = None) -> str | None:
    """Re-run one case from a failure entry; returns the failure detail."""
    b = dict(DEFAULT_BUDGETS)
    b.update(budgets or {})
    for pname, prop, calculus, size_key, closed in SUITES[suite]:
        if pname == prop_name:
            t = case_term(calculus, b[size_key], closed, case_seed, b["redex_bias_pct"])
            return _run_case(prop, t, case_seed, pname, b)
    raise KeyError(prop_name)
