"""Call-by-name and call-by-value translations of lambda terms into the
bang calculus, their image grammars, inverses and simulation checks."""

from __future__ import annotations

from dataclasses import dataclass, field

from .rewrite import (
    Redex,
    Step,
    Trace,
    bang,
    join,
    join_by,
    lam,
    one_step_reducts,
    redexes,
    step,
    successors,
)
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
    print_term,
)

IMAGE_CLASSES = ("cbn_image", "cbv_closure", "cbv_value")
MODES = ("cbn", "cbn_ground", "cbv", "cbv_ground")


class NotInImage(ValueError):
    pass


class Inconclusive(RuntimeError):
    """No common reduct was found within the search budget."""


def cbn(t: Term) -> Term:
    match t:
        case Var():
            return t
        case Lam(x, body):
            return Lam(x, cbn(body))
        case App(f, a):
            return App(cbn(f), Bang(cbn(a)))
    raise TypeError(f"not a lambda term: {t!r}")


def cbv(t: Term) -> Term:
    match t:
        case Var():
            return Bang(t)
        case Lam(x, body):
            return Bang(Lam(x, cbv(body)))
        case App(f, a):
            return App(Der(cbv(f)), cbv(a))
    raise TypeError(f"not a lambda term: {t!r}")


def _in_cbn(t: Term) -> bool:
    match t:
        case Var():
            return True
        case Lam(_, body):
            return _in_cbn(body)
        case App(f, Bang(a)):
            return _in_cbn(f) and _in_cbn(a)
    return False


def _in_closure(t: Term) -> bool:
    match t:
        case Bang(u):
            return _in_value(u)
        case App(Der(m), n):
            return _in_closure(m) and _in_closure(n)
        case App(u, m):
            return _in_value(u) and _in_closure(m)
    return False


def _in_value(t: Term) -> bool:
    match t:
        case Var():
            return True
        case Lam(_, body):
            return _in_closure(body)
    return False


def classify(t: Term, cls: str) -> bool:
    if cls == "cbn_image":
        return _in_cbn(t)
    if cls == "cbv_closure":
        return _in_closure(t)
    if cls == "cbv_value":
        return _in_value(t)
    raise ValueError(f"unknown image class {cls!r}")


def cbn_inverse(t: Term) -> Term:
    if not _in_cbn(t):
        raise NotInImage("term is not in the call-by-name image")
    return _uncbn(t)


def _uncbn(t: Term) -> Term:
    match t:
        case Var():
            return t
        case Lam(x, body):
            return Lam(x, _uncbn(body))
        case App(f, Bang(a)):
            return App(_uncbn(f), _uncbn(a))
    raise NotInImage("term is not in the call-by-name image")


def forgetful(t: Term) -> Term:
    """Erase the call-by-value decorations of a closure or value term."""
    if not (_in_closure(t) or _in_value(t)):
        raise NotInImage("term is not in the call-by-value target grammars")
    return _forget(t)


def _forget(t: Term) -> Term:
    match t:
        case Var():
            return t
        case Lam(x, body):
            return Lam(x, _forget(body))
        case Bang(u):
            return _forget(u)
        case App(Der(m), n):
            return App(_forget(m), _forget(n))
        case App(u, m):
            return App(_forget(u), _forget(m))
    raise NotInImage("term is not in the call-by-value target grammars")


def cbv_inverse(t: Term) -> Term:
    """The unique ``u`` with ``cbv(u)`` alpha-equal to ``t``, if any."""
    if _in_closure(t):
        u = _forget(t)
        if alpha_eq(cbv(u), t):
            return u
    raise NotInImage("term is not a call-by-value translation")


# ------------------------------------------------------------ path maps


def cbn_path(t: Term, path: Path) -> Path:
    """Position in ``cbn(t)`` of the subterm at ``path`` in ``t``."""
    out: list[str] = []
    for sel in path:
        out += ["arg", "body"] if sel == "arg" else [sel]
    return tuple(out)


def cbv_path(t: Term, path: Path) -> Path:
    """Position in ``cbv(t)`` of the translation of the subterm at ``path``."""
    out: list[str] = []
    for sel in path:
        if sel == "fun":
            out += ["fun", "body"]
        elif sel == "arg":
            out.append("arg")
        else:
            out += ["body", "body"]
    return tuple(out)


# ------------------------------------------------------------ simulation


@dataclass
class SimulationReport:
    mode: str
    direction: str  # soundness | completeness
    source: Term
    source_step: Step | None
    matched_steps: list[Step] = field(default_factory=list)
    verdict: str = "matched"
    detail: str = ""

    @property
    def ok(self) -> bool:
        return self.verdict == "matched"

    def to_json(self) -> dict:
        step_json = lambda s: {  # noqa: E731
            "path": list(s.redex.position),
            "kind": s.redex.kind,
            "result": print_term(s.result),
        }
        return {
            "mode": self.mode,
            "direction": self.direction,
            "source": print_term(self.source),
            "source_step": step_json(self.source_step) if self.source_step else None,
            "matched_steps": [step_json(s) for s in self.matched_steps],
            "verdict": self.verdict if self.ok else {"mismatch": self.detail},
        }


def _mode_parts(mode: str) -> tuple[str, bool]:
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return mode.split("_")[0], mode.endswith("_ground")


def check_simulation(
    t: Term,
    mode: str,
    max_steps: int = 10,
    exhaustive: bool = True,
    node_budget: int = 200,
) -> list[SimulationReport]:
    """Check both directions of the simulation theorem from ``t``.

    The lambda side is explored along the leftmost-outermost strategy for up
    to ``max_steps`` terms; with ``exhaustive`` every reduct is explored
    breadth-first instead, up to ``node_budget`` terms.  At every visited term
    each lambda step and each bang step of the translation is checked.
    """
    reports: list[SimulationReport] = []
    for u in _frontier(t, mode, max_steps, exhaustive, node_budget):
        reports += _soundness(u, mode)
        reports += _completeness(u, mode)
    return reports


def _frontier(t: Term, mode: str, max_steps: int, exhaustive: bool, budget: int) -> list[Term]:
    name, ground = _mode_parts(mode)
    spec = lam("beta" if name == "cbn" else "betav", ground)
    seen = {alpha_key(t)}
    order = [t]
    if not exhaustive:
        current = t
        for _ in range(max_steps):
            rs = redexes(current, spec)
            if not rs:
                break
            current = step(current, rs[0])
            key = alpha_key(current)
            if key in seen:
                break
            seen.add(key)
            order.append(current)
        return order
    i = 0
    while i < len(order) and len(order) < budget:
        for s in one_step_reducts(order[i], spec):
            key = alpha_key(s)
            if key not in seen and len(order) < budget:
                seen.add(key)
                order.append(s)
        i += 1
    return order


def _soundness(t: Term, mode: str) -> list[SimulationReport]:
    name, ground = _mode_parts(mode)
    out = []
    if name == "cbn":
        source = cbn(t)
        v_here = {r.position: r for r in redexes(source, bang("v", ground))}
        for r, t2 in successors(t, lam("beta", ground)):
            rep = SimulationReport(mode, "soundness", t, Step(r, t2))
            p = cbn_path(t, r.position)
            if p not in v_here:
                rep.verdict, rep.detail = "mismatch", f"no v-redex at {list(p)}"
            else:
                s = step(source, v_here[p])
                rep.matched_steps = [Step(v_here[p], s)]
                if not alpha_eq(s, cbn(t2)):
                    rep.verdict, rep.detail = "mismatch", "v-step does not land on the translation"
            out.append(rep)
        return out
    source = cbv(t)
    d_here = {r.position: r for r in redexes(source, bang("d", ground))}
    for r, t2 in successors(t, lam("betav", ground)):
        rep = SimulationReport(mode, "soundness", t, Step(r, t2))
        p = cbv_path(t, r.position)
        dp = p + ("fun",)
        if dp not in d_here:
            rep.verdict, rep.detail = "mismatch", f"no d-redex at {list(dp)}"
            out.append(rep)
            continue
        mid = step(source, d_here[dp])
        v_here = {q.position: q for q in redexes(mid, bang("v", ground))}
        if p not in v_here:
            rep.verdict, rep.detail = "mismatch", f"no v-redex at {list(p)}"
            out.append(rep)
            continue
        end = step(mid, v_here[p])
        rep.matched_steps = [Step(d_here[dp], mid), Step(v_here[p], end)]
        if not alpha_eq(end, cbv(t2)):
            rep.verdict, rep.detail = "mismatch", "d-v pair does not land on the translation"
        out.append(rep)
    return out


def _completeness(t: Term, mode: str) -> list[SimulationReport]:
    name, ground = _mode_parts(mode)
    out = []
    if name == "cbn":
        source = cbn(t)
        lam_reducts = one_step_reducts(t, lam("beta", ground))
        for r, s in successors(source, bang("b", ground)):
            rep = SimulationReport(mode, "completeness", t, None, [Step(r, s)])
            if r.kind != "v":
                rep.verdict, rep.detail = "mismatch", "d-step from a call-by-name image"
            elif not _in_cbn(s):
                rep.verdict, rep.detail = "mismatch", "reduct leaves the call-by-name image"
            else:
                t2 = _uncbn(s)
                if not any(alpha_eq(t2, u) for u in lam_reducts):
                    rep.verdict, rep.detail = "mismatch", "no matching beta-step"
                else:
                    rep.source_step = Step(Redex(r.position, "beta", ground), t2)
            out.append(rep)
        return out
    source = cbv(t)
    lam_reducts = one_step_reducts(t, lam("betav", ground))
    for r1, mid in successors(source, bang("d", ground)):
        for r2, end in successors(mid, bang("v", ground)):
            rep = SimulationReport(mode, "completeness", t, None, [Step(r1, mid), Step(r2, end)])
            try:
                t2 = cbv_inverse(end)
            except NotInImage:
                rep.verdict, rep.detail = "mismatch", "d-v pair leaves the translation image"
                out.append(rep)
                continue
            if not any(alpha_eq(t2, u) for u in lam_reducts):
                rep.verdict, rep.detail = "mismatch", "no matching betav-step"
            else:
                rep.source_step = Step(Redex(r2.position, "betav", ground), t2)
            out.append(rep)
    return out


# ---------------------------------------------------------- preservation


@dataclass
class EquivVerdict:
    joined: bool
    common: Term | None
    source_common: Term | None

    def to_json(self) -> dict:
        return {
            "joined": self.joined,
            "common": print_term(self.common) if self.common is not None else None,
            "source_common": print_term(self.source_common) if self.source_common is not None else None,
        }


def check_equiv_preservation(t: Term, u: Term, mode: str, budget: int = 2000) -> EquivVerdict:
    """Given lambda-equivalent ``t`` and ``u``, join their translations.

    Raises :class:`Inconclusive` if either join exceeds ``budget``.
    """
    if mode not in ("cbn", "cbv"):
        raise ValueError(f"unknown mode {mode!r}")
    spec = lam("beta" if mode == "cbn" else "betav")
    premise = join_by(t, u, lambda s: successors(s, spec), budget)
    if premise is None:
        raise Inconclusive("lambda terms not joined within budget")
    translate = cbn if mode == "cbn" else cbv
    image = join(translate(t), translate(u), bang("v" if mode == "cbn" else "b"), budget)
    if image is None:
        raise Inconclusive("translations not joined within budget")
    return EquivVerdict(True, image.common, premise.common)
