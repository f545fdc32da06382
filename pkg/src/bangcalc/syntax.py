"""Terms of the bang calculus and of the plain lambda calculus.

A single set of node classes serves both calculi: a lambda term is simply a
term with no ``Der`` or ``Bang`` node.  Terms are immutable and compared
structurally; use :func:`alpha_eq` (or :func:`alpha_key`) for comparison up
to renaming of bound variables.

Surface syntax::

    term ::= x | \\x. term | term term | der term | !term | (term)

Application is left-associative, ``!`` and ``der`` bind tighter than
application and the body of an abstraction extends as far right as possible.
"""

from __future__ import annotations

import functools
import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Union


@dataclass(frozen=True, slots=True)
class Var:
    name: str


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    body: Term


@dataclass(frozen=True, slots=True)
class App:
    fun: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Der:
    body: Term


@dataclass(frozen=True, slots=True)
class Bang:
    body: Term


Term = Union[Var, Lam, App, Der, Bang]

# A path is a tuple of child selectors: "fun", "arg" (App) and "body"
# (Lam, Der, Bang).
Path = tuple[str, ...]


class ParseError(ValueError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


# ---------------------------------------------------------------- basics


def is_lambda(t: Term) -> bool:
    """True when ``t`` contains no ``Der``/``Bang`` node."""
    match t:
        case Var():
            return True
        case Lam(_, body):
            return is_lambda(body)
        case App(f, a):
            return is_lambda(f) and is_lambda(a)
    return False


def is_value(t: Term) -> bool:
    """Lambda values: variables and abstractions."""
    return isinstance(t, (Var, Lam))


def size(t: Term) -> int:
    match t:
        case Var():
            return 1
        case Lam(_, body) | Der(body) | Bang(body):
            return 1 + size(body)
        case App(f, a):
            return 1 + size(f) + size(a)
    raise TypeError(f"not a term: {t!r}")


def free_vars(t: Term) -> frozenset[str]:
    match t:
        case Var(x):
            return frozenset((x,))
        case Lam(x, body):
            return free_vars(body) - {x}
        case Der(body) | Bang(body):
            return free_vars(body)
        case App(f, a):
            return free_vars(f) | free_vars(a)
    raise TypeError(f"not a term: {t!r}")


def all_vars(t: Term) -> set[str]:
    """Every variable name occurring in ``t``, bound or free."""
    match t:
        case Var(x):
            return {x}
        case Lam(x, body):
            return {x} | all_vars(body)
        case Der(body) | Bang(body):
            return all_vars(body)
        case App(f, a):
            return all_vars(f) | all_vars(a)
    raise TypeError(f"not a term: {t!r}")


def fresh_name(base: str, avoid: set[str] | frozenset[str]) -> str:
    stem = base.rstrip("0123456789'") or "v"
    for i in itertools.count(1):
        candidate = f"{stem}{i}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


# ------------------------------------------------------ alpha-equivalence


@functools.lru_cache(maxsize=1 << 16)
def alpha_key(t: Term) -> tuple:
    """Nameless form of ``t``: bound variables become de Bruijn indices.

    Two terms are alpha-equivalent exactly when their keys are equal.
    """
    return _nameless(t, ())


def _nameless(t: Term, scope: tuple[str, ...]) -> tuple:
    match t:
        case Var(x):
            for i, y in enumerate(reversed(scope)):
                if x == y:
                    return ("b", i)
            return ("f", x)
        case Lam(x, body):
            return ("lam", _nameless(body, scope + (x,)))
        case App(f, a):
            return ("app", _nameless(f, scope), _nameless(a, scope))
        case Der(body):
            return ("der", _nameless(body, scope))
        case Bang(body):
            return ("bang", _nameless(body, scope))
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(t: Term, s: Term) -> bool:
    return t == s or alpha_key(t) == alpha_key(s)


# ----------------------------------------------------------- substitution


def substitute(t: Term, x: str, s: Term) -> Term:
    """Capture-avoiding substitution ``t[s/x]``."""
    return _subst(t, x, s, free_vars(s))


def _subst(t: Term, x: str, s: Term, fv_s: frozenset[str]) -> Term:
    match t:
        case Var(y):
            return s if y == x else t
        case Lam(y, body):
            if y == x or x not in free_vars(body):
                return t
            if y in fv_s:
                z = fresh_name(y, fv_s | all_vars(body) | {x})
                body = _subst(body, y, Var(z), frozenset((z,)))
                y = z
            return Lam(y, _subst(body, x, s, fv_s))
        case App(f, a):
            return App(_subst(f, x, s, fv_s), _subst(a, x, s, fv_s))
        case Der(body):
            return Der(_subst(body, x, s, fv_s))
        case Bang(body):
            return Bang(_subst(body, x, s, fv_s))
    raise TypeError(f"not a term: {t!r}")


def rename_apart(t: Term, avoid: set[str] | None = None) -> Term:
    """Alpha-variant of ``t`` whose binders are pairwise distinct and
    distinct from its free variables and from ``avoid``."""
    taken = set(free_vars(t)) | set(avoid or ())
    names = all_vars(t) | taken

    def go(t: Term) -> Term:
        match t:
            case Var():
                return t
            case Lam(x, body):
                z = x if x not in taken else fresh_name(x, names)
                taken.add(z)
                names.add(z)
                if z != x:
                    body = substitute(body, x, Var(z))
                return Lam(z, go(body))
            case App(f, a):
                return App(go(f), go(a))
            case Der(body):
                return Der(go(body))
            case Bang(body):
                return Bang(go(body))
        raise TypeError(f"not a term: {t!r}")

    return go(t)


# ------------------------------------------------------------------ paths


def subterm(t: Term, path: Path) -> Term:
    for sel in path:
        match (sel, t):
            case ("fun", App(f, _)):
                t = f
            case ("arg", App(_, a)):
                t = a
            case ("body", Lam(_, b) | Der(b) | Bang(b)):
                t = b
            case _:
                raise KeyError(f"invalid path {path!r}")
    return t


def replace_at(t: Term, path: Path, new: Term) -> Term:
    """Plug ``new`` at ``path`` (capture-allowing, like filling a context)."""
    if not path:
        return new
    sel, rest = path[0], path[1:]
    match (sel, t):
        case ("fun", App(f, a)):
            return App(replace_at(f, rest, new), a)
        case ("arg", App(f, a)):
            return App(f, replace_at(a, rest, new))
        case ("body", Lam(x, b)):
            return Lam(x, replace_at(b, rest, new))
        case ("body", Der(b)):
            return Der(replace_at(b, rest, new))
        case ("body", Bang(b)):
            return Bang(replace_at(b, rest, new))
    raise KeyError(f"invalid path {path!r}")


def positions(t: Term, path: Path = ()) -> Iterator[tuple[Path, Term]]:
    """All (path, subterm) pairs in pre-order, function before argument."""
    yield path, t
    match t:
        case Lam(_, b) | Der(b) | Bang(b):
            yield from positions(b, path + ("body",))
        case App(f, a):
            yield from positions(f, path + ("fun",))
            yield from positions(a, path + ("arg",))


# ---------------------------------------------------------------- parsing

_TOKEN = re.compile(
    r"\s*(?:(?P<lam>\\|λ)|(?P<dot>\.)|(?P<lp>\()|(?P<rp>\))|(?P<bang>!)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_']*))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        value = m.group(kind)
        start = m.start(kind)
        if kind == "ident" and value == "der":
            kind = "der"
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, lambda_mode: bool):
        self.tokens = _tokenize(text)
        self.i = 0
        self.lambda_mode = lambda_mode

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> tuple[str, str, int]:
        tok = self.advance()
        if tok[0] != kind:
            what = tok[1] or "end of input"
            raise ParseError(f"expected {kind}, found {what!r}", tok[2])
        return tok

    def term(self) -> Term:
        if self.peek()[0] == "lam":
            return self.abstraction()
        head = self.prefixed()
        while self.peek()[0] in ("ident", "lp", "bang", "der", "lam"):
            if self.peek()[0] == "lam":
                head = App(head, self.abstraction())
                break
            head = App(head, self.prefixed())
        return head

    def abstraction(self) -> Term:
        self.expect("lam")
        name = self.expect("ident")[1]
        self.expect("dot")
        return Lam(name, self.term())

    def prefixed(self) -> Term:
        kind, _, pos = self.peek()
        if kind in ("bang", "der"):
            if self.lambda_mode:
                raise ParseError("bang construct in lambda mode", pos)
            self.advance()
            operand = self.abstraction() if self.peek()[0] == "lam" else self.prefixed()
            return Bang(operand) if kind == "bang" else Der(operand)
        return self.atom()

    def atom(self) -> Term:
        kind, value, pos = self.advance()
        if kind == "ident":
            return Var(value)
        if kind == "lp":
            inner = self.term()
            self.expect("rp")
            return inner
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos)


def _parse(text: str, lambda_mode: bool) -> Term:
    p = _Parser(text, lambda_mode)
    t = p.term()
    kind, value, pos = p.peek()
    if kind != "eof":
        raise ParseError(f"unexpected {value!r}", pos)
    return t


def parse_bang(text: str) -> Term:
    return _parse(text, lambda_mode=False)


def parse_lambda(text: str) -> Term:
    return _parse(text, lambda_mode=True)


# --------------------------------------------------------------- printing


def print_term(t: Term) -> str:
    return _show(t, tail=True)


def _show(t: Term, tail: bool) -> str:
    # ``tail``: nothing follows to the right, so an abstraction needs no parens.
    match t:
        case Var(x):
            return x
        case Lam(x, body):
            s = f"\\{x}. {_show(body, True)}"
            return s if tail else f"({s})"
        case App(f, a):
            left = _show(f, False) if not isinstance(f, Lam) else f"({_show(f, True)})"
            if isinstance(a, App):
                right = f"({_show(a, True)})"
            else:
                right = _show(a, tail)
            return f"{left} {right}"
        case Der(body):
            return f"der {_operand(body)}"
        case Bang(body):
            return f"!{_operand(body)}"
    raise TypeError(f"not a term: {t!r}")


def _operand(t: Term) -> str:
    if isinstance(t, (App, Lam)):
        return f"({_show(t, True)})"
    return _show(t, False)


# ------------------------------------------------------------------- JSON


def to_json(t: Term) -> dict:
    match t:
        case Var(x):
            return {"tag": "var", "name": x}
        case Lam(x, body):
            return {"tag": "lam", "var": x, "body": to_json(body)}
        case App(f, a):
            return {"tag": "app", "fun": to_json(f), "arg": to_json(a)}
        case Der(body):
            return {"tag": "der", "body": to_json(body)}
        case Bang(body):
            return {"tag": "bang", "body": to_json(body)}
    raise TypeError(f"not a term: {t!r}")


def from_json(data: dict) -> Term:
    match data.get("tag"):
        case "var":
            return Var(data["name"])
        case "lam":
            return Lam(data["var"], from_json(data["body"]))
        case "app":
            return App(from_json(data["fun"]), from_json(data["arg"]))
        case "der":
            return Der(from_json(data["body"]))
        case "bang":
            return Bang(from_json(data["body"]))
    raise ValueError(f"unknown term node {data!r}")
