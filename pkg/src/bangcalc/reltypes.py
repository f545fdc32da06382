"""Ground relational types: multisets and multiset-source arrows.

Types are tuple subclasses laid out so that Python's native tuple ordering is
the canonical total order: multisets before arrows, multisets by cardinality
then by their sorted elements, arrows by source then target.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Iterable, Union


class Mset(tuple):
    __slots__ = ()

    def __new__(cls, elems: Iterable["RelType"] = ()):
        es = tuple(sorted(elems))
        return tuple.__new__(cls, (0, len(es), es))

    @property
    def elems(self) -> tuple:
        return self[2]

    def __add__(self, other: "Mset") -> "Mset":  # multiset sum
        return Mset(self[2] + other[2])

    def __repr__(self) -> str:
        return f"Mset({show_type(self)})"


class Arrow(tuple):
    __slots__ = ()

    def __new__(cls, arg: Mset, res: "RelType"):
        if not isinstance(arg, Mset):
            raise TypeError("arrow source must be a multiset")
        return tuple.__new__(cls, (1, arg, res))

    @property
    def arg(self) -> Mset:
        return self[1]

    @property
    def res(self) -> "RelType":
        return self[2]

    def __repr__(self) -> str:
        return f"Arrow({show_type(self)})"


RelType = Union[Mset, Arrow]
EMPTY = Mset()


@dataclass(frozen=True)
class Bound:
    """Finite window on the type universe.

    ``max_depth`` bounds arrow nesting, ``max_width`` every multiset's
    cardinality and ``budget`` the node count of a whole judgement.
    ``copy_cap`` bounds the number of copies guessed for a box or multiset
    whose size is not fixed by its context (default ``max_width + 1``).
    """

    max_depth: int = 2
    max_width: int = 2
    budget: int = 12
    copy_cap: int | None = None

    def __post_init__(self):
        if min(self.max_depth, self.max_width, self.budget) < 0:
            raise ValueError("bounds must be non-negative")
        if self.copy_cap is not None and self.copy_cap < 0:
            raise ValueError("copy_cap must be non-negative")

    @property
    def copies(self) -> int:
        return self.max_width + 1 if self.copy_cap is None else self.copy_cap

    def to_json(self) -> dict:
        return {
            "depth": self.max_depth,
            "width": self.max_width,
            "budget": self.budget,
            "copy_cap": self.copies,
        }


# ---------------------------------------------------------------- metrics


@functools.lru_cache(maxsize=None)
def nodes(t: RelType) -> int:
    if t[0] == 0:
        return 1 + sum(nodes(e) for e in t[2])
    return 1 + nodes(t[1]) + nodes(t[2])


@functools.lru_cache(maxsize=None)
def arrow_depth(t: RelType) -> int:
    if t[0] == 0:
        return max((arrow_depth(e) for e in t[2]), default=0)
    return 1 + max(arrow_depth(t[1]), arrow_depth(t[2]))


@functools.lru_cache(maxsize=None)
def width(t: RelType) -> int:
    if t[0] == 0:
        return max([len(t[2])] + [width(e) for e in t[2]])
    return max(width(t[1]), width(t[2]))


def is_mset(t: RelType) -> bool:
    return t[0] == 0


def judgement_nodes(env: tuple[Mset, ...], ty: RelType) -> int:
    return sum(nodes(a) for a in env) + nodes(ty)


def judgement_in_bound(env: tuple[Mset, ...], ty: RelType, bound: Bound) -> bool:
    return (
        all(arrow_depth(t) <= bound.max_depth and width(t) <= bound.max_width for t in (*env, ty))
        and judgement_nodes(env, ty) <= bound.budget
    )


# ----------------------------------------------------------- enumeration


def enumerate_types(bound: Bound) -> list[RelType]:
    """Every type within ``bound`` (a lone type is a judgement with no
    environment), once each, in canonical order."""
    out = [t for n in range(1, bound.budget + 1) for t in types_of_size(n, bound.max_depth, bound.max_width)]
    return sorted(out)


@functools.lru_cache(maxsize=None)
def types_of_size(n: int, depth: int, width_: int) -> tuple[RelType, ...]:
    """Types with exactly ``n`` nodes, arrow depth <= depth, width <= width_."""
    if n < 1:
        return ()
    return msets_of_size(n, depth, width_) + _arrows_of_size(n, depth, width_)


@functools.lru_cache(maxsize=None)
def msets_of_size(n: int, depth: int, width_: int) -> tuple[Mset, ...]:
    found: set[Mset] = set()
    for combo in _multisets(n - 1, width_, depth, width_):
        found.add(Mset(combo))
    return tuple(sorted(found))


def _multisets(total: int, slots: int, depth: int, width_: int, floor=None):
    """Non-increasing sequences of at most ``slots`` types whose sizes sum to
    ``total``; yielding each multiset exactly once."""
    if total == 0:
        yield ()
        return
    if slots == 0:
        return
    for size in range(1, total + 1):
        for t in types_of_size(size, depth, width_):
            if floor is not None and t > floor:
                continue
            for rest in _multisets(total - size, slots - 1, depth, width_, t):
                yield (t,) + rest


@functools.lru_cache(maxsize=None)
def _arrows_of_size(n: int, depth: int, width_: int) -> tuple[Arrow, ...]:
    if depth == 0:
        return ()
    out = []
    for m in range(1, n - 1):
        for arg in msets_of_size(m, depth - 1, width_):
            for res in types_of_size(n - 1 - m, depth - 1, width_):
                out.append(Arrow(arg, res))
    return tuple(sorted(out))


# ------------------------------------------------------- printing/parsing


def show_type(t: RelType) -> str:
    if t[0] == 0:
        return "[" + ", ".join(show_type(e) for e in t[2]) + "]"
    return f"{show_type(t[1])} -o {show_type(t[2])}"


class TypeParseError(ValueError):
    pass


_TYPE_TOKEN = re.compile(r"\s*(?:(-o|⊸)|([\[\],]))")


def parse_type(text: str) -> RelType:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TYPE_TOKEN.match(text, pos)
        if not m:
            raise TypeParseError(f"unexpected character at {pos}")
        tokens.append("-o" if m.group(1) else m.group(2))
        pos = m.end()
    ty, rest = _parse_type(tokens, 0)
    if rest != len(tokens):
        raise TypeParseError("trailing input")
    return ty


def _parse_type(tokens: list[str], i: int) -> tuple[RelType, int]:
    if i >= len(tokens) or tokens[i] != "[":
        raise TypeParseError("expected '['")
    i += 1
    elems = []
    if i < len(tokens) and tokens[i] == "]":
        i += 1
    else:
        while True:
            e, i = _parse_type(tokens, i)
            elems.append(e)
            if i < len(tokens) and tokens[i] == ",":
                i += 1
                continue
            if i < len(tokens) and tokens[i] == "]":
                i += 1
                break
            raise TypeParseError("expected ',' or ']'")
    src = Mset(elems)
    if i < len(tokens) and tokens[i] == "-o":
        res, i = _parse_type(tokens, i + 1)
        return Arrow(src, res), i
    return src, i


def type_to_json(t: RelType):
    return show_type(t)
