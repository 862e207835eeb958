"""MALL session types with involutive duality.

Grammar (ASCII): 1, bot, 0, top, A * B, A par B, A + B, A & B.
Binary operators are right-associative; * and par share one precedence
level, + and & share a looser one, and levels never mix without parens.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass


class Type:
    __slots__ = ()


@dataclass(frozen=True)
class Tensor(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Par(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class Plus(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class With(Type):
    left: Type
    right: Type


@dataclass(frozen=True)
class One(Type):
    pass


@dataclass(frozen=True)
class Bot(Type):
    pass


@dataclass(frozen=True)
class Zero(Type):
    pass


@dataclass(frozen=True)
class Top(Type):
    pass


ONE = One()
BOT = Bot()
ZERO = Zero()
TOP = Top()


def dual(a: Type) -> Type:
    match a:
        case Tensor(l, r):
            return Par(dual(l), dual(r))
        case Par(l, r):
            return Tensor(dual(l), dual(r))
        case Plus(l, r):
            return With(dual(l), dual(r))
        case With(l, r):
            return Plus(dual(l), dual(r))
        case One():
            return BOT
        case Bot():
            return ONE
        case Zero():
            return TOP
        case Top():
            return ZERO
    raise TypeError(f"not a type: {a!r}")


def size(a: Type) -> int:
    """Formula size; the unit of the cut-reduction termination measure."""
    match a:
        case Tensor(l, r) | Par(l, r) | Plus(l, r) | With(l, r):
            return size(l) + size(r) + 1
        case _:
            return 1


_ATOMS = {One: "1", Bot: "bot", Zero: "0", Top: "top"}
_OPS = {Tensor: "*", Par: "par", Plus: "+", With: "&"}


def _level(a: Type) -> int:
    if type(a) in (Tensor, Par):
        return 1
    if type(a) in (Plus, With):
        return 0
    return 2


@functools.lru_cache(maxsize=1 << 16)
def render(a: Type) -> str:
    """Canonical ASCII form with minimal parentheses."""
    cls = type(a)
    if cls in _ATOMS:
        return _ATOMS[cls]
    op = _OPS[cls]
    return f"{_sub(a.left, a, False)} {op} {_sub(a.right, a, True)}"


def _sub(child: Type, parent: Type, is_right: bool) -> str:
    s = render(child)
    if _level(child) > _level(parent):
        return s
    if is_right and type(child) is type(parent):
        return s
    return f"({s})"
