"""LTLf expression trees.

Surface operators (``F``, ``G``, ``&``, ``->``) are kept as their own node
types so formulas print the way they were written.  :func:`normalize`
rewrites a tree into the core grammar (atoms, constants, ``!``, ``|``,
``X``, ``U``) and :func:`to_nnf` produces the negation normal form used by
the DFA construction, which additionally needs weak-next and release.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterator


class Formula:
    """Base class of all LTLf nodes."""

    __slots__ = ()

    def children(self) -> tuple:
        return ()

    def atoms(self) -> FrozenSet[str]:
        out = set()
        for node in walk(self):
            if isinstance(node, Atom):
                out.add(node.name)
        return frozenset(out)

    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __invert__(self) -> Formula:
        return Not(self)


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def children(self) -> tuple:
        return (self.arg,)

    def __str__(self) -> str:
        return f"!{_wrap(self.arg)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left} & {self.right})"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left} | {self.right})"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left} -> {self.right})"


@dataclass(frozen=True)
class Next(Formula):
    """Strong next: a successor position must exist."""

    arg: Formula

    def children(self) -> tuple:
        return (self.arg,)

    def __str__(self) -> str:
        return f"X{_wrap(self.arg)}"


@dataclass(frozen=True)
class WeakNext(Formula):
    """Weak next: true at the last position.  Only produced by NNF."""

    arg: Formula

    def children(self) -> tuple:
        return (self.arg,)

    def __str__(self) -> str:
        return f"WX{_wrap(self.arg)}"


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left} U {self.right})"


@dataclass(frozen=True)
class Release(Formula):
    """Dual of until.  Only produced by NNF."""

    left: Formula
    right: Formula

    def children(self) -> tuple:
        return (self.left, self.right)

    def __str__(self) -> str:
        return f"({self.left} R {self.right})"


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula

    def children(self) -> tuple:
        return (self.arg,)

    def __str__(self) -> str:
        return f"F{_wrap(self.arg)}"


@dataclass(frozen=True)
class Globally(Formula):
    arg: Formula

    def children(self) -> tuple:
        return (self.arg,)

    def __str__(self) -> str:
        return f"G{_wrap(self.arg)}"


def _wrap(f: Formula) -> str:
    if isinstance(f, (Atom, Const)):
        return f"({f})" if isinstance(f, Const) else str(f)
    text = str(f)
    return text if text.startswith("(") else f"({text})"


def walk(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(node.children())


CORE_TYPES = (Const, Atom, Not, Or, Next, Until)


def is_core(f: Formula) -> bool:
    return all(isinstance(node, CORE_TYPES) for node in walk(f))


def normalize(f: Formula) -> Formula:
    """Rewrite derived operators into ``!``, ``|``, ``X`` and ``U``.

    ``a & b`` becomes ``!(!a | !b)``, ``a -> b`` becomes ``!a | b``,
    ``F a`` becomes ``true U a`` and ``G a`` becomes ``!(true U !a)``.
    """
    if isinstance(f, (Const, Atom)):
        return f
    if isinstance(f, Not):
        return Not(normalize(f.arg))
    if isinstance(f, Or):
        return Or(normalize(f.left), normalize(f.right))
    if isinstance(f, And):
        return Not(Or(Not(normalize(f.left)), Not(normalize(f.right))))
    if isinstance(f, Implies):
        return Or(Not(normalize(f.left)), normalize(f.right))
    if isinstance(f, Next):
        return Next(normalize(f.arg))
    if isinstance(f, WeakNext):
        return Not(Next(Not(normalize(f.arg))))
    if isinstance(f, Until):
        return Until(normalize(f.left), normalize(f.right))
    if isinstance(f, Release):
        return Not(Until(Not(normalize(f.left)), Not(normalize(f.right))))
    if isinstance(f, Eventually):
        return Until(TRUE, normalize(f.arg))
    if isinstance(f, Globally):
        return Not(Until(TRUE, Not(normalize(f.arg))))
    raise TypeError(f"unknown formula node {f!r}")


def to_nnf(f: Formula, negated: bool = False) -> Formula:
    """Negation normal form over And/Or/Next/WeakNext/Until/Release.

    Negation is pushed down to atoms; constants absorb it.
    """
    if isinstance(f, Const):
        return Const(f.value != negated)
    if isinstance(f, Atom):
        return Not(f) if negated else f
    if isinstance(f, Not):
        return to_nnf(f.arg, not negated)
    if isinstance(f, (And, Or)):
        left, right = to_nnf(f.left, negated), to_nnf(f.right, negated)
        use_and = isinstance(f, And) != negated
        return And(left, right) if use_and else Or(left, right)
    if isinstance(f, Implies):
        return to_nnf(Or(Not(f.left), f.right), negated)
    if isinstance(f, Next):
        arg = to_nnf(f.arg, negated)
        return WeakNext(arg) if negated else Next(arg)
    if isinstance(f, WeakNext):
        arg = to_nnf(f.arg, negated)
        return Next(arg) if negated else WeakNext(arg)
    if isinstance(f, Until):
        left, right = to_nnf(f.left, negated), to_nnf(f.right, negated)
        return Release(left, right) if negated else Until(left, right)
    if isinstance(f, Release):
        left, right = to_nnf(f.left, negated), to_nnf(f.right, negated)
        return Until(left, right) if negated else Release(left, right)
    if isinstance(f, Eventually):
        return to_nnf(Until(TRUE, f.arg), negated)
    if isinstance(f, Globally):
        return to_nnf(Release(FALSE, f.arg), negated)
    raise TypeError(f"unknown formula node {f!r}")
