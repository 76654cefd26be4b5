"""Recursive-descent parser for the infix LTLf syntax.

Grammar, loosest binding first::

    formula  := implies
    implies  := or ( "->" implies )?
    or       := and ( "|" and )*
    and      := until ( "&" until )*
    until    := unary ( "U" until )?
    unary    := ("!" | "X" | "F" | "G") unary | primary
    primary  := "true" | "false" | IDENT | "(" formula ")"

``->`` and ``U`` associate to the right.  ``X``, ``F``, ``G`` and ``U``
are reserved and cannot be used as atom names.
"""
from __future__ import annotations

import re
from typing import Iterable, List, Optional, Tuple

from .formula import (
    FALSE,
    TRUE,
    And,
    Atom,
    Eventually,
    Formula,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Until,
)

RESERVED = {"X", "F", "G", "U", "true", "false"}

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_TOKEN = re.compile(r"\s*(?:(->)|([!&|()])|([A-Za-z_][A-Za-z0-9_]*))")


class LtlfSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class UndeclaredAtomError(ValueError):
    def __init__(self, name: str):
        super().__init__(f"atom {name!r} is not in the declared proposition set")
        self.name = name


def tokenize(text: str) -> List[Tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise LtlfSyntaxError(f"unexpected character {text[pos]!r}", pos)
        tok = m.group(1) or m.group(2) or m.group(3)
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.i][0] if self.i < len(self.tokens) else None

    def pos(self) -> int:
        return self.tokens[self.i][1] if self.i < len(self.tokens) else len(self.text)

    def take(self) -> str:
        tok = self.tokens[self.i][0]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        if self.peek() != tok:
            found = "end of input" if self.peek() is None else repr(self.peek())
            raise LtlfSyntaxError(f"expected {tok!r}, found {found}", self.pos())
        self.i += 1

    def parse(self) -> Formula:
        if not self.tokens:
            raise LtlfSyntaxError("empty formula", 0)
        f = self.implies()
        if self.peek() is not None:
            raise LtlfSyntaxError(f"unexpected token {self.peek()!r}", self.pos())
        return f

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        f = self.conjunction()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conjunction())
        return f

    def conjunction(self) -> Formula:
        f = self.until()
        while self.peek() == "&":
            self.take()
            f = And(f, self.until())
        return f

    def until(self) -> Formula:
        left = self.unary()
        if self.peek() == "U":
            self.take()
            return Until(left, self.until())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "X":
            self.take()
            return Next(self.unary())
        if tok == "F":
            self.take()
            return Eventually(self.unary())
        if tok == "G":
            self.take()
            return Globally(self.unary())
        return self.primary()

    def primary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise LtlfSyntaxError("unexpected end of input", self.pos())
        if tok == "(":
            self.take()
            f = self.implies()
            self.expect(")")
            return f
        if tok == "true":
            self.take()
            return TRUE
        if tok == "false":
            self.take()
            return FALSE
        if tok in RESERVED or not _IDENT.fullmatch(tok):
            raise LtlfSyntaxError(f"unexpected token {tok!r}", self.pos())
        self.take()
        return Atom(tok)


def parse_ltlf(text: str, ap: Optional[Iterable[str]] = None) -> Formula:
    """Parse ``text`` into a formula tree.

    If ``ap`` is given, every atom must belong to it; otherwise
    :class:`UndeclaredAtomError` names the first offending atom in reading
    order.
    """
    parser = _Parser(text)
    f = parser.parse()
    if ap is not None:
        declared = set(ap)
        for tok, _ in parser.tokens:
            if _IDENT.fullmatch(tok) and tok not in RESERVED and tok not in declared:
                raise UndeclaredAtomError(tok)
    return f
