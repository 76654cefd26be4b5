"""Direct finite-trace semantics, used as the reference for the DFA.

Every operator (derived ones included) is evaluated from its own textbook
definition over positions of the word; nothing is rewritten first.
"""
from __future__ import annotations

from typing import AbstractSet, Dict, List, Sequence

import numpy as np

from .formula import (
    And,
    Atom,
    Const,
    Eventually,
    Formula,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Release,
    Until,
    WeakNext,
)

Word = Sequence[AbstractSet[str]]


def _postorder(f: Formula) -> List[Formula]:
    """Distinct subformulas, children before parents (identity-based, no hashing)."""
    out: List[Formula] = []
    seen = set()
    stack = [(f, False)]
    while stack:
        g, done = stack.pop()
        if id(g) in seen:
            continue
        if done:
            seen.add(id(g))
            out.append(g)
        else:
            stack.append((g, True))
            stack.extend((c, False) for c in g.children())
    return out


def satisfies(word: Word, f: Formula) -> bool:
    """``word |= f`` for a nonempty finite word.  The empty word is rejected.

    Each subformula gets a truth vector over positions ``0..n-1``, filled
    children first; every operator reads its children's vectors at the
    positions its definition quantifies over.
    """
    n = len(word)
    if n == 0:
        return False
    val: Dict[int, List[bool]] = {}
    for g in _postorder(f):
        if isinstance(g, Const):
            v = [g.value] * n
        elif isinstance(g, Atom):
            v = [g.name in letter for letter in word]
        elif isinstance(g, Not):
            a = val[id(g.arg)]
            v = [not x for x in a]
        elif isinstance(g, Or):
            a, b = val[id(g.left)], val[id(g.right)]
            v = [x or y for x, y in zip(a, b)]
        elif isinstance(g, And):
            a, b = val[id(g.left)], val[id(g.right)]
            v = [x and y for x, y in zip(a, b)]
        elif isinstance(g, Implies):
            a, b = val[id(g.left)], val[id(g.right)]
            v = [(not x) or y for x, y in zip(a, b)]
        elif isinstance(g, Next):
            a = val[id(g.arg)]
            v = [i + 1 < n and a[i + 1] for i in range(n)]
        elif isinstance(g, WeakNext):
            a = val[id(g.arg)]
            v = [i + 1 >= n or a[i + 1] for i in range(n)]
        elif isinstance(g, Until):
            # exists j >= i with right(j) and left(k) for all i <= k < j
            a, b = val[id(g.left)], val[id(g.right)]
            v = [any(b[j] and all(a[i:j]) for j in range(i, n)) for i in range(n)]
        elif isinstance(g, Release):
            # for all j >= i: right(j), or left(k) for some i <= k < j
            a, b = val[id(g.left)], val[id(g.right)]
            v = [all(b[j] or any(a[i:j]) for j in range(i, n)) for i in range(n)]
        elif isinstance(g, Eventually):
            a = val[id(g.arg)]
            v = [any(a[i:]) for i in range(n)]
        elif isinstance(g, Globally):
            a = val[id(g.arg)]
            v = [all(a[i:]) for i in range(n)]
        else:
            raise TypeError(f"unknown formula node {g!r}")
        val[id(g)] = v
    return val[id(f)][0]


def satisfies_batch(symbols: np.ndarray, ap: Sequence[str], f: Formula) -> np.ndarray:
    """:func:`satisfies` for many equal-length words at once.

    ``symbols`` is a ``(words, length)`` array of letters encoded as bitsets
    over ``ap`` (bit ``i`` set iff ``ap[i]`` holds).  The same per-operator
    definitions are applied with every truth vector widened to a
    ``(words, length)`` boolean array.
    """
    symbols = np.asarray(symbols, dtype=np.int64)
    w, n = symbols.shape
    if n == 0:
        return np.zeros(w, dtype=bool)
    bit = {p: i for i, p in enumerate(ap)}
    val: Dict[int, np.ndarray] = {}
    for g in _postorder(f):
        if isinstance(g, Const):
            v = np.full((w, n), g.value)
        elif isinstance(g, Atom):
            v = (symbols >> bit[g.name] & 1).astype(bool)
        elif isinstance(g, Not):
            v = ~val[id(g.arg)]
        elif isinstance(g, Or):
            v = val[id(g.left)] | val[id(g.right)]
        elif isinstance(g, And):
            v = val[id(g.left)] & val[id(g.right)]
        elif isinstance(g, Implies):
            v = ~val[id(g.left)] | val[id(g.right)]
        elif isinstance(g, (Next, WeakNext)):
            a = val[id(g.arg)]
            v = np.full((w, n), isinstance(g, WeakNext))
            v[:, :-1] = a[:, 1:]
        elif isinstance(g, Until):
            a, b = val[id(g.left)], val[id(g.right)]
            v = np.zeros((w, n), dtype=bool)
            for i in range(n):
                for j in range(i, n):
                    v[:, i] |= b[:, j] & a[:, i:j].all(axis=1)
        elif isinstance(g, Release):
            a, b = val[id(g.left)], val[id(g.right)]
            v = np.ones((w, n), dtype=bool)
            for i in range(n):
                for j in range(i, n):
                    v[:, i] &= b[:, j] | a[:, i:j].any(axis=1)
        elif isinstance(g, Eventually):
            a = val[id(g.arg)]
            v = np.stack([a[:, i:].any(axis=1) for i in range(n)], axis=1)
        elif isinstance(g, Globally):
            a = val[id(g.arg)]
            v = np.stack([a[:, i:].all(axis=1) for i in range(n)], axis=1)
        else:
            raise TypeError(f"unknown formula node {g!r}")
        val[id(g)] = v
    return val[id(f)][:, 0]
