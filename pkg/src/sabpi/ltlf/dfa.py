"""LTLf to DFA translation by formula progression.

A construction state is a pair ``(obligation, flag)``.  The obligation is
a DNF over NNF literals describing what the rest of the word must satisfy;
the flag records whether the word read so far, taken as a complete trace,
satisfies the formula.  Reading a symbol progresses the obligation and
recomputes the flag, so acceptance is a property of the state.  The
reachable states are then minimized by partition refinement and states
that cannot reach acceptance are marked as traps.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .formula import (
    And,
    Atom,
    Const,
    Formula,
    Next,
    Not,
    Or,
    Release,
    Until,
    WeakNext,
    to_nnf,
)

MAX_AP = 16
DEFAULT_STATE_BUDGET = 4096

Clause = FrozenSet[Formula]
Dnf = FrozenSet[Clause]

DNF_TRUE: Dnf = frozenset([frozenset()])
DNF_FALSE: Dnf = frozenset()


class StateBudgetExceeded(RuntimeError):
    pass


def _consistent(clause: Iterable[Formula]) -> bool:
    clause = set(clause)
    return not any(isinstance(lit, Not) and lit.arg in clause for lit in clause)


def _simplify(clauses: Iterable[Clause]) -> Dnf:
    kept = sorted({c for c in clauses if _consistent(c)}, key=len)
    out: List[Clause] = []
    for c in kept:
        if not any(o <= c for o in out):
            out.append(c)
    return frozenset(out)


def _dnf_and(a: Dnf, b: Dnf) -> Dnf:
    return _simplify(x | y for x in a for y in b)


def _dnf_or(a: Dnf, b: Dnf) -> Dnf:
    return _simplify(a | b)


def _dnf(f: Formula) -> Dnf:
    if isinstance(f, Const):
        return DNF_TRUE if f.value else DNF_FALSE
    if isinstance(f, And):
        return _dnf_and(_dnf(f.left), _dnf(f.right))
    if isinstance(f, Or):
        return _dnf_or(_dnf(f.left), _dnf(f.right))
    return frozenset([frozenset([f])])


class _Progressor:
    """Progression and last-position checks with memoization."""

    def __init__(self) -> None:
        self._prog: Dict[Tuple[Formula, FrozenSet[str]], Dnf] = {}

    def progress(self, f: Formula, sym: FrozenSet[str]) -> Dnf:
        if isinstance(f, Const):
            return DNF_TRUE if f.value else DNF_FALSE
        if isinstance(f, And):
            return _dnf_and(self.progress(f.left, sym), self.progress(f.right, sym))
        if isinstance(f, Or):
            return _dnf_or(self.progress(f.left, sym), self.progress(f.right, sym))
        key = (f, sym)
        hit = self._prog.get(key)
        if hit is not None:
            return hit
        if isinstance(f, Atom):
            out = DNF_TRUE if f.name in sym else DNF_FALSE
        elif isinstance(f, Not):
            out = DNF_FALSE if f.arg.name in sym else DNF_TRUE
        elif isinstance(f, (Next, WeakNext)):
            out = _dnf(f.arg)
        elif isinstance(f, Until):
            stay = _dnf_and(self.progress(f.left, sym), frozenset([frozenset([f])]))
            out = _dnf_or(self.progress(f.right, sym), stay)
        elif isinstance(f, Release):
            stay = _dnf_or(self.progress(f.left, sym), frozenset([frozenset([f])]))
            out = _dnf_and(self.progress(f.right, sym), stay)
        else:
            raise TypeError(f"formula not in NNF: {f!r}")
        self._prog[key] = out
        return out

    def holds_last(self, f: Formula, sym: FrozenSet[str]) -> bool:
        if isinstance(f, Const):
            return f.value
        if isinstance(f, Atom):
            return f.name in sym
        if isinstance(f, Not):
            return f.arg.name not in sym
        if isinstance(f, And):
            return self.holds_last(f.left, sym) and self.holds_last(f.right, sym)
        if isinstance(f, Or):
            return self.holds_last(f.left, sym) or self.holds_last(f.right, sym)
        if isinstance(f, Next):
            return False
        if isinstance(f, WeakNext):
            return True
        if isinstance(f, (Until, Release)):
            return self.holds_last(f.right, sym)
        raise TypeError(f"formula not in NNF: {f!r}")

    def step(self, obligation: Dnf, sym: FrozenSet[str]) -> Tuple[Dnf, bool]:
        nxt: Dnf = DNF_FALSE
        flag = False
        for clause in obligation:
            part = DNF_TRUE
            for lit in clause:
                part = _dnf_and(part, self.progress(lit, sym))
                if not part:
                    break
            nxt = _dnf_or(nxt, part)
            if not flag and all(self.holds_last(lit, sym) for lit in clause):
                flag = True
        return nxt, flag


@dataclass(frozen=True, eq=False)
class Dfa:
    """Complete DFA over the alphabet of AP subsets encoded as bitsets.

    Bit ``i`` of a symbol is set iff ``ap[i]`` holds.  ``table[q, sym]`` is
    the successor state.
    """

    ap: Tuple[str, ...]
    table: np.ndarray
    initial: int
    accepting: FrozenSet[int]
    trap: FrozenSet[int]
    _rows: List[List[int]] = field(default=None, repr=False, compare=False)
    _acc: List[bool] = field(default=None, repr=False, compare=False)
    _trap: List[bool] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        self.table.setflags(write=False)
        object.__setattr__(self, "_rows", self.table.tolist())
        n = self.table.shape[0]
        object.__setattr__(self, "_acc", [q in self.accepting for q in range(n)])
        object.__setattr__(self, "_trap", [q in self.trap for q in range(n)])

    @property
    def n_states(self) -> int:
        return self.table.shape[0]

    @property
    def n_symbols(self) -> int:
        return self.table.shape[1]

    def step(self, q: int, symbol: int) -> int:
        return self._rows[q][symbol]

    def is_accepting(self, q: int) -> bool:
        return self._acc[q]

    def is_trap(self, q: int) -> bool:
        return self._trap[q]

    def symbol(self, props: Iterable[str]) -> int:
        """Encode a set of proposition names; names outside ``ap`` are ignored."""
        bits = 0
        for i, p in enumerate(self.ap):
            if p in props:
                bits |= 1 << i
        return bits

    def props(self, symbol: int) -> FrozenSet[str]:
        return frozenset(p for i, p in enumerate(self.ap) if symbol >> i & 1)

    def run(self, word: Sequence[Iterable[str]], q: Optional[int] = None) -> int:
        q = self.initial if q is None else q
        for letter in word:
            q = self.step(q, letter if isinstance(letter, int) else self.symbol(letter))
        return q

    def accepts(self, word: Sequence[Iterable[str]]) -> bool:
        return self.is_accepting(self.run(word))

    def accepts_batch(self, symbols: np.ndarray) -> np.ndarray:
        """Acceptance of many equal-length words given as a ``(words, length)`` symbol array."""
        symbols = np.asarray(symbols, dtype=np.int64)
        q = np.full(symbols.shape[0], self.initial, dtype=np.int64)
        for pos in range(symbols.shape[1]):
            q = self.table[q, symbols[:, pos]]
        acc = np.zeros(self.n_states, dtype=bool)
        acc[list(self.accepting)] = True
        return acc[q]

    def to_json(self) -> dict:
        return {
            "ap": list(self.ap),
            "states": list(range(self.n_states)),
            "initial": self.initial,
            "transitions": {
                str(q): {str(s): int(t) for s, t in enumerate(row)}
                for q, row in enumerate(self._rows)
            },
            "accepting": sorted(self.accepting),
            "trap": sorted(self.trap),
        }

    @classmethod
    def from_json(cls, data: dict) -> "Dfa":
        n = len(data["states"])
        k = 1 << len(data["ap"])
        table = np.zeros((n, k), dtype=np.int64)
        for q, row in data["transitions"].items():
            for s, t in row.items():
                table[int(q), int(s)] = t
        return cls(
            ap=tuple(data["ap"]),
            table=table,
            initial=int(data["initial"]),
            accepting=frozenset(data["accepting"]),
            trap=frozenset(data["trap"]),
        )

    def to_dot(self) -> str:
        lines = ["digraph dfa {", "  rankdir=LR;", '  init [shape=point];']
        for q in range(self.n_states):
            shape = "doublecircle" if q in self.accepting else "circle"
            style = ', style=dashed' if q in self.trap else ""
            lines.append(f'  {q} [shape={shape}{style}];')
        lines.append(f"  init -> {self.initial};")
        for q, row in enumerate(self._rows):
            grouped: Dict[int, List[str]] = {}
            for s, t in enumerate(row):
                grouped.setdefault(t, []).append(self._symbol_text(s))
            for t, syms in grouped.items():
                label = json.dumps(", ".join(syms))
                lines.append(f"  {q} -> {t} [label={label}];")
        lines.append("}")
        return "\n".join(lines)

    def _symbol_text(self, s: int) -> str:
        return "{" + ",".join(sorted(self.props(s))) + "}"


def _minimize(table: List[List[int]], accepting: List[bool]) -> Tuple[List[int], int]:
    """Moore partition refinement.  Returns (class of each state, n classes)."""
    n = len(table)
    cls = [1 if a else 0 for a in accepting]
    n_cls = len(set(cls))
    while True:
        sigs: Dict[tuple, int] = {}
        new = [0] * n
        for q in range(n):
            sig = (cls[q],) + tuple(cls[t] for t in table[q])
            new[q] = sigs.setdefault(sig, len(sigs))
        if len(sigs) == n_cls:
            return new, n_cls
        cls, n_cls = new, len(sigs)


def _reorder_bfs(table: List[List[int]], initial: int) -> List[int]:
    order = {initial: 0}
    queue = deque([initial])
    while queue:
        q = queue.popleft()
        for t in table[q]:
            if t not in order:
                order[t] = len(order)
                queue.append(t)
    return [order[q] for q in range(len(table))]


def trap_states(table: Sequence[Sequence[int]], accepting: Iterable[int]) -> FrozenSet[int]:
    """States from which no accepting state is reachable."""
    n = len(table)
    preds: List[List[int]] = [[] for _ in range(n)]
    for q, row in enumerate(table):
        for t in set(row):
            preds[t].append(q)
    alive = set(accepting)
    queue = deque(alive)
    while queue:
        q = queue.popleft()
        for p in preds[q]:
            if p not in alive:
                alive.add(p)
                queue.append(p)
    return frozenset(q for q in range(n) if q not in alive)


def compile_dfa(
    f: Formula,
    ap: Sequence[str],
    state_budget: int = DEFAULT_STATE_BUDGET,
) -> Dfa:
    """Translate ``f`` to a minimal complete DFA over ``2^ap``."""
    ap = tuple(ap)
    if len(ap) > MAX_AP:
        raise ValueError(f"at most {MAX_AP} propositions are supported, got {len(ap)}")
    missing = f.atoms() - set(ap)
    if missing:
        raise ValueError(f"formula uses undeclared atoms {sorted(missing)}")
    symbols = [frozenset(p for i, p in enumerate(ap) if s >> i & 1) for s in range(1 << len(ap))]
    prog = _Progressor()
    start = (_dnf(to_nnf(f)), False)
    index = {start: 0}
    states = [start]
    table: List[List[int]] = []
    i = 0
    while i < len(states):
        obligation, _ = states[i]
        row = []
        for sym in symbols:
            nxt = prog.step(obligation, sym)
            j = index.get(nxt)
            if j is None:
                if len(states) >= state_budget:
                    raise StateBudgetExceeded(
                        f"DFA construction exceeded {state_budget} states"
                    )
                j = index[nxt] = len(states)
                states.append(nxt)
            row.append(j)
        table.append(row)
        i += 1

    accepting = [flag for _, flag in states]
    cls, n_cls = _minimize(table, accepting)
    small = [[0] * len(symbols) for _ in range(n_cls)]
    small_acc = [False] * n_cls
    for q, row in enumerate(table):
        small[cls[q]] = [cls[t] for t in row]
        small_acc[cls[q]] = accepting[q]
    order = _reorder_bfs(small, cls[0])
    final = np.zeros((n_cls, len(symbols)), dtype=np.int64)
    acc = set()
    for q in range(n_cls):
        final[order[q]] = [order[t] for t in small[q]]
        if small_acc[q]:
            acc.add(order[q])
    trap = trap_states(final.tolist(), acc)
    return Dfa(ap=ap, table=final, initial=0, accepting=frozenset(acc), trap=trap)


def compile_text(text: str, ap: Sequence[str], state_budget: int = DEFAULT_STATE_BUDGET) -> Dfa:
    from .parser import parse_ltlf

    return compile_dfa(parse_ltlf(text, ap), ap, state_budget)
