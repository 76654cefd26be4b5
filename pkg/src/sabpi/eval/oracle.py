"""Exact optimal values of small grid-aligned instances by exhaustive search.

An :class:`OracleInstance` is a planar single-integrator problem whose
obstacles, regions and sensing areas are unions of unit grid cells.  Its
continuous twin (:meth:`OracleInstance.to_scenario`) is what the planners
solve; the oracle solves the discrete twin, where the robot moves between
8-connected free cells.  What matters for the task is only the sequence of
guard events (region entries and first visits to sensing areas), so the
discrete twin reaches every event sequence the continuous robot can, and
its optimal value bounds the continuous one from above.

The search is backward induction over the finite belief tree: at each
decision point the robot either stops or travels, without triggering any
other guard, to a cell where one fires; the jump (DFA step and/or Bayes
update) then happens exactly as in the continuous model.  The belief
update here is written out independently of :mod:`sabpi.belief`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..model.scenario import Scenario, scenario_from_json

Cell = Tuple[int, int]
Rect = Tuple[int, int, int, int]
"""Inclusive cell rectangle ``(x0, y0, x1, y1)``."""

MAX_CELLS = 50
MAX_VARIABLES = 2
MAX_HORIZON = 12


class OracleBudgetError(ValueError):
    pass


def _cells(rect: Rect) -> List[Cell]:
    x0, y0, x1, y1 = rect
    return [(i, j) for i in range(x0, x1 + 1) for j in range(y0, y1 + 1)]


def _box(rect: Rect) -> dict:
    x0, y0, x1, y1 = rect
    return {"type": "box", "lower": [float(x0), float(y0)], "upper": [float(x1 + 1), float(y1 + 1)]}


@dataclass
class OracleInstance:
    name: str
    width: int
    height: int
    ap: Sequence[str]
    formula: str
    start: Cell
    regions: List[dict]
    """``{"id", "rect", "labels", "uncertain"}`` with ``uncertain`` as in scenario files."""
    observation_regions: List[dict] = field(default_factory=list)
    """``{"id", "rect", "target", "accuracy"}``."""
    obstacles: List[Rect] = field(default_factory=list)
    prior: dict = field(default_factory=dict)
    horizon: int = MAX_HORIZON
    expected: Optional[float] = None
    """Hand-derived optimal value, when one is known."""
    t_prop_max: float = 4.0
    planner: dict = field(default_factory=lambda: {"c": 0.3})
    """Planner settings written into the twin scenario's ``planner`` section."""

    def __post_init__(self) -> None:
        if self.width * self.height > MAX_CELLS:
            raise OracleBudgetError(f"{self.name}: more than {MAX_CELLS} cells")
        if self.horizon > MAX_HORIZON:
            raise OracleBudgetError(f"{self.name}: horizon above {MAX_HORIZON}")

    # --------------------------------------------------------------- twin
    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ap": list(self.ap),
            "task": {"formula": self.formula},
            "workspace": {
                "state_space": {"lower": [0.0, 0.0], "upper": [float(self.width), float(self.height)]},
                "control_space": {"lower": [-1.0, -1.0], "upper": [1.0, 1.0]},
                "obstacles": [_box(r) for r in self.obstacles],
            },
            "dynamics": {"kind": "single_integrator", "dim": 2},
            "regions": [
                {"id": r["id"], "shape": _box(r["rect"]), "labels": list(r.get("labels", [])),
                 "uncertain": r.get("uncertain", [])}
                for r in self.regions
            ],
            "observation_regions": [
                {"id": o["id"], "shape": _box(o["rect"]), "target": o["target"],
                 "accuracy": o.get("accuracy", 1.0)}
                for o in self.observation_regions
            ],
            "prior": self.prior,
            "initial": {"x": [self.start[0] + 0.5, self.start[1] + 0.5]},
            "propagation": {"t_prop_max": self.t_prop_max},
            "planner": dict(self.planner),
        }

    def to_scenario(self) -> Scenario:
        scn = scenario_from_json(self.to_json())
        if len(scn.variables) > MAX_VARIABLES:
            raise OracleBudgetError(f"{self.name}: more than {MAX_VARIABLES} hidden variables")
        return scn


class _Grid:
    """Per-cell guard membership of an instance, derived from its twin scenario."""

    def __init__(self, inst: OracleInstance, scn: Scenario):
        self.scn = scn
        blocked = set()
        for rect in inst.obstacles:
            blocked.update(_cells(rect))
        self.free = [
            (i, j) for i in range(inst.width) for j in range(inst.height) if (i, j) not in blocked
        ]
        free = set(self.free)
        self.neighbors: Dict[Cell, List[Cell]] = {}
        for i, j in self.free:
            self.neighbors[(i, j)] = [
                (i + di, j + dj)
                for di in (-1, 0, 1)
                for dj in (-1, 0, 1)
                if (di or dj) and (i + di, j + dj) in free
            ]
        self.regions: Dict[Cell, FrozenSet[int]] = {c: frozenset() for c in self.free}
        for k, r in enumerate(inst.regions):
            for c in _cells(r["rect"]):
                if c in free:
                    self.regions[c] = self.regions[c] | {k}
        self.sensing: Dict[Cell, Tuple[int, ...]] = {c: () for c in self.free}
        for k, o in enumerate(inst.observation_regions):
            for c in _cells(o["rect"]):
                if c in free:
                    self.sensing[c] = self.sensing[c] + (k,)

    def center(self, c: Cell) -> Tuple[float, float]:
        return (c[0] + 0.5, c[1] + 0.5)

    def fresh(self, c: Cell, m: int) -> Optional[int]:
        for k in self.sensing[c]:
            if not m >> k & 1:
                return k
        return None

    def events(self, start: Cell, inside: FrozenSet[int], m: int):
        """Guard-firing cells reachable from ``start`` without an earlier guard.

        Returns ``(cell, entered regions)`` pairs; ``entered`` may be empty
        when only a sensing area fires.
        """
        seen = {(start, inside)}
        queue = deque([(start, inside)])
        out = set()
        while queue:
            c, ins = queue.popleft()
            for d in self.neighbors[c]:
                regs = self.regions[d]
                entered = regs - ins
                if entered or self.fresh(d, m) is not None:
                    out.add((d, frozenset(entered)))
                    continue
                nxt = (d, ins & regs)
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        return sorted(out, key=lambda t: (t[0], sorted(t[1])))


def oracle_optimal_value(inst: OracleInstance, horizon: Optional[int] = None) -> float:
    """Optimal probability of satisfying the task within ``horizon`` guard events."""
    horizon = inst.horizon if horizon is None else horizon
    if horizon > MAX_HORIZON:
        raise OracleBudgetError(f"horizon above {MAX_HORIZON}")
    scn = inst.to_scenario()
    grid = _Grid(inst, scn)
    dfa = scn.dfa
    start = (int(inst.start[0]), int(inst.start[1]))

    def label(c: Cell, e: int) -> int:
        return scn.label_bits(grid.center(c), e)

    def jump(dist: Tuple[Tuple[int, int, float], ...], c: Cell):
        out: Dict[Tuple[int, int], float] = {}
        for q, e, w in dist:
            if not dfa.is_accepting(q):
                q = dfa.step(q, label(c, e))
            out[(q, e)] = out.get((q, e), 0.0) + w
        return tuple(sorted((q, e, w) for (q, e), w in out.items()))

    def observe(dist, k: int):
        """Yield ``(P(o), posterior)`` for each symbol of sensing area ``k``."""
        reg = scn.observation_regions[k]
        for o in range(reg.n_symbols):
            joint = [(q, e, w * reg.table[scn.target_assignment(k, e)][o]) for q, e, w in dist]
            p = sum(w for _, _, w in joint)
            if p <= 1e-12:
                continue
            yield p, tuple((q, e, w / p) for q, e, w in joint if w / p > 1e-12)

    def acc(dist) -> float:
        return sum(w for q, _, w in dist if dfa.is_accepting(q))

    def trap(dist) -> float:
        return sum(w for q, _, w in dist if dfa.is_trap(q))

    @lru_cache(maxsize=None)
    def value(c: Cell, inside: FrozenSet[int], m: int, dist, left: int) -> float:
        best = acc(dist)
        if left == 0 or best >= 1.0 - 1e-12 or trap(dist) >= 1.0 - 1e-12:
            return best
        k = grid.fresh(c, m)
        if k is not None:
            # standing in an unvisited sensing area: it fires immediately
            return max(best, sense(c, inside, m, dist, k, left))
        for d, entered in grid.events(c, inside, m):
            nd = jump(dist, d) if entered else dist
            k = grid.fresh(d, m)
            if k is not None:
                v = sense(d, grid.regions[d], m, nd, k, left)
            else:
                v = value(d, grid.regions[d], m, nd, left - 1)
            if v > best:
                best = v
        return best

    def sense(c, inside, m, dist, k, left) -> float:
        m2 = m | (1 << k)
        return sum(p * value(c, inside, m2, post, left - 1) for p, post in observe(dist, k))

    # initial belief: prior at the DFA start, jumped if the start cell is labeled
    dist = tuple(sorted((dfa.initial, e, p) for e, p in scn.prior.items()))
    inside = grid.regions[start]
    if inside:
        dist = jump(dist, start)
    return value(start, inside, scn.m0, dist, horizon)
