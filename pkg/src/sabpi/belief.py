"""Hybrid beliefs and their discrete jumps.

A belief pairs the deterministic part of the hybrid state (continuous
state ``x`` and memory bitset ``m``) with a finite distribution over
(DFA state, environment hypothesis) pairs.  Accepting DFA states are
treated as sinks: once a pair has reached acceptance the task is done for
that pair and later letters no longer move it.
"""
from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Tuple

from .model.scenario import Scenario, memory_str, memory_update

PRUNE = 1e-12

Dist = Dict[Tuple[int, int], float]


class ObservationContractError(RuntimeError):
    """Observation requested at a region that was already visited."""


class HybridBelief:
    """Immutable belief value.  Do not mutate ``dist`` after construction."""

    __slots__ = ("x", "m", "dist")

    def __init__(self, x: Iterable[float], m: int, dist: Dist):
        self.x = tuple(x)
        self.m = m
        self.dist = dist

    def __repr__(self) -> str:
        items = ", ".join(f"({q},{e}):{w:.4g}" for (q, e), w in sorted(self.dist.items()))
        return f"HybridBelief(x={self.x}, m={self.m:b}, {{{items}}})"

    def e_marginal(self) -> Dict[int, float]:
        out: Dict[int, float] = {}
        for (_, e), w in self.dist.items():
            out[e] = out.get(e, 0.0) + w
        return out

    def q_marginal(self) -> Dict[int, float]:
        out: Dict[int, float] = {}
        for (q, _), w in self.dist.items():
            out[q] = out.get(q, 0.0) + w
        return out

    def total(self) -> float:
        return sum(self.dist.values())

    def to_json(self, n_memory: int) -> dict:
        return {
            "x": list(self.x),
            "m": memory_str(self.m, n_memory),
            "dist": [[q, e, w] for (q, e), w in sorted(self.dist.items())],
        }

    @classmethod
    def from_json(cls, data: dict) -> "HybridBelief":
        m = sum(1 << k for k, ch in enumerate(data["m"]) if ch == "1")
        return cls(data["x"], m, {(int(q), int(e)): float(w) for q, e, w in data["dist"]})


def _normalized(dist: Dist) -> Dist:
    kept = {k: w for k, w in dist.items() if w > PRUNE}
    total = sum(kept.values())
    return {k: w / total for k, w in kept.items()}


def initial_belief(scn: Scenario) -> HybridBelief:
    """Prior over hypotheses at the DFA initial state, jumped if x0 is labeled."""
    dfa = scn.dfa
    b = HybridBelief(scn.x0, scn.m0, {(dfa.initial, e): p for e, p in scn.prior.items()})
    if scn.guard_R(scn.x0):
        b = region_jump(scn, b)
    return b


def jump_dist(scn: Scenario, x, dist: Dist) -> Dist:
    dfa = scn.dfa
    out: Dist = {}
    for (q, e), w in dist.items():
        if not dfa.is_accepting(q):
            q = dfa.step(q, scn.label_bits(x, e))
        key = (q, e)
        out[key] = out.get(key, 0.0) + w
    return out


def region_jump(scn: Scenario, b: HybridBelief, x: Optional[Iterable[float]] = None) -> HybridBelief:
    """DFA jump with the label at ``b.x`` (or ``x``, which then replaces it)."""
    x = b.x if x is None else tuple(x)
    return HybridBelief(x, b.m, jump_dist(scn, x, b.dist))


def observation_outcomes(
    scn: Scenario,
    b: HybridBelief,
    region: int,
    dfa_jump: bool = False,
) -> List[Tuple[int, float, HybridBelief]]:
    """Branch on the observation symbols of a first visit to ``region``.

    With ``dfa_jump`` the DFA jump for the label at ``b.x`` is applied
    before the Bayes update (the robot entered a labeled region at the same
    instant).  Returns ``(symbol, probability, posterior)`` triples for the
    symbols with probability above the pruning threshold.
    """
    if b.m >> region & 1:
        raise ObservationContractError(
            f"observation region {region} already visited; revisits carry no information"
        )
    prior = jump_dist(scn, b.x, b.dist) if dfa_jump else b.dist
    reg = scn.observation_regions[region]
    m_next = memory_update(b.m, region)
    rows = [
        (key, w, reg.table[scn.target_assignment(region, key[1])])
        for key, w in prior.items()
    ]
    out = []
    for o in range(reg.n_symbols):
        joint = {key: w * row[o] for key, w, row in rows}
        p_o = sum(joint.values())
        if p_o <= PRUNE:
            continue
        out.append((o, p_o, HybridBelief(b.x, m_next, _normalized(joint))))
    total = sum(p for _, p, _ in out)
    return [(o, p / total, post) for o, p, post in out]


def acc_mass(scn: Scenario, b: HybridBelief) -> float:
    dfa = scn.dfa
    return sum(w for (q, _), w in b.dist.items() if dfa.is_accepting(q))


def trap_mass(scn: Scenario, b: HybridBelief) -> float:
    dfa = scn.dfa
    return sum(w for (q, _), w in b.dist.items() if dfa.is_trap(q))
