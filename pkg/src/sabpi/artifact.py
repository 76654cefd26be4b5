"""Serializable observation-feedback policies extracted from the tree."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Union

from .belief import HybridBelief

FORMAT_VERSION = 1


@dataclass
class PolicyStep:
    """The control held at a policy node until the next guard or timeout."""

    u: List[float]
    t_request: float
    t_actual: float
    outcome: str
    region: Optional[int]
    observation: Optional[int]
    q: float


@dataclass
class PolicyEdge:
    p: float
    node: int
    symbol: Optional[int] = None
    """Observation symbol selecting this child (None for deterministic outcomes)."""


@dataclass
class PolicyNode:
    id: int
    belief: HybridBelief
    acc: float
    trap: float
    value: float
    terminal: bool = False
    step: Optional[PolicyStep] = None
    children: List[PolicyEdge] = field(default_factory=list)


@dataclass
class PolicyArtifact:
    scenario: str
    algorithm: str
    seed: int
    value: float
    root: int
    nodes: Dict[int, PolicyNode]
    n_memory: int = 0
    integration_step: Optional[float] = None
    event_tolerance: Optional[float] = None
    """Propagation overrides used while planning (None: scenario default)."""

    @classmethod
    def from_tree(cls, scn, tree, pi, cfg) -> "PolicyArtifact":
        nodes: Dict[int, PolicyNode] = {}
        for nid in pi.nodes:
            n = tree[nid]
            pn = PolicyNode(nid, n.belief, n.acc, n.trap, n.value, n.terminal)
            a = pi.choice.get(nid)
            if a is not None:
                arm = n.arms[a]
                pn.step = PolicyStep(
                    list(arm.u), arm.t_request, arm.t_actual, arm.outcome,
                    arm.region, arm.observation, arm.q,
                )
                pn.children = [PolicyEdge(w, child, o) for w, child, o in arm.children]
            nodes[nid] = pn
        return cls(
            scenario=scn.name,
            algorithm=cfg.algorithm,
            seed=cfg.seed,
            value=tree.root.value,
            root=pi.root,
            nodes=nodes,
            n_memory=scn.n_obs_regions,
            integration_step=cfg.integration_step,
            event_tolerance=cfg.event_tolerance,
        )

    # ------------------------------------------------------------- values
    def analytic_value(self) -> float:
        """Success probability of following this policy, summed exactly.

        Accepting mass is absorbing, so a node is worth the larger of its
        accepting mass and the expectation over its chosen arm's children.
        """
        memo: Dict[int, float] = {}
        for nid in sorted(self.nodes, reverse=True):  # children have larger ids
            n = self.nodes[nid]
            v = n.acc
            if n.step is not None:
                q = 0.0
                for e in n.children:
                    q += e.p * memo[e.node]
                v = max(v, q)
            memo[nid] = v
        return memo[self.root]

    def depth(self) -> int:
        best = 0
        stack = [(self.root, 0)]
        while stack:
            nid, d = stack.pop()
            best = max(best, d)
            stack.extend((e.node, d + 1) for e in self.nodes[nid].children)
        return best

    def observation_regions_used(self) -> List[int]:
        """Observation regions at which the policy branches, in visiting order (BFS)."""
        seen: List[int] = []
        queue = [self.root]
        while queue:
            nid = queue.pop(0)
            n = self.nodes[nid]
            if n.step is not None and n.step.outcome == "hit_observation":
                if n.step.observation not in seen:
                    seen.append(n.step.observation)
            queue.extend(e.node for e in n.children)
        return seen

    def first_region(self) -> Optional[int]:
        """First labeled region entered along the most likely branch.

        Observation branches are followed by their largest weight (ties to
        the earlier edge); None when that branch never enters a region.
        """
        nid = self.root
        while True:
            n = self.nodes[nid]
            if n.step is None or not n.children:
                return None
            if n.step.outcome == "hit_region":
                return n.step.region
            nid = max(n.children, key=lambda e: e.p).node

    # ------------------------------------------------------- serialization
    def to_json(self) -> dict:
        out = []
        for nid in sorted(self.nodes):
            n = self.nodes[nid]
            entry = {
                "id": n.id,
                "belief": n.belief.to_json(self.n_memory),
                "acc": n.acc,
                "trap": n.trap,
                "value": n.value,
                "terminal": n.terminal,
                "arm": None,
                "children": [],
            }
            if n.step is not None:
                s = n.step
                entry["arm"] = {
                    "u": s.u,
                    "duration": s.t_request,
                    "t_actual": s.t_actual,
                    "outcome": s.outcome,
                    "region": s.region,
                    "observation_region": s.observation,
                    "q": s.q,
                }
                entry["children"] = [
                    {"p": e.p, "node": e.node, "observation": e.symbol} for e in n.children
                ]
            out.append(entry)
        return {
            "format": FORMAT_VERSION,
            "scenario": self.scenario,
            "algorithm": self.algorithm,
            "seed": self.seed,
            "value": self.value,
            "root": self.root,
            "n_memory": self.n_memory,
            "integration_step": self.integration_step,
            "event_tolerance": self.event_tolerance,
            "nodes": out,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PolicyArtifact":
        if data.get("format") != FORMAT_VERSION:
            raise ValueError(f"unsupported policy format {data.get('format')!r}")
        nodes: Dict[int, PolicyNode] = {}
        for entry in data["nodes"]:
            n = PolicyNode(
                int(entry["id"]),
                HybridBelief.from_json(entry["belief"]),
                float(entry["acc"]),
                float(entry["trap"]),
                float(entry["value"]),
                bool(entry.get("terminal", False)),
            )
            arm = entry.get("arm")
            if arm is not None:
                n.step = PolicyStep(
                    [float(v) for v in arm["u"]],
                    float(arm["duration"]),
                    float(arm["t_actual"]),
                    arm["outcome"],
                    arm["region"],
                    arm["observation_region"],
                    float(arm["q"]),
                )
                n.children = [
                    PolicyEdge(float(c["p"]), int(c["node"]), c["observation"])
                    for c in entry["children"]
                ]
            nodes[n.id] = n
        return cls(
            scenario=data["scenario"],
            algorithm=data["algorithm"],
            seed=int(data["seed"]),
            value=float(data["value"]),
            root=int(data["root"]),
            nodes=nodes,
            n_memory=int(data.get("n_memory", 0)),
            integration_step=data.get("integration_step"),
            event_tolerance=data.get("event_tolerance"),
        )

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1))

    @classmethod
    def load(cls, path: Union[str, Path]) -> "PolicyArtifact":
        return cls.from_json(json.loads(Path(path).read_text()))
