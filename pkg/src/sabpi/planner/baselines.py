"""Comparison planners built on the same tree, belief and propagation code.

``rrt_baseline`` grows the tree by pure space filling: every iteration
samples a workspace point and extends the nearest expandable node.  All
observation outcomes are instantiated, so the tree still carries exact
values, but nothing steers growth toward promising policies.

``mcts_pw_baseline`` is Monte-Carlo tree search with progressive widening
over control arms: a node with visit count ``N`` may hold up to
``widening_k * N ** widening_alpha`` arms; descents sample one outcome per
arm, new leaves are scored by a bounded random rollout, and arm statistics
are running means of those returns.  The reported value is still the exact
backed-up success probability of the greedy policy in the tree.
"""
from __future__ import annotations

import math
from typing import List, Optional, Tuple

from ..artifact import PolicyArtifact
from ..belief import HybridBelief, acc_mass
from ..model.scenario import Scenario
from ..tree import Arm, Node, PolicyTree
from .config import PlannerConfig, PlanReport
from .expansion import Expander, NodeSampler, successors
from .sabpi import _Clock, finish


def rrt_baseline(
    scn: Scenario, cfg: Optional[PlannerConfig] = None
) -> Tuple[PolicyArtifact, PlanReport, PolicyTree]:
    cfg = (cfg or PlannerConfig()).replace(algorithm="rrt")
    ex = Expander(scn, cfg)
    clock = _Clock(cfg, ex.tree)
    sampler = NodeSampler(ex, "voronoi")
    sampler.add(0)
    iterations = 0
    reason = clock.goal_reached()
    while reason is None:
        if cfg.max_iterations is not None and iterations >= cfg.max_iterations:
            reason = "max_iterations"
            break
        if clock.out_of_time():
            reason = "time_limit"
            break
        nid = sampler.pick()
        if nid is None:
            reason = "exhausted"
            break
        sampler.extend(ex.expand(nid))
        iterations += 1
        clock.record(iterations, ex.expansions)
        reason = clock.goal_reached()
    artifact, report = finish(scn, cfg, ex, clock, iterations, reason)
    return artifact, report, ex.tree


def widening_limit(visits: int, k: float, alpha: float) -> float:
    """Maximum arm count admitted at a node visited ``visits`` times."""
    return k * visits ** alpha


class _Mcts:
    def __init__(self, scn: Scenario, cfg: PlannerConfig):
        self.scn = scn
        self.cfg = cfg
        self.ex = Expander(scn, cfg)
        self.tree = self.ex.tree
        self.rng = self.ex.rng

    def _sample_child(self, arm: Arm) -> int:
        r = self.rng.random()
        acc = 0.0
        for w, child, _ in arm.children:
            acc += w
            if r < acc:
                return child
        return arm.children[-1][1]

    def _select_arm(self, node: Node) -> int:
        best, best_score = 0, -math.inf
        log_n = math.log(node.visits)
        for i, arm in enumerate(node.arms):
            if arm.pulls == 0:
                return i
            s = arm.ret + self.cfg.mcts_c * math.sqrt(2.0 * log_n / arm.pulls)
            if s > best_score:
                best, best_score = i, s
        return best

    def rollout(self, b: HybridBelief) -> float:
        """Random controls for a bounded number of propagations; returns acc mass."""
        scn = self.scn
        for _ in range(self.cfg.rollout_depth):
            if acc_mass(scn, b) >= 1.0:
                break
            res = self.ex.propagate(b, self.ex.sample_control(), self.ex.sample_duration())
            succ = successors(scn, b, res)
            if not succ:
                continue
            r = self.rng.random()
            acc = 0.0
            chosen = succ[-1]
            for item in succ:
                acc += item[0]
                if r < acc:
                    chosen = item
                    break
            b = chosen[1]
            if chosen[3]:
                break
        return acc_mass(scn, b)

    def iterate(self) -> None:
        tree = self.tree
        path: List[Tuple[Node, int]] = []
        node = tree.root
        while True:
            node.visits += 1
            if not node.expandable:
                ret = node.value
                break
            if len(node.arms) < widening_limit(node.visits, self.cfg.widening_k, self.cfg.widening_alpha):
                new = self.ex.expand(node.id)
                if new:
                    a = len(node.arms) - 1
                    arm = node.arms[a]
                    child = tree[self._sample_child(arm)]
                    child.visits += 1
                    path.append((node, a))
                    ret = child.value if not child.expandable else self.rollout(child.belief)
                    break
                if not node.arms:
                    ret = node.acc
                    break
            a = self._select_arm(node)
            path.append((node, a))
            node = tree[self._sample_child(node.arms[a])]
        for parent, a in path:
            arm = parent.arms[a]
            arm.pulls += 1
            arm.ret += (ret - arm.ret) / arm.pulls


def mcts_pw_baseline(
    scn: Scenario, cfg: Optional[PlannerConfig] = None
) -> Tuple[PolicyArtifact, PlanReport, PolicyTree]:
    cfg = (cfg or PlannerConfig()).replace(algorithm="mcts_pw")
    search = _Mcts(scn, cfg)
    ex = search.ex
    clock = _Clock(cfg, ex.tree)
    iterations = 0
    reason = clock.goal_reached()
    while reason is None:
        if cfg.max_iterations is not None and iterations >= cfg.max_iterations:
            reason = "max_iterations"
            break
        if clock.out_of_time():
            reason = "time_limit"
            break
        search.iterate()
        iterations += 1
        clock.record(iterations, ex.expansions)
        reason = clock.goal_reached()
    artifact, report = finish(scn, cfg, ex, clock, iterations, reason)
    return artifact, report, ex.tree
