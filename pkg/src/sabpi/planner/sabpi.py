"""The anytime policy-tree planner: bandit subtree selection plus k explores per round."""
from __future__ import annotations

import time
from typing import Callable, List, Optional, Tuple

from ..artifact import PolicyArtifact
from ..model.scenario import Scenario
from ..tree import PolicyTree
from .config import PlannerConfig, PlanReport
from .expansion import Expander, NodeSampler


class _Clock:
    """Wall clock plus the anytime curve, shared by all planners."""

    def __init__(self, cfg: PlannerConfig, tree: PolicyTree):
        self.cfg = cfg
        self.tree = tree
        self.start = time.perf_counter()
        self.curve: List[Tuple[float, int, int, float]] = [(0.0, 0, 0, tree.root.value)]

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def out_of_time(self) -> bool:
        return self.elapsed() >= self.cfg.time_limit

    def record(self, iteration: int, expansions: int, force: bool = False) -> None:
        v = self.tree.root.value
        if force or v > self.curve[-1][3]:
            self.curve.append((self.elapsed(), iteration, expansions, v))

    def goal_reached(self) -> Optional[str]:
        root = self.tree.root
        if root.solved:
            return "solved"
        if root.value >= self.cfg.success_threshold:
            return "threshold"
        if root.doomed:
            return "doomed"
        return None


def finish(
    scn: Scenario,
    cfg: PlannerConfig,
    ex: Expander,
    clock: _Clock,
    iterations: int,
    reason: str,
) -> Tuple[PolicyArtifact, PlanReport]:
    """Extract the greedy policy and assemble the report."""
    tree = ex.tree
    clock.record(iterations, ex.expansions, force=clock.curve[-1][1] != iterations)
    pi = tree.ucb_st(0.0)
    artifact = PolicyArtifact.from_tree(scn, tree, pi, cfg)
    report = PlanReport(
        algorithm=cfg.algorithm,
        seed=cfg.seed,
        value=tree.root.value,
        iterations=iterations,
        nodes=len(tree),
        expansions=ex.expansions,
        wall_time=clock.elapsed(),
        stop_reason=reason,
        curve=list(clock.curve),
    )
    return artifact, report


def sabpi_plan(
    scn: Scenario,
    cfg: Optional[PlannerConfig] = None,
    on_round: Optional[Callable[[PolicyTree, int], None]] = None,
) -> Tuple[PolicyArtifact, PlanReport, PolicyTree]:
    """Grow the tree until solved, the threshold is met, or the budget runs out.

    Each round selects a policy subtree with UCB (constant ``cfg.c``) and
    then performs ``cfg.k`` explore calls, each of which expands a node of
    the subtree or one of the nodes added earlier in the same round.  The
    returned artifact is the greedy (``c = 0``) policy of the final tree.
    ``on_round`` is called after every round with the tree and round count.
    """
    cfg = cfg or PlannerConfig()
    ex = Expander(scn, cfg)
    tree = ex.tree
    clock = _Clock(cfg, tree)
    iterations = 0
    reason = clock.goal_reached()
    while reason is None:
        if cfg.max_iterations is not None and iterations >= cfg.max_iterations:
            reason = "max_iterations"
            break
        if clock.out_of_time():
            reason = "time_limit"
            break
        pi = tree.ucb_st(cfg.c)
        sampler = NodeSampler(ex, cfg.selection)
        sampler.extend(pi.nodes)
        for _ in range(cfg.k):
            nid = sampler.pick()
            if nid is None:
                break
            sampler.extend(ex.expand(nid))
            clock.record(iterations, ex.expansions)
            reason = clock.goal_reached()
            if reason is not None:
                break
            if clock.out_of_time():
                reason = "time_limit"
                break
        iterations += 1
        if on_round is not None:
            on_round(tree, iterations)
        if reason is None and not tree.root.expandable:
            reason = clock.goal_reached() or "exhausted"
    artifact, report = finish(scn, cfg, ex, clock, iterations, reason)
    return artifact, report, tree
