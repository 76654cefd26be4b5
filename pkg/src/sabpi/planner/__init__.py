"""Planners over the shared policy tree."""
from __future__ import annotations

from typing import Optional, Tuple

from ..artifact import PolicyArtifact
from ..model.scenario import Scenario
from ..tree import PolicyTree
from .baselines import mcts_pw_baseline, rrt_baseline, widening_limit
from .config import ALGORITHMS, PlannerConfig, PlanReport
from .expansion import Expander, NodeSampler, successors
from .sabpi import sabpi_plan

_DISPATCH = {"sabpi": sabpi_plan, "rrt": rrt_baseline, "mcts_pw": mcts_pw_baseline}


def plan(
    scn: Scenario, cfg: Optional[PlannerConfig] = None
) -> Tuple[PolicyArtifact, PlanReport, PolicyTree]:
    """Run the algorithm named in ``cfg`` (SaBPI by default)."""
    cfg = cfg or PlannerConfig()
    return _DISPATCH[cfg.algorithm](scn, cfg)


def config_for(scn: Scenario, **overrides) -> PlannerConfig:
    """Planner defaults, then the scenario's ``planner`` section, then ``overrides``."""
    fields = dict(scn.planner)
    fields.update({k: v for k, v in overrides.items() if v is not None})
    return PlannerConfig(**fields)


__all__ = [
    "ALGORITHMS",
    "Expander",
    "NodeSampler",
    "PlanReport",
    "PlannerConfig",
    "config_for",
    "mcts_pw_baseline",
    "plan",
    "rrt_baseline",
    "sabpi_plan",
    "successors",
    "widening_limit",
]
