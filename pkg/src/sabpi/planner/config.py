from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

ALGORITHMS = ("sabpi", "rrt", "mcts_pw")
SELECTIONS = ("uniform", "voronoi", "mixed")


@dataclass
class PlannerConfig:
    algorithm: str = "sabpi"
    k: int = 1000
    """Explore calls per selection round."""
    c: float = 0.05
    """UCB exploration constant for subtree selection."""
    time_limit: float = 60.0
    success_threshold: float = 1.0
    seed: int = 0
    max_iterations: Optional[int] = None
    """Round cap; with it set and a generous time limit, runs are reproducible."""
    selection: str = "voronoi"
    """How explore picks a node of the selected subtree: ``uniform``, ``voronoi`` or ``mixed``."""
    widening_k: float = 2.0
    widening_alpha: float = 0.5
    mcts_c: float = 1.0
    rollout_depth: int = 8
    t_prop_max: Optional[float] = None
    integration_step: Optional[float] = None
    event_tolerance: Optional[float] = None

    def __post_init__(self) -> None:
        self.algorithm = self.algorithm.replace("-", "_")
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.c < 0:
            raise ValueError("exploration constant must be non-negative")
        if not 0.0 <= self.success_threshold <= 1.0:
            raise ValueError("success threshold must lie in [0, 1]")
        if self.selection not in SELECTIONS:
            raise ValueError(f"unknown selection mode {self.selection!r}")

    def replace(self, **changes) -> "PlannerConfig":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class PlanReport:
    algorithm: str
    seed: int
    value: float
    iterations: int
    nodes: int
    expansions: int
    wall_time: float
    stop_reason: str
    curve: List[Tuple[float, int, int, float]] = field(default_factory=list)
    """(seconds, round, expansions, root value) after each round."""

    def to_json(self) -> dict:
        data = dataclasses.asdict(self)
        data["curve"] = [
            {"time": t, "iteration": i, "expansions": n, "value": v} for t, i, n, v in self.curve
        ]
        return data

    def deterministic_view(self) -> dict:
        """Everything except wall-clock measurements."""
        data = self.to_json()
        data.pop("wall_time")
        data["curve"] = [{k: v for k, v in p.items() if k != "time"} for p in data["curve"]]
        return data
