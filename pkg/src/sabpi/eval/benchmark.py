"""Batch planner runs and aggregate anytime curves."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..model.scenario import Scenario
from ..planner import PlannerConfig, PlanReport, plan

Curve = List[Tuple[float, float]]


def value_at(curve: Sequence[Tuple[float, float]], t: float) -> float:
    """Root value of a step curve at time ``t`` (the last sample at or before it)."""
    v = curve[0][1]
    for ti, vi in curve:
        if ti > t:
            break
        v = vi
    return v


@dataclass
class ConvergenceReport:
    scenario: str
    time_grid: List[float]
    reports: Dict[str, List[PlanReport]] = field(default_factory=dict)

    def curves(self, algorithm: str) -> List[Curve]:
        return [[(t, v) for t, _, _, v in r.curve] for r in self.reports[algorithm]]

    def final_values(self, algorithm: str) -> List[float]:
        return [r.value for r in self.reports[algorithm]]

    def median_final(self, algorithm: str) -> float:
        return float(np.median(self.final_values(algorithm)))

    def table(self) -> List[dict]:
        """Median and quartiles of the root value over runs, per algorithm and time."""
        rows = []
        for algo in self.reports:
            curves = self.curves(algo)
            for t in self.time_grid:
                vals = np.array([value_at(c, t) for c in curves])
                q1, med, q3 = np.percentile(vals, [25, 50, 75])
                rows.append({
                    "scenario": self.scenario,
                    "algorithm": algo,
                    "time": t,
                    "median": float(med),
                    "q1": float(q1),
                    "q3": float(q3),
                    "runs": len(vals),
                })
        return rows

    def write_csv(self, path: Union[str, Path], append: bool = False) -> None:
        write_rows(path, self.table(), append)


def write_rows(path: Union[str, Path], rows: Iterable[dict], append: bool = False) -> None:
    rows = list(rows)
    if not rows:
        return
    path = Path(path)
    header = not (append and path.exists() and path.stat().st_size > 0)
    with open(path, "a" if append else "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
        if header:
            writer.writeheader()
        writer.writerows(rows)


def convergence_report(
    scn: Scenario,
    cfg: PlannerConfig,
    seeds: Sequence[int],
    algorithms: Sequence[str] = ("sabpi",),
    grid_points: int = 13,
    progress=None,
) -> ConvergenceReport:
    """Run every algorithm for every seed with ``cfg`` otherwise unchanged.

    Curves are sampled on ``grid_points`` evenly spaced times in
    ``[0, cfg.time_limit]``.  ``progress`` (if given) is called with
    ``(algorithm, seed, report)`` after each run.
    """
    limit = max(cfg.time_limit, 0.0)
    grid = [float(t) for t in np.linspace(0.0, limit, grid_points)] if limit > 0 else [0.0]
    out = ConvergenceReport(scn.name, grid)
    for algo in algorithms:
        runs = []
        for seed in seeds:
            _, report, _ = plan(scn, cfg.replace(algorithm=algo, seed=int(seed)))
            runs.append(report)
            if progress is not None:
                progress(algo, seed, report)
        out.reports[cfg.replace(algorithm=algo).algorithm] = runs
    return out
