"""The micro-instance suite used for soundness and convergence checks."""
from __future__ import annotations

from typing import List

from .oracle import OracleInstance


def _exactly_one(a: str, b: str, pa: float = 0.5) -> dict:
    return {"joint": [{"true": [a], "p": pa}, {"true": [b], "p": 1.0 - pa}]}


def oracle_suite() -> List[OracleInstance]:
    """Ten small instances; ``expected`` is set where a hand derivation exists."""
    return [
        OracleInstance(
            name="reach",
            width=5, height=4, start=(0, 0),
            ap=["goal"], formula="F(goal)",
            regions=[{"id": "goal", "rect": (4, 3, 4, 3), "labels": ["goal"]}],
            expected=1.0,
        ),
        OracleInstance(
            name="avoid_wall",
            width=5, height=5, start=(0, 0),
            ap=["goal", "haz"], formula="F(goal) & G(!haz)",
            regions=[
                {"id": "wall", "rect": (2, 0, 2, 3), "labels": ["haz"]},
                {"id": "goal", "rect": (4, 0, 4, 0), "labels": ["goal"]},
            ],
            expected=1.0,
        ),
        OracleInstance(
            name="sense_commit",
            width=5, height=4, start=(2, 0),
            ap=["exit", "ok"], formula="!exit U (exit & ok)",
            regions=[
                {"id": "L", "rect": (0, 3, 0, 3), "labels": ["exit"], "uncertain": {"ok": "L_ok"}},
                {"id": "R", "rect": (4, 3, 4, 3), "labels": ["exit"], "uncertain": {"ok": "R_ok"}},
            ],
            observation_regions=[{"id": "look", "rect": (2, 2, 2, 2), "target": "L", "accuracy": 0.8}],
            prior=_exactly_one("L_ok", "R_ok"),
            expected=0.8,
        ),
        OracleInstance(
            name="blind_commit",
            width=5, height=4, start=(2, 0),
            ap=["exit", "ok"], formula="!exit U (exit & ok)",
            regions=[
                {"id": "L", "rect": (0, 3, 0, 3), "labels": ["exit"], "uncertain": {"ok": "L_ok"}},
                {"id": "R", "rect": (4, 3, 4, 3), "labels": ["exit"], "uncertain": {"ok": "R_ok"}},
            ],
            prior=_exactly_one("L_ok", "R_ok", 0.7),
            expected=0.7,
        ),
        OracleInstance(
            name="two_keys",
            width=5, height=4, start=(2, 0),
            ap=["key", "door"], formula="F(door) & (!door U key)",
            regions=[
                {"id": "key1", "rect": (0, 3, 0, 3), "uncertain": {"key": "k1"}},
                {"id": "key2", "rect": (4, 3, 4, 3), "uncertain": {"key": "k2"}},
                {"id": "door", "rect": (2, 3, 2, 3), "labels": ["door"]},
            ],
            observation_regions=[
                {"id": "see1", "rect": (0, 3, 0, 3), "target": "key1", "accuracy": 1.0},
                {"id": "see2", "rect": (4, 3, 4, 3), "target": "key2", "accuracy": 1.0},
            ],
            prior=_exactly_one("k1", "k2"),
            expected=1.0,
        ),
        OracleInstance(
            name="two_sensors",
            width=7, height=4, start=(3, 0),
            ap=["exit", "ok"], formula="!exit U (exit & ok)",
            regions=[
                {"id": "L", "rect": (0, 3, 0, 3), "labels": ["exit"], "uncertain": {"ok": "L_ok"}},
                {"id": "R", "rect": (6, 3, 6, 3), "labels": ["exit"], "uncertain": {"ok": "R_ok"}},
            ],
            observation_regions=[
                {"id": "near", "rect": (3, 1, 3, 1), "target": "L", "accuracy": 0.7},
                {"id": "far", "rect": (3, 3, 3, 3), "target": "L", "accuracy": 0.9},
            ],
            prior=_exactly_one("L_ok", "R_ok", 0.6),
        ),
        OracleInstance(
            name="visit_both",
            width=5, height=3, start=(2, 0),
            ap=["b"], formula="F(b)",
            regions=[
                {"id": "b1", "rect": (0, 2, 0, 2), "uncertain": {"b": "b1"}},
                {"id": "b2", "rect": (4, 2, 4, 2), "uncertain": {"b": "b2"}},
            ],
            prior=_exactly_one("b1", "b2"),
            expected=1.0,
        ),
        OracleInstance(
            name="risky_corridor",
            width=5, height=1, start=(0, 0),
            ap=["goal", "haz"], formula="F(goal) & G(!haz)",
            regions=[
                {"id": "gate", "rect": (2, 0, 2, 0), "uncertain": {"haz": "gate_haz"}},
                {"id": "goal", "rect": (4, 0, 4, 0), "labels": ["goal"]},
            ],
            prior={"independent": {"gate_haz": 0.3}},
            expected=0.7,
        ),
        OracleInstance(
            name="fork",
            width=5, height=5, start=(2, 0),
            ap=["goal", "haz"], formula="F(goal) & G(!haz)",
            obstacles=[(1, 2, 3, 2)],
            regions=[
                {"id": "west", "rect": (0, 2, 0, 2), "uncertain": {"haz": "west_blocked"}},
                {"id": "east", "rect": (4, 2, 4, 2), "uncertain": {"haz": "east_blocked"}},
                {"id": "goal", "rect": (2, 4, 2, 4), "labels": ["goal"]},
            ],
            observation_regions=[
                {"id": "peek_west", "rect": (0, 1, 0, 1), "target": "west", "accuracy": 0.9},
                {"id": "peek_east", "rect": (4, 1, 4, 1), "target": "east", "accuracy": 0.9},
            ],
            prior={"independent": {"west_blocked": 0.5, "east_blocked": 0.4}},
        ),
        OracleInstance(
            name="two_rocks",
            width=6, height=4, start=(0, 0),
            ap=["sample", "good"], formula="!sample U (sample & good)",
            regions=[
                {"id": "rockA", "rect": (1, 3, 1, 3), "labels": ["sample"], "uncertain": {"good": "A_good"}},
                {"id": "rockB", "rect": (4, 3, 4, 3), "labels": ["sample"], "uncertain": {"good": "B_good"}},
            ],
            observation_regions=[
                {"id": "senseA", "rect": (0, 2, 2, 3), "target": "rockA", "accuracy": 0.8},
                {"id": "senseB", "rect": (3, 2, 5, 3), "target": "rockB", "accuracy": 0.8},
            ],
            prior={"independent": {"A_good": 0.6, "B_good": 0.5}},
        ),
    ]
