"""Scenario description: geometry, dynamics, labels and the sensing model."""
from .dynamics import DynamicsModel, integrate, rk4_step
from .geometry import Ball, Box, Shape
from .scenario import (
    ObservationRegion,
    Scenario,
    ScenarioError,
    SemanticRegion,
    bundled_scenarios,
    load_scenario,
    memory_str,
    memory_update,
    parse_memory,
    scenario_from_json,
)

__all__ = [
    "Ball",
    "Box",
    "DynamicsModel",
    "ObservationRegion",
    "Scenario",
    "ScenarioError",
    "SemanticRegion",
    "Shape",
    "bundled_scenarios",
    "integrate",
    "load_scenario",
    "memory_str",
    "memory_update",
    "parse_memory",
    "rk4_step",
    "scenario_from_json",
]
