"""Small hand-built scenarios shared by several test modules."""
from sabpi.model.scenario import scenario_from_json


def box(lower, upper):
    return {"type": "box", "lower": list(lower), "upper": list(upper)}


def plane(**overrides):
    """Planar single integrator on [-1, 3] x [-1, 1] with no regions."""
    data = {
        "name": "plane",
        "ap": ["goal", "obs"],
        "task": {"formula": "F(goal) & G(!obs)"},
        "workspace": {
            "state_space": box([-1, -1], [3, 1]),
            "control_space": box([-1, -1], [1, 1]),
            "obstacles": [],
        },
        "dynamics": {"kind": "single_integrator", "dim": 2},
        "regions": [],
        "observation_regions": [],
        "prior": {},
        "initial": {"x": [0.0, 0.0]},
        "propagation": {"t_prop_max": 1.0, "integration_step": 0.01},
    }
    for key, value in overrides.items():
        if key in data["workspace"]:
            data["workspace"][key] = value
        else:
            data[key] = value
    return scenario_from_json(data)


def fire_site(prior_fire=0.5, accuracy=0.8, formula="F(fire)"):
    """One site region with an uncertain ``fire`` label and a sensor in front of it.

    The robot starts at the origin; the sensor covers x in [1, 1.5] and the
    site x in [2, 2.5], both across the whole corridor.
    """
    return scenario_from_json({
        "name": "fire_site",
        "ap": ["fire", "site", "obs"],
        "task": {"formula": formula},
        "workspace": {
            "state_space": box([-1, -1], [3, 1]),
            "control_space": box([-1, -1], [1, 1]),
            "obstacles": [box([0, 0.6], [0.4, 1])],
        },
        "dynamics": {"kind": "single_integrator", "dim": 2},
        "regions": [{
            "id": "site",
            "shape": box([2, -1], [2.5, 1]),
            "labels": ["site"],
            "uncertain": {"fire": "fire"},
        }],
        "observation_regions": [
            {"id": "smoke", "shape": box([1, -1], [1.5, 1]), "target": "site", "accuracy": accuracy},
        ],
        "prior": {"independent": {"fire": prior_fire}},
        "initial": {"x": [0.0, 0.0]},
        "propagation": {"t_prop_max": 1.0, "integration_step": 0.01},
    })
