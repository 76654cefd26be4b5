"""Built-in vector fields ``xdot = f(x, u)`` and a fixed-step RK4 integrator.

All models work on plain Python sequences of floats; the state vectors are
short and per-call numpy overhead would dominate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

Vector = Sequence[float]


@dataclass(frozen=True)
class DynamicsModel:
    """Tagged vector field.

    ``kind`` is one of ``single_integrator``, ``second_order_car``,
    ``quadcopter_3d`` or ``linear``.  With ``fuel_rate`` or ``fuel_idle``
    set, an extra last state dimension holds the remaining fuel and drains
    at ``fuel_idle + fuel_rate * |u|^2``.

    Lipschitz constants on the configured boxes:

    * single_integrator: L_x = 0, L_u = 1.
    * second_order_car: L_x <= 1 + v_max / wheelbase * (1 + tan(steer_max)),
      L_u <= 1 + v_max / (wheelbase * cos(steer_max)^2).
    * quadcopter_3d (damped double integrator): L_x = max(1, drag), L_u = 1.
    * linear: L_x = ||A||, L_u = ||B||.

    The car clamps acceleration to zero at its speed limits, which keeps the
    speed inside ``[v_min, v_max]`` without turning speed limits into
    obstacles.
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        builders = {
            "single_integrator": self._single_integrator,
            "second_order_car": self._car,
            "quadcopter_3d": self._quadcopter,
            "linear": self._linear,
        }
        if self.kind not in builders:
            raise ValueError(f"unknown dynamics kind {self.kind!r}")
        base, n, m, pos = builders[self.kind]()
        rate = float(self.params.get("fuel_rate", 0.0))
        idle = float(self.params.get("fuel_idle", 0.0))
        has_fuel = rate > 0 or idle > 0
        if has_fuel:
            inner = base

            def base(x: Vector, u: Vector, inner=inner) -> List[float]:
                dx = inner(x, u)
                dx.append(-(idle + rate * sum(v * v for v in u)))
                return dx

            n += 1
        object.__setattr__(self, "_f", base)
        object.__setattr__(self, "state_dim", n)
        object.__setattr__(self, "control_dim", m)
        object.__setattr__(self, "position_dims", pos)
        object.__setattr__(self, "fuel_dim", n - 1 if has_fuel else None)

    # each builder returns (f, state_dim, control_dim, position_dims)
    def _single_integrator(self):
        n = int(self.params.get("dim", 2))

        def f(x: Vector, u: Vector) -> List[float]:
            return [float(v) for v in u[:n]]

        return f, n, n, tuple(range(n))

    def _car(self):
        wheelbase = float(self.params.get("wheelbase", 1.0))
        v_min = float(self.params.get("v_min", 0.0))
        v_max = float(self.params.get("v_max", 1.0))
        cos, sin, tan = math.cos, math.sin, math.tan

        def f(x: Vector, u: Vector) -> List[float]:
            theta, v = x[2], x[3]
            a = u[0]
            if (v >= v_max and a > 0) or (v <= v_min and a < 0):
                a = 0.0
            return [v * cos(theta), v * sin(theta), v * tan(u[1]) / wheelbase, a]

        return f, 4, 2, (0, 1)

    def _quadcopter(self):
        drag = float(self.params.get("drag", 1.0))

        def f(x: Vector, u: Vector) -> List[float]:
            return [x[3], x[4], x[5], u[0] - drag * x[3], u[1] - drag * x[4], u[2] - drag * x[5]]

        return f, 6, 3, (0, 1, 2)

    def _linear(self):
        a = [list(map(float, row)) for row in self.params["A"]]
        b = [list(map(float, row)) for row in self.params["B"]]
        n, m = len(a), len(b[0])

        def f(x: Vector, u: Vector) -> List[float]:
            return [
                sum(a[i][j] * x[j] for j in range(n)) + sum(b[i][j] * u[j] for j in range(m))
                for i in range(n)
            ]

        return f, n, m, tuple(range(min(n, 3)))

    def __call__(self, x: Vector, u: Vector) -> List[float]:
        return self._f(x, u)

    @property
    def field(self) -> Callable[[Vector, Vector], List[float]]:
        """The bare vector field function (skips the method-call indirection)."""
        return self._f

    def to_json(self) -> dict:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_json(cls, data: dict) -> "DynamicsModel":
        data = dict(data)
        kind = data.pop("kind")
        return cls(kind, data)


def rk4_step(f: Callable[[Vector, Vector], List[float]], x: Vector, u: Vector, h: float) -> List[float]:
    k1 = f(x, u)
    x2 = [xi + 0.5 * h * ki for xi, ki in zip(x, k1)]
    k2 = f(x2, u)
    x3 = [xi + 0.5 * h * ki for xi, ki in zip(x, k2)]
    k3 = f(x3, u)
    x4 = [xi + h * ki for xi, ki in zip(x, k3)]
    k4 = f(x4, u)
    return [
        xi + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        for xi, a, b, c, d in zip(x, k1, k2, k3, k4)
    ]


def integrate(
    f: Callable[[Vector, Vector], List[float]],
    x: Vector,
    u: Vector,
    duration: float,
    h: float,
) -> List[float]:
    """RK4 over ``duration`` with steps of ``h`` (last step shortened)."""
    steps = int(math.floor(duration / h + 1e-12))
    x = list(x)
    for _ in range(steps):
        x = rk4_step(f, x, u, h)
    rest = duration - steps * h
    if rest > 1e-15:
        x = rk4_step(f, x, u, rest)
    return x
