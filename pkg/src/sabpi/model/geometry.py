"""Axis-aligned boxes and Euclidean balls over a subset of state dimensions."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union


@dataclass(frozen=True)
class Box:
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]
    dims: Tuple[int, ...]

    def __post_init__(self) -> None:
        if not (len(self.lower) == len(self.upper) == len(self.dims)):
            raise ValueError("box lower/upper/dims lengths differ")
        for lo, hi in zip(self.lower, self.upper):
            if not lo < hi:
                raise ValueError(f"box needs lower < upper, got {lo} >= {hi}")

    def contains(self, x: Sequence[float]) -> bool:
        for lo, hi, d in zip(self.lower, self.upper, self.dims):
            v = x[d]
            if v < lo or v > hi:
                return False
        return True

    @property
    def min_width(self) -> float:
        return min(hi - lo for lo, hi in zip(self.lower, self.upper))

    def center(self) -> Tuple[float, ...]:
        return tuple((lo + hi) / 2 for lo, hi in zip(self.lower, self.upper))

    def to_json(self) -> dict:
        return {"type": "box", "lower": list(self.lower), "upper": list(self.upper), "dims": list(self.dims)}


@dataclass(frozen=True)
class Ball:
    center_: Tuple[float, ...]
    radius: float
    dims: Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.center_) != len(self.dims):
            raise ValueError("ball center/dims lengths differ")
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    def contains(self, x: Sequence[float]) -> bool:
        acc = 0.0
        for c, d in zip(self.center_, self.dims):
            acc += (x[d] - c) ** 2
        return acc <= self.radius * self.radius

    @property
    def min_width(self) -> float:
        return 2 * self.radius

    def center(self) -> Tuple[float, ...]:
        return self.center_

    def to_json(self) -> dict:
        return {"type": "ball", "center": list(self.center_), "radius": self.radius, "dims": list(self.dims)}


Shape = Union[Box, Ball]


def _lit(v: float) -> str:
    v = float(v)
    return repr(v) if math.isfinite(v) else f"float('{v}')"


def _condition(shape: Shape, var: str) -> str:
    if isinstance(shape, Box):
        return " and ".join(
            f"{_lit(lo)} <= {var}[{d}] <= {_lit(hi)}" for lo, hi, d in zip(shape.lower, shape.upper, shape.dims)
        )
    terms = " + ".join(f"({var}[{d}] - {_lit(c)}) ** 2" for c, d in zip(shape.center_, shape.dims))
    return f"{terms} <= {_lit(shape.radius * shape.radius)}"


def compile_membership(shapes: Sequence[Shape]) -> Callable[[Sequence[float]], int]:
    """Return ``f(x)`` whose bit ``i`` is set iff ``shapes[i]`` contains ``x``.

    The tests are generated as straight-line code; guard checks run after
    every integration step, and this is several times faster than calling
    ``contains`` on each shape.  Results agree with ``contains`` exactly,
    including ``False`` for NaN coordinates.
    """
    lines = ["def membership(x):", "    m = 0"]
    for i, shape in enumerate(shapes):
        lines.append(f"    if {_condition(shape, 'x')}:")
        lines.append(f"        m |= {1 << i}")
    lines.append("    return m")
    namespace: dict = {}
    exec("\n".join(lines), namespace)
    return namespace["membership"]


def shape_from_json(data: dict, default_dims: Sequence[int]) -> Shape:
    kind = data.get("type", "box")
    if kind == "box":
        lower = tuple(float(v) for v in data["lower"])
        dims = tuple(data.get("dims", default_dims[: len(lower)]))
        return Box(lower, tuple(float(v) for v in data["upper"]), dims)
    if kind == "ball":
        center = tuple(float(v) for v in data["center"])
        dims = tuple(data.get("dims", default_dims[: len(center)]))
        return Ball(center, float(data["radius"]), dims)
    raise ValueError(f"unknown shape type {kind!r}")


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.sqrt(sum((u - v) ** 2 for u, v in zip(a, b)))
