"""Flow-until-guard propagation of the continuous state.

Integration is classical RK4 at a fixed step.  After each step the end
point is tested against the guards; if any guard fired during the step,
the step is bisected in time to the event tolerance and the event point
(the first bisection point on the triggered side) is reported.

Guard semantics:

* leaving the state space or producing a non-finite state: ``left_bounds``;
* entering an obstacle: ``collided``;
* entering a semantic region that did not contain the state at the start
  of the step (G_R, membership change);
* being inside an observation region whose memory bit is clear (G_T,
  first visit).  Visited observation regions are transparent.

When a semantic region and a fresh observation region are entered at the
same event, the outcome is ``hit_observation`` and ``region`` names the
semantic region as well, so the caller applies both jumps.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple

from .model.dynamics import rk4_step
from .model.scenario import Scenario

FULL = "full_duration"
HIT_REGION = "hit_region"
HIT_OBSERVATION = "hit_observation"
COLLIDED = "collided"
LEFT_BOUNDS = "left_bounds"


class DegeneratePropagation(RuntimeError):
    pass


@dataclass(frozen=True)
class PropagationResult:
    outcome: str
    x_end: Tuple[float, ...]
    t_actual: float
    region: Optional[int] = None
    observation: Optional[int] = None

    @property
    def is_event(self) -> bool:
        return self.outcome in (HIT_REGION, HIT_OBSERVATION)


def _finite(x: Sequence[float]) -> bool:
    return all(math.isfinite(v) for v in x)


def _lowest_bit(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def propagate(
    scn: Scenario,
    x0: Sequence[float],
    m: int,
    u: Sequence[float],
    t_req: float,
    h: Optional[float] = None,
    eps: Optional[float] = None,
) -> PropagationResult:
    """Integrate under constant ``u`` for ``t_req`` or until the first guard."""
    if not t_req > 0:
        raise ValueError("propagation duration must be positive")
    h = scn.step_size if h is None else h
    eps = scn.event_tolerance if eps is None else eps
    f = scn.dynamics.field
    u = tuple(u)
    layout = scn.guard_layout
    membership = layout.membership
    obstacles = layout.obstacles
    regions = layout.regions
    fresh = layout.fresh_obs(m)

    x = [float(v) for v in x0]
    start = membership(x)
    if start & fresh:
        oid = _lowest_bit(start & fresh) - layout.obs_shift
        return PropagationResult(HIT_OBSERVATION, tuple(x), 0.0, None, oid)
    inside = start & regions

    def triggered(mask: int) -> bool:
        return not mask & 1 or bool(mask & obstacles or mask & regions & ~inside or mask & fresh)

    n_steps = max(1, int(math.ceil(t_req / h - 1e-9)))
    for i in range(n_steps):
        ts = i * h
        dt = min(h, t_req - ts)
        if dt <= 0:
            break
        xn = rk4_step(f, x, u, dt)
        mask = membership(xn)
        if triggered(mask):
            lo, hi, y_hi, m_hi = 0.0, dt, xn, mask
            while hi - lo > eps:
                mid = 0.5 * (lo + hi)
                y = rk4_step(f, x, u, mid)
                ym = membership(y)
                if triggered(ym):
                    hi, y_hi, m_hi = mid, y, ym
                else:
                    lo = mid
            return _classify(layout, x, y_hi, m_hi, ts + hi, inside, fresh)
        inside &= mask
        x = xn
    return PropagationResult(FULL, tuple(x), t_req)


def _classify(layout, x_prev, y, mask, t, inside, fresh) -> PropagationResult:
    if not _finite(y):
        return PropagationResult(LEFT_BOUNDS, tuple(x_prev), t)
    if not mask & 1:
        return PropagationResult(LEFT_BOUNDS, tuple(y), t)
    if mask & layout.obstacles:
        return PropagationResult(COLLIDED, tuple(y), t)
    entered = mask & layout.regions & ~inside
    region = _lowest_bit(entered) - layout.region_shift if entered else None
    if mask & fresh:
        oid = _lowest_bit(mask & fresh) - layout.obs_shift
        return PropagationResult(HIT_OBSERVATION, tuple(y), t, region, oid)
    return PropagationResult(HIT_REGION, tuple(y), t, region, None)


class ExitResult(NamedTuple):
    x: Tuple[float, ...]
    t: float


def exit_current_region(
    scn: Scenario,
    x0: Sequence[float],
    u: Sequence[float],
    budget: int = 1000,
    h: Optional[float] = None,
) -> ExitResult:
    """Flow under ``u`` until the state is outside every region containing ``x0``.

    Returns the first step end point outside those regions.  Raises
    :class:`DegeneratePropagation` if ``budget`` steps do not suffice.
    """
    h = scn.step_size if h is None else h
    start = [r.shape.contains for r in scn.regions if r.shape.contains(x0)]
    start += [o.shape.contains for o in scn.observation_regions if o.shape.contains(x0)]
    x = [float(v) for v in x0]
    if not any(contains(x) for contains in start):
        return ExitResult(tuple(x), 0.0)
    for i in range(1, budget + 1):
        x = rk4_step(scn.dynamics, x, tuple(u), h)
        if not _finite(x):
            break
        if not any(contains(x) for contains in start):
            return ExitResult(tuple(x), i * h)
    raise DegeneratePropagation(f"control {tuple(u)} does not leave the region within {budget} steps")
