"""Tree growth shared by every planner: sample a control, propagate, branch."""
from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..belief import (
    HybridBelief,
    acc_mass,
    initial_belief,
    jump_dist,
    observation_outcomes,
    region_jump,
    trap_mass,
)
from ..model.scenario import Scenario
from ..propagator import (
    COLLIDED,
    FULL,
    HIT_OBSERVATION,
    HIT_REGION,
    LEFT_BOUNDS,
    PropagationResult,
    propagate,
)
from ..tree import Arm, PolicyTree
from .config import PlannerConfig


def successors(
    scn: Scenario, b: HybridBelief, res: PropagationResult
) -> List[Tuple[float, HybridBelief, Optional[int], bool]]:
    """Outcome beliefs of a propagation as ``(probability, belief, symbol, terminal)``.

    Collisions and leaving the state space only produce a (terminal) child
    when the label at the stopping point pushes mass into a trap state;
    otherwise the list is empty and the propagation is discarded.
    """
    x = res.x_end
    if res.outcome == FULL:
        return [(1.0, HybridBelief(x, b.m, b.dist), None, False)]
    if res.outcome == HIT_REGION:
        return [(1.0, region_jump(scn, b, x), None, False)]
    if res.outcome == HIT_OBSERVATION:
        at = HybridBelief(x, b.m, b.dist)
        return [
            (p, post, o, False)
            for o, p, post in observation_outcomes(scn, at, res.observation, res.region is not None)
        ]
    if res.outcome in (COLLIDED, LEFT_BOUNDS):
        dist = jump_dist(scn, x, b.dist)
        child = HybridBelief(x, b.m, dist)
        if trap_mass(scn, child) > trap_mass(scn, b) + 1e-12:
            return [(1.0, child, None, True)]
        return []
    raise ValueError(f"unknown propagation outcome {res.outcome!r}")


class Expander:
    """Owns the tree and the random stream; performs single expansions."""

    def __init__(self, scn: Scenario, cfg: PlannerConfig):
        self.scn = scn
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)
        self.h = cfg.integration_step or None
        self.eps = cfg.event_tolerance or None
        self.t_max = cfg.t_prop_max or scn.t_prop_max
        b0 = initial_belief(scn)
        self.tree = PolicyTree(b0, acc_mass(scn, b0), trap_mass(scn, b0))
        self.expansions = 0
        self.discarded = 0
        self._u_lo = np.array(scn.control_space.lower)
        self._u_hi = np.array(scn.control_space.upper)
        pos = scn.position_dims
        self._x_lo = np.array([scn.state_space.lower[d] for d in pos])
        self._x_hi = np.array([scn.state_space.upper[d] for d in pos])

    def sample_control(self) -> Tuple[float, ...]:
        return tuple(float(v) for v in self.rng.uniform(self._u_lo, self._u_hi))

    def sample_duration(self) -> float:
        return float(self.t_max * (1.0 - self.rng.random()))

    def sample_position(self) -> np.ndarray:
        return self.rng.uniform(self._x_lo, self._x_hi)

    def propagate(self, b: HybridBelief, u: Sequence[float], t: float) -> PropagationResult:
        return propagate(self.scn, b.x, b.m, u, t, self.h, self.eps)

    def expand(self, node_id: int, u=None, t=None) -> List[int]:
        """Add one arm at ``node_id`` with a sampled control; return new child ids."""
        self.expansions += 1
        u = self.sample_control() if u is None else tuple(u)
        t = self.sample_duration() if t is None else t
        tree = self.tree
        b = tree[node_id].belief
        res = self.propagate(b, u, t)
        succ = successors(self.scn, b, res)
        if not succ:
            self.discarded += 1
            return []
        arm = Arm(u, t, res.t_actual, res.outcome, res.region, res.observation)
        # the arm's exact value is observed on creation, which counts as its first pull
        arm.pulls = 1
        arm_index = tree.add_arm(node_id, arm)
        new = []
        for p, post, o, terminal in succ:
            new.append(
                tree.add_child(
                    node_id, arm_index, p, post,
                    acc_mass(self.scn, post), trap_mass(self.scn, post), o, terminal,
                )
            )
        for cid in new:
            tree.backpropagate(cid)
        return new


class NodeSampler:
    """Pool of candidate nodes with lazy removal of non-expandable ones.

    ``uniform`` picks a pool member uniformly at random; ``voronoi`` samples
    a position in the workspace and picks the nearest member, breaking
    distance ties at random; ``mixed`` flips a fair coin between the two on
    every pick.  Voronoi picks push the frontier outward, while uniform
    picks keep extending nodes that sit inside already covered space, such
    as the outcomes of an observation.
    """

    def __init__(self, expander: Expander, mode: str):
        self.ex = expander
        self.mode = mode
        self.ids: List[int] = []
        self._dims = expander.scn.position_dims
        self._buf = np.empty((64, len(self._dims)))

    def add(self, node_id: int) -> None:
        node = self.ex.tree[node_id]
        if not node.expandable:
            return
        n = len(self.ids)
        self.ids.append(node_id)
        if self.mode != "uniform":
            if n == len(self._buf):
                self._buf = np.concatenate([self._buf, np.empty_like(self._buf)])
            x = node.belief.x
            self._buf[n] = [x[d] for d in self._dims]

    def extend(self, ids) -> None:
        for nid in ids:
            self.add(nid)

    def _remove(self, i: int) -> None:
        last = len(self.ids) - 1
        self.ids[i] = self.ids[last]
        self.ids.pop()
        if self.mode != "uniform":
            self._buf[i] = self._buf[last]

    def pick(self) -> Optional[int]:
        tree = self.ex.tree
        while self.ids:
            if self.mode == "voronoi" or (self.mode == "mixed" and self.ex.rng.random() < 0.5):
                target = self.ex.sample_position()
                diff = self._buf[: len(self.ids)] - target
                d2 = np.einsum("ij,ij->i", diff, diff)
                i = int(np.argmin(d2))
                # observation siblings share a position; without a random
                # tie-break only the first outcome would ever be extended
                ties = np.flatnonzero(d2 == d2[i])
                if len(ties) > 1:
                    i = int(ties[self.ex.rng.integers(len(ties))])
            else:
                i = int(self.ex.rng.integers(len(self.ids)))
            nid = self.ids[i]
            if tree[nid].expandable:
                return nid
            self._remove(i)
        return None
