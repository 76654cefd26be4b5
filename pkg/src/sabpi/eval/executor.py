"""Monte-Carlo execution of extracted policies against sampled environments."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
from scipy.stats import binomtest

from ..artifact import PolicyArtifact
from ..belief import initial_belief
from ..model.scenario import Scenario, memory_update
from ..propagator import COLLIDED, FULL, HIT_OBSERVATION, HIT_REGION, LEFT_BOUNDS, PropagationResult, propagate

SATISFIED = "satisfied"
VIOLATED = "violated"
EXHAUSTED = "policy_exhausted"


class PolicyMismatchError(ValueError):
    """The policy was not planned from this scenario's initial belief."""


@dataclass
class TraceEvent:
    time: float
    x: Tuple[float, ...]
    event: str
    observation: Optional[int]
    q: Dict[int, float]
    """DFA-state marginal of the planner's belief at the node reached."""


@dataclass
class ExecutionTrace:
    hypothesis: int
    events: List[TraceEvent]
    verdict: str
    q_true: int

    def to_json(self, scn: Scenario) -> dict:
        return {
            "hypothesis": sorted(scn.hypothesis_names(self.hypothesis)),
            "verdict": self.verdict,
            "dfa_state": self.q_true,
            "events": [
                {"time": e.time, "x": list(e.x), "event": e.event, "observation": e.observation,
                 "q": {str(k): v for k, v in sorted(e.q.items())}}
                for e in self.events
            ],
        }


@dataclass
class ExecutionSummary:
    trials: int
    successes: int
    ci_low: float
    ci_high: float
    verdicts: Dict[str, int]
    traces: List[ExecutionTrace] = field(default_factory=list, repr=False)

    @property
    def rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    @property
    def margin(self) -> float:
        """Half-width of the Wilson interval."""
        return 0.5 * (self.ci_high - self.ci_low)

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "rate": self.rate,
            "wilson95": [self.ci_low, self.ci_high],
            "verdicts": dict(self.verdicts),
        }


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    if trials == 0:
        return 0.0, 1.0
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def _check_root(scn: Scenario, policy: PolicyArtifact, tol: float = 1e-9) -> None:
    expected = initial_belief(scn)
    root = policy.nodes[policy.root].belief
    same = (
        len(root.x) == len(expected.x)
        and all(abs(a - b) <= tol for a, b in zip(root.x, expected.x))
        and root.m == expected.m
        and root.dist.keys() == expected.dist.keys()
        and all(abs(root.dist[k] - w) <= tol for k, w in expected.dist.items())
    )
    if not same:
        raise PolicyMismatchError(
            f"policy root belief does not match the initial belief of scenario {scn.name!r}"
        )


class PolicyExecutor:
    """Replays one policy many times; propagations are memoized per node.

    The continuous part of the state at a policy node does not depend on
    which observations led there (only the chosen controls do), so the
    replayed propagation of each node is computed once and reused.
    """

    def __init__(self, scn: Scenario, policy: PolicyArtifact, h=None, eps=None):
        _check_root(scn, policy)
        self.scn = scn
        self.policy = policy
        self.h = h
        self.eps = eps
        self.dfa = scn.dfa
        self._cache: Dict[int, PropagationResult] = {}
        self._hyps = sorted(scn.prior)
        self._probs = np.array([scn.prior[e] for e in self._hyps])
        self._probs = self._probs / self._probs.sum()

    def _replay(self, nid: int, x, m) -> PropagationResult:
        res = self._cache.get(nid)
        if res is None:
            step = self.policy.nodes[nid].step
            res = propagate(self.scn, x, m, step.u, step.t_request, self.h, self.eps)
            self._cache[nid] = res
        return res

    def run(self, e: int, rng: np.random.Generator, record: bool = False) -> ExecutionTrace:
        scn, dfa, policy = self.scn, self.dfa, self.policy
        x, m = scn.x0, scn.m0
        q = dfa.initial
        if scn.guard_R(x):
            q = dfa.step(q, scn.label_bits(x, e))
        nid = policy.root
        t = 0.0
        events: List[TraceEvent] = []
        while True:
            if dfa.is_accepting(q):
                return ExecutionTrace(e, events, SATISFIED, q)
            if dfa.is_trap(q):
                return ExecutionTrace(e, events, VIOLATED, q)
            node = policy.nodes[nid]
            if node.step is None or not node.children:
                return ExecutionTrace(e, events, EXHAUSTED, q)
            res = self._replay(nid, x, m)
            x = res.x_end
            t += res.t_actual
            symbol = None
            if res.outcome in (HIT_REGION, COLLIDED, LEFT_BOUNDS) or (
                res.outcome == HIT_OBSERVATION and res.region is not None
            ):
                q = dfa.step(q, scn.label_bits(x, e))
            if res.outcome == HIT_OBSERVATION:
                reg = scn.observation_regions[res.observation]
                row = reg.table[scn.target_assignment(res.observation, e)]
                symbol = int(rng.choice(len(row), p=row))
                m = memory_update(m, res.observation)
                nxt = next((c.node for c in node.children if c.symbol == symbol), None)
            else:
                nxt = node.children[0].node
            if record:
                qm = policy.nodes[nxt].belief.q_marginal() if nxt is not None else {}
                events.append(TraceEvent(t, tuple(x), res.outcome, symbol, qm))
            if nxt is None:
                # the planner pruned this outcome as (numerically) impossible
                if dfa.is_accepting(q):
                    return ExecutionTrace(e, events, SATISFIED, q)
                return ExecutionTrace(e, events, EXHAUSTED, q)
            nid = nxt

    def sample_hypothesis(self, rng: np.random.Generator) -> int:
        return self._hyps[int(rng.choice(len(self._hyps), p=self._probs))]


def execute_policy(
    scn: Scenario,
    policy: PolicyArtifact,
    trials: int = 10_000,
    seed: int = 0,
    keep_traces: bool = False,
    h: Optional[float] = None,
    eps: Optional[float] = None,
) -> ExecutionSummary:
    """Estimate the success probability of ``policy`` by simulation.

    Each trial samples a ground-truth hypothesis from the prior, replays
    the policy's controls, samples observations from the sensing model
    under that hypothesis and steps the task automaton with the true
    labels.  Reaching a policy leaf without acceptance counts as failure.
    ``h``/``eps`` default to the propagation settings stored in the policy.
    """
    h = policy.integration_step if h is None else h
    eps = policy.event_tolerance if eps is None else eps
    ex = PolicyExecutor(scn, policy, h, eps)
    rng = np.random.default_rng(seed)
    verdicts: Counter = Counter()
    traces = []
    for _ in range(trials):
        e = ex.sample_hypothesis(rng)
        tr = ex.run(e, rng, record=keep_traces)
        verdicts[tr.verdict] += 1
        if keep_traces:
            traces.append(tr)
    successes = verdicts[SATISFIED]
    lo, hi = wilson_interval(successes, trials)
    return ExecutionSummary(trials, successes, lo, hi, dict(verdicts), traces)


def write_traces(path: Union[str, Path], scn: Scenario, traces: List[ExecutionTrace]) -> None:
    """One JSON object per line."""
    with open(path, "w") as fh:
        for tr in traces:
            fh.write(json.dumps(tr.to_json(scn)) + "\n")
