"""AND/OR search tree over hybrid beliefs.

OR nodes hold beliefs and choose among control arms; an arm's children are
the stochastic outcomes (AND branch) of applying that control.  Values are
exact success probabilities of the best policy contained in the tree:

* arm value ``Q = sum(w * V(child))`` in child insertion order;
* node value ``V = max(acc_mass(belief), max arm Q)``.

Accepting mass is absorbing, so every arm already satisfies
``Q >= acc_mass`` mathematically; the explicit ``max`` keeps the
inequality exact under floating point and makes the node value a valid
"stop here" choice.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from .belief import HybridBelief

SOLVED_TOL = 1e-9


class Arm:
    __slots__ = ("u", "t_request", "t_actual", "outcome", "region", "observation",
                 "pulls", "children", "q", "ret")

    def __init__(self, u, t_request, t_actual, outcome, region=None, observation=None):
        self.u: Tuple[float, ...] = tuple(u)
        self.t_request: float = t_request
        self.t_actual: float = t_actual
        self.outcome: str = outcome
        self.region: Optional[int] = region
        self.observation: Optional[int] = observation
        self.pulls: int = 0
        # (edge probability, child id, observation symbol or None)
        self.children: List[Tuple[float, int, Optional[int]]] = []
        self.q: float = 0.0
        # running mean of sampled returns (only the MCTS baseline uses it)
        self.ret: float = 0.0


class Node:
    __slots__ = ("id", "belief", "acc", "trap", "visits", "arms", "value",
                 "parent", "parent_arm", "depth", "terminal")

    def __init__(self, id, belief, acc, trap, parent=None, parent_arm=None, depth=0, terminal=False):
        self.id: int = id
        self.belief: HybridBelief = belief
        self.acc: float = acc
        self.trap: float = trap
        self.visits: int = 0
        self.arms: List[Arm] = []
        self.value: float = acc
        self.parent: Optional[int] = parent
        self.parent_arm: Optional[int] = parent_arm
        self.depth: int = depth
        self.terminal: bool = terminal

    @property
    def solved(self) -> bool:
        return self.value >= 1.0 - SOLVED_TOL

    @property
    def doomed(self) -> bool:
        return self.trap >= 1.0 - SOLVED_TOL

    @property
    def expandable(self) -> bool:
        return not (self.solved or self.doomed or self.terminal)

    @property
    def is_leaf(self) -> bool:
        return not self.arms


@dataclass
class PolicySubtree:
    """Node ids reachable under the chosen arms, and the arm chosen at each."""

    root: int
    nodes: List[int] = field(default_factory=list)
    choice: Dict[int, int] = field(default_factory=dict)

    def __contains__(self, node_id: int) -> bool:
        return node_id in self._members

    @property
    def _members(self) -> set:
        return set(self.nodes)


def ucb_score(node: Node, arm: Arm, c: float) -> float:
    """UCB1 index of ``arm`` at ``node``; unpulled arms score infinity when ``c > 0``."""
    if c == 0:
        return arm.q
    if arm.pulls == 0:
        return math.inf
    return arm.q + c * math.sqrt(2.0 * math.log(node.visits) / arm.pulls)


def best_arm(node: Node, c: float) -> int:
    """Argmax of :func:`ucb_score`; ties go to the lowest arm index."""
    best, best_score = 0, -math.inf
    for i, arm in enumerate(node.arms):
        s = ucb_score(node, arm, c)
        if s > best_score:
            best, best_score = i, s
    return best


class PolicyTree:
    def __init__(self, root_belief: HybridBelief, acc: float, trap: float):
        self.nodes: List[Node] = [Node(0, root_belief, acc, trap)]

    @property
    def root(self) -> Node:
        return self.nodes[0]

    def __len__(self) -> int:
        return len(self.nodes)

    def __getitem__(self, node_id: int) -> Node:
        return self.nodes[node_id]

    # ----------------------------------------------------------- mutation
    def add_arm(self, node_id: int, arm: Arm) -> int:
        node = self.nodes[node_id]
        node.arms.append(arm)
        return len(node.arms) - 1

    def add_child(
        self,
        node_id: int,
        arm_index: int,
        weight: float,
        belief: HybridBelief,
        acc: float,
        trap: float,
        observation: Optional[int] = None,
        terminal: bool = False,
    ) -> int:
        parent = self.nodes[node_id]
        child = Node(len(self.nodes), belief, acc, trap, node_id, arm_index, parent.depth + 1, terminal)
        self.nodes.append(child)
        parent.arms[arm_index].children.append((weight, child.id, observation))
        return child.id

    def backpropagate(self, node_id: int) -> int:
        """Refresh values from ``node_id`` up to the root.

        Stops early once a node's value is unchanged.  Returns the number
        of ancestors updated.
        """
        nodes = self.nodes
        child = nodes[node_id]
        updated = 0
        while child.parent is not None:
            parent = nodes[child.parent]
            arm = parent.arms[child.parent_arm]
            arm.q = arm_value(nodes, arm)
            new = node_value(parent)
            updated += 1
            if new == parent.value:
                break
            parent.value = new
            child = parent
        return updated

    # -------------------------------------------------------- selection
    def ucb_st(self, c: float, root: int = 0) -> PolicySubtree:
        """Select a policy subtree by recursive UCB1 (exploring when ``c > 0``).

        With ``c > 0`` visit and pull counts are incremented along the way.
        With ``c == 0`` the call is read-only and returns the greedy policy.
        """
        pi = PolicySubtree(root)
        explore = c > 0
        stack = [root]
        while stack:
            nid = stack.pop()
            node = self.nodes[nid]
            pi.nodes.append(nid)
            if explore:
                node.visits += 1
            if node.is_leaf:
                continue
            a = best_arm(node, c)
            pi.choice[nid] = a
            arm = node.arms[a]
            if explore:
                arm.pulls += 1
            stack.extend(child for _, child, _ in reversed(arm.children))
        return pi

    # ---------------------------------------------------------- checking
    def recompute(self) -> Tuple[List[float], List[List[float]]]:
        """Bottom-up recomputation of every Q and V without touching the tree."""
        values = [0.0] * len(self.nodes)
        qs: List[List[float]] = [[] for _ in self.nodes]
        for node in reversed(self.nodes):  # children always have larger ids
            best = node.acc
            for arm in node.arms:
                q = 0.0
                for w, child, _ in arm.children:
                    q += w * values[child]
                qs[node.id].append(q)
                if q > best:
                    best = q
            values[node.id] = best
        return values, qs

    def iter_subtree(self, pi: PolicySubtree) -> Iterator[Node]:
        for nid in pi.nodes:
            yield self.nodes[nid]


def arm_value(nodes: Sequence[Node], arm: Arm) -> float:
    q = 0.0
    for w, child, _ in arm.children:
        q += w * nodes[child].value
    return q


def node_value(node: Node) -> float:
    best = node.acc
    for arm in node.arms:
        if arm.q > best:
            best = arm.q
    return best
