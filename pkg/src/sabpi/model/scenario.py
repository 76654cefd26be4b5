"""Scenario data: workspace, dynamics, labeled regions, sensing model, prior.

Hidden environment facts are boolean *variables*.  A region's uncertain
proposition is bound to one or more variables and holds at the region iff
any of them is true; by default each (region, proposition) pair gets its
own variable named ``"<region>.<prop>"``.  An environment hypothesis is a
joint assignment, encoded as an int with bit ``i`` set iff variable ``i``
is true.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from ..ltlf import Dfa, compile_dfa, parse_ltlf
from .dynamics import DynamicsModel
from .geometry import Box, Shape, compile_membership, shape_from_json

DEFAULT_HYPOTHESIS_CAP = 1 << 12
PROB_TOL = 1e-9


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class SemanticRegion:
    id: int
    name: str
    shape: Shape
    labels: FrozenSet[str]
    uncertain: Tuple[Tuple[str, Tuple[int, ...]], ...]
    """(proposition, variable indices) pairs; the proposition holds iff any variable does."""

    @property
    def uncertain_props(self) -> Tuple[str, ...]:
        return tuple(p for p, _ in self.uncertain)


@dataclass(frozen=True)
class ObservationRegion:
    id: int
    name: str
    shape: Shape
    target: int
    props: Tuple[str, ...]
    table: Tuple[Tuple[float, ...], ...]
    """``table[h][o]``: probability of symbol ``o`` when the target's props are ``h``."""

    @property
    def n_symbols(self) -> int:
        return len(self.table[0])

    def symbol_name(self, o: int) -> str:
        return "&".join(p if o >> i & 1 else f"!{p}" for i, p in enumerate(self.props))

    def symbol_index(self, o: Union[int, str]) -> int:
        if isinstance(o, int):
            if 0 <= o < self.n_symbols:
                return o
        else:
            for i in range(self.n_symbols):
                if self.symbol_name(i) == o:
                    return i
        raise KeyError(f"unknown observation symbol {o!r} for region {self.name!r}")


def memory_update(m: int, region: int) -> int:
    """Set the visited bit of observation region ``region``."""
    return m | (1 << region)


def memory_str(m: int, n: int) -> str:
    """Bit ``k`` is character ``k`` (left to right)."""
    return "".join("1" if m >> k & 1 else "0" for k in range(n))


def parse_memory(text: Union[str, Sequence[int], int, None], n: int) -> int:
    if text is None:
        return 0
    if isinstance(text, int):
        return text
    if isinstance(text, str):
        if len(text) != n or set(text) - {"0", "1"}:
            raise ScenarioError(f"memory string must be {n} characters of 0/1, got {text!r}")
        return sum(1 << k for k, ch in enumerate(text) if ch == "1")
    return sum(1 << k for k, b in enumerate(text) if b)


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    ap: Tuple[str, ...]
    formula: str
    state_space: Box
    control_space: Box
    obstacles: Tuple[Shape, ...]
    regions: Tuple[SemanticRegion, ...]
    observation_regions: Tuple[ObservationRegion, ...]
    variables: Tuple[str, ...]
    prior: Dict[int, float]
    dynamics: DynamicsModel
    x0: Tuple[float, ...]
    m0: int = 0
    obstacle_prop: str = "obs"
    fuel_prop: Optional[str] = None
    t_prop_max: float = 1.0
    integration_step: Optional[float] = None
    event_tolerance: float = 1e-6
    planner: dict = field(default_factory=dict)
    source: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self._validate()
        ap_index = {p: i for i, p in enumerate(self.ap)}
        compiled = []
        for r in self.regions:
            certain = sum(1 << ap_index[p] for p in r.labels if p in ap_index)
            unc = [
                (1 << ap_index[p], sum(1 << v for v in vars_))
                for p, vars_ in r.uncertain
                if p in ap_index
            ]
            compiled.append((r.shape.contains, certain, unc))
        object.__setattr__(self, "_region_fast", compiled)
        object.__setattr__(self, "_obstacle_bit", 1 << ap_index[self.obstacle_prop] if self.obstacle_prop in ap_index else 0)
        object.__setattr__(self, "_fuel_bit", 1 << ap_index[self.fuel_prop] if self.fuel_prop in ap_index else 0)
        masks = []
        for o in self.observation_regions:
            target = self.regions[o.target]
            masks.append([sum(1 << v for v in vars_) for _, vars_ in target.uncertain])
        object.__setattr__(self, "_obs_masks", masks)

    # ------------------------------------------------------------------ checks
    def _validate(self) -> None:
        if len(self.ap) > 16:
            raise ScenarioError("at most 16 atomic propositions are supported")
        f = parse_ltlf(self.formula, self.ap)
        del f
        n = self.dynamics.state_dim
        if len(self.x0) != n or len(self.state_space.lower) != n:
            raise ScenarioError(f"state dimension mismatch: dynamics has {n}")
        if len(self.control_space.lower) != self.dynamics.control_dim:
            raise ScenarioError("control box dimension does not match dynamics")
        if not self.state_space.contains(self.x0):
            raise ScenarioError("initial state outside the state space")
        if any(o.contains(self.x0) for o in self.obstacles):
            raise ScenarioError("initial state lies inside an obstacle")
        for r in self.regions:
            overlap = set(r.labels) & set(r.uncertain_props)
            if overlap:
                raise ScenarioError(f"region {r.name!r} lists {sorted(overlap)} as both certain and uncertain")
        for o in self.observation_regions:
            for h, row in enumerate(o.table):
                if any(p < 0 for p in row) or abs(sum(row) - 1.0) > PROB_TOL:
                    raise ScenarioError(f"observation region {o.name!r}: row {h} does not sum to 1")
        total = sum(self.prior.values())
        if abs(total - 1.0) > PROB_TOL:
            raise ScenarioError(f"prior sums to {total}, not 1")
        if self.fuel_prop is not None and self.dynamics.fuel_dim is None:
            raise ScenarioError("fuel proposition declared but dynamics has no fuel state")

    # ---------------------------------------------------------------- derived
    @cached_property
    def dfa(self) -> Dfa:
        return compile_dfa(parse_ltlf(self.formula, self.ap), self.ap)

    @property
    def n_obs_regions(self) -> int:
        return len(self.observation_regions)

    @cached_property
    def guard_min_width(self) -> float:
        shapes = [r.shape for r in self.regions] + [o.shape for o in self.observation_regions]
        shapes += list(self.obstacles)
        return min((s.min_width for s in shapes), default=math.inf)

    @property
    def step_size(self) -> float:
        if self.integration_step:
            return self.integration_step
        return min(self.t_prop_max, self.guard_min_width) / 20.0

    @cached_property
    def guard_layout(self) -> "GuardLayout":
        return GuardLayout.build(self)

    @property
    def position_dims(self) -> Tuple[int, ...]:
        return self.dynamics.position_dims

    def hypothesis_names(self, e: int) -> FrozenSet[str]:
        return frozenset(v for i, v in enumerate(self.variables) if e >> i & 1)

    def hypothesis_from_names(self, names: Iterable[str]) -> int:
        index = {v: i for i, v in enumerate(self.variables)}
        return sum(1 << index[v] for v in names)

    # ---------------------------------------------------------------- labels
    def label_bits(self, x: Sequence[float], e: int) -> int:
        """Label of ``x`` under hypothesis ``e`` as a bitset over ``ap``."""
        bits = 0
        for contains, certain, unc in self._region_fast:
            if contains(x):
                bits |= certain
                for bit, mask in unc:
                    if e & mask:
                        bits |= bit
        if self._obstacle_bit and any(o.contains(x) for o in self.obstacles):
            bits |= self._obstacle_bit
        if self._fuel_bit and x[self.dynamics.fuel_dim] > 0:
            bits |= self._fuel_bit
        return bits

    def label_at(self, x: Sequence[float], e: int) -> FrozenSet[str]:
        """Label of ``x`` as proposition names, including names outside ``ap``."""
        out = set()
        for r in self.regions:
            if r.shape.contains(x):
                out |= r.labels
                for p, vars_ in r.uncertain:
                    if any(e >> v & 1 for v in vars_):
                        out.add(p)
        if any(o.contains(x) for o in self.obstacles):
            out.add(self.obstacle_prop)
        if self.fuel_prop is not None and x[self.dynamics.fuel_dim] > 0:
            out.add(self.fuel_prop)
        return frozenset(out)

    # ---------------------------------------------------------------- guards
    def regions_at(self, x: Sequence[float]) -> Tuple[int, ...]:
        return tuple(i for i, (contains, _, _) in enumerate(self._region_fast) if contains(x))

    def guard_R(self, x: Sequence[float]) -> bool:
        return any(contains(x) for contains, _, _ in self._region_fast)

    def guard_T(self, x: Sequence[float]) -> Optional[int]:
        """Lowest-id observation region containing ``x``."""
        for o in self.observation_regions:
            if o.shape.contains(x):
                return o.id
        return None

    def in_collision(self, x: Sequence[float]) -> bool:
        return any(o.contains(x) for o in self.obstacles)

    def in_bounds(self, x: Sequence[float]) -> bool:
        return self.state_space.contains(x)

    # ----------------------------------------------------------- observation
    def target_assignment(self, region: int, e: int) -> int:
        """Truth of the target region's uncertain props under ``e``, as bits."""
        h = 0
        for i, mask in enumerate(self._obs_masks[region]):
            if e & mask:
                h |= 1 << i
        return h

    def obs_likelihood(
        self,
        x: Sequence[float],
        region: int,
        e: int,
        m: int,
        o: Union[int, str],
    ) -> float:
        """Probability of symbol ``o`` at observation region ``region``.

        A region already marked in ``m`` yields the uninformative uniform
        distribution.  ``x`` is accepted for interface completeness; the
        accuracy of a region does not vary inside it.
        """
        reg = self.observation_regions[region]
        oi = reg.symbol_index(o)
        if m >> region & 1:
            return 1.0 / reg.n_symbols
        return reg.table[self.target_assignment(region, e)][oi]

    # ---------------------------------------------------------------- export
    def to_json(self) -> dict:
        return dict(self.source)


@dataclass(frozen=True)
class GuardLayout:
    """Bit layout of a compiled membership test over every guard shape.

    Bit 0 is the state space, then one bit per obstacle, per semantic
    region and per observation region, in that order.
    """

    membership: object
    obstacles: int
    region_shift: int
    n_regions: int
    obs_shift: int
    n_obs: int

    @classmethod
    def build(cls, scn: "Scenario") -> "GuardLayout":
        shapes = [scn.state_space, *scn.obstacles]
        region_shift = len(shapes)
        shapes += [r.shape for r in scn.regions]
        obs_shift = len(shapes)
        shapes += [o.shape for o in scn.observation_regions]
        return cls(
            membership=compile_membership(shapes),
            obstacles=((1 << len(scn.obstacles)) - 1) << 1,
            region_shift=region_shift,
            n_regions=len(scn.regions),
            obs_shift=obs_shift,
            n_obs=len(scn.observation_regions),
        )

    @property
    def regions(self) -> int:
        return ((1 << self.n_regions) - 1) << self.region_shift

    def fresh_obs(self, m: int) -> int:
        """Mask of observation regions whose memory bit in ``m`` is clear."""
        return (~m & ((1 << self.n_obs) - 1)) << self.obs_shift


# -------------------------------------------------------------------- loading
def _table_from_json(spec: dict, n_props: int) -> Tuple[Tuple[float, ...], ...]:
    k = 1 << n_props
    if "table" in spec:
        rows = tuple(tuple(float(v) for v in row) for row in spec["table"])
        if len(rows) != k or any(len(r) != k for r in rows):
            raise ScenarioError(f"observation table must be {k}x{k}")
        return rows
    acc = float(spec.get("accuracy", 1.0))
    if not 0.0 <= acc <= 1.0:
        raise ScenarioError(f"accuracy {acc} outside [0, 1]")
    wrong = (1.0 - acc) / (k - 1) if k > 1 else 0.0
    return tuple(tuple(acc if o == h else wrong for o in range(k)) for h in range(k))


def _expand_prior(spec: dict, variables: Sequence[str]) -> Dict[int, float]:
    index = {v: i for i, v in enumerate(variables)}
    if "joint" in spec:
        prior: Dict[int, float] = {}
        for entry in spec["joint"]:
            unknown = set(entry.get("true", [])) - set(index)
            if unknown:
                raise ScenarioError(f"prior names unknown variables {sorted(unknown)}")
            e = sum(1 << index[v] for v in entry.get("true", []))
            prior[e] = prior.get(e, 0.0) + float(entry["p"])
        return {e: p for e, p in prior.items() if p > 0}
    marginals = spec.get("independent", {})
    unknown = set(marginals) - set(index)
    if unknown:
        raise ScenarioError(f"prior names unknown variables {sorted(unknown)}")
    prior = {}
    n = len(variables)
    for bits in itertools.product((0, 1), repeat=n):
        p = 1.0
        for i, b in enumerate(bits):
            q = float(marginals.get(variables[i], 0.5))
            p *= q if b else 1.0 - q
        if p > 0:
            prior[sum(1 << i for i, b in enumerate(bits) if b)] = p
    return prior


def scenario_from_json(data: dict, hypothesis_cap: int = DEFAULT_HYPOTHESIS_CAP) -> Scenario:
    dynamics = DynamicsModel.from_json(data["dynamics"])
    ws = data["workspace"]
    n = dynamics.state_dim
    state_space = Box(
        tuple(float(v) for v in ws["state_space"]["lower"]),
        tuple(float(v) for v in ws["state_space"]["upper"]),
        tuple(range(n)),
    )
    control_space = Box(
        tuple(float(v) for v in ws["control_space"]["lower"]),
        tuple(float(v) for v in ws["control_space"]["upper"]),
        tuple(range(dynamics.control_dim)),
    )
    pos = dynamics.position_dims
    obstacles = tuple(shape_from_json(o, pos) for o in ws.get("obstacles", []))

    variables: List[str] = list(data.get("variables", []))
    regions = []
    names: Dict[str, int] = {}
    for i, r in enumerate(data.get("regions", [])):
        name = r["id"]
        if name in names:
            raise ScenarioError(f"duplicate region id {name!r}")
        names[name] = i
        unc_spec = r.get("uncertain", [])
        if isinstance(unc_spec, list):
            unc_spec = {p: f"{name}.{p}" for p in unc_spec}
        uncertain = []
        for prop, vars_ in unc_spec.items():
            vars_ = [vars_] if isinstance(vars_, str) else list(vars_)
            idx = []
            for v in vars_:
                if v not in variables:
                    variables.append(v)
                idx.append(variables.index(v))
            uncertain.append((prop, tuple(idx)))
        regions.append(
            SemanticRegion(
                id=i,
                name=name,
                shape=shape_from_json(r["shape"], pos),
                labels=frozenset(r.get("labels", [])),
                uncertain=tuple(uncertain),
            )
        )
    if (1 << len(variables)) > hypothesis_cap:
        raise ScenarioError(
            f"{len(variables)} hidden variables exceed the hypothesis cap {hypothesis_cap}"
        )

    obs_regions = []
    for i, o in enumerate(data.get("observation_regions", [])):
        target = names.get(o["target"])
        if target is None:
            raise ScenarioError(f"observation region {o['id']!r} targets unknown region {o['target']!r}")
        props = regions[target].uncertain_props
        if not props:
            raise ScenarioError(f"observation target {o['target']!r} has no uncertain propositions")
        obs_regions.append(
            ObservationRegion(
                id=i,
                name=o["id"],
                shape=shape_from_json(o["shape"], pos),
                target=target,
                props=props,
                table=_table_from_json(o, len(props)),
            )
        )

    labels = data.get("labels", {})
    prop = data.get("propagation", {})
    initial = data.get("initial", {})
    return Scenario(
        name=data.get("name", "scenario"),
        ap=tuple(data["ap"]),
        formula=data["task"]["formula"] if isinstance(data["task"], dict) else data["task"],
        state_space=state_space,
        control_space=control_space,
        obstacles=obstacles,
        regions=tuple(regions),
        observation_regions=tuple(obs_regions),
        variables=tuple(variables),
        prior=_expand_prior(data.get("prior", {}), variables),
        dynamics=dynamics,
        x0=tuple(float(v) for v in initial["x"]),
        m0=parse_memory(initial.get("memory"), len(obs_regions)),
        obstacle_prop=labels.get("obstacle", "obs"),
        fuel_prop=labels.get("fuel"),
        t_prop_max=float(prop.get("t_prop_max", 1.0)),
        integration_step=prop.get("integration_step"),
        event_tolerance=float(prop.get("event_tolerance", 1e-6)),
        planner=dict(data.get("planner", {})),
        source=data,
    )


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    if not path.exists() and not path.suffix:
        bundled = Path(__file__).resolve().parent.parent / "scenarios" / f"{path.name}.json"
        if bundled.exists():
            path = bundled
    with open(path) as fh:
        return scenario_from_json(json.load(fh))


def bundled_scenarios() -> List[str]:
    root = Path(__file__).resolve().parent.parent / "scenarios"
    return sorted(p.stem for p in root.glob("*.json"))
