"""JSON scenario and sweep documents.

Schema checks (types, ranges, unknown keys) come from pydantic; the checks
that need the resolved topology live in :func:`validate_scenario`. Both
surface as :class:`ConfigError` carrying a dotted field path.
"""

from __future__ import annotations

import json
import math
import random
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import ConfigError, InvalidTopologyError
from .inventory import CostTable
from .topology import GenerationGraph, build_cycle, build_line, build_torus_grid, is_connected

NodePair = tuple[Annotated[int, Field(ge=0)], Annotated[int, Field(ge=0)]]
Seed = Annotated[int, Field(ge=0, lt=2**64)]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CycleTopology(_Model):
    kind: Literal["cycle"]
    nodes: int = Field(ge=3)


class LineTopology(_Model):
    kind: Literal["line"]
    nodes: int = Field(ge=2)


class GridTopology(_Model):
    kind: Literal["grid"]
    side: int = Field(ge=3)
    seed: Optional[Seed] = None  # falls back to the scenario seed


class EdgeListTopology(_Model):
    kind: Literal["edges"]
    nodes: int = Field(ge=2)
    edges: list[NodePair] = Field(min_length=1)
    rate: float = Field(default=1.0, gt=0)


Topology = Annotated[
    Union[CycleTopology, LineTopology, GridTopology, EdgeListTopology],
    Field(discriminator="kind"),
]


class PairCost(_Model):
    pair: NodePair
    distill: Optional[int] = Field(default=None, ge=1)
    survival: Optional[float] = Field(default=None, gt=0, le=1)


class CostsConfig(_Model):
    distill: int = Field(default=1, ge=1)
    survival: float = Field(default=1.0, gt=0, le=1)
    qec_overhead: float = Field(default=1.0, ge=1)
    overrides: list[PairCost] = Field(default_factory=list)

    def to_table(self) -> CostTable:
        return CostTable(
            distill={tuple(o.pair): o.distill for o in self.overrides if o.distill is not None},
            survival={tuple(o.pair): o.survival for o in self.overrides if o.survival is not None},
            qec_overhead=self.qec_overhead,
            default_distill=self.distill,
            default_survival=self.survival,
        )


class DemandEntry(_Model):
    pair: NodePair
    rate: float = Field(ge=0)


class LpOptions(_Model):
    generation: Literal["fixed", "variable"] = "fixed"
    demand: Optional[list[DemandEntry]] = None  # defaults to the drawn consumers
    demand_rate: float = Field(default=1.0, ge=0)


class ScenarioConfig(_Model):
    topology: Topology
    costs: CostsConfig = CostsConfig()
    consumer_count: int = Field(default=35, ge=1)
    consumers: Optional[list[NodePair]] = Field(default=None, min_length=1)
    request_count: int = Field(default=200, ge=1)
    mode: Literal["oblivious", "hybrid"] = "oblivious"
    swap_attempts_per_node_per_tick: int = Field(default=1, ge=1)
    max_ticks: int = Field(default=100_000, ge=0)
    seed: Seed = 0
    lp: LpOptions = LpOptions()

    @model_validator(mode="after")
    def _consumer_fields(self):
        if self.consumers is not None and "consumer_count" in self.model_fields_set:
            if self.consumer_count != len(self.consumers):
                raise ValueError("consumer_count disagrees with the explicit consumers list")
        return self

    @property
    def node_count(self) -> int:
        topo = self.topology
        return topo.side * topo.side if isinstance(topo, GridTopology) else topo.nodes


class SweepSpec(_Model):
    base: ScenarioConfig
    axis: Literal["distill", "nodes"]
    values: list[int] = Field(min_length=1)
    seeds: list[Seed] = Field(min_length=1)

    @model_validator(mode="after")
    def _increasing(self):
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be strictly increasing")
        return self


def build_graph(config: ScenarioConfig) -> GenerationGraph:
    topo = config.topology
    try:
        if isinstance(topo, CycleTopology):
            return build_cycle(topo.nodes)
        if isinstance(topo, LineTopology):
            return build_line(topo.nodes)
        if isinstance(topo, GridTopology):
            seed = config.seed if topo.seed is None else topo.seed
            return build_torus_grid(topo.side, random.Random(f"grid:{seed}"))
        return GenerationGraph.from_edges(topo.nodes, topo.edges, topo.rate)
    except InvalidTopologyError as exc:
        raise ConfigError("topology", str(exc)) from exc


def validate_scenario(config: ScenarioConfig) -> GenerationGraph:
    """Cross-field checks; returns the generation graph they needed."""
    graph = build_graph(config)
    n = graph.node_count
    if not is_connected(graph):
        raise ConfigError("topology", "generation graph is not connected")
    if config.consumers is None:
        limit = math.comb(n, 2)
        if config.consumer_count > limit:
            raise ConfigError("consumer_count", f"{config.consumer_count} exceeds C({n},2) = {limit}")
    else:
        _check_pairs("consumers", config.consumers, n, distinct=True)
    _check_pairs("costs.overrides", [o.pair for o in config.costs.overrides], n)
    if config.lp.demand is not None:
        _check_pairs("lp.demand", [d.pair for d in config.lp.demand], n, distinct=True)
    return graph


def _check_pairs(field: str, pairs, n: int, distinct: bool = False):
    seen = set()
    for idx, (x, y) in enumerate(pairs):
        where = f"{field}.{idx}"
        if x == y:
            raise ConfigError(where, f"pair ({x},{y}) has coincident endpoints")
        if max(x, y) >= n:
            raise ConfigError(where, f"node {max(x, y)} outside 0..{n - 1}")
        key = (min(x, y), max(x, y))
        if distinct and key in seen:
            raise ConfigError(where, f"duplicate pair ({x},{y})")
        seen.add(key)


def _raise_from_validation(exc: ValidationError):
    err = exc.errors()[0]
    field = ".".join(str(p) for p in err["loc"])
    raise ConfigError(field, err["msg"]) from None


def parse_scenario(text: str | bytes) -> ScenarioConfig:
    try:
        config = ScenarioConfig.model_validate_json(text)
    except ValidationError as exc:
        _raise_from_validation(exc)
    validate_scenario(config)
    return config


def parse_sweep(text: str | bytes) -> SweepSpec:
    try:
        spec = SweepSpec.model_validate_json(text)
    except ValidationError as exc:
        _raise_from_validation(exc)
    return spec


def load_scenario(path: str | Path) -> ScenarioConfig:
    return parse_scenario(_read(path))


def load_sweep(path: str | Path) -> SweepSpec:
    return parse_sweep(_read(path))


def _read(path) -> bytes:
    return Path(path).read_bytes()


def scenario_json(config: ScenarioConfig) -> str:
    return json.dumps(config.model_dump(mode="json", exclude_none=True), indent=2, sort_keys=True)
