"""Metric rows, parameter sweeps over distillation or network size, and LP runs
driven by scenario configs."""

from __future__ import annotations

import csv
import io
import math
import os
import statistics
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import CycleTopology, GridTopology, LineTopology, ScenarioConfig, SweepSpec, validate_scenario
from .errors import ConfigError
from .lp import (
    RateProblem,
    lexicographic,
    max_alpha_model,
    max_min_consumption_model,
    max_total_consumption_model,
    min_max_generation_model,
    min_total_generation_model,
    simplex_solve,
)
from .lp.model import LpModel, LpSolution
from .sim import SimMetrics, run, scenario_consumers
from .topology import PairKey

RUN_COLUMNS = ("topology", "nodes", "distill", "seed", "mode", "requests", "satisfied", "swaps",
               "denominator", "overhead", "ticks", "residual_pairs", "complete")
SWEEP_COLUMNS = ("kind", "axis", "value") + RUN_COLUMNS + ("runs", "overhead_mean", "overhead_stddev")
NA = "NA"


def fmt_float(v: float | None) -> str:
    return NA if v is None or math.isnan(v) else repr(float(v))


def metrics_row(config: ScenarioConfig, m: SimMetrics) -> dict[str, str]:
    return {
        "topology": config.topology.kind,
        "nodes": str(config.node_count),
        "distill": str(config.costs.distill),
        "seed": str(config.seed),
        "mode": config.mode,
        "requests": str(config.request_count),
        "satisfied": str(m.consumptions_satisfied),
        "swaps": str(m.swaps_performed),
        "denominator": str(m.baseline_denominator),
        "overhead": fmt_float(m.swap_overhead),
        "ticks": str(m.ticks_elapsed),
        "residual_pairs": str(m.residual_total_pairs),
        "complete": "1" if m.complete else "0",
    }


def rows_csv(columns, rows) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, restval="", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def write_atomic(path: str | Path, text: str):
    """Write ``text`` to a sibling temp file, then rename it over ``path``."""
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def sweep_point(base: ScenarioConfig, axis: str, value: int, seed: int) -> ScenarioConfig:
    """``base`` with the swept parameter set to ``value`` and the given seed."""
    doc = base.model_dump(mode="json")
    doc["seed"] = seed
    if axis == "distill":
        doc["costs"]["distill"] = value
    else:
        topo = base.topology
        if isinstance(topo, GridTopology):
            side = math.isqrt(value)
            if side * side != value:
                raise ConfigError("values", f"grid node count {value} is not a perfect square")
            doc["topology"]["side"] = side
        elif isinstance(topo, (CycleTopology, LineTopology)):
            doc["topology"]["nodes"] = value
        else:
            raise ConfigError("base.topology", f"cannot sweep node count of a {topo.kind!r} topology")
    try:
        config = ScenarioConfig.model_validate(doc)
    except ValueError as exc:
        raise ConfigError(f"values[{value}]", str(exc).splitlines()[0]) from exc
    validate_scenario(config)
    return config


def _run_point(config: ScenarioConfig) -> SimMetrics:
    return run(config)


def aggregate(overheads: list[float | None]) -> tuple[int, float | None, float | None]:
    """Count, mean, and sample deviation of the defined overheads."""
    defined = [o for o in overheads if o is not None]
    mean = statistics.mean(defined) if defined else None
    stdev = statistics.stdev(defined) if len(defined) > 1 else None
    return len(defined), mean, stdev


def run_sweep(spec: SweepSpec, workers: int = 1) -> str:
    """CSV text: one row per (value, seed) in sweep-file order, then one aggregate row per value."""
    points = [(v, sweep_point(spec.base, spec.axis, v, s)) for v in spec.values for s in spec.seeds]
    configs = [cfg for _, cfg in points]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_point, configs))
    else:
        results = [_run_point(cfg) for cfg in configs]

    run_rows, agg_rows = [], []
    by_value: dict[int, list[float | None]] = {}
    for (value, cfg), m in zip(points, results):
        row = {"kind": "run", "axis": spec.axis, "value": str(value), **metrics_row(cfg, m)}
        run_rows.append(row)
        by_value.setdefault(value, []).append(m.swap_overhead)
    for value in spec.values:
        count, mean, stdev = aggregate(by_value[value])
        agg_rows.append({"kind": "aggregate", "axis": spec.axis, "value": str(value),
                         "runs": str(len(by_value[value])),
                         "overhead_mean": fmt_float(mean), "overhead_stddev": fmt_float(stdev)})
    return rows_csv(SWEEP_COLUMNS, run_rows + agg_rows)


OBJECTIVES = ("max-c", "max-alpha", "max-min-c", "min-g", "min-max-g", "lex")


def rate_problem(config: ScenarioConfig) -> RateProblem:
    """LP instance for a scenario: explicit demand, or the scenario consumers at a common rate."""
    graph = validate_scenario(config)
    if config.lp.demand is not None:
        demand = {PairKey.of(*d.pair): d.rate for d in config.lp.demand}
    else:
        demand = {key: config.lp.demand_rate for key in scenario_consumers(config, graph.node_count)}
    return RateProblem(graph, demand, config.costs.to_table(), generation=config.lp.generation)


def solve_objective(prob: RateProblem, objective: str) -> list[tuple[str, LpModel, LpSolution]]:
    """Labelled (model, solution) blocks; ``lex`` yields two."""
    if objective == "lex":
        (m1, s1), (m2, s2) = lexicographic(prob)
        return [("phase1", m1, s1), ("phase2", m2, s2)]
    builders = {
        "max-c": max_total_consumption_model,
        "max-alpha": max_alpha_model,
        "max-min-c": max_min_consumption_model,
        "min-g": min_total_generation_model,
        "min-max-g": min_max_generation_model,
    }
    if objective not in builders:
        raise ConfigError("objective", f"unknown objective {objective!r}; choose from {', '.join(OBJECTIVES)}")
    model = builders[objective](prob)
    return [("solution", model, simplex_solve(model))]
