"""Steady-state swap-rate programs over a generation graph.

For every unordered pair ``(x, y)`` the model requires departures not to
outpace arrivals::

    D(x,y) * (c(x,y) + sum_i sigma_x(i,y) + sigma_y(i,x))
        <= L(x,y) * (g(x,y) / R + sum_i sigma_i(x,y))

where ``sigma_i(x,y)`` is the rate at which node ``i`` swaps ``(i,x)`` and
``(i,y)`` into ``(x,y)``. Generation ``g`` and consumption ``c`` enter as
constants or as bounded variables depending on the objective.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from itertools import combinations
from typing import Literal, Mapping

from ..errors import DegenerateDemandError, LpBuildError
from ..inventory import CostTable
from ..topology import GenerationGraph, PairKey
from .model import LpModel, LpSolution
from .simplex import simplex_solve


def sigma_name(i: int, x: int, y: int) -> str:
    lo, hi = PairKey.of(x, y)
    return f"sigma_{i}_{lo}_{hi}"


def g_name(x: int, y: int) -> str:
    return "g_%d_%d" % PairKey.of(x, y)


def c_name(x: int, y: int) -> str:
    return "c_%d_%d" % PairKey.of(x, y)


@dataclass(frozen=True)
class RateProblem:
    """Generation graph, desired consumption rates, and costs.

    With ``generation="variable"`` the graph rates act as caps ``gamma``;
    with ``consumption="fixed"`` the demand rates are consumed exactly.
    """

    graph: GenerationGraph
    demand: Mapping[PairKey, float]
    costs: CostTable = field(default_factory=CostTable)
    generation: Literal["fixed", "variable"] = "fixed"
    consumption: Literal["fixed", "variable", "alpha"] = "variable"

    def __post_init__(self):
        clean = {}
        for key, rate in self.demand.items():
            key = PairKey.of(*key)
            if rate < 0:
                raise LpBuildError(f"negative demand {rate} for pair {key}")
            if key.hi >= self.graph.node_count:
                raise LpBuildError(f"demand pair {key} outside the graph")
            if rate > 0:
                clean[key] = float(rate)
        object.__setattr__(self, "demand", dict(sorted(clean.items())))


def build_balance_model(prob: RateProblem) -> LpModel:
    graph, costs = prob.graph, prob.costs
    n = graph.node_count
    comp = graph.components()
    for key in prob.demand:
        if comp[key.lo] != comp[key.hi]:
            raise LpBuildError(f"demand {key} spans disconnected components")

    model = LpModel("balance")
    for x, y in combinations(range(n), 2):
        for i in range(n):
            if i != x and i != y:
                model.add_variable(sigma_name(i, x, y))
    if prob.generation == "variable":
        for key, gamma in graph.rates.items():
            model.add_variable(g_name(*key), 0.0, gamma)
    if prob.consumption == "variable":
        for key, kappa in prob.demand.items():
            model.add_variable(c_name(*key), 0.0, kappa)
    elif prob.consumption == "alpha":
        model.add_variable("alpha", 0.0, 1.0)

    qec = costs.qec_overhead
    for x, y in combinations(range(n), 2):
        key = PairKey(x, y)
        d, surv = costs.distill_of(x, y), costs.survival_of(x, y)
        coeffs: dict[str, float] = {}
        rhs = 0.0
        for i in range(n):
            if i in (x, y):
                continue
            coeffs[sigma_name(i, x, y)] = coeffs.get(sigma_name(i, x, y), 0.0) - surv
            for name in (sigma_name(x, i, y), sigma_name(y, i, x)):
                coeffs[name] = coeffs.get(name, 0.0) + d
        gen = graph.rates.get(key, 0.0)
        if gen > 0:
            if prob.generation == "variable":
                coeffs[g_name(x, y)] = -surv / qec
            else:
                rhs += surv * gen / qec
        kappa = prob.demand.get(key, 0.0)
        if kappa > 0:
            if prob.consumption == "variable":
                coeffs[c_name(x, y)] = float(d)
            elif prob.consumption == "alpha":
                coeffs["alpha"] = d * kappa
            else:
                rhs -= d * kappa
        model.add_constraint(coeffs, "<=", rhs, name=f"bal_{x}_{y}")
    return model


def balance_residuals(prob: RateProblem, sol: LpSolution) -> dict[PairKey, float]:
    """``r+ - r-`` per pair, re-evaluated from solved rates (non-negative when feasible)."""
    graph, costs = prob.graph, prob.costs
    n = graph.node_count
    out = {}
    for x, y in combinations(range(n), 2):
        key = PairKey(x, y)
        if prob.generation == "variable":
            gen = sol[g_name(x, y)]
        else:
            gen = graph.rates.get(key, 0.0)
        out[key] = (costs.survival_of(x, y) * (gen / costs.qec_overhead
                                               + sum(sol[sigma_name(i, x, y)] for i in range(n) if i not in key))
                    - costs.distill_of(x, y) * (consumption_of(prob, sol, key)
                                                + sum(sol[sigma_name(x, i, y)] + sol[sigma_name(y, i, x)]
                                                      for i in range(n) if i not in key)))
    return out


def consumption_of(prob: RateProblem, sol: LpSolution, key: PairKey) -> float:
    kappa = prob.demand.get(key, 0.0)
    if kappa == 0:
        return 0.0
    if prob.consumption == "variable":
        return sol[c_name(*key)]
    if prob.consumption == "alpha":
        return sol["alpha"] * kappa
    return kappa


def max_total_consumption_model(prob: RateProblem) -> LpModel:
    prob = replace(prob, consumption="variable")
    model = build_balance_model(prob)
    model.set_objective({c_name(*k): 1.0 for k in prob.demand}, maximize=True)
    return model


def solve_max_total_consumption(prob: RateProblem) -> LpSolution:
    """Maximise the summed consumption rate, each pair capped at its demand."""
    return simplex_solve(max_total_consumption_model(prob))


def max_alpha_model(prob: RateProblem) -> LpModel:
    if not prob.demand:
        raise DegenerateDemandError("every demand rate is zero")
    model = build_balance_model(replace(prob, consumption="alpha"))
    model.set_objective({"alpha": 1.0}, maximize=True)
    return model


def solve_max_alpha(prob: RateProblem) -> LpSolution:
    """Largest common fraction ``alpha <= 1`` of every demand that can be served."""
    return simplex_solve(max_alpha_model(prob))


def max_min_consumption_model(prob: RateProblem) -> LpModel:
    if not prob.demand:
        raise DegenerateDemandError("every demand rate is zero")
    prob = replace(prob, consumption="variable")
    model = build_balance_model(prob)
    model.add_variable("t", 0.0, max(prob.demand.values()))
    for key in prob.demand:
        model.add_constraint({"t": 1.0, c_name(*key): -1.0}, "<=", 0.0, name=f"floor_{key.lo}_{key.hi}")
    model.set_objective({"t": 1.0}, maximize=True)
    return model


def solve_max_min_consumption(prob: RateProblem) -> LpSolution:
    """Maximise the smallest served consumption rate over demanded pairs."""
    return simplex_solve(max_min_consumption_model(prob))


def min_total_generation_model(prob: RateProblem) -> LpModel:
    model = build_balance_model(replace(prob, generation="variable", consumption="fixed"))
    model.set_objective({g_name(*k): 1.0 for k in prob.graph.rates}, maximize=False)
    return model


def solve_min_total_generation(prob: RateProblem) -> LpSolution:
    """Smallest summed generation (below the graph caps) sustaining the demand exactly."""
    return simplex_solve(min_total_generation_model(prob))


def min_max_generation_model(prob: RateProblem) -> LpModel:
    model = build_balance_model(replace(prob, generation="variable", consumption="fixed"))
    cap = max(prob.graph.rates.values(), default=0.0)
    model.add_variable("t", 0.0, cap if cap > 0 else math.inf)
    for key in prob.graph.rates:
        model.add_constraint({g_name(*key): 1.0, "t": -1.0}, "<=", 0.0, name=f"gmax_{key.lo}_{key.hi}")
    model.set_objective({"t": 1.0}, maximize=False)
    return model


def solve_min_max_generation(prob: RateProblem) -> LpSolution:
    """Smallest uniform cap on per-edge generation sustaining the demand exactly."""
    return simplex_solve(min_max_generation_model(prob))


def lexicographic(prob: RateProblem, use_alpha: bool = False):
    """Both phases as ``((model1, solution1), (model2, solution2))``.

    Phase two fixes each pair's consumption at its phase-one rate; if phase
    one is not optimal, phase two repeats its status.
    """
    prob = replace(prob, generation="variable")
    model1 = max_alpha_model(prob) if use_alpha else max_total_consumption_model(prob)
    first = simplex_solve(model1)
    if not first.optimal:
        return (model1, first), (model1, first)
    served = {}
    for key in prob.demand:
        rate = first["alpha"] * prob.demand[key] if use_alpha else first[c_name(*key)]
        served[key] = max(0.0, rate)
    model2 = min_total_generation_model(replace(prob, demand=served))
    return (model1, first), (model2, simplex_solve(model2))


def solve_lexicographic(prob: RateProblem, use_alpha: bool = False) -> tuple[LpSolution, LpSolution]:
    """Maximise consumption, then minimise total generation at the consumption found."""
    (_, first), (_, second) = lexicographic(prob, use_alpha)
    return first, second
