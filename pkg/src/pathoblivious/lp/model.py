"""Generic bounded-variable linear program, its solution, and text exporters."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterable, Literal, Mapping

Sense = Literal["<=", "=", ">="]


@dataclass
class Variable:
    name: str
    lb: float = 0.0
    ub: float = math.inf


@dataclass
class Constraint:
    name: str
    coeffs: dict[str, float]
    sense: Sense
    rhs: float

    def activity(self, values: Mapping[str, float]) -> float:
        return sum(a * values.get(v, 0.0) for v, a in self.coeffs.items())

    def violation(self, values: Mapping[str, float]) -> float:
        lhs = self.activity(values)
        if self.sense == "<=":
            return max(0.0, lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


class LpModel:
    """Variables with bounds, linear constraints, and a linear objective.

    Insertion order of variables and constraints is preserved; it fixes
    column order in the solver and line order in exports.
    """

    def __init__(self, name: str = "model"):
        self.name = name
        self.variables: dict[str, Variable] = {}
        self.constraints: list[Constraint] = []
        self.objective: dict[str, float] = {}
        self.maximize = False

    def add_variable(self, name: str, lb: float = 0.0, ub: float = math.inf) -> str:
        if name in self.variables:
            raise ValueError(f"duplicate variable {name!r}")
        if lb > ub:
            raise ValueError(f"variable {name!r} has lb {lb} > ub {ub}")
        self.variables[name] = Variable(name, float(lb), float(ub))
        return name

    def add_constraint(self, coeffs: Mapping[str, float], sense: Sense, rhs: float,
                       name: str | None = None) -> Constraint:
        if sense not in ("<=", "=", ">="):
            raise ValueError(f"unknown relation {sense!r}")
        unknown = [v for v in coeffs if v not in self.variables]
        if unknown:
            raise ValueError(f"constraint references undeclared variables {unknown}")
        con = Constraint(name or f"c{len(self.constraints) + 1}",
                         {v: float(a) for v, a in coeffs.items() if a != 0}, sense, float(rhs))
        self.constraints.append(con)
        return con

    def set_objective(self, coeffs: Mapping[str, float], maximize: bool = False):
        unknown = [v for v in coeffs if v not in self.variables]
        if unknown:
            raise ValueError(f"objective references undeclared variables {unknown}")
        self.objective = {v: float(a) for v, a in coeffs.items() if a != 0}
        self.maximize = maximize

    def objective_value(self, values: Mapping[str, float]) -> float:
        return sum(a * values.get(v, 0.0) for v, a in self.objective.items())

    def max_violation(self, values: Mapping[str, float]) -> float:
        worst = 0.0
        for con in self.constraints:
            worst = max(worst, con.violation(values) / (1.0 + abs(con.rhs)))
        for var in self.variables.values():
            x = values.get(var.name, 0.0)
            worst = max(worst, var.lb - x, x - var.ub)
        return worst


@dataclass
class LpSolution:
    status: Literal["optimal", "infeasible", "unbounded"]
    objective: float | None = None
    values: dict[str, float] = field(default_factory=dict)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"

    def __getitem__(self, name: str) -> float:
        return self.values.get(name, 0.0)


def _num(v: float) -> str:
    if v == 0:
        v = 0.0  # no "-0"
    return format(v, ".17g")


def _terms(coeffs: Mapping[str, float]) -> list[str]:
    return [("+" if a >= 0 else "-") + _num(abs(a)) + " " + v for v, a in coeffs.items()]


def _wrap(head: str, chunks: Iterable[str], width: int = 78) -> list[str]:
    lines, line = [], head
    for chunk in chunks:
        if len(line) + 1 + len(chunk) > width and line.strip():
            lines.append(line)
            line = "   " + chunk
        else:
            line = f"{line} {chunk}" if line else chunk
    lines.append(line)
    return lines


def export_lp_text(model: LpModel) -> str:
    """CPLEX LP-format rendering; identical models give identical text."""
    out = ["Maximize" if model.maximize else "Minimize"]
    placeholder = ["+0 " + next(iter(model.variables))] if model.variables else []
    out += _wrap(" obj:", _terms(model.objective) or placeholder)
    if model.constraints:
        out.append("Subject To")
        for con in model.constraints:
            terms = _terms(con.coeffs) or placeholder
            out += _wrap(f" {con.name}:", terms + [f"{con.sense} {_num(con.rhs)}"])
    out.append("Bounds")
    for var in model.variables.values():
        if var.lb == -math.inf and var.ub == math.inf:
            out.append(f" {var.name} free")
        elif var.lb == var.ub:
            out.append(f" {var.name} = {_num(var.lb)}")
        else:
            lo = "-inf" if var.lb == -math.inf else _num(var.lb)
            hi = "+inf" if var.ub == math.inf else _num(var.ub)
            out.append(f" {lo} <= {var.name} <= {hi}")
    out.append("End")
    return "\n".join(out) + "\n"


def solution_rows(solution: LpSolution, block: str = "solution") -> list[tuple[str, str, str]]:
    rows = [(block, "status", solution.status)]
    if solution.optimal:
        rows.append((block, "objective", _clean(solution.objective)))
        rows += [(block, name, _clean(v)) for name, v in solution.values.items()]
    return rows


def _clean(v: float) -> str:
    v = round(v, 12)
    return _num(v)


def solution_csv(blocks: Iterable[tuple[str, LpSolution]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("block", "variable", "value"))
    for block, sol in blocks:
        writer.writerows(solution_rows(sol, block))
    return buf.getvalue()
