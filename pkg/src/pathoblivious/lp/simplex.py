"""Dense two-phase primal simplex.

Columns are priced by steepest edge, with Bland's anti-cycling rule taking
over on long degenerate stretches. A tiny relaxation of the right-hand side
keeps such stretches rare; the exact rhs is swapped back in at the end and
any infeasibility it exposes is repaired by dual simplex steps.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..errors import SolverStalledError
from .model import LpModel, LpSolution

logger = logging.getLogger(__name__)

PIVOT_TOL = 1e-9
OPTIMALITY_TOL = 1e-9
FEASIBILITY_TOL = 1e-9
VERIFY_TOL = 1e-7
BLAND_AFTER = 20  # consecutive degenerate pivots before switching to Bland pricing
PERTURBATION = 1e-7


class _StandardForm:
    """``min c.x  s.t.  A x = b, x >= 0, b >= 0`` plus the map back to model variables.

    Each model variable becomes ``shift + sign * column`` (or a difference of
    two columns when free); finite upper bounds of shifted variables become
    extra ``<=`` rows.
    """

    def __init__(self, model: LpModel):
        self.names = list(model.variables)
        index = {}
        cols = 0
        self.recover = []  # per variable: (shift, [(col, sign), ...])
        bound_rows = []
        for name in self.names:
            var = model.variables[name]
            if var.lb > -math.inf:
                self.recover.append((var.lb, [(cols, 1.0)]))
                if var.ub < math.inf:
                    bound_rows.append((cols, var.ub - var.lb))
                cols += 1
            elif var.ub < math.inf:
                self.recover.append((var.ub, [(cols, -1.0)]))
                cols += 1
            else:
                self.recover.append((0.0, [(cols, 1.0), (cols + 1, -1.0)]))
                cols += 2
            index[name] = len(self.recover) - 1

        rows = []  # (dense coeff row over structural columns, sense, rhs)
        for con in model.constraints:
            row = np.zeros(cols)
            rhs = con.rhs
            for name, a in con.coeffs.items():
                shift, parts = self.recover[index[name]]
                rhs -= a * shift
                for col, sign in parts:
                    row[col] += a * sign
            rows.append((row, con.sense, rhs))
        for col, width in bound_rows:
            row = np.zeros(cols)
            row[col] = 1.0
            rows.append((row, "<=", width))

        cost = np.zeros(cols)
        flip = -1.0 if model.maximize else 1.0
        for name, a in model.objective.items():
            _, parts = self.recover[index[name]]
            for col, sign in parts:
                cost[col] += flip * a * sign

        # slacks and artificials
        m = len(rows)
        n_slack = sum(1 for _, s, _ in rows if s != "=")
        A = np.zeros((m, cols + n_slack))
        b = np.zeros(m)
        slack = cols
        need_artificial = []
        self.basis = [-1] * m
        for r, (row, sense, rhs) in enumerate(rows):
            A[r, :cols] = row
            b[r] = rhs
            if sense != "=":
                A[r, slack] = 1.0 if sense == "<=" else -1.0
                slack_col = slack
                slack += 1
            else:
                slack_col = None
            if b[r] < 0:
                A[r] = -A[r]
                b[r] = -b[r]
            if slack_col is not None and A[r, slack_col] > 0:
                self.basis[r] = slack_col
            else:
                need_artificial.append(r)
        self.n_real = A.shape[1]
        art = np.zeros((m, len(need_artificial)))
        for k, r in enumerate(need_artificial):
            art[r, k] = 1.0
            self.basis[r] = self.n_real + k
        self.A = np.hstack([A, art]) if need_artificial else A
        self.b = b
        self.cost = np.concatenate([cost, np.zeros(self.n_real - cols)])
        self.n_artificial = len(need_artificial)
        # relax rows with a basic slack by distinct tiny amounts to break ties
        # between degenerate vertices; the true rhs is restored at the end
        slack_rows = np.array([self.basis[r] < self.n_real for r in range(m)], dtype=bool)
        shake = np.random.default_rng(0).uniform(0.5, 1.0, m)
        self.b_relaxed = b + np.where(slack_rows, PERTURBATION * (1.0 + np.abs(b)) * shake, 0.0)


class _Tableau:
    """Tableau with two right-hand sides: the relaxed one that drives pivoting
    (column ``n``) and the true one carried along for the final values
    (column ``n + 1``)."""

    def __init__(self, A, b_relaxed, b, basis):
        m, n = A.shape
        self.T = np.zeros((m + 1, n + 2))
        self.T[:m, :n] = A
        self.T[:m, n] = b_relaxed
        self.T[:m, n + 1] = b
        self.basis = list(basis)
        self.m, self.n = m, n
        self.iterations = 0
        self.budget = 0

    def set_cost(self, cost):
        T, m = self.T, self.m
        T[m, :] = 0.0
        T[m, :self.n] = cost
        for r, j in enumerate(self.basis):
            if T[m, j] != 0.0:
                T[m] -= T[m, j] * T[r]

    def pivot(self, r, j):
        if self.iterations >= self.budget:
            raise SolverStalledError(f"simplex exceeded {self.budget} pivots")
        T = self.T
        T[r] /= T[r, j]
        rows = np.flatnonzero(T[:, j])
        rows = rows[rows != r]
        if rows.size:
            # entering columns are sparse here, so only touch rows that change
            T[rows] -= np.outer(T[rows, j], T[r])
        T[:, j] = 0.0
        T[r, j] = 1.0
        self.basis[r] = j
        self.iterations += 1

    def run(self, allowed):
        """Primal iterations to optimality; returns False if unbounded.

        Columns are priced by steepest edge until ``BLAND_AFTER``
        consecutive degenerate pivots, then by Bland's
        lowest-index rule until a pivot makes progress again. A cycle would
        consist of degenerate pivots only and so would run under Bland's
        rule, which cannot cycle.
        """
        T, m = self.T, self.m
        stalled = 0
        while True:
            reduced = T[m, :self.n]
            entering = np.flatnonzero((reduced < -OPTIMALITY_TOL) & allowed)
            if entering.size == 0:
                return True
            bland = stalled >= BLAND_AFTER
            if bland:
                j = int(entering[0])
            else:
                # steepest edge: reduced cost per unit length of the edge direction
                norms = np.sqrt(1.0 + np.einsum("ij,ij->j", T[:m, entering], T[:m, entering]))
                j = int(entering[np.argmin(reduced[entering] / norms)])
            column = T[:m, j]
            rows = np.flatnonzero(column > PIVOT_TOL)
            if rows.size == 0:
                return False
            ratios = T[rows, self.n] / column[rows]
            best = ratios.min()
            ties = rows[ratios <= best + PIVOT_TOL * max(1.0, abs(best))]
            if bland:
                r = min(ties, key=lambda i: self.basis[i])
            else:
                r = ties[np.argmax(column[ties])]  # largest pivot element among ties
            stalled = stalled + 1 if best <= PIVOT_TOL else 0
            self.pivot(int(r), j)

    def restore_rhs(self, allowed):
        """Swap in the true rhs and repair primal feasibility by dual simplex.

        The basis is optimal, hence dual feasible, for the relaxed rhs and
        stays so; returns False if the true rhs turns out infeasible.
        """
        T, m, n = self.T, self.m, self.n
        T[:, n] = T[:, n + 1]
        while True:
            values = T[:m, n]
            r = int(np.argmin(values))
            if values[r] >= -FEASIBILITY_TOL * max(1.0, float(np.abs(values).max())):
                T[:m, n] = np.maximum(values, 0.0)
                return True
            row = T[r, :n]
            cand = np.flatnonzero((row < -PIVOT_TOL) & allowed)
            if cand.size == 0:
                return False
            ratios = T[m, cand] / -row[cand]
            j = int(cand[np.argmin(ratios)])
            self.pivot(r, j)

    def drop_row(self, r):
        self.T = np.delete(self.T, r, axis=0)
        del self.basis[r]
        self.m -= 1


def simplex_solve(model: LpModel) -> LpSolution:
    """Solve ``model``; the returned optimum is re-checked against every constraint."""
    sf = _StandardForm(model)
    m, n = sf.A.shape
    tab = _Tableau(sf.A, sf.b_relaxed, sf.b, sf.basis)
    tab.budget = 50 * (n + m)

    if sf.n_artificial:
        phase1 = np.zeros(n)
        phase1[sf.n_real:] = 1.0
        tab.set_cost(phase1)
        tab.run(np.ones(n, dtype=bool))
        infeasibility = -tab.T[tab.m, n]
        if infeasibility > FEASIBILITY_TOL * max(1.0, float(np.abs(sf.b).max(initial=0.0))):
            return LpSolution("infeasible", iterations=tab.iterations)
        # drive zero-level artificials out of the basis, dropping redundant rows
        r = 0
        while r < tab.m:
            if tab.basis[r] >= sf.n_real:
                row = tab.T[r, :sf.n_real]
                cols = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if cols.size:
                    tab.pivot(r, int(cols[np.argmax(np.abs(row[cols]))]))
                else:
                    tab.drop_row(r)
                    continue
            r += 1

    allowed = np.zeros(n, dtype=bool)
    allowed[:sf.n_real] = True
    cost = np.zeros(n)
    cost[:sf.n_real] = sf.cost
    tab.set_cost(cost)
    if not tab.run(allowed):
        return LpSolution("unbounded", iterations=tab.iterations)
    if not tab.restore_rhs(allowed):
        return LpSolution("infeasible", iterations=tab.iterations)
    # the dual repair can leave reduced costs slightly off; finish with primal steps
    if not tab.run(allowed):
        return LpSolution("unbounded", iterations=tab.iterations)

    x = np.zeros(n)
    for r, j in enumerate(tab.basis):
        x[j] = tab.T[r, n]
    x[np.abs(x) < 1e-12] = 0.0
    values = {}
    for name, (shift, parts) in zip(sf.names, sf.recover):
        values[name] = float(shift + sum(sign * x[col] for col, sign in parts))
    objective = model.objective_value(values)
    violation = model.max_violation(values)
    if violation > VERIFY_TOL:
        raise ArithmeticError(f"simplex solution violates the model by {violation:.3g}")
    logger.debug("simplex: %d pivots, objective %.9g", tab.iterations, objective)
    return LpSolution("optimal", objective, values, tab.iterations)
