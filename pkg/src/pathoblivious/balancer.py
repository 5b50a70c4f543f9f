"""Max-min balancing swaps over a globally visible pair ledger.

A node ``x`` holding pairs with partners ``y`` and ``y'`` may join them when
the produced pair stays no larger than either input after the swap:

    C(y, y') + 1 <= min(C(x, y) - D(x, y), C(x, y') - D(x, y'))

Among such candidates the node executes the one whose target count is
smallest, ties going to the lexicographically smallest ``(y, y')``.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numba
import numpy as np

from .errors import InvalidCandidateError
from .inventory import CostTable, PairInventory


class SwapCandidate(NamedTuple):
    swapper: int
    left: int
    right: int
    target_count: int


def is_preferable(inv: PairInventory, costs: CostTable, x: int, y: int, y2: int) -> bool:
    if len({x, y, y2}) != 3:
        raise InvalidCandidateError(f"swap at {x} of ({y},{y2}) needs three distinct nodes")
    bound = min(inv.count(x, y) - costs.distill_of(x, y), inv.count(x, y2) - costs.distill_of(x, y2))
    return inv.count(y, y2) + 1 <= bound


def _candidate_mask(inv: PairInventory, costs: CostTable, x: int):
    counts = inv.matrix
    row = counts[x]
    partners = np.flatnonzero(row)
    if partners.size < 2:
        return partners, None, None
    surplus = row[partners] - costs.distill_matrix(inv.node_count)[x, partners]
    targets = counts[np.ix_(partners, partners)]
    ok = targets + 1 <= np.minimum.outer(surplus, surplus)
    return partners, np.triu(ok, 1), targets


def candidates(inv: PairInventory, costs: CostTable, x: int) -> list[SwapCandidate]:
    """Every preferable swap at ``x`` over pairs of its entanglement partners."""
    partners, ok, targets = _candidate_mask(inv, costs, x)
    if ok is None:
        return []
    out = []
    for a, b in zip(*np.nonzero(ok)):
        out.append(SwapCandidate(x, int(partners[a]), int(partners[b]), int(targets[a, b])))
    return out


@numba.njit(cache=True)
def _select(counts, distill, x):
    # (left, right, target) of the selected swap at x, or (-1, -1, -1)
    n = counts.shape[0]
    best_a, best_b, best_t = -1, -1, -1
    for a in range(n):
        ca = counts[x, a]
        if a == x or ca == 0:
            continue
        sa = ca - distill[x, a]
        if sa < 1:
            continue
        for b in range(a + 1, n):
            cb = counts[x, b]
            if b == x or cb == 0:
                continue
            t = counts[a, b]
            if best_t >= 0 and t >= best_t:
                continue
            sb = cb - distill[x, b]
            if t + 1 <= min(sa, sb):
                best_a, best_b, best_t = a, b, t
    return best_a, best_b, best_t


def select_swap(inv: PairInventory, costs: CostTable, x: int) -> SwapCandidate | None:
    """Preferable swap at ``x`` with the smallest target count, or None.

    Scanning ``(left, right)`` in lexicographic order and replacing only on
    a strictly smaller target realises the tie-break.
    """
    a, b, t = _select(inv.matrix, costs.distill_matrix(inv.node_count), x)
    if a < 0:
        return None
    return SwapCandidate(x, a, b, t)


def execute(inv: PairInventory, costs: CostTable, cand: SwapCandidate) -> None:
    inv.apply_swap(cand.swapper, cand.left, cand.right, costs)


def step_node(inv: PairInventory, costs: CostTable, x: int, attempts: int = 1) -> int:
    """Let ``x`` perform up to ``attempts`` selected swaps; returns swaps done."""
    done = 0
    while done < attempts:
        cand = select_swap(inv, costs, x)
        if cand is None:
            break
        execute(inv, costs, cand)
        done += 1
    return done


def run_to_quiescence(inv: PairInventory, costs: CostTable, node_order: Sequence[int]) -> int:
    """Sweep ``node_order`` (one swap per node per sweep) until a sweep does nothing.

    Every swap shrinks the ledger total by at least one, so this halts.
    """
    swaps = 0
    while True:
        sweep = sum(step_node(inv, costs, x) for x in node_order)
        if sweep == 0:
            return swaps
        swaps += sweep
