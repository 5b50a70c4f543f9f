"""Planned-path baseline: nested-swapping cost along shortest generation paths,
and on-demand fulfillment over currently stored pairs (hybrid mode)."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .errors import (
    InsufficientPairsError,
    InvalidLengthError,
    PartialExecutionError,
    PathNotFoundError,
    UnreachableError,
)
from .inventory import CostTable, PairInventory
from .topology import GenerationGraph, bfs_distances


@dataclass(frozen=True)
class NestedCostParams:
    distill: int = 1

    def __post_init__(self):
        if self.distill < 1:
            raise ValueError(f"distillation count must be >= 1, got {self.distill}")


@lru_cache(maxsize=None)
def _nested(n: int, d: int) -> int:
    if n == 1:
        return 0
    if n == 2:
        return d
    return d * (_nested(n // 2, d) + _nested(n - n // 2, d))


def nested_swap_cost(n: int, params: NestedCostParams = NestedCostParams()) -> int:
    """Swaps for a nested-swapping chain over ``n`` hops.

    ``s(1) = 0``, ``s(2) = D``, ``s(n) = D * (s(floor(n/2)) + s(ceil(n/2)))``.
    The recursion carries no term for the joining swap itself, so for
    ``D = 1`` it yields fewer than ``n - 1`` swaps; it is kept as written
    because it defines the overhead denominator.
    """
    if n < 1:
        raise InvalidLengthError(f"path length must be >= 1, got {n}")
    return _nested(n, params.distill)


def baseline_denominator(events: Iterable[tuple[int, int]], graph: GenerationGraph,
                         params: NestedCostParams = NestedCostParams()) -> int:
    """Sum of nested-swapping costs over shortest generation paths of ``events``."""
    total = 0
    dist_cache: dict[int, list] = {}
    for x, y in events:
        if x not in dist_cache:
            dist_cache[x] = bfs_distances(graph, x)
        hops = dist_cache[x][y]
        if hops is None:
            raise UnreachableError(f"nodes {x} and {y} lie in different components")
        total += nested_swap_cost(hops, params)
    return total


def availability_path(inv: PairInventory, costs: CostTable, x: int, y: int) -> list[int] | None:
    """Shortest node path from ``x`` to ``y`` over pairs holding at least one use's worth."""
    counts = inv.matrix
    dmat = costs.distill_matrix(inv.node_count)
    prev = {x: None}
    queue = deque([x])
    while queue:
        u = queue.popleft()
        if u == y:
            break
        usable = (counts[u] >= dmat[u]) & (counts[u] > 0)
        for v in usable.nonzero()[0].tolist():
            if v not in prev:
                prev[v] = u
                queue.append(v)
    if y not in prev:
        return None
    path = [y]
    while path[-1] != x:
        path.append(prev[path[-1]])
    return path[::-1]


def nested_order(path: list[int]) -> list[tuple[int, int, int]]:
    """Swaps ``(swapper, left, right)`` joining ``path`` end to end by balanced splits."""
    order: list[tuple[int, int, int]] = []

    def join(lo: int, hi: int):
        if hi - lo < 2:
            return
        mid = (lo + hi) // 2
        join(lo, mid)
        join(mid, hi)
        order.append((path[mid], path[lo], path[hi]))

    join(0, len(path) - 1)
    return order


def hybrid_fulfill(inv: PairInventory, costs: CostTable, x: int, y: int) -> list[tuple[int, int, int]]:
    """Build one ``(x, y)`` pair by swapping along a shortest path of stored pairs.

    Swaps already executed stay executed if a later one runs short, since a
    real swap cannot be undone; the error carries that prefix.
    """
    path = availability_path(inv, costs, x, y)
    if path is None:
        raise PathNotFoundError(f"no stored-pair path between {x} and {y}")
    executed = []
    for swap in nested_order(path):
        try:
            inv.apply_swap(*swap, costs)
        except InsufficientPairsError as exc:
            raise PartialExecutionError(
                f"hybrid fulfillment of ({x},{y}) stopped after {len(executed)} swaps: {exc}",
                executed,
            ) from exc
        executed.append(swap)
    return executed
