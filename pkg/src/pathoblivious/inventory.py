"""Bell-pair ledger with generation, swap, and consumption transitions.

Using a pair costs its distillation overhead: a swap input or a consumption
of pair ``(u, v)`` drains ``D(u, v)`` stored units.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterator, Mapping

import numpy as np

from .errors import InsufficientPairsError, InvalidPairError, InvalidSwapError
from .topology import PairKey


@dataclass(frozen=True)
class CostTable:
    """Per-pair distillation counts and survival fractions, plus QEC overhead.

    Missing pairs fall back to ``default_distill`` / ``default_survival``.
    With every value at 1 the balance equations reduce to the lossless form.
    """

    distill: Mapping[PairKey, int] = field(default_factory=dict)
    survival: Mapping[PairKey, float] = field(default_factory=dict)
    qec_overhead: float = 1.0
    default_distill: int = 1
    default_survival: float = 1.0
    _matrices: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "distill", {PairKey.of(*k): int(v) for k, v in self.distill.items()})
        object.__setattr__(self, "survival", {PairKey.of(*k): float(v) for k, v in self.survival.items()})
        for key, d in [(None, self.default_distill), *self.distill.items()]:
            if d < 1:
                raise ValueError(f"distillation count must be >= 1 (pair {key}: {d})")
        for key, s in [(None, self.default_survival), *self.survival.items()]:
            if not 0 < s <= 1:
                raise ValueError(f"survival fraction must lie in (0, 1] (pair {key}: {s})")
        if self.qec_overhead < 1:
            raise ValueError(f"QEC overhead must be >= 1, got {self.qec_overhead}")

    @classmethod
    def uniform(cls, distill: int = 1, survival: float = 1.0, qec_overhead: float = 1.0):
        return cls(default_distill=distill, default_survival=survival, qec_overhead=qec_overhead)

    def distill_of(self, x: int, y: int) -> int:
        return self.distill.get(PairKey.of(x, y), self.default_distill)

    def survival_of(self, x: int, y: int) -> float:
        return self.survival.get(PairKey.of(x, y), self.default_survival)

    def distill_matrix(self, node_count: int) -> np.ndarray:
        """Dense symmetric matrix of distillation counts (zero diagonal), cached."""
        cached = self._matrices.get(node_count)
        if cached is not None:
            return cached
        m = np.full((node_count, node_count), self.default_distill, dtype=np.int64)
        for (a, b), d in self.distill.items():
            if b < node_count:
                m[a, b] = m[b, a] = d
        np.fill_diagonal(m, 0)
        m.flags.writeable = False
        self._matrices[node_count] = m
        return m


@dataclass
class LedgerStats:
    """Running totals for the conservation identity
    ``generated + produced == consumed_units + drained + residual``."""

    generated: int = 0
    consumed_units: int = 0
    consumptions: int = 0
    swaps: int = 0
    drained: int = 0
    produced: int = 0


class OperationLog:
    """Append-only event log; one CSV row per ledger transition."""

    header = ("tick", "kind", "a", "b", "c", "units")

    def __init__(self):
        self.rows: list[tuple] = []
        self.tick = 0

    def record(self, kind: str, a: int, b: int, c: int | None, units: int):
        self.rows.append((self.tick, kind, a, b, "" if c is None else c, units))

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.header)
        writer.writerows(self.rows)
        return buf.getvalue()


class PairInventory:
    """Counts of stored Bell pairs keyed by unordered node pair.

    Backed by a symmetric integer matrix so the balancer can scan a node's
    row in bulk; ``matrix`` is exposed read-only for that purpose.
    """

    def __init__(self, node_count: int, log: OperationLog | None = None):
        self.node_count = node_count
        self._counts = np.zeros((node_count, node_count), dtype=np.int64)
        self.total = 0
        self.stats = LedgerStats()
        self.log = log

    @property
    def matrix(self) -> np.ndarray:
        view = self._counts.view()
        view.flags.writeable = False
        return view

    def _check(self, *nodes: int):
        for v in nodes:
            if not 0 <= v < self.node_count:
                raise InvalidPairError(f"node {v} outside 0..{self.node_count - 1}")

    def count(self, x: int, y: int) -> int:
        if x == y:
            raise InvalidPairError(f"pair ({x},{y}) has coincident endpoints")
        self._check(x, y)
        return int(self._counts[x, y])

    def items(self) -> Iterator[tuple[PairKey, int]]:
        """Non-zero entries in canonical key order."""
        lo, hi = np.nonzero(np.triu(self._counts, 1))
        for a, b in zip(lo.tolist(), hi.tolist()):
            yield PairKey(a, b), int(self._counts[a, b])

    def as_dict(self) -> dict[PairKey, int]:
        return dict(self.items())

    def partners(self, x: int) -> list[int]:
        return np.flatnonzero(self._counts[x]).tolist()

    def _bump(self, x: int, y: int, delta: int):
        self._counts[x, y] += delta
        self._counts[y, x] += delta
        self.total += delta

    def add_pairs(self, x: int, y: int, k: int = 1) -> "PairInventory":
        if x == y:
            raise InvalidPairError(f"pair ({x},{y}) has coincident endpoints")
        self._check(x, y)
        if k < 1:
            raise ValueError(f"deposit must be positive, got {k}")
        self._bump(x, y, k)
        self.stats.generated += k
        if self.log is not None:
            self.log.record("gen", *PairKey.of(x, y), None, k)
        return self

    def apply_swap(self, i: int, x: int, y: int, costs: CostTable) -> "PairInventory":
        """Node ``i`` joins pairs ``(i, x)`` and ``(i, y)`` into one ``(x, y)``."""
        if i == x or i == y or x == y:
            raise InvalidSwapError(f"swap at {i} of ({x},{y}) needs three distinct nodes")
        self._check(i, x, y)
        dx, dy = costs.distill_of(i, x), costs.distill_of(i, y)
        have_x, have_y = int(self._counts[i, x]), int(self._counts[i, y])
        if have_x < dx or have_y < dy:
            raise InsufficientPairsError(
                f"swap at {i}: need {dx} of ({i},{x}) and {dy} of ({i},{y}), "
                f"have {have_x} and {have_y}"
            )
        self._bump(i, x, -dx)
        self._bump(i, y, -dy)
        self._bump(x, y, 1)
        st = self.stats
        st.swaps += 1
        st.drained += dx + dy
        st.produced += 1
        if self.log is not None:
            lo, hi = PairKey.of(x, y)
            self.log.record("swap", lo, hi, i, dx + dy)
        return self

    def consume(self, x: int, y: int, costs: CostTable) -> "PairInventory":
        if x == y:
            raise InvalidPairError(f"pair ({x},{y}) has coincident endpoints")
        self._check(x, y)
        d = costs.distill_of(x, y)
        have = int(self._counts[x, y])
        if have < d:
            raise InsufficientPairsError(f"consume ({x},{y}): need {d}, have {have}")
        self._bump(x, y, -d)
        self.stats.consumed_units += d
        self.stats.consumptions += 1
        if self.log is not None:
            self.log.record("consume", *PairKey.of(x, y), None, d)
        return self

    def copy(self) -> "PairInventory":
        other = PairInventory(self.node_count)
        other._counts = self._counts.copy()
        other.total = self.total
        other.stats = LedgerStats(**vars(self.stats))
        return other

    @classmethod
    def from_counts(cls, node_count: int, counts: Mapping[tuple[int, int], int]) -> "PairInventory":
        """Seed a ledger directly; entries count as generated pairs."""
        inv = cls(node_count)
        for (x, y), k in counts.items():
            if k:
                inv.add_pairs(x, y, k)
        return inv


def replay(node_count: int, log: OperationLog, costs: CostTable) -> PairInventory:
    """Rebuild a ledger by re-executing every logged transition."""
    inv = PairInventory(node_count)
    for _tick, kind, a, b, c, units in log.rows:
        if kind == "gen":
            inv.add_pairs(a, b, units)
        elif kind == "swap":
            inv.apply_swap(c, a, b, costs)
        elif kind == "consume":
            inv.consume(a, b, costs)
        else:
            raise ValueError(f"unknown log event {kind!r}")
    return inv
