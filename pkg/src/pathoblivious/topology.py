"""Generation graphs: cycles, random spanning subgraphs of a wraparound grid,
and the shortest-path queries used by the planned-path baseline."""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

from .errors import InvalidPairError, InvalidTopologyError, UnreachableError


class PairKey(NamedTuple):
    """Canonical unordered node pair, ``lo < hi``."""

    lo: int
    hi: int

    @classmethod
    def of(cls, x: int, y: int) -> "PairKey":
        if x == y:
            raise InvalidPairError(f"pair ({x},{y}) has coincident endpoints")
        return cls(x, y) if x < y else cls(y, x)

    def __str__(self):
        return f"{self.lo}-{self.hi}"


class UnionFind:
    """Disjoint sets over ``0..size-1`` with path halving and union by size."""

    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size
        self.components = size

    def find(self, a: int) -> int:
        parent = self.parent
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        self.components -= 1
        return True


@dataclass(frozen=True)
class GenerationGraph:
    """Undirected graph of node pairs that generate Bell pairs directly.

    ``rates`` maps each edge to its generation rate in pairs per tick; an
    edge is present iff its rate is positive.
    """

    node_count: int
    rates: Mapping[PairKey, float]
    _adjacency: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.node_count < 1:
            raise InvalidTopologyError("graph needs at least one node")
        clean = {}
        for key, rate in self.rates.items():
            key = PairKey.of(*key)
            if not (0 <= key.lo and key.hi < self.node_count):
                raise InvalidTopologyError(f"edge {key} outside 0..{self.node_count - 1}")
            if rate < 0:
                raise InvalidTopologyError(f"edge {key} has negative rate {rate}")
            if rate > 0:
                clean[key] = float(rate)
        clean = dict(sorted(clean.items()))
        adj = [[] for _ in range(self.node_count)]
        for a, b in clean:
            adj[a].append(b)
            adj[b].append(a)
        object.__setattr__(self, "rates", clean)
        object.__setattr__(self, "_adjacency", tuple(tuple(sorted(n)) for n in adj))

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]], rate: float = 1.0):
        rates = {}
        for x, y in edges:
            key = PairKey.of(x, y)
            if key in rates:
                raise InvalidTopologyError(f"duplicate edge {key}")
            rates[key] = rate
        return cls(node_count, rates)

    @property
    def edges(self) -> list[PairKey]:
        return list(self.rates)

    def rate(self, x: int, y: int) -> float:
        if x == y:
            return 0.0
        return self.rates.get(PairKey.of(x, y), 0.0)

    def neighbors(self, x: int) -> tuple[int, ...]:
        return self._adjacency[x]

    def components(self) -> list[int]:
        """Component label (smallest member) for every node."""
        uf = UnionFind(self.node_count)
        for a, b in self.rates:
            uf.union(a, b)
        roots = [uf.find(v) for v in range(self.node_count)]
        smallest = {}
        for v, r in enumerate(roots):
            smallest.setdefault(r, v)
        return [smallest[r] for r in roots]


def build_cycle(n: int) -> GenerationGraph:
    """Cycle on ``n`` nodes with unit rates: edges ``(x, x+1 mod n)``."""
    if n < 3:
        raise InvalidTopologyError(f"cycle needs n >= 3, got {n}")
    return GenerationGraph.from_edges(n, ((x, (x + 1) % n) for x in range(n)))


def build_line(n: int) -> GenerationGraph:
    """Path ``0-1-...-(n-1)`` with unit rates."""
    if n < 2:
        raise InvalidTopologyError(f"line needs n >= 2, got {n}")
    return GenerationGraph.from_edges(n, ((x, x + 1) for x in range(n - 1)))


def torus_candidate_edges(side: int) -> list[PairKey]:
    """All edges of the ``side x side`` wraparound grid, node id ``row*side + col``."""
    if side < 3:
        raise InvalidTopologyError(f"torus grid needs side >= 3, got {side}")
    cands = set()
    for r in range(side):
        for c in range(side):
            v = r * side + c
            cands.add(PairKey.of(v, r * side + (c + 1) % side))
            cands.add(PairKey.of(v, ((r + 1) % side) * side + c))
    return sorted(cands)


def build_torus_grid(side: int, rng: random.Random) -> GenerationGraph:
    """Random connected subgraph of the wraparound grid.

    Candidate edges are shuffled once and added in that order until the
    graph first becomes connected, so the final edge is always a bridge
    between the last two components.
    """
    cands = torus_candidate_edges(side)
    rng.shuffle(cands)
    n = side * side
    uf = UnionFind(n)
    chosen = []
    for key in cands:
        chosen.append(key)
        uf.union(*key)
        if uf.components == 1:
            break
    return GenerationGraph(n, {key: 1.0 for key in chosen})


def is_connected(graph: GenerationGraph) -> bool:
    return len(set(graph.components())) == 1


def bfs_distances(graph: GenerationGraph, source: int) -> list[int | None]:
    dist: list[int | None] = [None] * graph.node_count
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors(u):
            if dist[v] is None:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_path_len(graph: GenerationGraph, x: int, y: int) -> int:
    """Hop count of a shortest path between ``x`` and ``y``."""
    for v in (x, y):
        if not 0 <= v < graph.node_count:
            raise InvalidPairError(f"node {v} outside 0..{graph.node_count - 1}")
    hops = bfs_distances(graph, x)[y]
    if hops is None:
        raise UnreachableError(f"nodes {x} and {y} lie in different components")
    return hops
