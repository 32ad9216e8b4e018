"""Mutable simple undirected graph with stable, never-reused vertex ids."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import EdgeStateError, InvalidArgumentError, InvalidVertexError

Edge = tuple[int, int]


def normalize_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class Graph:
    """Adjacency-set graph.

    Ids are handed out by a monotone counter, so a deleted id is never
    produced again by :meth:`add_vertex`. Every query that returns a
    sequence returns it sorted, which keeps seeded runs reproducible.
    """

    __slots__ = ("_adj", "_next_id", "_m")

    def __init__(self, n: int = 0):
        self._adj: dict[int, set[int]] = {v: set() for v in range(n)}
        self._next_id = n
        self._m = 0

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        g = cls(n)
        for u, v in edges:
            if u != v and not g.has_edge(u, v):
                g.add_edge(u, v)
        return g

    # -- size and membership -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    @property
    def next_id(self) -> int:
        return self._next_id

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[int]:
        return iter(sorted(self._adj))

    def vertices(self) -> list[int]:
        return sorted(self._adj)

    def edges(self) -> list[Edge]:
        return sorted((u, v) for u, nb in self._adj.items() for v in nb if u < v)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def copy(self) -> "Graph":
        g = Graph.__new__(Graph)
        g._adj = {v: set(nb) for v, nb in self._adj.items()}
        g._next_id = self._next_id
        g._m = self._m
        return g

    def _check(self, v: int) -> set[int]:
        try:
            return self._adj[v]
        except (KeyError, TypeError):
            raise InvalidVertexError(f"vertex {v!r} is not live") from None

    # -- mutation ------------------------------------------------------------

    def add_vertex(self) -> int:
        v = self._next_id
        self._next_id += 1
        self._adj[v] = set()
        return v

    def restore_vertex(self, v: int) -> None:
        """Re-create a specific id. Only for exact replay and undo."""
        if v in self._adj or v < 0:
            raise InvalidVertexError(f"vertex {v} cannot be restored")
        self._adj[v] = set()
        if v >= self._next_id:
            self._next_id = v + 1

    def remove_vertex(self, v: int) -> None:
        nb = self._check(v)
        for u in nb:
            self._adj[u].discard(v)
        self._m -= len(nb)
        del self._adj[v]

    def add_edge(self, u: int, v: int) -> None:
        nu, nv = self._check(u), self._check(v)
        if u == v:
            raise EdgeStateError(f"self-loop on {u}")
        if v in nu:
            raise EdgeStateError(f"edge {{{u}, {v}}} already present")
        nu.add(v)
        nv.add(u)
        self._m += 1

    def remove_edge(self, u: int, v: int) -> None:
        nu, nv = self._check(u), self._check(v)
        if v not in nu:
            raise EdgeStateError(f"edge {{{u}, {v}}} not present")
        nu.discard(v)
        nv.discard(u)
        self._m -= 1

    def merge_vertices(self, group: Iterable[int]) -> int:
        """Replace ``group`` by one fresh vertex adjacent to N(group)."""
        members = set(group)
        if not members:
            raise InvalidArgumentError("cannot merge an empty vertex set")
        outside = self.open_neighborhood_of_set(members)
        for v in sorted(members):
            self.remove_vertex(v)
        fresh = self.add_vertex()
        for u in sorted(outside):
            self.add_edge(fresh, u)
        return fresh

    # -- queries -------------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return v in self._check(u)

    def degree(self, v: int) -> int:
        return len(self._check(v))

    def neighbors(self, v: int) -> set[int]:
        """Live neighbor set of ``v``. Callers must not mutate it."""
        return self._check(v)

    def sorted_neighbors(self, v: int) -> list[int]:
        return sorted(self._check(v))

    def closed_neighborhood(self, v: int) -> set[int]:
        return self._check(v) | {v}

    def open_neighborhood_of_set(self, group: Iterable[int]) -> set[int]:
        members = set(group)
        out: set[int] = set()
        for v in members:
            out |= self._check(v)
        return out - members

    def closed_neighborhood_of_set(self, group: Iterable[int]) -> set[int]:
        members = set(group)
        out = set(members)
        for v in members:
            out |= self._check(v)
        return out

    def is_independent_set(self, group: Iterable[int]) -> bool:
        members = set(group)
        return all(not (self._check(v) & members) for v in members)

    def is_clique(self, group: Iterable[int]) -> bool:
        members = set(group)
        return all(members - {v} <= self._check(v) for v in members)

    def induced_subgraph(self, group: Iterable[int]) -> "Graph":
        members = set(group)
        for v in members:
            self._check(v)
        g = Graph.__new__(Graph)
        g._adj = {v: self._adj[v] & members for v in members}
        g._next_id = self._next_id
        g._m = sum(len(nb) for nb in g._adj.values()) // 2
        return g

    def complement_of_induced(self, group: Iterable[int]) -> "Graph":
        members = set(group)
        for v in members:
            self._check(v)
        g = Graph.__new__(Graph)
        g._adj = {v: members - self._adj[v] - {v} for v in members}
        g._next_id = self._next_id
        g._m = sum(len(nb) for nb in g._adj.values()) // 2
        return g

    def ball(self, root: int, radius: int) -> set[int]:
        """All vertices within ``radius`` hops of ``root``."""
        self._check(root)
        if radius < 0:
            raise InvalidArgumentError("radius must be non-negative")
        seen = {root}
        frontier = deque([(root, 0)])
        while frontier:
            v, d = frontier.popleft()
            if d == radius:
                continue
            for u in self._adj[v]:
                if u not in seen:
                    seen.add(u)
                    frontier.append((u, d + 1))
        return seen

    def connected_components(self) -> list[list[int]]:
        seen: set[int] = set()
        comps = []
        for v in sorted(self._adj):
            if v in seen:
                continue
            comp = self.ball(v, len(self._adj))
            seen |= comp
            comps.append(sorted(comp))
        return comps

    def validate(self) -> None:
        """Assert symmetry, no self-loops, and a consistent edge count."""
        total = 0
        for v, nb in self._adj.items():
            assert v not in nb, f"self-loop at {v}"
            assert v < self._next_id, f"vertex {v} beyond id counter"
            for u in nb:
                assert u in self._adj, f"edge {v}-{u} to dead vertex"
                assert v in self._adj[u], f"asymmetric edge {v}-{u}"
            total += len(nb)
        assert total == 2 * self._m, "edge counter out of sync"


class Mode(str, enum.Enum):
    COUNTING = "counting"
    BUDGET = "budget"


@dataclass
class Instance:
    """A graph with a signed budget counter.

    In counting mode ``k`` starts at 0 and drifts negative as rules remove
    forced cover vertices, so ``-k`` of an emptied instance is the cover
    number of the input.
    """

    graph: Graph = field(default_factory=Graph)
    k: int = 0
    mode: Mode = Mode.COUNTING

    def copy(self) -> "Instance":
        return Instance(self.graph.copy(), self.k, self.mode)

    @property
    def counting(self) -> bool:
        return self.mode is Mode.COUNTING
