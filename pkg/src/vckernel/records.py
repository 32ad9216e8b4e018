"""Rule sites, modification records, and the mutation recorder."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .graph import Edge, Graph, normalize_edge

FORWARD = "forward"
BACKWARD = "backward"


@dataclass(frozen=True)
class Site:
    """One concrete application of a rule.

    ``anchors`` are the vertices the rule is centred on; ``choice`` holds
    whatever else is needed to make the application deterministic
    (a permutation, a partition, an LP vector, ...). ``choice`` must be
    hashable; it is a tuple of ``(key, value)`` pairs.
    """

    rule: str
    anchors: tuple[int, ...]
    choice: tuple[tuple[str, Any], ...] = ()

    def get(self, key: str, default: Any = None) -> Any:
        for k, v in self.choice:
            if k == key:
                return v
        return default

    def to_json(self) -> dict[str, Any]:
        return {"rule": self.rule, "anchors": list(self.anchors), "choice": _jsonable(dict(self.choice))}

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "Site":
        choice = tuple((k, _hashable(v)) for k, v in data.get("choice", {}).items())
        return cls(data["rule"], tuple(data["anchors"]), choice)


def make_site(rule: str, anchors: Iterable[int], **choice: Any) -> Site:
    return Site(rule, tuple(anchors), tuple((k, _hashable(v)) for k, v in choice.items()))


def _hashable(value: Any) -> Any:
    if isinstance(value, (list, tuple)):
        return tuple(_hashable(x) for x in value)
    if isinstance(value, dict):
        return tuple((k, _hashable(v)) for k, v in sorted(value.items()))
    if isinstance(value, (set, frozenset)):
        return tuple(sorted(value))
    return value


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [_jsonable(x) for x in items]
    return value


@dataclass
class ModificationRecord:
    """A graph modification (G, H, H', G') plus the budget change.

    ``removed_edges`` includes edges incident to removed vertices.
    ``boundary`` is the set of surviving pre-existing vertices whose
    adjacency changed. ``choice`` carries rule metadata used by lifting
    and, for backward rules, the forward site that undoes the step.
    """

    step: int
    rule: str
    direction: str
    boundary: tuple[int, ...]
    removed_vertices: tuple[int, ...]
    removed_edges: tuple[Edge, ...]
    added_vertices: tuple[int, ...]
    added_edges: tuple[Edge, ...]
    delta_k: int
    choice: dict[str, Any] = field(default_factory=dict)

    @property
    def modified_vertices(self) -> set[int]:
        """New vertices plus surviving endpoints of changed edges."""
        return set(self.added_vertices) | set(self.boundary)

    @property
    def touched_vertices(self) -> set[int]:
        """Pre-existing vertices inside H: removed ones plus the boundary."""
        return set(self.removed_vertices) | set(self.boundary)

    @property
    def delta_n(self) -> int:
        return len(self.added_vertices) - len(self.removed_vertices)

    @property
    def delta_m(self) -> int:
        return len(self.added_edges) - len(self.removed_edges)

    def is_noop(self) -> bool:
        return not (self.removed_vertices or self.removed_edges or self.added_vertices or self.added_edges) and self.delta_k == 0

    def to_json(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "rule": self.rule,
            "direction": self.direction,
            "boundary": list(self.boundary),
            "removed_vertices": list(self.removed_vertices),
            "removed_edges": [list(e) for e in self.removed_edges],
            "added_vertices": list(self.added_vertices),
            "added_edges": [list(e) for e in self.added_edges],
            "delta_k": self.delta_k,
            "choice": _jsonable(self.choice),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict[str, Any]) -> "ModificationRecord":
        return cls(
            step=int(data["step"]),
            rule=data["rule"],
            direction=data["direction"],
            boundary=tuple(data["boundary"]),
            removed_vertices=tuple(data["removed_vertices"]),
            removed_edges=tuple(tuple(e) for e in data["removed_edges"]),
            added_vertices=tuple(data["added_vertices"]),
            added_edges=tuple(tuple(e) for e in data["added_edges"]),
            delta_k=int(data["delta_k"]),
            choice=dict(data.get("choice", {})),
        )

    def replay(self, graph: Graph) -> None:
        """Apply this record to its pre-image graph."""
        for u, v in self.removed_edges:
            if u in graph and v in graph and graph.has_edge(u, v):
                graph.remove_edge(u, v)
        for v in self.removed_vertices:
            graph.remove_vertex(v)
        for v in self.added_vertices:
            graph.restore_vertex(v)
        for u, v in self.added_edges:
            graph.add_edge(u, v)

    def undo(self, graph: Graph) -> None:
        """Turn the post-image back into the pre-image."""
        for u, v in self.added_edges:
            graph.remove_edge(u, v)
        for v in self.added_vertices:
            graph.remove_vertex(v)
        for v in self.removed_vertices:
            graph.restore_vertex(v)
        for u, v in self.removed_edges:
            graph.add_edge(u, v)


class Recorder:
    """Mutates a graph while remembering enough to build a record.

    The first time a vertex is touched its original neighborhood is saved;
    the record is the difference between those snapshots and the final
    state, so operations that cancel out leave no trace.
    """

    def __init__(self, graph: Graph):
        self.graph = graph
        self._orig: dict[int, frozenset[int] | None] = {}
        self._first_new = graph.next_id

    def _touch(self, v: int) -> None:
        if v not in self._orig:
            self._orig[v] = frozenset(self.graph.neighbors(v)) if v < self._first_new else None

    def add_vertex(self) -> int:
        v = self.graph.add_vertex()
        self._orig[v] = None
        return v

    def remove_vertex(self, v: int) -> None:
        self._touch(v)
        for u in self.graph.neighbors(v):
            self._touch(u)
        self.graph.remove_vertex(v)

    def add_edge(self, u: int, v: int) -> None:
        self._touch(u)
        self._touch(v)
        self.graph.add_edge(u, v)

    def ensure_edge(self, u: int, v: int) -> None:
        if not self.graph.has_edge(u, v):
            self.add_edge(u, v)

    def remove_edge(self, u: int, v: int) -> None:
        self._touch(u)
        self._touch(v)
        self.graph.remove_edge(u, v)

    def build(self, rule: str, direction: str, delta_k: int, choice: dict[str, Any] | None = None) -> ModificationRecord:
        g = self.graph
        removed_vertices, added_vertices, boundary = [], [], []
        removed_edges: set[Edge] = set()
        added_edges: set[Edge] = set()
        for v, orig in self._orig.items():
            live = v in g
            now = g.neighbors(v) if live else frozenset()
            if orig is None:
                if live:
                    added_vertices.append(v)
                    added_edges.update(normalize_edge(v, u) for u in now)
                continue
            if not live:
                removed_vertices.append(v)
            lost = orig - now
            gained = now - orig
            removed_edges.update(normalize_edge(v, u) for u in lost)
            added_edges.update(normalize_edge(v, u) for u in gained)
            if live and (lost or gained):
                boundary.append(v)
        return ModificationRecord(
            step=-1,
            rule=rule,
            direction=direction,
            boundary=tuple(sorted(boundary)),
            removed_vertices=tuple(sorted(removed_vertices)),
            removed_edges=tuple(sorted(removed_edges)),
            added_vertices=tuple(sorted(added_vertices)),
            added_edges=tuple(sorted(added_edges)),
            delta_k=delta_k,
            choice=choice or {},
        )
