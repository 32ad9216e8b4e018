"""Rule registry and helpers shared by forward and backward rules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from ..errors import StaleSiteError
from ..graph import Graph, Instance
from ..records import ModificationRecord, Site

Scope = Optional[Iterable[int]]
Finder = Callable[..., list[Site]]
Applier = Callable[[Instance, Site], ModificationRecord]


@dataclass(frozen=True)
class Rule:
    name: str
    direction: str
    find: Finder
    apply: Applier


def scoped_vertices(graph: Graph, scope: Scope) -> list[int]:
    """Live vertices of ``scope`` (all vertices when scope is None), sorted."""
    if scope is None:
        return graph.vertices()
    return sorted(v for v in set(scope) if v in graph)


def scope_set(graph: Graph, scope: Scope) -> set[int] | None:
    return None if scope is None else {v for v in scope if v in graph}


def hits(scope: set[int] | None, vertices: Iterable[int]) -> bool:
    return scope is None or any(v in scope for v in vertices)


def require(condition: bool, site: Site, why: str) -> None:
    if not condition:
        raise StaleSiteError(f"{site.rule} site {site.anchors}: {why}")


def require_live(graph: Graph, site: Site, vertices: Iterable[int]) -> None:
    for v in vertices:
        require(v in graph, site, f"vertex {v} is not live")
