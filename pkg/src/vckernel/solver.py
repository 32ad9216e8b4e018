"""Exact vertex cover oracles and cover verification."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .graph import Graph, Instance


@dataclass(frozen=True)
class CoverResult:
    tau: int
    cover: frozenset[int] = field(default_factory=frozenset)


def verify_cover(graph: Graph, cover: Iterable[int]) -> bool:
    """True iff every edge of ``graph`` has an endpoint in ``cover``."""
    chosen = set(cover)
    return all(u in chosen or v in chosen for u, v in graph.edges())


def brute_force_tau(graph: Graph) -> CoverResult:
    """Minimum vertex cover by exhaustive branching.

    Branches on a maximum-degree vertex: either it joins the cover or its
    whole neighborhood does. Memoised on the remaining vertex mask; meant
    for graphs of at most about twenty vertices.
    """
    order = graph.vertices()
    index = {v: i for i, v in enumerate(order)}
    adj = [0] * len(order)
    for u, v in graph.edges():
        adj[index[u]] |= 1 << index[v]
        adj[index[v]] |= 1 << index[u]
    memo: dict[int, tuple[int, int]] = {}

    def solve(alive: int) -> tuple[int, int]:
        hit = memo.get(alive)
        if hit is not None:
            return hit
        best_v, best_deg = -1, 0
        rest = alive
        while rest:
            low = rest & -rest
            i = low.bit_length() - 1
            rest ^= low
            d = (adj[i] & alive).bit_count()
            if d > best_deg:
                best_v, best_deg = i, d
        if best_v < 0:
            memo[alive] = (0, 0)
            return 0, 0
        bit = 1 << best_v
        size_a, set_a = solve(alive & ~bit)
        size_a += 1
        nb = adj[best_v] & alive
        size_b, set_b = solve(alive & ~nb & ~bit)
        size_b += best_deg
        if size_a <= size_b:
            out = (size_a, set_a | bit)
        else:
            out = (size_b, set_b | nb)
        memo[alive] = out
        return out

    size, mask = solve((1 << len(order)) - 1)
    cover = frozenset(order[i] for i in range(len(order)) if mask >> i & 1)
    return CoverResult(size, cover)


def tau(graph: Graph) -> int:
    return brute_force_tau(graph).tau


def _matching_lower_bound(graph: Graph) -> int:
    matched: set[int] = set()
    size = 0
    for u, v in graph.edges():
        if u not in matched and v not in matched:
            matched.update((u, v))
            size += 1
    return size


_SOLVER_RULES = ("Deg0", "Deg1", "Dom", "Deg2Fold")


def branch_and_reduce_solve(instance: Instance | Graph) -> CoverResult:
    """Exact solver interleaving forward reduction with mirror branching.

    Each node kernelizes with cheap forward rules through a recording engine,
    splits into connected components, prunes with a matching lower bound,
    and branches on a maximum-degree vertex. Covers of the kernel are lifted
    back through the recorded trace.
    """
    graph = instance.graph if isinstance(instance, Instance) else instance
    best = _bnr(graph.copy(), upper=graph.n + 1)
    assert best is not None
    return CoverResult(len(best), frozenset(best))


def _bnr(graph: Graph, upper: int) -> set[int] | None:
    """Minimum cover of ``graph`` if smaller than ``upper``, else None."""
    from .engine import Engine, exhaustive_forward

    engine = Engine(Instance(graph))
    exhaustive_forward(engine, _SOLVER_RULES)
    kernel = engine.instance.graph
    fixed = -engine.instance.k
    if fixed >= upper:
        return None
    cover: set[int] = set()
    budget = upper - fixed
    for comp in kernel.connected_components():
        if len(comp) == 1:
            continue
        sub = kernel.induced_subgraph(comp)
        remaining = budget - len(cover)
        part = _branch(sub, remaining)
        if part is None:
            return None
        cover |= part
    lifted = engine.lift(cover)
    return lifted if len(lifted) < upper else None


def _branch(graph: Graph, upper: int) -> set[int] | None:
    if graph.m == 0:
        return set() if upper > 0 else None
    if _matching_lower_bound(graph) >= upper:
        return None
    v = max(graph.vertices(), key=lambda x: (graph.degree(x), -x))
    best: set[int] | None = None
    with_v = graph.copy()
    with_v.remove_vertex(v)
    sub = _bnr(with_v, upper - 1)
    if sub is not None:
        best = sub | {v}
        upper = len(best)
    nb = set(graph.neighbors(v))
    without_v = graph.copy()
    for u in nb:
        without_v.remove_vertex(u)
    sub = _bnr(without_v, upper - len(nb))
    if sub is not None:
        best = sub | nb
    return best
