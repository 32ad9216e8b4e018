"""Color refinement, canonical forms, and local isomorphism of modifications."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Hashable, Iterable, Mapping, Sequence

from .graph import Graph
from .records import ModificationRecord

FREE = ("~free",)


def _ranks(values: Sequence[Any]) -> list[int]:
    table = {val: i for i, val in enumerate(sorted(set(values)))}
    return [table[val] for val in values]


def _refine(adj: Sequence[Sequence[int]], col: list[int]) -> list[int]:
    classes = len(set(col))
    while True:
        sig = [(col[v], tuple(sorted(col[u] for u in adj[v]))) for v in range(len(adj))]
        new = _ranks(sig)
        count = len(set(new))
        if count == classes:
            return new
        col, classes = new, count


def color_refinement(graph: Graph, initial: Mapping[int, Hashable] | None = None) -> dict[int, int]:
    """Coarsest stable refinement of ``initial`` (uniform when None).

    Colors are ranks of canonical signatures, so two isomorphic colored
    graphs get the same color on corresponding vertices.
    """
    verts = graph.vertices()
    index = {v: i for i, v in enumerate(verts)}
    adj = [[index[u] for u in graph.neighbors(v)] for v in verts]
    start = [initial[v] if initial is not None else 0 for v in verts]
    col = _refine(adj, _ranks(start))
    return {v: col[i] for i, v in enumerate(verts)}


@dataclass(frozen=True)
class CanonicalForm:
    """Canonical vertex order plus an order-free certificate.

    Two colored graphs are isomorphic (respecting colors) exactly when
    their ``key`` values are equal. Equality and hashing use the key only.
    """

    order: tuple[int, ...]
    key: bytes

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CanonicalForm) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


class _Search:
    """Individualization-refinement with automorphism pruning."""

    def __init__(self, adj: list[list[int]], labels: list[int]):
        self.adj = adj
        self.labels = labels
        self.n = len(adj)
        self.best: tuple[tuple, list[int]] | None = None
        self.first: tuple[tuple, list[int]] | None = None
        self.automorphisms: list[list[int]] = []

    def certificate(self, col: list[int]) -> tuple[tuple, list[int]]:
        order = sorted(range(self.n), key=col.__getitem__)
        pos = [0] * self.n
        for i, v in enumerate(order):
            pos[v] = i
        edges = sorted(
            (min(pos[u], pos[v]), max(pos[u], pos[v])) for u in range(self.n) for v in self.adj[u] if u < v
        )
        return (tuple(self.labels[v] for v in order), tuple(edges)), order

    def leaf(self, col: list[int]) -> None:
        cert, order = self.certificate(col)
        for ref in (self.first, self.best):
            if ref is not None and ref[0] == cert:
                perm = [0] * self.n
                for a, b in zip(ref[1], order):
                    perm[a] = b
                if any(perm[i] != i for i in range(self.n)):
                    self.automorphisms.append(perm)
                break
        if self.first is None:
            self.first = (cert, order)
        if self.best is None or cert > self.best[0]:
            self.best = (cert, order)

    def same_orbit(self, prefix: list[int], explored: list[int], v: int) -> bool:
        gens = [p for p in self.automorphisms if all(p[x] == x for x in prefix)]
        if not gens or not explored:
            return False
        parent = list(range(self.n))

        def root(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for p in gens:
            for x in range(self.n):
                rx, ry = root(x), root(p[x])
                if rx != ry:
                    parent[rx] = ry
        rv = root(v)
        return any(root(e) == rv for e in explored)

    def run(self, col: list[int], prefix: list[int]) -> None:
        col = _refine(self.adj, col)
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(col):
            cells.setdefault(c, []).append(v)
        if len(cells) == self.n:
            self.leaf(col)
            return
        target = min((len(m), c) for c, m in cells.items() if len(m) > 1)[1]
        explored: list[int] = []
        for v in cells[target]:
            if self.same_orbit(prefix, explored, v):
                continue
            explored.append(v)
            child = [2 * c for c in col]
            child[v] -= 1
            self.run(_ranks(child), prefix + [v])


def canonical_form(graph: Graph, colors: Mapping[int, Hashable] | None = None) -> CanonicalForm:
    """Canonical form of ``graph``, optionally respecting a vertex coloring.

    Colors must be mutually comparable. Vertices keep their colors in the
    certificate, so forms of differently colored graphs differ.
    """
    verts = graph.vertices()
    index = {v: i for i, v in enumerate(verts)}
    adj = [sorted(index[u] for u in graph.neighbors(v)) for v in verts]
    raw = [colors[v] if colors is not None else 0 for v in verts]
    labels = _ranks(raw)
    palette = tuple(sorted(set(raw)))
    search = _Search(adj, labels)
    search.run(list(labels), [])
    if search.best is None:
        return CanonicalForm((), repr((0, palette, (), ())).encode())
    cert, order = search.best
    key = repr((len(verts), palette, cert[0], cert[1])).encode()
    return CanonicalForm(tuple(verts[i] for i in order), key)


def are_isomorphic(g1: Graph, g2: Graph) -> bool:
    if g1.n != g2.n or g1.m != g2.m:
        return False
    return canonical_form(g1) == canonical_form(g2)


def isomorphism_map(
    g1: Graph,
    g2: Graph,
    colors1: Mapping[int, Hashable] | None = None,
    colors2: Mapping[int, Hashable] | None = None,
) -> dict[int, int] | None:
    """An explicit color-preserving isomorphism g1 -> g2, or None."""
    f1 = canonical_form(g1, colors1)
    f2 = canonical_form(g2, colors2)
    if f1 != f2:
        return None
    return dict(zip(f1.order, f2.order))


# -- local isomorphism ---------------------------------------------------------


@dataclass(frozen=True)
class ModificationContext:
    """A modified graph together with what the modification touched.

    ``base_vertices`` is the vertex set of the shared pre-image G and
    ``touched`` the vertices of G that lie inside the modification. Live
    vertices outside ``base_vertices`` are new.
    """

    graph: Graph
    base_vertices: frozenset[int]
    touched: frozenset[int]

    @classmethod
    def from_records(cls, graph: Graph, base_vertices: Iterable[int], records: Iterable[ModificationRecord]):
        base = frozenset(base_vertices)
        touched: set[int] = set()
        for record in records:
            touched |= record.touched_vertices
        return cls(graph, base, frozenset(touched & base))

    @classmethod
    def unmodified(cls, graph: Graph) -> "ModificationContext":
        return cls(graph, frozenset(graph.vertices()), frozenset())

    def new_vertices(self) -> set[int]:
        return {v for v in self.graph.vertices() if v not in self.base_vertices}


def _pinned_view(ctx: ModificationContext, moved: set[int]) -> tuple[Graph, dict[int, Hashable]]:
    g = ctx.graph
    free = {v for v in moved if v in g} | ctx.new_vertices()
    region = set(free)
    for v in free:
        region |= g.neighbors(v)
    colors: dict[int, Hashable] = {v: (FREE if v in free else ("pin", v)) for v in region}
    return g.induced_subgraph(region), colors


def local_isomorphism_map(ctx1: ModificationContext, ctx2: ModificationContext) -> dict[int, int] | None:
    """A bijection between the modified regions that fixes every other vertex.

    Vertices of G outside both modifications are pinned to themselves; only
    the modified vertices and their neighbors enter the comparison.
    """
    moved = set(ctx1.touched) | set(ctx2.touched)
    sub1, col1 = _pinned_view(ctx1, moved)
    sub2, col2 = _pinned_view(ctx2, moved)
    if sub1.n != sub2.n or sub1.m != sub2.m:
        return None
    return isomorphism_map(sub1, sub2, col1, col2)


def locally_isomorphic(ctx1: ModificationContext, ctx2: ModificationContext) -> bool:
    return local_isomorphism_map(ctx1, ctx2) is not None
