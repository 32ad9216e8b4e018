"""Forward (shrinking) reduction rules.

Every rule has a ``find_*`` enumerator returning :class:`Site` objects and an
``apply_*`` function that mutates the instance and returns a
:class:`ModificationRecord`. Sites whose preconditions no longer hold raise
:class:`StaleSiteError`. Nondeterminism (Deg3 permutations, struction
orderings, CN partitions, LP vectors) lives in the site, never in the rule.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Any, Iterable

from ..errors import StaleSiteError
from ..graph import Graph, Instance, Mode
from ..lp import HALF, solve_lp_extreme
from ..records import FORWARD, ModificationRecord, Recorder, Site, make_site
from .common import Rule, Scope, hits, require, require_live, scope_set, scoped_vertices

DEFAULT_KAPPA = 4


def _finish(instance: Instance, rec: Recorder, site: Site, delta_k: int, **extra: Any) -> ModificationRecord:
    choice = {"site": site.to_json()}
    choice.update(extra)
    record = rec.build(site.rule, FORWARD, delta_k, choice)
    instance.k += delta_k
    return record


# -- degree rules -------------------------------------------------------------


def find_deg0(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    return [make_site("Deg0", (v,)) for v in scoped_vertices(g, scope) if g.degree(v) == 0]


def apply_deg0(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    (v,) = site.anchors
    require_live(g, site, (v,))
    require(g.degree(v) == 0, site, "vertex is not isolated")
    rec = Recorder(g)
    rec.remove_vertex(v)
    return _finish(instance, rec, site, 0)


def find_deg1(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    sites = []
    for v in g.vertices():
        if g.degree(v) == 1:
            (u,) = g.neighbors(v)
            if hits(sc, (v, u)):
                sites.append(make_site("Deg1", (v, u)))
    return sites


def apply_deg1(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    v, u = site.anchors
    require_live(g, site, (v, u))
    require(g.neighbors(v) == {u}, site, "vertex is not a leaf of the anchor")
    rec = Recorder(g)
    rec.remove_vertex(v)
    rec.remove_vertex(u)
    return _finish(instance, rec, site, -1)


def find_deg2_fold(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    sites = []
    for v in g.vertices():
        if g.degree(v) != 2:
            continue
        a, b = g.sorted_neighbors(v)
        if not g.has_edge(a, b) and hits(sc, (v, a, b)):
            sites.append(make_site("Deg2Fold", (v, a, b)))
    return sites


def apply_deg2_fold(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    v, a, b = site.anchors
    require_live(g, site, (v, a, b))
    require(g.neighbors(v) == {a, b}, site, "neighborhood changed")
    require(not g.has_edge(a, b), site, "neighbors are adjacent")
    rec = Recorder(g)
    outside = g.open_neighborhood_of_set((v, a, b))
    for x in (v, a, b):
        rec.remove_vertex(x)
    merged = rec.add_vertex()
    for u in sorted(outside):
        rec.add_edge(merged, u)
    return _finish(instance, rec, site, -1, merged=merged)


def find_deg3_is(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    sites = []
    for v in g.vertices():
        if g.degree(v) != 3:
            continue
        nb = g.sorted_neighbors(v)
        if not g.is_independent_set(nb) or not hits(sc, [v, *nb]):
            continue
        for perm in itertools.permutations(nb):
            sites.append(make_site("Deg3IS", (v, *perm)))
    return sites


def apply_deg3_is(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    v, a, b, c = site.anchors
    require_live(g, site, (v, a, b, c))
    require(g.neighbors(v) == {a, b, c}, site, "neighborhood changed")
    require(g.is_independent_set((a, b, c)), site, "neighborhood not independent")
    na, nb, nc = (set(g.neighbors(x)) - {v} for x in (a, b, c))
    rec = Recorder(g)
    rec.remove_vertex(v)
    rec.add_edge(a, b)
    rec.add_edge(b, c)
    for x, targets in ((a, nb), (b, nc), (c, na)):
        for y in sorted(targets):
            if y != x:
                rec.ensure_edge(x, y)
    return _finish(instance, rec, site, 0)


def find_deg_gt_k(instance: Instance, scope: Scope = None) -> list[Site]:
    if instance.mode is not Mode.BUDGET:
        return []
    g = instance.graph
    return [make_site("DegGtK", (v,)) for v in scoped_vertices(g, scope) if g.degree(v) > instance.k]


def apply_deg_gt_k(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    (v,) = site.anchors
    require(instance.mode is Mode.BUDGET, site, "rule only runs in budget mode")
    require_live(g, site, (v,))
    require(g.degree(v) > instance.k, site, "degree no longer exceeds k")
    rec = Recorder(g)
    rec.remove_vertex(v)
    return _finish(instance, rec, site, -1)


def buss_no_instance_check(instance: Instance) -> bool:
    """Budget-mode size bound after Deg0 and DegGtK are exhausted."""
    if instance.mode is not Mode.BUDGET:
        return False
    k = instance.k
    g = instance.graph
    if k < 0:
        return True
    return g.n > k * k + k or g.m > k * k


# -- domination and unconfined ------------------------------------------------


def _dominates(g: Graph, u: int, v: int) -> bool:
    return g.closed_neighborhood(v) <= g.closed_neighborhood(u)


def find_domination(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    found = set()
    for v in g.vertices():
        for u in g.neighbors(v):
            if hits(sc, (u, v)) and g.degree(u) >= g.degree(v) and _dominates(g, u, v):
                found.add((u, v))
    return [make_site("Dom", pair) for pair in sorted(found)]


def apply_domination(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    u, v = site.anchors
    require_live(g, site, (u, v))
    require(g.has_edge(u, v), site, "pair not adjacent")
    require(_dominates(g, u, v), site, "no longer dominates")
    rec = Recorder(g)
    rec.remove_vertex(u)
    return _finish(instance, rec, site, -1)


def unconfined_certificate(
    g: Graph,
    v: int,
    kappa: int = 1,
    extra: tuple[int, frozenset[int]] | None = None,
) -> list[tuple[list[int], list[int], int | None]] | None:
    """Run the unconfined check from ``v``.

    With ``kappa == 1`` this is the classic single-vertex procedure: choose
    ``u`` in N(S) with exactly one neighbor in S that minimises
    |N(u) \\ N[S]| (smallest id on ties). Larger ``kappa`` searches sets X of
    up to ``kappa`` vertices of N(S) sharing the same |X| neighbors Y in S
    (so G[X, Y] is complete bipartite), in order of size then lexicographic
    ids, preferring an X with nothing outside N[S]. X must be independent:
    the exchange of X for Y that justifies each step leaves edges inside X
    uncovered otherwise.

    ``extra = (x, S)`` evaluates the check as if a vertex ``x`` adjacent to
    ``S`` had been added, without touching the graph.

    Returns the list of steps ``(X, Y, w)`` ending with ``w = None`` when
    ``v`` is unconfined, or None otherwise.
    """
    if kappa < 1:
        return None
    if extra is None:
        nb = g.neighbors
    else:
        ghost, attached = extra

        def nb(x: int) -> set[int]:
            if x == ghost:
                return set(attached)
            base = g.neighbors(x)
            return base | {ghost} if x in attached else base

    def independent(xs: Iterable[int]) -> bool:
        members = set(xs)
        return all(not (nb(x) & members) for x in members)

    s_set = {v}
    closed = nb(v) | {v}
    steps: list[tuple[list[int], list[int], int | None]] = []
    while True:
        boundary = closed - s_set
        groups: dict[frozenset[int], list[int]] = {}
        for x in boundary:
            y = frozenset(nb(x) & s_set)
            if 1 <= len(y) <= kappa:
                groups.setdefault(y, []).append(x)
        empty_hit = None
        single_hit = None
        for size in range(1, kappa + 1):
            best_empty = None
            best_single = None
            for y, xs in groups.items():
                if len(y) != size or len(xs) < size:
                    continue
                for xset in itertools.combinations(sorted(xs), size):
                    if size > 1 and not independent(xset):
                        continue
                    outside: set[int] = set()
                    for x in xset:
                        outside |= nb(x)
                    outside -= closed
                    if not outside:
                        if best_empty is None or xset < best_empty[0]:
                            best_empty = (xset, y)
                    elif len(outside) == 1:
                        if best_single is None or xset < best_single[0]:
                            best_single = (xset, y, next(iter(outside)))
            if best_empty is not None:
                empty_hit = best_empty
                break
            if best_single is not None and single_hit is None:
                single_hit = best_single
        if empty_hit is not None:
            xset, y = empty_hit
            steps.append((list(xset), sorted(y), None))
            return steps
        if single_hit is None:
            return None
        xset, y, w = single_hit
        steps.append((list(xset), sorted(y), w))
        s_set.add(w)
        closed |= nb(w) | {w}


def is_unconfined(g: Graph, v: int, kappa: int = 1) -> bool:
    return unconfined_certificate(g, v, kappa) is not None


def find_unconfined(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    return [make_site("Unconf", (v,)) for v in scoped_vertices(g, scope) if is_unconfined(g, v)]


def apply_unconfined(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    (v,) = site.anchors
    require_live(g, site, (v,))
    require(is_unconfined(g, v), site, "vertex is confined")
    rec = Recorder(g)
    rec.remove_vertex(v)
    return _finish(instance, rec, site, -1)


def find_unconfined_kappa(instance: Instance, scope: Scope = None, kappa: int = DEFAULT_KAPPA) -> list[Site]:
    g = instance.graph
    return [
        make_site("UnconfKappa", (v,), kappa=kappa)
        for v in scoped_vertices(g, scope)
        if is_unconfined(g, v, kappa)
    ]


def apply_unconfined_kappa(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    (v,) = site.anchors
    kappa = site.get("kappa", DEFAULT_KAPPA)
    require_live(g, site, (v,))
    require(is_unconfined(g, v, kappa), site, "vertex is confined")
    rec = Recorder(g)
    rec.remove_vertex(v)
    return _finish(instance, rec, site, -1)


# -- desk ------------------------------------------------------------------------


def _desk_sides(g: Graph, cycle: tuple[int, int, int, int]) -> tuple[set[int], set[int]] | None:
    u1, u2, u3, u4 = cycle
    if not (g.has_edge(u1, u2) and g.has_edge(u2, u3) and g.has_edge(u3, u4) and g.has_edge(u4, u1)):
        return None
    if g.has_edge(u1, u3) or g.has_edge(u2, u4):
        return None
    side_a, side_b = {u1, u3}, {u2, u4}
    out_a = g.open_neighborhood_of_set(side_a) - side_b
    out_b = g.open_neighborhood_of_set(side_b) - side_a
    if out_a & out_b or len(out_a) > 2 or len(out_b) > 2:
        return None
    return out_a, out_b


def find_desk(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    seen = set()
    sites = []
    for u1 in g.vertices():
        nb = g.sorted_neighbors(u1)
        for u2, u4 in itertools.combinations(nb, 2):
            if g.has_edge(u2, u4):
                continue
            for u3 in sorted(g.neighbors(u2) & g.neighbors(u4)):
                if u3 == u1 or g.has_edge(u1, u3):
                    continue
                key = frozenset((frozenset((u1, u3)), frozenset((u2, u4))))
                if key in seen:
                    continue
                seen.add(key)
                cycle = (u1, u2, u3, u4)
                if hits(sc, cycle) and _desk_sides(g, cycle) is not None:
                    sites.append(make_site("Desk", cycle))
    return sites


def apply_desk(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    cycle = tuple(site.anchors)
    require_live(g, site, cycle)
    sides = _desk_sides(g, cycle)  # type: ignore[arg-type]
    require(sides is not None, site, "not a desk")
    out_a, out_b = sides  # type: ignore[misc]
    rec = Recorder(g)
    for x in cycle:
        rec.remove_vertex(x)
    for a in sorted(out_a):
        for b in sorted(out_b):
            rec.ensure_edge(a, b)
    u1, u2, u3, u4 = cycle
    return _finish(instance, rec, site, -2, side_a=[u1, u3], side_b=[u2, u4], out_a=sorted(out_a), out_b=sorted(out_b))


# -- 2-clique neighborhood ---------------------------------------------------------


def find_cn_partition(g: Graph, v: int) -> tuple[list[int], list[int], dict[int, int]] | None:
    """Split N(v) into cliques (C1, C2) for the 2-clique neighborhood rule.

    The complement H of G[N(v)] must be a disjoint union of stars; one
    maximum-degree center per star goes to C2 (the smaller id for a
    single-edge star, the vertex itself for an isolated one) and the
    leaves go to C1. Returns ``(C1, C2, partner)`` where ``partner`` maps
    each C1 vertex to its unique non-neighbor in C2, or None.
    """
    members = g.neighbors(v)
    h = g.complement_of_induced(members)
    c1: list[int] = []
    c2: list[int] = []
    partner: dict[int, int] = {}
    for comp in h.connected_components():
        size = len(comp)
        edges = sum(h.degree(x) for x in comp) // 2
        center = min(comp, key=lambda x: (-h.degree(x), x))
        if edges != size - 1 or h.degree(center) != size - 1:
            return None
        c2.append(center)
        for leaf in comp:
            if leaf != center:
                c1.append(leaf)
                partner[leaf] = center
    if len(c1) < len(c2):
        return None
    return sorted(c1), sorted(c2), partner


def _cn_valid(g: Graph, v: int, c1: list[int], c2: list[int], partner: dict[int, int]) -> bool:
    if set(c1) | set(c2) != g.neighbors(v) or set(c1) & set(c2):
        return False
    if len(c1) < len(c2) or not g.is_clique(c1) or not g.is_clique(c2):
        return False
    for a in c1:
        missing = [b for b in c2 if not g.has_edge(a, b)]
        if missing != [partner.get(a)]:
            return False
    return True


def find_cn(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    sites = []
    for v in g.vertices():
        if sc is not None and v not in sc and not (g.neighbors(v) & sc):
            continue
        part = find_cn_partition(g, v)
        if part is None:
            continue
        c1, c2, partner = part
        pairs = sorted(partner.items())
        sites.append(make_site("CN", (v,), c1=c1, c2=c2, pairs=pairs))
    return sites


def apply_cn(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    (v,) = site.anchors
    c1, c2 = list(site.get("c1")), list(site.get("c2"))
    partner = {a: b for a, b in site.get("pairs")}
    require_live(g, site, (v, *c1, *c2))
    require(_cn_valid(g, v, c1, c2, partner), site, "partition no longer valid")
    gone = set(c2) | {v}
    targets = {a: set(g.neighbors(partner[a])) - gone - {a} for a in c1}
    rec = Recorder(g)
    rec.remove_vertex(v)
    for b in c2:
        rec.remove_vertex(b)
    for a in c1:
        for x in sorted(targets[a]):
            rec.ensure_edge(a, x)
    return _finish(instance, rec, site, -len(c2))


# -- optional edge deletion ---------------------------------------------------------


def oe_delete_ok(g: Graph, a: int, b: int, c: int) -> bool:
    if len({a, b, c}) < 3 or not g.has_edge(a, b):
        return False
    if g.has_edge(c, a) == g.has_edge(c, b):
        return False
    return g.neighbors(c) <= (g.neighbors(a) | g.neighbors(b))


def find_oe_delete(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    sites = []
    for a, b in g.edges():
        union = g.neighbors(a) | g.neighbors(b)
        for c in sorted(union - {a, b}):
            if hits(sc, (a, b, c)) and oe_delete_ok(g, a, b, c):
                sites.append(make_site("OEDel", (a, b, c)))
    return sites


def apply_oe_delete(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    a, b, c = site.anchors
    require_live(g, site, (a, b, c))
    require(oe_delete_ok(g, a, b, c), site, "conditions no longer hold")
    rec = Recorder(g)
    rec.remove_edge(a, b)
    return _finish(instance, rec, site, 0)


# -- struction and magnet ------------------------------------------------------------------


def struction_pairs(g: Graph, order: tuple[int, ...]) -> list[tuple[int, int]]:
    """Index pairs (i, j), i < j, of non-adjacent neighbors in ``order``."""
    return [
        (i, j)
        for i in range(len(order))
        for j in range(i + 1, len(order))
        if not g.has_edge(order[i], order[j])
    ]


def find_struction(
    instance: Instance,
    scope: Scope = None,
    orderings: str = "sorted",
    unguarded: bool = False,
    max_orderings: int | None = None,
) -> list[Site]:
    """Struction sites. ``orderings`` is ``"sorted"`` (one site per vertex)
    or ``"all"`` (every permutation of the neighborhood, optionally capped)."""
    g = instance.graph
    sites = []
    for v in scoped_vertices(g, scope):
        nb = tuple(g.sorted_neighbors(v))
        d = len(nb)
        pairs = struction_pairs(g, nb)
        if len(pairs) > d and not unguarded:
            continue
        perms: Iterable[tuple[int, ...]]
        perms = itertools.permutations(nb) if orderings == "all" else [nb]
        if max_orderings is not None:
            perms = itertools.islice(perms, max_orderings)
        for perm in perms:
            sites.append(make_site("Struct", (v, *perm), unguarded=unguarded))
    return sites


def apply_struction(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    v, *order_list = site.anchors
    order = tuple(order_list)
    require_live(g, site, (v,))
    require(g.neighbors(v) == set(order) and len(order) == len(set(order)), site, "neighborhood changed")
    d = len(order)
    pairs = struction_pairs(g, order)
    if not site.get("unguarded", False):
        require(len(pairs) <= d, site, "struction would increase k")
    rest_nb = {x: set(g.neighbors(x)) - {v} - set(order) for x in order}
    inner = {x: set(g.neighbors(x)) & set(order) for x in order}
    rec = Recorder(g)
    rec.remove_vertex(v)
    for x in order:
        rec.remove_vertex(x)
    new_ids = [rec.add_vertex() for _ in pairs]
    for p in range(len(pairs)):
        i, j = pairs[p]
        for q in range(p + 1, len(pairs)):
            k_, l_ = pairs[q]
            if i != k_ or order[l_] in inner[order[j]]:
                rec.add_edge(new_ids[p], new_ids[q])
        for u in sorted(rest_nb[order[i]] | rest_nb[order[j]]):
            rec.add_edge(new_ids[p], u)
    w_map = [[new_ids[p], pairs[p][0], pairs[p][1]] for p in range(len(pairs))]
    return _finish(instance, rec, site, len(pairs) - d, order=list(order), w=w_map)


def find_triangle(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    sites = []
    for v in g.vertices():
        if g.degree(v) != 2:
            continue
        a, b = g.sorted_neighbors(v)
        if g.has_edge(a, b) and hits(sc, (v, a, b)):
            sites.append(make_site("Triangle", (v,)))
    return sites


def apply_triangle(instance: Instance, site: Site) -> ModificationRecord:
    """Struction restricted to a degree-2 vertex whose neighbors are adjacent."""
    g = instance.graph
    (v,) = site.anchors
    require_live(g, site, (v,))
    require(g.degree(v) == 2, site, "degree is not two")
    a, b = g.sorted_neighbors(v)
    require(g.has_edge(a, b), site, "neighbors not adjacent")
    rec = Recorder(g)
    for x in (v, a, b):
        rec.remove_vertex(x)
    return _finish(instance, rec, site, -2, order=[a, b], w=[])


def _magnet_parts(g: Graph, a: int, b: int) -> tuple[set[int], set[int], set[int]] | None:
    if a == b or not g.has_edge(a, b):
        return None
    na, nb = g.neighbors(a), g.neighbors(b)
    side_a = na - nb - {b}
    side_b = nb - na - {a}
    common = na & nb
    for x in side_a:
        if not side_b <= g.neighbors(x):
            return None
    return side_a, side_b, common


def find_magnet(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    return [
        make_site("Magnet", (a, b))
        for a, b in g.edges()
        if hits(sc, (a, b)) and _magnet_parts(g, a, b) is not None
    ]


def apply_magnet(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    a, b = site.anchors
    require_live(g, site, (a, b))
    parts = _magnet_parts(g, a, b)
    require(parts is not None, site, "magnet conditions fail")
    side_a, side_b, common = parts  # type: ignore[misc]
    rec = Recorder(g)
    rec.remove_vertex(a)
    rec.remove_vertex(b)
    c = rec.add_vertex()
    for x in sorted(common):
        rec.add_edge(c, x)
    return _finish(instance, rec, site, -1, merged=c, side_a=sorted(side_a), side_b=sorted(side_b))


# -- LP -------------------------------------------------------------------------------


def _encode_lp(x: dict[int, Fraction]) -> tuple[tuple[int, int], ...]:
    return tuple((v, int(val * 2)) for v, val in sorted(x.items()))


def find_lp(instance: Instance, scope: Scope = None) -> list[Site]:
    g = instance.graph
    x = solve_lp_extreme(g)
    fixed = [v for v, val in x.items() if val != HALF]
    sc = scope_set(g, scope)
    if not fixed or not hits(sc, fixed):
        return []
    return [make_site("LP", tuple(sorted(fixed)), x=_encode_lp(x))]


def lp_site(instance: Instance) -> Site:
    """The LP site for the current extreme solution, even if it is all-1/2."""
    x = solve_lp_extreme(instance.graph)
    fixed = sorted(v for v, val in x.items() if val != HALF)
    return make_site("LP", tuple(fixed), x=_encode_lp(x))


def apply_lp(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    x = {v: Fraction(t, 2) for v, t in site.get("x")}
    require(set(x) == set(g.vertices()), site, "vector does not match the vertex set")
    require(all(x[u] + x[v] >= 1 for u, v in g.edges()), site, "vector infeasible")
    optimum = sum(solve_lp_extreme(g).values(), Fraction(0))
    require(sum(x.values(), Fraction(0)) == optimum, site, "vector not optimal")
    zeros = sorted(v for v, val in x.items() if val < HALF)
    ones = sorted(v for v, val in x.items() if val > HALF)
    rec = Recorder(g)
    for v in zeros + ones:
        rec.remove_vertex(v)
    return _finish(instance, rec, site, -len(ones), ones=ones, zeros=zeros)


# -- registry -----------------------------------------------------------------------------

FORWARD_RULES: dict[str, Rule] = {
    r.name: r
    for r in (
        Rule("Deg0", FORWARD, find_deg0, apply_deg0),
        Rule("Deg1", FORWARD, find_deg1, apply_deg1),
        Rule("Deg2Fold", FORWARD, find_deg2_fold, apply_deg2_fold),
        Rule("Deg3IS", FORWARD, find_deg3_is, apply_deg3_is),
        Rule("DegGtK", FORWARD, find_deg_gt_k, apply_deg_gt_k),
        Rule("Dom", FORWARD, find_domination, apply_domination),
        Rule("Unconf", FORWARD, find_unconfined, apply_unconfined),
        Rule("UnconfKappa", FORWARD, find_unconfined_kappa, apply_unconfined_kappa),
        Rule("Desk", FORWARD, find_desk, apply_desk),
        Rule("CN", FORWARD, find_cn, apply_cn),
        Rule("OEDel", FORWARD, find_oe_delete, apply_oe_delete),
        Rule("Struct", FORWARD, find_struction, apply_struction),
        Rule("Magnet", FORWARD, find_magnet, apply_magnet),
        Rule("LP", FORWARD, find_lp, apply_lp),
        Rule("Triangle", FORWARD, find_triangle, apply_triangle),
    )
}

RULE_ALIASES = {
    "deg0": "Deg0",
    "deg1": "Deg1",
    "deg2": "Deg2Fold",
    "deg2fold": "Deg2Fold",
    "deg3": "Deg3IS",
    "deg3is": "Deg3IS",
    "deggtk": "DegGtK",
    "dom": "Dom",
    "domination": "Dom",
    "unconf": "Unconf",
    "unconfined": "Unconf",
    "unconfkappa": "UnconfKappa",
    "desk": "Desk",
    "cn": "CN",
    "oedel": "OEDel",
    "oe_delete": "OEDel",
    "struct": "Struct",
    "struction": "Struct",
    "magnet": "Magnet",
    "lp": "LP",
    "triangle": "Triangle",
}

# preprocessing order used by the kernelize command
DEFAULT_PIPELINE = ("Deg1", "Deg2Fold", "Deg3IS", "Unconf", "CN", "LP", "Struct", "Magnet", "OEDel")

# forward rules exercised by the randomized deflation and the confluence lab
STANDARD_FORWARD = ("Deg0", "Deg1", "Deg2Fold", "Deg3IS", "Dom", "Unconf", "UnconfKappa", "Desk", "CN", "OEDel", "Struct", "Magnet", "LP")


def resolve_rule_name(name: str) -> str:
    key = name.strip()
    if key in FORWARD_RULES:
        return key
    alias = RULE_ALIASES.get(key.lower())
    if alias is None:
        raise KeyError(f"unknown forward rule {name!r}")
    return alias


def apply_forward(instance: Instance, site: Site) -> ModificationRecord:
    try:
        rule = FORWARD_RULES[site.rule]
    except KeyError:
        raise StaleSiteError(f"unknown forward rule {site.rule}") from None
    return rule.apply(instance, site)
