"""Backward (inflating) rules: converses of forward rules.

Each backward rule has an applier, an enumerator with caps (used by the
Find search), and a sampler (used by Inflate-Deflate). Every record stores
under ``choice["restore"]`` the forward site that undoes it.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Any, Callable, Optional

from ..errors import NotApplicableError
from ..graph import Graph, Instance
from ..records import BACKWARD, ModificationRecord, Recorder, Site, make_site
from .common import Rule, Scope, hits, require, require_live, scope_set, scoped_vertices
from .forward import oe_delete_ok, unconfined_certificate

SIDES = ("A", "B", "AB")


@dataclass(frozen=True)
class BackwardCaps:
    """Limits that keep backward enumeration finite inside Find."""

    max_degree_undeg2: int = 8
    max_set_size: int = 4
    max_undeg3_options: int = 16
    sample_attempts: int = 32


DEFAULT_CAPS = BackwardCaps()

Sampler = Callable[[Instance, random.Random, Scope], Optional[Site]]


@dataclass(frozen=True)
class BackwardRule(Rule):
    sample: Sampler = None  # type: ignore[assignment]


def _finish(instance: Instance, rec: Recorder, site: Site, delta_k: int, restore: Site, **extra: Any) -> ModificationRecord:
    choice = {"site": site.to_json(), "restore": restore.to_json()}
    choice.update(extra)
    record = rec.build(site.rule, BACKWARD, delta_k, choice)
    instance.k += delta_k
    return record


def _pool(g: Graph, scope: Scope) -> list[int]:
    return scoped_vertices(g, scope)


def _geometric(rng: random.Random, p: float = 1 / 3) -> int:
    """Failures before the first success; mean (1 - p) / p."""
    count = 0
    while rng.random() >= p:
        count += 1
    return count


# -- Undeg2: vertex splitting ----------------------------------------------------


def apply_undeg2(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    (v,) = site.anchors
    assignment = dict(site.get("assignment", ()))
    require_live(g, site, (v,))
    require(set(assignment) == g.neighbors(v), site, "assignment does not cover N(v)")
    require(all(side in SIDES for side in assignment.values()), site, "unknown side")
    rec = Recorder(g)
    a = rec.add_vertex()
    b = rec.add_vertex()
    for u in sorted(assignment):
        rec.remove_edge(v, u)
        side = assignment[u]
        if "A" in side:
            rec.add_edge(a, u)
        if "B" in side:
            rec.add_edge(b, u)
    rec.add_edge(v, a)
    rec.add_edge(v, b)
    restore = make_site("Deg2Fold", (v, a, b))
    return _finish(instance, rec, site, 1, restore, a=a, b=b)


def find_undeg2(instance: Instance, scope: Scope = None, caps: BackwardCaps = DEFAULT_CAPS) -> list[Site]:
    """All splittings of scoped vertices, modulo swapping the two halves."""
    g = instance.graph
    sites = []
    for v in _pool(g, scope):
        nb = g.sorted_neighbors(v)
        if len(nb) > caps.max_degree_undeg2:
            continue
        for sides in itertools.product(SIDES, repeat=len(nb)):
            first = next((s for s in sides if s != "AB"), "A")
            if first == "B":
                continue
            sites.append(make_site("Undeg2", (v,), assignment=list(zip(nb, sides))))
    return sites


def sample_undeg2(instance: Instance, rng: random.Random, scope: Scope = None) -> Site | None:
    pool = _pool(instance.graph, scope)
    if not pool:
        return None
    v = rng.choice(pool)
    nb = instance.graph.sorted_neighbors(v)
    return make_site("Undeg2", (v,), assignment=[(u, rng.choice(SIDES)) for u in nb])


# -- Undeg3 ---------------------------------------------------------------------------


def _undeg3_ok(g: Graph, a: int, b: int, c: int) -> bool:
    if len({a, b, c}) < 3:
        return False
    if not (g.has_edge(a, b) and g.has_edge(b, c)) or g.has_edge(a, c):
        return False
    triple = {a, b, c}
    return all(len(g.neighbors(u) & triple) >= 2 for u in g.open_neighborhood_of_set(triple))


def _full_neighbors(g: Graph, a: int, b: int, c: int) -> list[int]:
    triple = {a, b, c}
    return sorted(u for u in g.open_neighborhood_of_set(triple) if triple <= g.neighbors(u))


def apply_undeg3(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    a, b, c = site.anchors
    drops = dict(site.get("drops", ()))
    require_live(g, site, (a, b, c))
    require(_undeg3_ok(g, a, b, c), site, "not an admissible induced P3")
    full = set(_full_neighbors(g, a, b, c))
    require(set(drops) <= full, site, "optional deletion at a vertex not adjacent to all three")
    require(all(x in (a, b, c) for x in drops.values()), site, "deletion target outside the P3")
    triple = {a, b, c}
    plan: list[tuple[int, int]] = []
    for u in sorted(g.open_neighborhood_of_set(triple)):
        nb = g.neighbors(u)
        if u in full:
            if u in drops:
                plan.append((u, drops[u]))
        elif a not in nb:
            plan.append((u, b))
        elif b not in nb:
            plan.append((u, c))
        elif c not in nb:
            plan.append((u, a))
    rec = Recorder(g)
    rec.remove_edge(a, b)
    rec.remove_edge(b, c)
    for u, x in plan:
        rec.remove_edge(u, x)
    v = rec.add_vertex()
    for x in (a, b, c):
        rec.add_edge(v, x)
    restore = make_site("Deg3IS", (v, a, b, c))
    return _finish(instance, rec, site, 0, restore, v=v)


def find_undeg3(instance: Instance, scope: Scope = None, caps: BackwardCaps = DEFAULT_CAPS) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    sites = []
    for b in g.vertices():
        for a, c in itertools.permutations(g.sorted_neighbors(b), 2):
            if not hits(sc, (a, b, c)) or not _undeg3_ok(g, a, b, c):
                continue
            full = _full_neighbors(g, a, b, c)
            options = itertools.product((None, a, b, c), repeat=len(full))
            for combo in itertools.islice(options, caps.max_undeg3_options):
                drops = [(u, x) for u, x in zip(full, combo) if x is not None]
                sites.append(make_site("Undeg3", (a, b, c), drops=drops))
    return sites


def sample_undeg3(instance: Instance, rng: random.Random, scope: Scope = None) -> Site | None:
    g = instance.graph
    pool = [b for b in _pool(g, scope) if g.degree(b) >= 2]
    for _ in range(DEFAULT_CAPS.sample_attempts if pool else 0):
        b = rng.choice(pool)
        a, c = rng.sample(g.sorted_neighbors(b), 2)
        if _undeg3_ok(g, a, b, c):
            full = _full_neighbors(g, a, b, c)
            drops = []
            for u in full:
                x = rng.choice((None, a, b, c))
                if x is not None:
                    drops.append((u, x))
            return make_site("Undeg3", (a, b, c), drops=drops)
    return None


# -- Uncn ---------------------------------------------------------------------------------


def apply_uncn(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    a, b = site.anchors
    require_live(g, site, (a, b))
    require(a != b and g.has_edge(a, b), site, "pair not adjacent")
    common = sorted(g.neighbors(a) & g.neighbors(b))
    rec = Recorder(g)
    v = rec.add_vertex()
    c = rec.add_vertex()
    for x in (a, b, c):
        rec.add_edge(v, x)
    for x in common:
        rec.remove_edge(a, x)
        rec.remove_edge(b, x)
        rec.add_edge(c, x)
    lo, hi = sorted((a, b))
    restore = make_site("CN", (v,), c1=[lo, hi], c2=[c], pairs=[(lo, c), (hi, c)])
    return _finish(instance, rec, site, 1, restore, v=v, c=c)


def find_uncn(instance: Instance, scope: Scope = None, caps: BackwardCaps = DEFAULT_CAPS) -> list[Site]:
    g = instance.graph
    sc = scope_set(g, scope)
    return [make_site("Uncn", e) for e in g.edges() if hits(sc, e)]


def sample_uncn(instance: Instance, rng: random.Random, scope: Scope = None) -> Site | None:
    g = instance.graph
    pool = [v for v in _pool(g, scope) if g.degree(v) > 0]
    if not pool:
        return None
    a = rng.choice(pool)
    b = rng.choice(g.sorted_neighbors(a))
    return make_site("Uncn", tuple(sorted((a, b))))


# -- Undom ------------------------------------------------------------------------------------


def apply_undom(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    (v,) = site.anchors
    extra = tuple(site.get("s", ()))
    require_live(g, site, (v, *extra))
    targets = sorted(set(extra) | g.closed_neighborhood(v))
    rec = Recorder(g)
    u = rec.add_vertex()
    for x in targets:
        rec.add_edge(u, x)
    restore = make_site("Dom", (u, v))
    return _finish(instance, rec, site, 1, restore, u=u)


def find_undom(instance: Instance, scope: Scope = None, caps: BackwardCaps = DEFAULT_CAPS) -> list[Site]:
    """Every scoped v with every S from the scope outside N[v], |S| <= cap."""
    g = instance.graph
    pool = _pool(g, scope)
    sites = []
    for v in pool:
        candidates = [x for x in pool if x not in g.closed_neighborhood(v)]
        for size in range(min(caps.max_set_size, len(candidates)) + 1):
            for extra in itertools.combinations(candidates, size):
                sites.append(make_site("Undom", (v,), s=list(extra)))
    return sites


def sample_undom(instance: Instance, rng: random.Random, scope: Scope = None) -> Site | None:
    g = instance.graph
    pool = _pool(g, scope)
    if not pool:
        return None
    v = rng.choice(pool)
    near = sorted(g.ball(v, 2) - g.closed_neighborhood(v))
    size = min(_geometric(rng), len(near))
    return make_site("Undom", (v,), s=sorted(rng.sample(near, size)))


# -- Ununconf ------------------------------------------------------------------------------------


def ununconf_certificate(g: Graph, attached: frozenset[int]):
    return unconfined_certificate(g, g.next_id, 1, extra=(g.next_id, attached))


def apply_ununconf(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    attached = frozenset(site.anchors)
    require_live(g, site, attached)
    cert = ununconf_certificate(g, attached)
    if cert is None:
        raise NotApplicableError(f"a vertex attached to {sorted(attached)} would not be unconfined")
    rec = Recorder(g)
    v = rec.add_vertex()
    for x in sorted(attached):
        rec.add_edge(v, x)
    restore = make_site("Unconf", (v,))
    steps = [[list(xs), list(ys), w] for xs, ys, w in cert]
    return _finish(instance, rec, site, 1, restore, v=v, certificate=steps)


def find_ununconf(instance: Instance, scope: Scope = None, caps: BackwardCaps = DEFAULT_CAPS) -> list[Site]:
    g = instance.graph
    pool = _pool(g, scope)
    sites = []
    for size in range(1, min(caps.max_set_size, len(pool)) + 1):
        for attached in itertools.combinations(pool, size):
            if ununconf_certificate(g, frozenset(attached)) is not None:
                sites.append(make_site("Ununconf", attached))
    return sites


def sample_ununconf(instance: Instance, rng: random.Random, scope: Scope = None) -> Site | None:
    """Propose S around a random root; half the proposals contain some N[w]."""
    g = instance.graph
    pool = _pool(g, scope)
    if not pool:
        return None
    for _ in range(DEFAULT_CAPS.sample_attempts):
        root = rng.choice(pool)
        near = sorted(g.ball(root, 2))
        if rng.random() < 0.5:
            base = g.closed_neighborhood(root)
            rest = sorted(set(near) - base)
            extra = rng.sample(rest, min(_geometric(rng), len(rest)))
            attached = base | set(extra)
        else:
            size = min(1 + _geometric(rng), len(near))
            attached = set(rng.sample(near, size))
        if ununconf_certificate(g, frozenset(attached)) is not None:
            return make_site("Ununconf", sorted(attached))
    return None


# -- OEIns ----------------------------------------------------------------------------------------


def oe_insert_ok(g: Graph, a: int, b: int, c: int) -> bool:
    """OEDel would apply to (a, b, c) after inserting the edge {a, b}."""
    if len({a, b, c}) < 3 or g.has_edge(a, b):
        return False
    if g.has_edge(c, a) == g.has_edge(c, b):
        return False
    return g.neighbors(c) <= (g.neighbors(a) | g.neighbors(b) | {a, b})


def apply_oe_insert(instance: Instance, site: Site) -> ModificationRecord:
    g = instance.graph
    a, b, c = site.anchors
    require_live(g, site, (a, b, c))
    require(oe_insert_ok(g, a, b, c), site, "insertion conditions fail")
    rec = Recorder(g)
    rec.add_edge(a, b)
    lo, hi = sorted((a, b))
    restore = make_site("OEDel", (lo, hi, c))
    assert oe_delete_ok(g, lo, hi, c)
    return _finish(instance, rec, site, 0, restore)


def find_oe_insert(instance: Instance, scope: Scope = None, caps: BackwardCaps = DEFAULT_CAPS) -> list[Site]:
    """Triples with ``c`` adjacent to ``b`` and ``a`` within distance two of ``c``."""
    g = instance.graph
    sc = scope_set(g, scope)
    found = set()
    for c in g.vertices():
        near = g.ball(c, 2)
        for b in g.sorted_neighbors(c):
            for a in sorted(near):
                if hits(sc, (a, b, c)) and oe_insert_ok(g, a, b, c):
                    lo, hi = sorted((a, b))
                    found.add((lo, hi, c))
    return [make_site("OEIns", t) for t in sorted(found)]


def sample_oe_insert(instance: Instance, rng: random.Random, scope: Scope = None) -> Site | None:
    g = instance.graph
    pool = [c for c in _pool(g, scope) if g.degree(c) > 0]
    for _ in range(DEFAULT_CAPS.sample_attempts if pool else 0):
        c = rng.choice(pool)
        b = rng.choice(g.sorted_neighbors(c))
        near = sorted(g.ball(c, 2) - {b, c})
        if not near:
            continue
        a = rng.choice(near)
        if oe_insert_ok(g, a, b, c):
            return make_site("OEIns", (*sorted((a, b)), c))
    return None


# -- Untriangle --------------------------------------------------------------------------------------


def apply_untriangle(instance: Instance, site: Site) -> ModificationRecord:
    """Attach a fresh triangle t, u, w; u and w get the listed neighbors."""
    g = instance.graph
    u_nbrs = tuple(site.get("u", ()))
    w_nbrs = tuple(site.get("w", ()))
    require_live(g, site, (*u_nbrs, *w_nbrs))
    rec = Recorder(g)
    t = rec.add_vertex()
    u = rec.add_vertex()
    w = rec.add_vertex()
    for x, y in ((t, u), (t, w), (u, w)):
        rec.add_edge(x, y)
    for x in sorted(set(u_nbrs)):
        rec.add_edge(u, x)
    for x in sorted(set(w_nbrs)):
        rec.add_edge(w, x)
    restore = make_site("Triangle", (t,))
    return _finish(instance, rec, site, 2, restore, triangle=[t, u, w])


def make_untriangle_site(u_nbrs, w_nbrs) -> Site:
    anchors = sorted(set(u_nbrs) | set(w_nbrs))
    return make_site("Untriangle", anchors, u=sorted(set(u_nbrs)), w=sorted(set(w_nbrs)))


def find_untriangle(instance: Instance, scope: Scope = None, caps: BackwardCaps = DEFAULT_CAPS) -> list[Site]:
    g = instance.graph
    pool = _pool(g, scope)
    subsets = [
        s for size in range(min(2, len(pool)) + 1) for s in itertools.combinations(pool, size)
    ]
    return [make_untriangle_site(x, y) for x in subsets for y in subsets if x <= y]


def sample_untriangle(instance: Instance, rng: random.Random, scope: Scope = None) -> Site | None:
    g = instance.graph
    pool = _pool(g, scope)
    if not pool:
        return make_untriangle_site((), ())
    root = rng.choice(pool)
    near = sorted(g.ball(root, 1))
    u_nbrs = rng.sample(near, min(_geometric(rng), len(near)))
    w_nbrs = rng.sample(near, min(_geometric(rng), len(near)))
    return make_untriangle_site(u_nbrs, w_nbrs)


# -- registry ---------------------------------------------------------------------------------------------

BACKWARD_RULES: dict[str, BackwardRule] = {
    r.name: r
    for r in (
        BackwardRule("Undeg2", BACKWARD, find_undeg2, apply_undeg2, sample_undeg2),
        BackwardRule("Undeg3", BACKWARD, find_undeg3, apply_undeg3, sample_undeg3),
        BackwardRule("Uncn", BACKWARD, find_uncn, apply_uncn, sample_uncn),
        BackwardRule("Undom", BACKWARD, find_undom, apply_undom, sample_undom),
        BackwardRule("Ununconf", BACKWARD, find_ununconf, apply_ununconf, sample_ununconf),
        BackwardRule("OEIns", BACKWARD, find_oe_insert, apply_oe_insert, sample_oe_insert),
        BackwardRule("Untriangle", BACKWARD, find_untriangle, apply_untriangle, sample_untriangle),
    )
}

# the six converse rules used by default; Untriangle only serves the triangle demo
STANDARD_BACKWARD = ("Undeg2", "Undeg3", "Uncn", "Undom", "Ununconf", "OEIns")

BACKWARD_ALIASES = {
    "undeg2": "Undeg2",
    "undeg3": "Undeg3",
    "uncn": "Uncn",
    "undom": "Undom",
    "ununconf": "Ununconf",
    "oeins": "OEIns",
    "oe_insert": "OEIns",
    "untriangle": "Untriangle",
}


def resolve_backward_name(name: str) -> str:
    key = name.strip()
    if key in BACKWARD_RULES:
        return key
    alias = BACKWARD_ALIASES.get(key.lower())
    if alias is None:
        raise KeyError(f"unknown backward rule {name!r}")
    return alias
