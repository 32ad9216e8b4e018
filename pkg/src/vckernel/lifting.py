"""Turning a cover of a reduced instance into a cover of the original.

Lifting walks a trace backwards. For a forward record it extends a cover of
the image to a cover of the pre-image using the rule's safeness argument;
for a backward record it shrinks a cover of the inflated graph to one of
the pre-image. On optimal input every step changes the size by exactly
``-delta_k``; on any valid cover the output is still a cover.
"""

from __future__ import annotations

from typing import Callable, Iterable

from .errors import InvalidSolutionError
from .graph import Graph
from .records import ModificationRecord, Site
from .solver import verify_cover

Lifter = Callable[[ModificationRecord, Graph, set[int]], set[int]]


def _site(record: ModificationRecord) -> Site:
    return Site.from_json(record.choice["site"])


# -- forward rules: cover of image -> cover of pre-image ----------------------


def _lift_keep(record, pre, cover):
    return cover


def _lift_add_anchor(index: int) -> Lifter:
    def lift(record, pre, cover):
        return cover | {_site(record).anchors[index]}

    return lift


def _lift_deg2_fold(record, pre, cover):
    v, a, b = _site(record).anchors
    merged = record.choice["merged"]
    if merged in cover:
        return (cover - {merged}) | {a, b}
    return cover | {v}


_DEG3_DROP = {
    frozenset("b"): "b",
    frozenset("ab"): "a",
    frozenset("bc"): "b",
    frozenset("ac"): "c",
}


def _lift_deg3_is(record, pre, cover):
    v, a, b, c = _site(record).anchors
    names = {"a": a, "b": b, "c": c}
    present = frozenset(k for k, x in names.items() if x in cover)
    if present == frozenset("abc"):
        return cover
    drop = _DEG3_DROP.get(present)
    if drop is None:
        raise InvalidSolutionError("cover misses an edge among the degree-3 neighbors")
    return (cover - {names[drop]}) | {v}


def _lift_desk(record, pre, cover):
    if set(record.choice["out_a"]) <= cover:
        return cover | set(record.choice["side_b"])
    return cover | set(record.choice["side_a"])


def _lift_cn(record, pre, cover):
    site = _site(record)
    (v,) = site.anchors
    c1, c2 = list(site.get("c1")), list(site.get("c2"))
    partner = {a: b for a, b in site.get("pairs")}
    missing = [a for a in c1 if a not in cover]
    if not missing:
        return cover | set(c2)
    if len(missing) > 1:
        raise InvalidSolutionError("cover misses two vertices of a clique")
    return cover | {v} | (set(c2) - {partner[missing[0]]})


def _lift_oe_delete(record, pre, cover):
    a, b, c = _site(record).anchors
    if a in cover or b in cover:
        return cover
    x = a if pre.has_edge(a, c) else b
    return (cover - {c}) | {x}


def _lift_struction(record, pre, cover):
    site = _site(record)
    v = site.anchors[0]
    order = record.choice["order"]
    w_map = record.choice["w"]
    removed = set(record.removed_vertices)
    # independent-set view: I' is everything outside the cover
    chosen = [(i, j) for wid, i, j in w_map if wid not in cover]
    if not chosen:
        return (cover - {wid for wid, _, _ in w_map}) | (removed - {v})
    heads = {i for i, _ in chosen}
    if len(heads) != 1:
        raise InvalidSolutionError("struction vertices outside the cover are adjacent")
    (i,) = heads
    free = {order[i]} | {order[j] for _, j in chosen}
    return (cover - {wid for wid, _, _ in w_map}) | (removed - free)


def _lift_magnet(record, pre, cover):
    a, b = _site(record).anchors
    c = record.choice["merged"]
    if c in cover:
        return (cover - {c}) | {a, b}
    if set(record.choice["side_a"]) <= cover:
        return cover | {b}
    return cover | {a}


def _lift_lp(record, pre, cover):
    return cover | set(record.choice["ones"])


def _lift_triangle(record, pre, cover):
    return cover | set(record.choice["order"])


FORWARD_LIFTS: dict[str, Lifter] = {
    "Deg0": _lift_keep,
    "Deg1": _lift_add_anchor(1),
    "Deg2Fold": _lift_deg2_fold,
    "Deg3IS": _lift_deg3_is,
    "DegGtK": _lift_add_anchor(0),
    "Dom": _lift_add_anchor(0),
    "Unconf": _lift_add_anchor(0),
    "UnconfKappa": _lift_add_anchor(0),
    "Desk": _lift_desk,
    "CN": _lift_cn,
    "OEDel": _lift_oe_delete,
    "Struct": _lift_struction,
    "Magnet": _lift_magnet,
    "LP": _lift_lp,
    "Triangle": _lift_triangle,
}


# -- backward rules: cover of inflated graph -> cover of pre-image -------------


def _project_undeg2(record, pre, cover):
    (v,) = _site(record).anchors
    a, b = record.choice["a"], record.choice["b"]
    out = cover - {a, b}
    if v not in cover:
        return out | {v}
    if a in cover or b in cover:
        return out
    return out - {v}


_UNDEG3_ADD = {
    frozenset(): "b",
    frozenset("a"): "c",
    frozenset("b"): "a",
    frozenset("c"): "b",
    frozenset("ab"): "c",
    frozenset("bc"): "a",
    frozenset("ac"): "b",
}


def _project_undeg3(record, pre, cover):
    a, b, c = _site(record).anchors
    v = record.choice["v"]
    if v not in cover:
        return cover
    names = {"a": a, "b": b, "c": c}
    present = frozenset(k for k, x in names.items() if x in cover)
    out = cover - {v}
    add = _UNDEG3_ADD.get(present)
    return out | {names[add]} if add else out


def _project_uncn(record, pre, cover):
    a, b = _site(record).anchors
    v, c = record.choice["v"], record.choice["c"]
    if v not in cover:
        return cover - {c}
    if c not in cover:
        return cover - {v}
    out = cover - {v, c}
    if a not in cover:
        return out | {a}
    if b not in cover:
        return out | {b}
    return out


def _project_undom(record, pre, cover):
    (v,) = _site(record).anchors
    u = record.choice["u"]
    if u in cover:
        return cover - {u}
    return cover - {v}


def _project_ununconf(record, pre, cover):
    v = record.choice["v"]
    if v in cover:
        return cover - {v}
    steps = record.choice["certificate"]
    prefixes = [{v}]
    for _, _, w in steps:
        if w is not None:
            prefixes.append(prefixes[-1] | {w})
    current = set(cover)
    # exchange X for Y at the earliest step whose prefix S meets the cover,
    # which pulls the cover strictly closer to v until v itself is in it
    while v not in current:
        hit = next((j for j, s in enumerate(prefixes) if s & current), None)
        step = len(steps) - 1 if hit is None else hit - 1
        xs, ys, _ = steps[step]
        current = (current - set(xs)) | set(ys)
    return current - {v}


def _project_oe_insert(record, pre, cover):
    return cover


def _project_untriangle(record, pre, cover):
    return cover - set(record.choice["triangle"])


BACKWARD_PROJECTIONS: dict[str, Lifter] = {
    "Undeg2": _project_undeg2,
    "Undeg3": _project_undeg3,
    "Uncn": _project_uncn,
    "Undom": _project_undom,
    "Ununconf": _project_ununconf,
    "OEIns": _project_oe_insert,
    "Untriangle": _project_untriangle,
}


def lift_record(record: ModificationRecord, pre: Graph, cover: set[int]) -> set[int]:
    table = FORWARD_LIFTS if record.direction == "forward" else BACKWARD_PROJECTIONS
    try:
        fn = table[record.rule]
    except KeyError:
        raise InvalidSolutionError(f"no lifting for rule {record.rule}") from None
    return set(fn(record, pre, set(cover)))


def _check_local(pre: Graph, record: ModificationRecord, before: set[int], after: set[int]) -> None:
    # edges away from the record and from changed cover entries were
    # covered before this step and are untouched, so only check the rest
    suspects = (before ^ after) | record.touched_vertices
    for x in suspects:
        if x not in pre or x in after:
            continue
        for y in pre.neighbors(x):
            if y not in after:
                raise InvalidSolutionError(f"lifting {record.rule} (step {record.step}) left edge {x}-{y} uncovered")


def lift_solution(records: Iterable[ModificationRecord], final_graph: Graph, cover: Iterable[int]) -> set[int]:
    """Lift a cover of ``final_graph`` back through ``records``.

    Raises :class:`InvalidSolutionError` when the input is not a cover.
    """
    current = {v for v in cover}
    if not verify_cover(final_graph, current):
        raise InvalidSolutionError("input is not a vertex cover of the final graph")
    current &= set(final_graph.vertices())
    graph = final_graph.copy()
    for record in reversed(list(records)):
        record.undo(graph)
        lifted = lift_record(record, graph, current)
        dead = [x for x in lifted if x not in graph]
        if dead:
            raise InvalidSolutionError(f"lifting {record.rule} (step {record.step}) kept dead vertices {dead}")
        _check_local(graph, record, current, lifted)
        current = lifted
    if not verify_cover(graph, current):
        raise InvalidSolutionError("lifted set is not a cover of the initial graph")
    return current
