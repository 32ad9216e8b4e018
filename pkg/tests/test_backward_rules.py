from __future__ import annotations

import random

import pytest

from conftest import complete, cycle, graph_from, path, random_graph
from vckernel.errors import NotApplicableError, StaleSiteError
from vckernel.graph import Graph, Instance
from vckernel.isomorphism import ModificationContext, are_isomorphic, locally_isomorphic
from vckernel.records import Site, make_site
from vckernel.rules.backward import (
    BACKWARD_RULES,
    STANDARD_BACKWARD,
    find_oe_insert,
    find_undeg2,
    find_undeg3,
    find_ununconf,
    make_untriangle_site,
)
from vckernel.rules.forward import FORWARD_RULES, apply_forward
from vckernel.solver import tau


def run(graph: Graph, site: Site):
    inst = Instance(graph.copy())
    rec = BACKWARD_RULES[site.rule].apply(inst, site)
    inst.graph.validate()
    return inst, rec


def restore(inst: Instance, rec):
    """Apply the recorded forward site; return the restored instance."""
    after = Instance(inst.graph.copy(), inst.k)
    fwd = apply_forward(after, Site.from_json(rec.choice["restore"]))
    return after, fwd


def assert_round_trip(graph: Graph, site: Site):
    inst, rec = run(graph, site)
    assert tau(inst.graph) - tau(graph) == rec.delta_k
    back, fwd = restore(inst, rec)
    assert back.k == 0
    ctx_back = ModificationContext.from_records(back.graph, graph.vertices(), [rec, fwd])
    assert locally_isomorphic(ctx_back, ModificationContext.unmodified(graph))
    return inst, rec


# -- Undeg2 ---------------------------------------------------------------------------


def test_undeg2_isolated_vertex():
    inst, rec = assert_round_trip(Graph(1), make_site("Undeg2", (0,), assignment=[]))
    assert are_isomorphic(inst.graph, path(3)) and rec.delta_k == 1


def test_undeg2_round_trip():
    g = path(3)  # x=0, v=1, y=2
    inst, _ = assert_round_trip(g, make_site("Undeg2", (1,), assignment=[(0, "A"), (2, "B")]))
    assert inst.graph.degree(1) == 2


def test_undeg2_triggers_deg3():
    # v=0 with neighbors 1..4; 1 and 2 are nonadjacent and go to A, the rest to B
    g = graph_from([(0, 1), (0, 2), (0, 3), (0, 4), (3, 4), (1, 3)])
    site = make_site("Undeg2", (0,), assignment=[(1, "A"), (2, "A"), (3, "B"), (4, "B")])
    inst, rec = assert_round_trip(g, site)
    a = rec.choice["a"]
    assert inst.graph.degree(a) == 3
    assert any(s.anchors[0] == a for s in FORWARD_RULES["Deg3IS"].find(Instance(inst.graph)))


def test_undeg2_enumeration_modulo_swap():
    g = path(3)
    found = [s for s in find_undeg2(Instance(g)) if s.anchors == (1,)]
    # 9 side assignments for two neighbors, identified in swapped pairs except AB/AB
    assert len(found) == 5
    with pytest.raises(StaleSiteError):
        run(g, make_site("Undeg2", (1,), assignment=[(0, "A")]))


# -- Undeg3 ---------------------------------------------------------------------------


def test_undeg3_p3():
    inst, rec = assert_round_trip(path(3), make_site("Undeg3", (0, 1, 2), drops=[]))
    assert are_isomorphic(inst.graph, graph_from([(0, 1), (0, 2), (0, 3)])) and rec.delta_k == 0


def test_undeg3_precondition():
    # outside vertex 3 adjacent only to b=1
    g = graph_from([(0, 1), (1, 2), (1, 3)])
    assert not any(s.anchors == (0, 1, 2) for s in find_undeg3(Instance(g)))
    with pytest.raises(StaleSiteError):
        run(g, make_site("Undeg3", (0, 1, 2), drops=[]))


def test_undeg3_round_trip_all_small(graphs6):
    for g in graphs6:
        for s in find_undeg3(Instance(g)):
            assert_round_trip(g, s)


# -- Uncn -----------------------------------------------------------------------------------


def test_uncn_triangle():
    inst, rec = assert_round_trip(complete(3), make_site("Uncn", (0, 1)))
    v, c = rec.choice["v"], rec.choice["c"]
    assert inst.graph.n == 5 and rec.delta_k == 1
    assert set(inst.graph.edges()) == {(0, 1), (0, v), (1, v), (2, c), tuple(sorted((c, v)))}
    assert tau(inst.graph) == 3


def test_uncn_no_common_neighbor():
    inst, rec = assert_round_trip(path(2), make_site("Uncn", (0, 1)))
    assert inst.graph.degree(rec.choice["c"]) == 1 and rec.delta_k == 1


# -- Undom -----------------------------------------------------------------------------------


def test_undom_examples():
    inst, rec = assert_round_trip(path(2), make_site("Undom", (0,), s=[]))
    assert are_isomorphic(inst.graph, complete(3)) and rec.delta_k == 1
    inst, _ = assert_round_trip(Graph(1), make_site("Undom", (0,), s=[]))
    assert inst.graph.m == 1
    # Domination restores the pre-image exactly, not only up to isomorphism
    g = cycle(5)
    inst, rec = run(g, make_site("Undom", (0,), s=[2]))
    back, _ = restore(inst, rec)
    assert back.graph == g


# -- Ununconf -----------------------------------------------------------------------------------


def test_ununconf_examples():
    g = cycle(5)
    inst, rec = assert_round_trip(g, make_site("Ununconf", sorted(g.closed_neighborhood(0))))
    assert rec.delta_k == 1
    with pytest.raises(NotApplicableError):
        run(g, make_site("Ununconf", ()))


def test_ununconf_sampled_on_c5():
    g = cycle(5)
    rng = random.Random(2)
    committed = 0
    for _ in range(200):
        size = rng.randint(1, 5)
        attached = sorted(rng.sample(range(5), size))
        try:
            inst, rec = run(g, make_site("Ununconf", attached))
        except NotApplicableError:
            continue
        committed += 1
        assert tau(inst.graph) == tau(g) + 1
    assert committed > 0
    assert find_ununconf(Instance(g))


# -- OEIns ---------------------------------------------------------------------------------------


def test_oe_insert_examples():
    # edge b=1 - c=2 plus isolated a=0
    g = graph_from([(1, 2)], 3)
    inst, rec = assert_round_trip(g, make_site("OEIns", (0, 1, 2)))
    assert are_isomorphic(inst.graph, path(3)) and rec.delta_k == 0
    back, _ = restore(inst, rec)
    assert back.graph == g
    tri_minus = graph_from([(0, 2), (1, 2)])
    assert not any(s.anchors[2] == 2 for s in find_oe_insert(Instance(tri_minus)))


# -- Untriangle ------------------------------------------------------------------------------------


def test_untriangle():
    g = path(2)
    inst, rec = assert_round_trip(g, make_untriangle_site([0], [1]))
    assert rec.delta_k == 2 and inst.graph.n == 5


# -- contracts -------------------------------------------------------------------------------------


def test_sampled_backward_contracts():
    rng = random.Random(4)
    counts = dict.fromkeys(STANDARD_BACKWARD, 0)
    for _ in range(150):
        g = random_graph(rng, rng.randint(1, 7), rng.choice([0.2, 0.5]))
        for name in STANDARD_BACKWARD:
            site = BACKWARD_RULES[name].sample(Instance(g), rng, None)
            if site is None:
                continue
            try:
                inst, rec = assert_round_trip(g, site)
            except NotApplicableError:
                continue
            counts[name] += 1
            assert rec.delta_n >= 0
            expected = 0 if name in ("Undeg3", "OEIns") else 1
            assert rec.delta_k == expected
    assert all(c > 0 for c in counts.values()), counts


def test_samplers_respect_scope():
    rng = random.Random(0)
    g = graph_from([(0, 1), (1, 2), (3, 4), (4, 5)])
    for name in STANDARD_BACKWARD:
        for _ in range(20):
            site = BACKWARD_RULES[name].sample(Instance(g), rng, [0, 1, 2])
            if site is None:
                continue
            inst = Instance(g.copy())
            try:
                rec = BACKWARD_RULES[name].apply(inst, site)
            except NotApplicableError:
                continue
            assert rec.touched_vertices <= {0, 1, 2}
