from __future__ import annotations

import itertools
import random

import pytest

from conftest import complete, cycle, graph_from, path, random_graph
from vckernel.errors import StaleSiteError
from vckernel.graph import Graph, Instance, Mode
from vckernel.isomorphism import are_isomorphic, canonical_form
from vckernel.records import make_site
from vckernel.rules.forward import (
    FORWARD_RULES,
    apply_forward,
    buss_no_instance_check,
    find_cn,
    find_cn_partition,
    find_deg_gt_k,
    find_struction,
    find_unconfined_kappa,
    is_unconfined,
    unconfined_certificate,
)
from vckernel.solver import tau


def run(graph: Graph, site, k: int = 0, mode: Mode = Mode.COUNTING):
    inst = Instance(graph.copy(), k, mode)
    rec = apply_forward(inst, site)
    inst.graph.validate()
    return inst, rec


def sites(graph: Graph, rule: str, **kw):
    return FORWARD_RULES[rule].find(Instance(graph), None, **kw)


def assert_safe(graph: Graph, site):
    inst, rec = run(graph, site)
    assert tau(graph) - tau(inst.graph) == -rec.delta_k
    return inst, rec


# -- degree rules ---------------------------------------------------------------------


def test_deg0():
    inst, rec = run(Graph(1), make_site("Deg0", (0,)))
    assert inst.graph.n == 0 and rec.delta_k == 0
    g = graph_from([(0, 1), (1, 2), (0, 2)], 4)
    inst, _ = run(g, make_site("Deg0", (3,)))
    assert are_isomorphic(inst.graph, complete(3))
    with pytest.raises(StaleSiteError):
        run(path(2), make_site("Deg0", (0,)))


def test_deg1():
    inst, rec = assert_safe(path(2), make_site("Deg1", (0, 1)))
    assert inst.graph.n == 0 and rec.delta_k == -1
    star = graph_from([(0, 1), (0, 2), (0, 3)])
    inst, rec = assert_safe(star, make_site("Deg1", (1, 0)))
    assert inst.graph.n == 2 and inst.graph.m == 0 and inst.k == -1
    inst, _ = assert_safe(path(4), make_site("Deg1", (0, 1)))
    assert inst.graph.edges() == [(2, 3)]


def test_deg2_fold():
    inst, rec = assert_safe(path(3), make_site("Deg2Fold", (1, 0, 2)))
    assert inst.graph.n == 1 and rec.delta_k == -1
    inst, _ = assert_safe(path(5), make_site("Deg2Fold", (2, 1, 3)))
    assert are_isomorphic(inst.graph, path(3))
    assert sites(complete(3), "Deg2Fold") == []


def test_deg3_is():
    star = graph_from([(0, 1), (0, 2), (0, 3)])
    found = sites(star, "Deg3IS")
    assert len(found) == 6
    for s in found:
        inst, rec = assert_safe(star, s)
        assert are_isomorphic(inst.graph, path(3)) and rec.delta_k == 0
    # v=0 with leaves a=1, c=3 and b=2 having outside neighbor x=4
    g = graph_from([(0, 1), (0, 2), (0, 3), (2, 4)])
    inst, _ = assert_safe(g, make_site("Deg3IS", (0, 1, 2, 3)))
    assert {(1, 2), (2, 3), (1, 4)} <= set(inst.graph.edges())
    chord = graph_from([(0, 1), (0, 2), (0, 3), (1, 2)])
    assert sites(chord, "Deg3IS") == []


def test_deg_gt_k_budget_mode_only():
    star = graph_from([(0, i) for i in range(1, 6)])
    budget = Instance(star.copy(), 3, Mode.BUDGET)
    found = find_deg_gt_k(budget)
    assert [s.anchors for s in found] == [(0,)]
    apply_forward(budget, found[0])
    assert budget.graph.n == 5 and budget.graph.m == 0 and budget.k == 2
    assert find_deg_gt_k(Instance(star.copy())) == []
    assert find_deg_gt_k(Instance(star.copy(), 5, Mode.BUDGET)) == []
    with pytest.raises(StaleSiteError):
        apply_forward(Instance(star.copy()), make_site("DegGtK", (0,)))


def test_buss_check():
    assert not buss_no_instance_check(Instance(Graph(), 0, Mode.BUDGET))
    assert buss_no_instance_check(Instance(path(2), 0, Mode.BUDGET))
    assert not buss_no_instance_check(Instance(cycle(4), 2, Mode.BUDGET))


# -- domination and unconfined ------------------------------------------------------------


def triangle_pendant() -> Graph:
    # u=0, v=1, w=2, x=3
    return graph_from([(0, 1), (1, 2), (0, 2), (0, 3)])


def test_domination():
    inst, rec = assert_safe(triangle_pendant(), make_site("Dom", (0, 1)))
    assert inst.graph.edges() == [(1, 2)] and 3 in inst.graph and rec.delta_k == -1
    inst, _ = assert_safe(complete(3), make_site("Dom", (0, 1)))
    assert inst.graph.edges() == [(1, 2)]
    # N[3] lies inside N[1] only if 1 and 3 were adjacent; they are not
    g = graph_from([(0, 1), (1, 2), (0, 3)])
    with pytest.raises(StaleSiteError):
        run(g, make_site("Dom", (1, 3)))


def test_unconfined_examples():
    assert is_unconfined(triangle_pendant(), 0)
    inst, rec = assert_safe(path(4), make_site("Unconf", (0,)))
    assert inst.graph.n == 3 and rec.delta_k == -1
    assert not is_unconfined(path(3), 0)


def test_unconfined_kappa_generalizes_kappa_one(graphs6):
    for g in graphs6[::5]:
        for v in g.vertices():
            if is_unconfined(g, v, 1):
                assert is_unconfined(g, v, 4)
                cert = unconfined_certificate(g, v, 4)
                assert cert is not None


def test_unconfined_kappa_witness_c4():
    # C4 in graph6 form: the kappa=1 search fails at vertex 0 but a two-vertex X
    # succeeds, and 0 lies in a minimum cover
    from vckernel.io import parse_graph6

    g = parse_graph6("C]")
    assert not is_unconfined(g, 0, 1)
    assert is_unconfined(g, 0, 2)
    inst, rec = assert_safe(g, make_site("UnconfKappa", (0,), kappa=2))
    assert rec.removed_vertices == (0,)
    assert find_unconfined_kappa(Instance(g), kappa=0) == []


def test_unconfined_kappa_sound_on_small_graphs(graphs6):
    # v may only be reported when some minimum cover contains it
    for g in graphs6:
        t = tau(g)
        for v in g.vertices():
            if is_unconfined(g, v, 4):
                h = g.copy()
                h.remove_vertex(v)
                assert tau(h) == t - 1


# -- desk -----------------------------------------------------------------------------------


def test_desk():
    inst, rec = assert_safe(cycle(4), make_site("Desk", (0, 1, 2, 3)))
    assert inst.graph.n == 0 and rec.delta_k == -2
    g = graph_from([(0, 1), (1, 2), (2, 3), (3, 0), (0, 4), (1, 5)])
    inst, _ = assert_safe(g, make_site("Desk", (0, 1, 2, 3)))
    assert inst.graph.edges() == [(4, 5)]
    chord = graph_from([(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])
    assert sites(chord, "Desk") == []


# -- clique neighborhood ----------------------------------------------------------------------


def test_cn_partition_examples():
    clique_nbhd = graph_from([(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    assert find_cn_partition(clique_nbhd, 0) is None
    # v=0, N(v)={a=1, b=2, c=3}, only edge a-b inside
    g = graph_from([(0, 1), (0, 2), (0, 3), (1, 2)])
    c1, c2, partner = find_cn_partition(g, 0)
    assert c1 == [1, 2] and c2 == [3] and partner == {1: 3, 2: 3}
    # H containing a triangle: N(v) independent of size 3
    star = graph_from([(0, 1), (0, 2), (0, 3)])
    assert find_cn_partition(star, 0) is None


def test_cn_partition_against_brute_force(graphs6):
    # brute force: any split of N(v) into two cliques meeting the rule's conditions
    for g in graphs6:
        for v in g.vertices():
            nb = g.sorted_neighbors(v)
            exists = False
            for mask in range(1 << len(nb)):
                c1 = [x for i, x in enumerate(nb) if mask >> i & 1]
                c2 = [x for i, x in enumerate(nb) if not mask >> i & 1]
                if len(c1) < len(c2) or not g.is_clique(c1) or not g.is_clique(c2):
                    continue
                if all(sum(not g.has_edge(a, b) for b in c2) == 1 for a in c1):
                    exists = True
                    break
            assert exists == (find_cn_partition(g, v) is not None), (g.edges(), v)


def test_cn_apply():
    # v=0, a=1, b=2, c=3, x=4, y=5; edges a-b, c-x, a-y
    g = graph_from([(0, 1), (0, 2), (0, 3), (1, 2), (3, 4), (1, 5)])
    (site,) = [s for s in find_cn(Instance(g)) if s.anchors == (0,)]
    inst, rec = assert_safe(g, site)
    assert rec.delta_k == -1 and set(inst.graph.vertices()) == {1, 2, 4, 5}
    assert {(1, 4), (2, 4)} <= set(inst.graph.edges())
    assert tau(g) == 3 and tau(inst.graph) == 2


# -- optional edge deletion -----------------------------------------------------------------------


def test_oe_delete():
    # a=0, b=1, c=2 with edges a-b, b-c
    inst, rec = assert_safe(path(3), make_site("OEDel", (0, 1, 2)))
    assert inst.graph.edges() == [(1, 2)] and inst.graph.n == 3 and rec.delta_k == 0
    assert sites(complete(3), "OEDel") == []
    rng = random.Random(5)
    for _ in range(100):
        g = random_graph(rng, 7, 0.4)
        for s in sites(g, "OEDel"):
            inst, rec = run(g, s)
            assert inst.graph.n == g.n and inst.graph.m == g.m - 1 and rec.delta_k == 0


# -- struction -------------------------------------------------------------------------------------


def test_struction_examples():
    tri = complete(3)
    inst, rec = assert_safe(tri, make_site("Struct", (0, 1, 2)))
    assert inst.graph.n == 0 and rec.delta_k == -2
    triangle_rule, _ = run(tri, make_site("Triangle", (0,)))
    assert canonical_form(inst.graph) == canonical_form(triangle_rule.graph)

    inst, rec = assert_safe(path(3), make_site("Struct", (1, 0, 2)))
    assert inst.graph.n == 1 and rec.delta_k == -1

    star = graph_from([(0, 1), (0, 2), (0, 3)])
    inst, rec = assert_safe(star, make_site("Struct", (0, 1, 2, 3)))
    assert rec.delta_k == 0 and are_isomorphic(inst.graph, path(3))
    deg3, _ = run(star, make_site("Deg3IS", (0, 1, 2, 3)))
    assert canonical_form(deg3.graph) == canonical_form(inst.graph)


def test_struction_guard():
    # K_{1,4}: |W| = 6 > 4, so only the unguarded variant applies
    star = graph_from([(0, i) for i in range(1, 5)])
    assert all(s.anchors[0] != 0 for s in find_struction(Instance(star)))
    unguarded = [s for s in find_struction(Instance(star), unguarded=True) if s.anchors[0] == 0]
    assert unguarded
    inst, rec = assert_safe(star, unguarded[0])
    assert rec.delta_k == 2
    with pytest.raises(StaleSiteError):
        run(star, make_site("Struct", (0, 1, 2, 3, 4)))


# -- magnet and LP -------------------------------------------------------------------------------------


def test_magnet():
    inst, rec = assert_safe(complete(3), make_site("Magnet", (0, 1)))
    assert inst.graph.n == 2 and inst.graph.m == 1 and rec.delta_k == -1
    # a=0, b=1, A={2,3}, B={4}: 3-4 missing
    g = graph_from([(0, 1), (0, 2), (0, 3), (1, 4), (2, 4)])
    assert all(set(s.anchors) != {0, 1} for s in sites(g, "Magnet"))


def test_lp_rule_examples():
    star = graph_from([(0, 1), (0, 2), (0, 3)])
    (site,) = sites(star, "LP")
    inst, rec = assert_safe(star, site)
    assert inst.graph.n == 0 and rec.delta_k == -1
    (site,) = sites(cycle(4), "LP")
    inst, rec = assert_safe(cycle(4), site)
    assert inst.graph.n == 0 and rec.delta_k == -2
    assert sites(cycle(5), "LP") == []


# -- general contracts ---------------------------------------------------------------------------------


ALL_RULES = sorted(r for r in FORWARD_RULES if r != "DegGtK")


def test_size_contracts(graphs6):
    for g in graphs6[::3]:
        for rule in ALL_RULES:
            kw = {"orderings": "all"} if rule == "Struct" else {}
            for s in sites(g, rule, **kw):
                inst, rec = run(g, s)
                assert rec.delta_n <= 0
                if rule not in ("Deg3IS", "Desk", "Struct", "Magnet", "CN", "Deg2Fold"):
                    assert inst.graph.m <= g.m, rule
                if rule == "OEDel":
                    assert rec.delta_n == 0 and rec.delta_m == -1
                if rule == "Struct":
                    assert rec.delta_n < 0 and rec.delta_k <= 0


def test_determinism(graphs6):
    for g in graphs6[::11]:
        for rule in ALL_RULES:
            for s in sites(g, rule):
                _, a = run(g, s)
                _, b = run(g, s)
                assert a.dumps() == b.dumps()


def test_stale_sites_raise():
    g = path(3)
    inst = Instance(g.copy())
    apply_forward(inst, make_site("Deg1", (0, 1)))
    with pytest.raises(StaleSiteError):
        apply_forward(inst, make_site("Deg1", (0, 1)))
    with pytest.raises(StaleSiteError):
        apply_forward(Instance(cycle(5)), make_site("Desk", (0, 1, 2, 3)))


def test_scope_restricts_sites():
    g = graph_from([(0, 1), (2, 3), (3, 4)])
    found = sites(g, "Deg1")
    scoped = FORWARD_RULES["Deg1"].find(Instance(g), [0])
    assert scoped and all(0 in s.anchors for s in scoped)
    assert len(scoped) < len(found)


def test_rule_safeness_random_graphs():
    rng = random.Random(11)
    for _ in range(60):
        g = random_graph(rng, rng.randint(2, 9), rng.choice([0.2, 0.4, 0.6]))
        for rule in ALL_RULES:
            for s in itertools.islice(sites(g, rule), 4):
                assert_safe(g, s)
