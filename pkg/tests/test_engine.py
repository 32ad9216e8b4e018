from __future__ import annotations

import random

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import graph_from, path, random_graph
from vckernel.engine import (
    Engine,
    exhaustive_forward,
    expand_roi,
    graph_fingerprint,
    randomized_exhaustive_deflate,
    replay_trace,
)
from vckernel.errors import InvalidSolutionError, NotApplicableError, SnapshotError, StaleSiteError
from vckernel.graph import Graph, Instance
from vckernel.isomorphism import canonical_form
from vckernel.lifting import lift_solution
from vckernel.records import ModificationRecord, make_site
from vckernel.rules.backward import BACKWARD_RULES, STANDARD_BACKWARD
from vckernel.rules.forward import DEFAULT_PIPELINE, FORWARD_RULES, STANDARD_FORWARD
from vckernel.solver import brute_force_tau, tau, verify_cover


def engine(graph: Graph, seed=0) -> Engine:
    return Engine(Instance(graph.copy()), seed=seed)


def test_apply_and_record_deg1():
    e = engine(path(2))
    rec = e.apply(make_site("Deg1", (0, 1)))
    assert rec.removed_vertices == (0, 1) and rec.removed_edges == ((0, 1),)
    assert rec.boundary == () and rec.delta_k == -1 and rec.step == 0
    assert e.k == -1 and len(e.trace) == 1


def test_apply_and_record_deg2_fold_on_p5():
    e = engine(path(5))
    rec = e.apply(make_site("Deg2Fold", (2, 1, 3)))
    (fresh,) = rec.added_vertices
    assert rec.boundary == (0, 4)
    assert set(rec.removed_vertices) == {1, 2, 3}
    assert set(rec.added_edges) == {(0, fresh), (4, fresh)}


def test_stale_site_leaves_instance_untouched():
    e = engine(path(3))
    before = graph_fingerprint(e.graph)
    with pytest.raises(StaleSiteError):
        e.apply(make_site("Deg1", (1, 0)))
    assert graph_fingerprint(e.graph) == before and e.k == 0 and len(e.trace) == 0
    assert e.try_apply(make_site("Deg1", (1, 0))) is None


def test_record_replay_and_undo_are_exact():
    rng = random.Random(8)
    for _ in range(80):
        g = random_graph(rng, rng.randint(2, 9), 0.4)
        for name in STANDARD_FORWARD:
            for site in FORWARD_RULES[name].find(Instance(g))[:3]:
                e = engine(g)
                rec = e.apply(site)
                h = g.copy()
                rec.replay(h)
                assert h == e.graph
                rec.undo(h)
                assert h == g
                clone = ModificationRecord.from_json(rec.to_json())
                assert clone.dumps() == rec.dumps()


def test_randomized_exhaustive_deflate_examples():
    e = engine(Graph())
    assert randomized_exhaustive_deflate(e, STANDARD_FORWARD, random.Random(0)) == []
    e = engine(path(4))
    recs = randomized_exhaustive_deflate(e, ["Deg1"], random.Random(0))
    assert len(recs) == 2 and e.graph.n == 0 and sum(r.delta_k for r in recs) == -2


def test_deflate_reaches_fixed_point():
    rng = random.Random(1)
    for i in range(40):
        g = random_graph(rng, rng.randint(1, 10), 0.3)
        e = engine(g, seed=i)
        randomized_exhaustive_deflate(e, DEFAULT_PIPELINE, e.derived_rng("x"))
        assert all(not FORWARD_RULES[r].find(e.instance) for r in DEFAULT_PIPELINE)
        assert tau(e.graph) - e.k == tau(g)


def test_exhaustive_forward_counting_identity():
    rng = random.Random(2)
    for _ in range(40):
        g = random_graph(rng, rng.randint(1, 11), 0.35)
        e = engine(g)
        exhaustive_forward(e, DEFAULT_PIPELINE)
        assert tau(e.graph) - e.k == tau(g)
        assert replay_trace(g, e.trace.records).graph == e.graph


def test_seed_determinism():
    g = random_graph(random.Random(3), 12, 0.3)
    runs = []
    for _ in range(2):
        e = engine(g, seed=42)
        randomized_exhaustive_deflate(e, STANDARD_FORWARD, e.derived_rng("d"))
        runs.append([r.dumps() for r in e.trace])
    assert runs[0] == runs[1]


# -- snapshots ----------------------------------------------------------------------------


def test_snapshot_revert_round_trip():
    g = random_graph(random.Random(4), 9, 0.4)
    e = engine(g)
    fp, key = graph_fingerprint(e.graph), canonical_form(e.graph)
    snap = e.snapshot()
    randomized_exhaustive_deflate(e, STANDARD_FORWARD, random.Random(1))
    e.revert(snap)
    assert graph_fingerprint(e.graph) == fp and canonical_form(e.graph) == key
    assert e.k == 0 and len(e.trace) == 0


def test_snapshot_errors_and_nesting():
    e1, e2 = engine(path(4)), engine(path(4))
    foreign = e2.snapshot()
    with pytest.raises(SnapshotError):
        e1.revert(foreign)
    outer = e1.snapshot()
    e1.apply(make_site("Deg1", (0, 1)))
    inner = e1.snapshot()
    e1.apply(make_site("Deg1", (3, 2)))
    e1.revert(inner)
    assert e1.graph.n == 2 and e1.k == -1
    e1.revert(outer)
    assert e1.graph == path(4) and e1.k == 0
    with pytest.raises(SnapshotError):
        e1.revert(inner)
    keep = e1.snapshot()
    e1.apply(make_site("Deg1", (0, 1)))
    e1.release(keep)
    assert e1.graph.n == 2
    with pytest.raises(SnapshotError):
        e1.release(keep)


def test_fresh_ids_are_not_reused_after_revert():
    e = engine(path(3))
    snap = e.snapshot()
    rec = e.apply(make_site("Deg2Fold", (1, 0, 2)))
    first = rec.added_vertices
    e.revert(snap)
    rec = e.apply(make_site("Deg2Fold", (1, 0, 2)))
    assert rec.added_vertices != first


def test_replay_initial():
    g = random_graph(random.Random(5), 10, 0.3)
    e = engine(g)
    randomized_exhaustive_deflate(e, STANDARD_FORWARD, random.Random(2))
    assert e.replay_initial() == g


# -- regions of interest -----------------------------------------------------------------------


def test_expand_roi():
    e = engine(path(5))
    rec = e.apply(make_site("Deg2Fold", (2, 1, 3)))
    (fresh,) = rec.added_vertices
    assert expand_roi({2}, rec, e.graph) >= {fresh, 0, 4}
    assert 2 not in expand_roi({2}, rec, e.graph)

    e = engine(graph_from([(0, 1), (2, 3), (3, 4)]))
    rec = e.apply(make_site("Deg1", (0, 1)))
    assert expand_roi({3}, rec, e.graph) == {3}

    e = engine(path(2))
    rec = e.apply(make_site("Deg1", (0, 1)))
    assert expand_roi({0, 1}, rec, e.graph) == set()


# -- lifting ----------------------------------------------------------------------------------


def test_lift_deg2_fold_both_cases():
    g = path(5)
    e = engine(g)
    rec = e.apply(make_site("Deg2Fold", (2, 1, 3)))
    (fresh,) = rec.added_vertices
    with_fresh = lift_solution(e.trace, e.graph, {fresh})
    assert with_fresh == {1, 3}
    without = lift_solution(e.trace, e.graph, {0, 4})
    assert without == {0, 2, 4}
    assert verify_cover(g, without)


def test_lift_deg1_adds_neighbor():
    g = path(4)
    e = engine(g)
    e.apply(make_site("Deg1", (0, 1)))
    assert lift_solution(e.trace, e.graph, {2}) == {1, 2}


def test_lift_rejects_non_cover():
    e = engine(path(4))
    with pytest.raises(InvalidSolutionError):
        e.lift(set())


def test_lift_lp_adds_ones():
    star = graph_from([(0, 1), (0, 2), (0, 3)])
    e = engine(star)
    (site,) = FORWARD_RULES["LP"].find(e.instance)
    e.apply(site)
    assert e.lift(set()) == {0}


def test_lift_domination_sites_optimal(graphs6):
    for g in graphs6[::2]:
        t = tau(g)
        for site in FORWARD_RULES["Dom"].find(Instance(g)):
            e = engine(g)
            e.apply(site)
            res = brute_force_tau(e.graph)
            lifted = e.lift(res.cover)
            assert verify_cover(g, lifted) and len(lifted) == t


def mixed_trace(g: Graph, rng: random.Random, steps: int) -> Engine:
    e = engine(g, seed=rng.random())
    for _ in range(steps):
        if rng.random() < 0.5:
            name = rng.choice(STANDARD_BACKWARD)
            site = BACKWARD_RULES[name].sample(e.instance, rng, None)
            if site is not None:
                try:
                    e.apply(site)
                except (NotApplicableError, StaleSiteError):
                    pass
        else:
            name = rng.choice(STANDARD_FORWARD)
            sites = FORWARD_RULES[name].find(e.instance)
            if sites:
                e.apply(rng.choice(sites))
    return e


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_lift_mixed_traces_property(seed):
    rng = random.Random(seed)
    g = random_graph(rng, rng.randint(1, 9), rng.choice([0.2, 0.4]))
    e = mixed_trace(g, rng, rng.randint(1, 12))
    assume(e.graph.n <= 18)
    res = brute_force_tau(e.graph)
    lifted = e.lift(res.cover)
    assert verify_cover(g, lifted)
    assert len(lifted) == res.tau - (e.k - e.trace.initial_k) == tau(g)
    # a suboptimal input still lifts to a cover
    assert verify_cover(g, e.lift(set(e.graph.vertices())))
