"""Recording engine: applies rule sites, keeps the trace, snapshots, lifts."""

from __future__ import annotations

import hashlib
import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import InvalidArgumentError, SnapshotError, StaleSiteError
from .graph import Graph, Instance
from .records import ModificationRecord, Site

_snapshot_ids = itertools.count()


def graph_fingerprint(graph: Graph) -> str:
    """Hash of the exact labelled graph (ids matter, unlike a canonical form)."""
    h = hashlib.sha256()
    h.update(",".join(map(str, graph.vertices())).encode())
    h.update(b"|")
    h.update(";".join(f"{u}-{v}" for u, v in graph.edges()).encode())
    return h.hexdigest()


@dataclass
class Trace:
    records: list[ModificationRecord] = field(default_factory=list)
    initial_fingerprint: str = ""
    initial_k: int = 0

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[ModificationRecord]:
        return iter(self.records)

    def __getitem__(self, i):
        return self.records[i]

    @property
    def delta_k(self) -> int:
        return sum(r.delta_k for r in self.records)

    def segment(self, start: int) -> list[ModificationRecord]:
        return self.records[start:]


@dataclass(frozen=True)
class Snapshot:
    token: int
    engine_id: int
    trace_length: int
    k: int


def find_rule(name: str):
    from .rules.backward import BACKWARD_RULES
    from .rules.forward import FORWARD_RULES

    rule = FORWARD_RULES.get(name) or BACKWARD_RULES.get(name)
    if rule is None:
        raise InvalidArgumentError(f"unknown rule {name!r}")
    return rule


class Engine:
    """Single-writer wrapper around an :class:`Instance`.

    Every application goes through :meth:`apply`, which stamps the step
    index and appends the record to :attr:`trace`. Snapshots are undone
    record by record, so reverting costs time proportional to the work
    being discarded rather than to the graph size.
    """

    def __init__(self, instance: Instance, seed: int | str | None = None):
        self.instance = instance
        self.trace = Trace(initial_fingerprint=graph_fingerprint(instance.graph), initial_k=instance.k)
        self.rng = random.Random(seed)
        self.seed = seed
        self._stack: list[Snapshot] = []
        self._id = next(_snapshot_ids)

    @property
    def graph(self) -> Graph:
        return self.instance.graph

    @property
    def k(self) -> int:
        return self.instance.k

    def derived_rng(self, name: str) -> random.Random:
        return random.Random(f"{self.seed}:{name}")

    def apply(self, site: Site) -> ModificationRecord:
        rule = find_rule(site.rule)
        record = rule.apply(self.instance, site)
        record.step = len(self.trace.records)
        self.trace.records.append(record)
        return record

    def try_apply(self, site: Site) -> ModificationRecord | None:
        try:
            return self.apply(site)
        except StaleSiteError:
            return None

    # -- snapshots ---------------------------------------------------------

    def snapshot(self) -> Snapshot:
        snap = Snapshot(next(_snapshot_ids), self._id, len(self.trace.records), self.instance.k)
        self._stack.append(snap)
        return snap

    def _check(self, snap: Snapshot) -> int:
        if snap.engine_id != self._id:
            raise SnapshotError("snapshot belongs to a different engine")
        for depth in range(len(self._stack) - 1, -1, -1):
            if self._stack[depth] == snap:
                return depth
        raise SnapshotError("snapshot was already reverted or released")

    def revert(self, snap: Snapshot) -> None:
        """Undo everything since ``snap``; newer snapshots are discarded too."""
        depth = self._check(snap)
        records = self.trace.records
        while len(records) > snap.trace_length:
            records.pop().undo(self.instance.graph)
        self.instance.k = snap.k
        del self._stack[depth:]

    def release(self, snap: Snapshot) -> None:
        """Keep the changes made since ``snap`` and drop the token."""
        depth = self._check(snap)
        del self._stack[depth:]

    # -- lifting -------------------------------------------------------------

    def lift(self, cover: Iterable[int]) -> set[int]:
        from .lifting import lift_solution

        return lift_solution(self.trace, self.instance.graph, cover)

    def replay_initial(self) -> Graph:
        """Reconstruct the initial graph by undoing the trace on a copy."""
        g = self.instance.graph.copy()
        for record in reversed(self.trace.records):
            record.undo(g)
        return g


def expand_roi(roi: Iterable[int], record: ModificationRecord, graph: Graph) -> set[int]:
    """Region of interest after ``record``: (X | N[M]) minus deleted vertices."""
    deleted = set(record.removed_vertices)
    out = set(roi)
    for v in record.modified_vertices:
        if v in graph:
            out.add(v)
            out.update(graph.neighbors(v))
    return {v for v in out - deleted if v in graph}


def replay_trace(initial: Graph, records: Sequence[ModificationRecord], initial_k: int = 0) -> Instance:
    """Apply ``records`` to a copy of ``initial``."""
    g = initial.copy()
    k = initial_k
    for record in records:
        record.replay(g)
        k += record.delta_k
    return Instance(g, k)


def _choose_site(sites: list[Site], rng: random.Random) -> Site:
    site = rng.choice(sites)
    if site.rule == "Struct" and len(site.anchors) > 2:
        order = list(site.anchors[1:])
        rng.shuffle(order)
        site = Site(site.rule, (site.anchors[0], *order), site.choice)
    return site


def randomized_exhaustive_deflate(
    engine: Engine,
    rule_names: Sequence[str],
    rng: random.Random,
    max_steps: int | None = None,
) -> list[ModificationRecord]:
    """Apply random forward sites until no rule in ``rule_names`` applies.

    Each step picks a rule uniformly among those with at least one site (the
    first applicable rule in a random permutation) and then one of its
    sites uniformly. Struction sites also get a random neighbor ordering.
    """
    from .rules.forward import FORWARD_RULES

    out: list[ModificationRecord] = []
    names = list(rule_names)
    while max_steps is None or len(out) < max_steps:
        rng.shuffle(names)
        for name in names:
            sites = FORWARD_RULES[name].find(engine.instance)
            if sites:
                out.append(engine.apply(_choose_site(sites, rng)))
                break
        else:
            break
    return out


def exhaustive_forward(engine: Engine, rule_names: Sequence[str]) -> list[ModificationRecord]:
    """Apply rules exhaustively in priority order.

    The first rule with sites is applied at every still-valid site of one
    enumeration, then the scan restarts from the top; the loop ends when no
    rule has a site.
    """
    from .rules.forward import FORWARD_RULES

    out: list[ModificationRecord] = []
    rules = [FORWARD_RULES[name] for name in rule_names]
    while True:
        progressed = False
        for rule in rules:
            sites = rule.find(engine.instance)
            for site in sites:
                rec = engine.try_apply(site)
                if rec is not None:
                    out.append(rec)
                    progressed = True
            if progressed:
                break
        if not progressed:
            return out
