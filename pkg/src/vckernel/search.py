"""Find, Find-and-Reduce, Inflate-Deflate, and local Inflate-Deflate."""

from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

from .engine import Engine, exhaustive_forward, expand_roi, randomized_exhaustive_deflate
from .errors import NotApplicableError, StaleSiteError
from .isomorphism import FREE, canonical_form
from .records import ModificationRecord, Site
from .rules.backward import BACKWARD_RULES, DEFAULT_CAPS, STANDARD_BACKWARD, BackwardCaps
from .rules.forward import DEFAULT_PIPELINE, FORWARD_RULES, STANDARD_FORWARD


class _Clock:
    def __init__(self, limit: float | None):
        self.limit = limit
        self.start = time.monotonic()

    def expired(self) -> bool:
        return self.limit is not None and time.monotonic() - self.start >= self.limit


# -- Find ----------------------------------------------------------------------


@dataclass
class FindConfig:
    max_depth: int = 2
    forward_rules: tuple[str, ...] = STANDARD_FORWARD
    backward_rules: tuple[str, ...] = STANDARD_BACKWARD
    caps: BackwardCaps = DEFAULT_CAPS
    time_limit: float | None = None
    roots: tuple[int, ...] | None = None
    dedup: bool = True
    max_sequences: int | None = None


@dataclass
class FoundSequence:
    root: int
    rules: tuple[str, ...]
    records: list[ModificationRecord]
    delta_n: int
    delta_k: int

    def to_json(self) -> dict[str, Any]:
        return {
            "root": self.root,
            "rules": list(self.rules),
            "delta_n": self.delta_n,
            "delta_k": self.delta_k,
            "records": [r.to_json() for r in self.records],
        }


def accepts(delta_n: int, delta_k: int) -> bool:
    """Shrinks n or k without growing either."""
    return delta_n <= 0 and delta_k <= 0 and (delta_n < 0 or delta_k < 0)


class _Finder:
    """Depth-first search over rule sequences inside growing regions.

    The engine graph is mutated in place and restored with snapshots. To
    compare two candidate modifications the search rewinds to the root
    state, replays each candidate, and canonicalizes its modified region
    with untouched vertices pinned.
    """

    def __init__(self, engine: Engine, config: FindConfig, commit_first: bool):
        self.engine = engine
        self.config = config
        self.commit_first = commit_first
        self.clock = _Clock(config.time_limit)
        self.base_vertices = frozenset(engine.graph.vertices())
        self.base_n = engine.graph.n
        self.base_k = engine.k
        self.stack: list[ModificationRecord] = []
        self.found: list[FoundSequence] = []
        self.committed = False
        self._accepted_buckets: dict[tuple, list[list[ModificationRecord]]] = {}
        # views keyed by record identity; each entry holds its records so
        # their ids cannot be recycled while the entry exists
        self._views: dict[tuple, tuple[tuple[ModificationRecord, ...], bytes]] = {}

    # region views -------------------------------------------------------------

    def _touched(self, records: Sequence[ModificationRecord]) -> set[int]:
        out: set[int] = set()
        for r in records:
            out |= r.touched_vertices
        return out & self.base_vertices

    def _view(self, records: Sequence[ModificationRecord], moved: set[int]) -> bytes:
        """Canonical key of the modified region after ``records`` (from root)."""
        g = self.engine.graph
        for r in reversed(self.stack):
            r.undo(g)
        for r in records:
            r.replay(g)
        free = {v for v in moved if v in g} | {v for v in g.vertices() if v not in self.base_vertices}
        region = set(free)
        for v in free:
            region |= g.neighbors(v)
        colors = {v: (FREE if v in free else ("pin", v)) for v in region}
        key = canonical_form(g.induced_subgraph(region), colors).key
        for r in reversed(records):
            r.undo(g)
        for r in self.stack:
            r.replay(g)
        return key

    def _cached_view(self, seq: tuple[ModificationRecord, ...], moved: frozenset[int]) -> bytes:
        key = (tuple(id(r) for r in seq), moved)
        hit = self._views.get(key)
        if hit is None:
            hit = self._views[key] = (seq, self._view(seq, set(moved)))
        return hit[1]

    def same_modification(self, a: Sequence[ModificationRecord], b: Sequence[ModificationRecord]) -> bool:
        a, b = tuple(a), tuple(b)
        moved = frozenset(self._touched(a) | self._touched(b))
        return self._cached_view(a, moved) == self._cached_view(b, moved)

    # search ----------------------------------------------------------------------------

    def _sites(self, roi: set[int], last_level: bool) -> list[Site]:
        sites: list[Site] = []
        inst = self.engine.instance
        for name in self.config.forward_rules:
            rule = FORWARD_RULES[name]
            found = rule.find(inst, roi)
            sites.extend(sorted(found, key=lambda s: (s.anchors, repr(s.choice))))
        if not last_level:
            for name in self.config.backward_rules:
                rule = BACKWARD_RULES[name]
                found = rule.find(inst, roi, self.config.caps)
                sites.extend(sorted(found, key=lambda s: (s.anchors, repr(s.choice))))
        return sites

    def _bucket_key(self) -> tuple[int, int, int]:
        g = self.engine.graph
        return (g.n - self.base_n, g.m, self.engine.k - self.base_k)

    def _done(self) -> bool:
        if self.committed or self.clock.expired():
            return True
        cap = self.config.max_sequences
        return cap is not None and len(self.found) >= cap

    def search(self, root: int, roi: set[int], depth: int) -> None:
        last_level = depth + 1 >= self.config.max_depth
        siblings: dict[tuple[int, int, int], list[list[ModificationRecord]]] = {}
        for site in self._sites(roi, last_level):
            if self._done():
                return
            snap = self.engine.snapshot()
            try:
                record = self.engine.apply(site)
            except (StaleSiteError, NotApplicableError):
                self.engine.revert(snap)
                continue
            self.stack.append(record)
            seq = list(self.stack)
            key = self._bucket_key()
            redundant = False
            if self.config.dedup:
                prefixes = [seq[:i] for i in range(len(seq))]
                candidates = [p for p in prefixes if self._prefix_key(p) == key]
                candidates += siblings.get(key, [])
                redundant = any(self.same_modification(seq, other) for other in candidates)
            if not redundant:
                siblings.setdefault(key, []).append(seq)
                delta_n = self.engine.graph.n - self.base_n
                delta_k = self.engine.k - self.base_k
                if accepts(delta_n, delta_k):
                    if self._record_accepted(root, seq, key, delta_n, delta_k) and self.commit_first:
                        self.committed = True
                        self.engine.release(snap)
                        return
                elif not last_level:
                    self.search(root, expand_roi(roi, record, self.engine.graph), depth + 1)
                    if self.committed:
                        self.engine.release(snap)
                        return
            self.stack.pop()
            self.engine.revert(snap)

    def _prefix_key(self, prefix: Sequence[ModificationRecord]) -> tuple[int, int, int]:
        dn = sum(r.delta_n for r in prefix)
        dm = sum(r.delta_m for r in prefix)
        dk = sum(r.delta_k for r in prefix)
        base_m = self.engine.graph.m - sum(r.delta_m for r in self.stack)
        return (dn, base_m + dm, dk)

    def _record_accepted(self, root: int, seq: list[ModificationRecord], key, delta_n: int, delta_k: int) -> bool:
        bucket = self._accepted_buckets.setdefault(key, [])
        if self.config.dedup and any(self.same_modification(seq, other) for other in bucket):
            return False
        bucket.append(seq)
        self.found.append(FoundSequence(root, tuple(r.rule for r in seq), list(seq), delta_n, delta_k))
        return True

    def run(self) -> list[FoundSequence]:
        if self.config.time_limit is not None and self.config.time_limit <= 0:
            return []
        roots = self.config.roots
        if roots is None:
            roots = tuple(self.engine.graph.vertices())
        for v in roots:
            if self._done():
                break
            if v in self.engine.graph:
                self.search(v, {v}, 0)
        return self.found


def find(engine: Engine, config: FindConfig | None = None) -> list[FoundSequence]:
    """Search every region {v} for accepted rule sequences; the instance is left unchanged."""
    return _Finder(engine, config or FindConfig(), commit_first=False).run()


def find_first_and_apply(engine: Engine, config: FindConfig) -> FoundSequence | None:
    finder = _Finder(engine, config, commit_first=True)
    finder.run()
    return finder.found[-1] if finder.committed else None


@dataclass
class SearchLogEntry:
    iteration: int
    n_before: int
    n_peak: int
    n_after: int
    k_after: int
    kept: bool
    seconds: float

    def to_json(self) -> dict[str, Any]:
        return dict(self.__dict__)


@dataclass
class SearchResult:
    records: list[ModificationRecord]
    log: list[SearchLogEntry] = field(default_factory=list)
    sequences: list[FoundSequence] = field(default_factory=list)


def find_and_reduce(
    engine: Engine,
    config: FindConfig | None = None,
    forward_pipeline: Sequence[str] = DEFAULT_PIPELINE,
    max_rounds: int | None = None,
) -> SearchResult:
    """Alternate exhaustive forward reduction with Find, applying the first hit."""
    config = config or FindConfig()
    clock = _Clock(config.time_limit)
    start = len(engine.trace)
    result = SearchResult([])
    if config.time_limit is not None and config.time_limit <= 0:
        return result
    rounds = 0
    while max_rounds is None or rounds < max_rounds:
        t0 = time.monotonic()
        n_before = engine.graph.n
        exhaustive_forward(engine, forward_pipeline)
        if engine.graph.n == 0 or clock.expired():
            break
        remaining = None if config.time_limit is None else max(config.time_limit - (time.monotonic() - clock.start), 0.0)
        if remaining == 0.0:
            break
        sub = FindConfig(**{**config.__dict__, "time_limit": remaining})
        hit = find_first_and_apply(engine, sub)
        rounds += 1
        result.log.append(
            SearchLogEntry(rounds, n_before, n_before, engine.graph.n, engine.k, hit is not None, time.monotonic() - t0)
        )
        if hit is None:
            break
        result.sequences.append(hit)
    result.records = engine.trace.segment(start)
    return result


# -- Inflate-Deflate -------------------------------------------------------------------


@dataclass
class InflateDeflateConfig:
    alpha: float = 0.1
    forward_rules: tuple[str, ...] = STANDARD_FORWARD
    backward_rules: tuple[str, ...] = STANDARD_BACKWARD
    iterations: int | None = 100
    time_limit: float | None = None
    radius: int | None = None
    max_inflation_attempts: int = 10_000


def _inflate(
    engine: Engine,
    rng: random.Random,
    backward: Sequence[str],
    target: int,
    region: set[int] | None,
    attempts: int,
) -> None:
    """Apply random backward sites until ``target`` vertices are reached.

    With a region, sites are sampled inside it and the region absorbs new
    vertices; the target is then compared against the region size.
    """
    rules = [BACKWARD_RULES[name] for name in backward]

    def size() -> int:
        return engine.graph.n if region is None else len(region)

    for _ in range(attempts):
        if size() >= target:
            return
        rule = rng.choice(rules)
        site = rule.sample(engine.instance, rng, None if region is None else sorted(region))
        if site is None:
            continue
        try:
            record = engine.apply(site)
        except (StaleSiteError, NotApplicableError):
            continue
        if region is not None:
            region -= set(record.removed_vertices)
            region |= set(record.added_vertices)


def inflate_deflate(engine: Engine, config: InflateDeflateConfig | None = None, rng: random.Random | None = None) -> SearchResult:
    """Repeatedly inflate by a factor (1 + alpha), deflate, and keep only shrinkage.

    With ``config.radius`` set, every inflation is confined to the ball of
    that radius around a random vertex (the local variant).
    """
    config = config or InflateDeflateConfig()
    if config.alpha <= 0:
        raise ValueError("alpha must be positive")
    rng = rng or engine.derived_rng("inflate-deflate")
    clock = _Clock(config.time_limit)
    start = len(engine.trace)
    log: list[SearchLogEntry] = []
    iteration = 0
    while config.iterations is None or iteration < config.iterations:
        g = engine.graph
        if g.n == 0 or clock.expired():
            break
        iteration += 1
        t0 = time.monotonic()
        n_before = g.n
        snap = engine.snapshot()
        if config.radius is None:
            region = None
            target = math.ceil((1 + config.alpha) * n_before)
        else:
            root = rng.choice(g.vertices())
            region = g.ball(root, config.radius)
            target = math.ceil((1 + config.alpha) * len(region))
        _inflate(engine, rng, config.backward_rules, target, region, config.max_inflation_attempts)
        peak = engine.graph.n
        randomized_exhaustive_deflate(engine, config.forward_rules, rng)
        kept = engine.graph.n < n_before
        if kept:
            engine.release(snap)
        else:
            engine.revert(snap)
        log.append(SearchLogEntry(iteration, n_before, peak, engine.graph.n, engine.k, kept, time.monotonic() - t0))
    return SearchResult(engine.trace.segment(start), log)


def local_inflate_deflate(
    engine: Engine, config: InflateDeflateConfig | None = None, rng: random.Random | None = None
) -> SearchResult:
    config = config or InflateDeflateConfig(alpha=0.2, radius=2)
    if config.radius is None:
        config = InflateDeflateConfig(**{**config.__dict__, "radius": 2})
    if config.radius < 1:
        raise ValueError("radius must be at least 1")
    return inflate_deflate(engine, config, rng or engine.derived_rng("local-inflate-deflate"))
