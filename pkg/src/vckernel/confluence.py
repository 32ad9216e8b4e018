"""Pairwise confluence testing of forward rules on small graphs."""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Iterator, Sequence

from .engine import Engine, randomized_exhaustive_deflate
from .graph import Graph, Instance
from .io import emit_graph6, parse_graph6
from .isomorphism import canonical_form
from .rules.forward import resolve_rule_name

NON_CONFLUENT = "non_confluent"
NO_COUNTEREXAMPLE = "no_counterexample_found"


# -- enumeration ---------------------------------------------------------------


def _extend(graph: Graph, mask: int) -> Graph:
    n = graph.n
    edges = list(graph.edges()) + [(i, n) for i in range(n) if mask >> i & 1]
    return Graph.from_edges(n + 1, edges)


def generate_graphs(max_n: int, keep: Callable[[Graph], bool] | None = None) -> Iterator[Graph]:
    """All non-isomorphic graphs on 1..max_n vertices, by vertex augmentation.

    Level n+1 is built by attaching a new vertex to every neighbor subset
    of every level-n graph and keeping one graph per canonical form. With
    ``keep``, only graphs passing the filter are kept and extended, which
    is exact for properties closed under vertex deletion (for example
    triangle-freeness). Each level is sorted by (edges, certificate).
    """
    level = [Graph.from_edges(1, [])] if max_n >= 1 else []
    level = [g for g in level if keep is None or keep(g)]
    n = 1
    while level:
        yield from level
        if n >= max_n:
            return
        seen: dict[bytes, Graph] = {}
        for g in level:
            for mask in range(1 << n):
                h = _extend(g, mask)
                if keep is not None and not keep(h):
                    continue
                key = canonical_form(h).key
                if key not in seen:
                    seen[key] = h
        level = [seen[key] for key in sorted(seen, key=lambda k: (seen[k].m, k))]
        n += 1


def enumerate_graphs(max_n: int) -> list[Graph]:
    """All non-isomorphic simple graphs with 1 <= n <= max_n, relabeled 0..n-1."""
    if max_n > 10:
        raise ValueError("full enumeration is limited to max_n <= 10")
    return list(generate_graphs(max_n))


def is_triangle_free(graph: Graph) -> bool:
    return not any(graph.neighbors(u) & graph.neighbors(v) for u, v in graph.edges())


# -- pair testing --------------------------------------------------------------------


def outcome_key(instance: Instance) -> tuple[bytes, int]:
    """Canonical form of the reduced graph together with k."""
    return canonical_form(instance.graph).key, instance.k


def reduce_with_seed(graph: Graph, rules: Sequence[str], seed: int) -> Instance:
    engine = Engine(Instance(graph.copy(), 0), seed=seed)
    randomized_exhaustive_deflate(engine, rules, engine.derived_rng("confluence"))
    return engine.instance


@dataclass
class Witness:
    graph6: str
    seeds: tuple[int, int]
    outcomes: tuple[dict[str, Any], dict[str, Any]]

    def graph(self) -> Graph:
        return parse_graph6(self.graph6)

    def to_json(self) -> dict[str, Any]:
        return {"graph6": self.graph6, "seeds": list(self.seeds), "outcomes": list(self.outcomes)}


@dataclass
class ConfluenceVerdict:
    pair: tuple[str, str]
    verdict: str
    witnesses: list[Witness] = field(default_factory=list)
    graphs_tested: int = 0

    @property
    def non_confluent(self) -> bool:
        return self.verdict == NON_CONFLUENT

    def to_json(self) -> dict[str, Any]:
        return {
            "pair": list(self.pair),
            "verdict": self.verdict,
            "graphs_tested": self.graphs_tested,
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def ruleset(ra: str, rb: str) -> tuple[str, ...]:
    names = [resolve_rule_name(ra), resolve_rule_name(rb), "Deg0"]
    return tuple(dict.fromkeys(names))


def _describe(instance: Instance) -> dict[str, Any]:
    g = instance.graph
    return {"n": g.n, "m": g.m, "k": instance.k, "graph6": emit_graph6(g)}


def test_graph(graph: Graph, rules: Sequence[str], trials: int, seed_base: int = 0) -> Witness | None:
    """Run ``trials`` seeded reductions; return a witness on two distinct outcomes."""
    first: dict[tuple[bytes, int], int] = {}
    for t in range(trials):
        seed = seed_base + t
        result = reduce_with_seed(graph, rules, seed)
        key = outcome_key(result)
        if not first:
            first[key] = seed
            base = result
            continue
        if key not in first:
            (s0,) = first.values()
            return Witness(emit_graph6(graph), (s0, seed), (_describe(base), _describe(result)))
    return None


def test_pair(
    ra: str,
    rb: str,
    graphs: Iterable[Graph],
    trials: int = 20,
    max_witnesses: int = 1,
    seed_base: int = 0,
) -> ConfluenceVerdict:
    """Look for a graph on which {ra, rb, Deg0} reaches two distinct outcomes.

    Absence of a counterexample is reported as such and never as
    confluence.
    """
    rules = ruleset(ra, rb)
    pair = (resolve_rule_name(ra), resolve_rule_name(rb))
    witnesses: list[Witness] = []
    tested = 0
    for g in graphs:
        tested += 1
        w = test_graph(g, rules, trials, seed_base)
        if w is not None:
            witnesses.append(w)
            if len(witnesses) >= max_witnesses:
                break
    verdict = NON_CONFLUENT if witnesses else NO_COUNTEREXAMPLE
    return ConfluenceVerdict(pair, verdict, witnesses, tested)


def replay_witness(witness: Witness, pair: tuple[str, str]) -> tuple[Instance, Instance]:
    rules = ruleset(*pair)
    g = witness.graph()
    return reduce_with_seed(g, rules, witness.seeds[0]), reduce_with_seed(g, rules, witness.seeds[1])


def _pair_job(args) -> ConfluenceVerdict:
    ra, rb, max_n, trials, max_witnesses = args
    return test_pair(ra, rb, enumerate_graphs(max_n), trials, max_witnesses)


def test_all_pairs(
    rules: Sequence[str],
    max_n: int = 7,
    trials: int = 20,
    max_witnesses: int = 1,
    jobs: int = 1,
) -> list[ConfluenceVerdict]:
    """Verdicts for every unordered pair (including a rule with itself)."""
    names = [resolve_rule_name(r) for r in rules]
    pairs = [(a, b) for i, a in enumerate(names) for b in names[i:]]
    args = [(a, b, max_n, trials, max_witnesses) for a, b in pairs]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_pair_job, args))
    graphs = enumerate_graphs(max_n)
    return [test_pair(a, b, graphs, trials, max_witnesses) for a, b, *_ in args]


# -- matrix report ----------------------------------------------------------------------


@dataclass
class ConfluenceMatrix:
    rules: list[str]
    cells: dict[tuple[str, str], str]

    def cell(self, a: str, b: str) -> str:
        return self.cells[(a, b)]

    def to_json(self) -> dict[str, Any]:
        return {
            "rules": self.rules,
            "matrix": [[self.cells[(a, b)] for b in self.rules] for a in self.rules],
        }

    def to_text(self) -> str:
        width = max(len(r) for r in self.rules)
        lines = [" " * width + " " + " ".join(r.rjust(width) for r in self.rules)]
        for a in self.rules:
            marks = ["X" if self.cells[(a, b)] == NON_CONFLUENT else "." for b in self.rules]
            lines.append(a.rjust(width) + " " + " ".join(m.rjust(width) for m in marks))
        lines.append("X = non-confluent witness found, . = no counterexample found")
        return "\n".join(lines)


def emit_matrix(verdicts: Iterable[ConfluenceVerdict]) -> ConfluenceMatrix:
    """Symmetric matrix of verdicts; missing pairs count as no counterexample."""
    verdicts = list(verdicts)
    rules: list[str] = []
    for v in verdicts:
        for r in v.pair:
            if r not in rules:
                rules.append(r)
    cells = {(a, b): NO_COUNTEREXAMPLE for a in rules for b in rules}
    for v in verdicts:
        a, b = v.pair
        if v.non_confluent:
            cells[(a, b)] = cells[(b, a)] = NON_CONFLUENT
    return ConfluenceMatrix(rules, cells)


def matrix_json(matrix: ConfluenceMatrix, verdicts: Sequence[ConfluenceVerdict]) -> str:
    data = matrix.to_json()
    data["verdicts"] = [v.to_json() for v in verdicts]
    return json.dumps(data, indent=2, sort_keys=True)
