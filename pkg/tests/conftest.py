from __future__ import annotations

import itertools
import random

import pytest

from vckernel.confluence import enumerate_graphs
from vckernel.graph import Graph

# criterion number -> (title, outcome) for the acceptance summary
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        previous = ACCEPTANCE.get(number, (title, "PASS"))[1]
        result = "PASS" if report.outcome == "passed" and previous == "PASS" else "FAIL"
        ACCEPTANCE[number] = (title, result)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, result = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2} {result}: {title}")


# -- oracles and generators ---------------------------------------------------------


def naive_tau(graph: Graph) -> int:
    """Smallest k such that some k-subset covers every edge."""
    verts = graph.vertices()
    edges = graph.edges()
    for size in range(len(verts) + 1):
        for subset in itertools.combinations(verts, size):
            chosen = set(subset)
            if all(u in chosen or v in chosen for u, v in edges):
                return size
    raise AssertionError("unreachable")


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p]
    return Graph.from_edges(n, edges)


def graph_from(edges, n: int | None = None) -> Graph:
    edges = list(edges)
    if n is None:
        n = 1 + max((max(e) for e in edges), default=-1)
    return Graph.from_edges(n, edges)


def cycle(n: int) -> Graph:
    return graph_from([(i, (i + 1) % n) for i in range(n)], n)


def path(n: int) -> Graph:
    return graph_from([(i, i + 1) for i in range(n - 1)], n)


def complete(n: int) -> Graph:
    return graph_from(itertools.combinations(range(n), 2), n)


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return graph_from(outer + spokes + inner, 10)


@pytest.fixture(scope="session")
def graphs7() -> list[Graph]:
    return enumerate_graphs(7)


@pytest.fixture(scope="session")
def graphs6(graphs7) -> list[Graph]:
    return [g for g in graphs7 if g.n <= 6]


@pytest.fixture(scope="session")
def graphs5(graphs7) -> list[Graph]:
    return [g for g in graphs7 if g.n <= 5]
