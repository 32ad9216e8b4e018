"""Graph, trace, and solution file formats.

Graphs are written with vertices relabelled ``0..n-1`` in id order; parsers
return graphs with exactly those ids.
"""

from __future__ import annotations

import enum
import json
from pathlib import Path
from typing import Iterable, Sequence

from .errors import ParseError
from .graph import Graph
from .records import ModificationRecord


class GraphFormat(str, enum.Enum):
    PACE = "pace"
    EDGE_LIST = "edgelist"
    GRAPH6 = "graph6"
    JSON = "json"
    DOT = "dot"


_SUFFIXES = {
    ".gr": GraphFormat.PACE,
    ".pace": GraphFormat.PACE,
    ".g6": GraphFormat.GRAPH6,
    ".graph6": GraphFormat.GRAPH6,
    ".txt": GraphFormat.EDGE_LIST,
    ".edges": GraphFormat.EDGE_LIST,
    ".el": GraphFormat.EDGE_LIST,
    ".json": GraphFormat.JSON,
    ".dot": GraphFormat.DOT,
}


def guess_format(path: str | Path) -> GraphFormat:
    suffix = Path(path).suffix.lower()
    return _SUFFIXES.get(suffix, GraphFormat.EDGE_LIST)


def _relabelled(graph: Graph) -> tuple[int, list[tuple[int, int]]]:
    index = {v: i for i, v in enumerate(graph.vertices())}
    return graph.n, [(index[u], index[v]) for u, v in graph.edges()]


# -- PACE ----------------------------------------------------------------------


def parse_pace(text: str) -> Graph:
    """PACE ``.gr`` text: ``p <descriptor> n m`` then 1-indexed edge lines.

    The descriptor is not checked. Self-loops and repeated edges are
    dropped.
    """
    graph: Graph | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if graph is not None:
                raise ParseError("second header line", lineno)
            if len(parts) != 4:
                raise ParseError("header must be 'p <descriptor> <n> <m>'", lineno)
            try:
                n, _m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError("header counts must be integers", lineno) from None
            if n < 0:
                raise ParseError("negative vertex count", lineno)
            graph = Graph(n)
            continue
        if graph is None:
            raise ParseError("edge before header", lineno)
        if len(parts) != 2:
            raise ParseError("edge line must have two endpoints", lineno)
        try:
            u, v = int(parts[0]) - 1, int(parts[1]) - 1
        except ValueError:
            raise ParseError("endpoints must be integers", lineno) from None
        if not (0 <= u < graph.n and 0 <= v < graph.n):
            raise ParseError(f"endpoint out of range 1..{graph.n}", lineno)
        if u != v and not graph.has_edge(u, v):
            graph.add_edge(u, v)
    if graph is None:
        raise ParseError("missing header line")
    return graph


def emit_pace(graph: Graph, descriptor: str = "td") -> str:
    n, edges = _relabelled(graph)
    lines = [f"p {descriptor} {n} {len(edges)}"]
    lines.extend(f"{u + 1} {v + 1}" for u, v in edges)
    return "\n".join(lines) + "\n"


# -- edge list -------------------------------------------------------------------


def parse_edge_list(text: str) -> Graph:
    """``u v`` per line, 0-indexed, ``#`` comments; a lone id adds a vertex.

    A ``# vertices N`` comment fixes the vertex count; otherwise it is one
    more than the largest id seen.
    """
    declared: int | None = None
    edges: list[tuple[int, int]] = []
    largest = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body, _, comment = raw.partition("#")
        words = comment.split()
        if len(words) == 2 and words[0] == "vertices":
            try:
                declared = int(words[1])
            except ValueError:
                raise ParseError("vertex count must be an integer", lineno) from None
        parts = body.split()
        if not parts:
            continue
        if len(parts) > 2:
            raise ParseError("expected 'u v' or a single vertex id", lineno)
        try:
            ids = [int(p) for p in parts]
        except ValueError:
            raise ParseError("vertex ids must be integers", lineno) from None
        if any(x < 0 for x in ids):
            raise ParseError("vertex ids must be non-negative", lineno)
        largest = max(largest, *ids)
        if len(ids) == 2:
            edges.append((ids[0], ids[1]))
    n = largest + 1 if declared is None else declared
    if largest >= n:
        raise ParseError(f"vertex id {largest} exceeds declared count {n}")
    return Graph.from_edges(n, edges)


def emit_edge_list(graph: Graph) -> str:
    n, edges = _relabelled(graph)
    lines = [f"# vertices {n}"]
    degree = [0] * n
    for u, v in edges:
        degree[u] += 1
        degree[v] += 1
        lines.append(f"{u} {v}")
    lines.extend(str(v) for v in range(n) if degree[v] == 0)
    return "\n".join(lines) + "\n"


# -- graph6 ------------------------------------------------------------------------


def _encode_n(n: int) -> str:
    if n <= 62:
        return chr(n + 63)
    if n <= 258047:
        return "~" + "".join(chr(((n >> s) & 63) + 63) for s in (12, 6, 0))
    return "~~" + "".join(chr(((n >> s) & 63) + 63) for s in (30, 24, 18, 12, 6, 0))


def emit_graph6(graph: Graph) -> str:
    n, edges = _relabelled(graph)
    present = set(edges)
    bits = [1 if (i, j) in present else 0 for j in range(1, n) for i in range(j)]
    bits.extend([0] * (-len(bits) % 6))
    body = "".join(chr(sum(b << (5 - k) for k, b in enumerate(bits[t : t + 6])) + 63) for t in range(0, len(bits), 6))
    return _encode_n(n) + body


def parse_graph6(line: str) -> Graph:
    text = line.strip()
    if text.startswith(">>graph6<<"):
        text = text[len(">>graph6<<") :]
    if not text:
        raise ParseError("empty graph6 string")
    if any(not 63 <= ord(ch) <= 126 for ch in text):
        raise ParseError("graph6 characters must lie in '?'..'~'")
    vals = [ord(ch) - 63 for ch in text]
    if vals[0] == 63:
        if len(vals) >= 2 and vals[1] == 63:
            head, rest = vals[2:8], vals[8:]
        else:
            head, rest = vals[1:4], vals[4:]
        n = 0
        for x in head:
            n = (n << 6) | x
    else:
        n, rest = vals[0], vals[1:]
    needed = (n * (n - 1) // 2 + 5) // 6
    if len(rest) != needed:
        raise ParseError(f"graph6 body has {len(rest)} characters, expected {needed} for n={n}")
    bits = [(x >> (5 - k)) & 1 for x in rest for k in range(6)]
    g = Graph(n)
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                g.add_edge(i, j)
            pos += 1
    if any(bits[pos:]):
        raise ParseError("nonzero padding bits in graph6 string")
    return g


# -- JSON and DOT ---------------------------------------------------------------------


def emit_graph_json(graph: Graph) -> str:
    return json.dumps({"vertices": graph.vertices(), "edges": [list(e) for e in graph.edges()]}, sort_keys=True)


def parse_graph_json(text: str) -> Graph:
    try:
        data = json.loads(text)
        vertices = [int(v) for v in data["vertices"]]
        edges = [(int(u), int(v)) for u, v in data["edges"]]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"bad graph JSON: {exc}") from None
    g = Graph(0)
    for v in sorted(vertices):
        g.restore_vertex(v)
    for u, v in edges:
        if u not in g or v not in g:
            raise ParseError(f"edge {u}-{v} uses an unknown vertex")
        if u != v and not g.has_edge(u, v):
            g.add_edge(u, v)
    return g


def emit_graph_dot(graph: Graph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    lines.extend(f"  {v};" for v in graph.vertices())
    lines.extend(f"  {u} -- {v};" for u, v in graph.edges())
    lines.append("}")
    return "\n".join(lines) + "\n"


_ROLE_COLORS = {"boundary": "blue", "added": "darkgreen", "removed": "red"}


def emit_dot(records: Sequence[ModificationRecord], name: str = "trace") -> str:
    """One cluster per record; vertices and edges carry a ``role`` attribute."""
    lines = [f"graph {name} {{", "  node [shape=circle];"]
    for rec in records:
        s = rec.step
        lines.append(f"  subgraph cluster_{s} {{")
        lines.append(f'    label="{s}: {rec.rule} ({rec.direction}, dk={rec.delta_k})";')
        roles = [("removed", rec.removed_vertices), ("boundary", rec.boundary), ("added", rec.added_vertices)]
        for role, verts in roles:
            for v in verts:
                lines.append(f'    s{s}_{v} [label="{v}", role="{role}", color={_ROLE_COLORS[role]}];')
        for role, edges, style in (("removed", rec.removed_edges, "dashed"), ("added", rec.added_edges, "solid")):
            for u, v in edges:
                lines.append(f'    s{s}_{u} -- s{s}_{v} [role="{role}", style={style}, color={_ROLE_COLORS[role]}];')
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_json(records: Iterable[ModificationRecord]) -> str:
    """Trace as JSON lines, one record per line."""
    return "".join(rec.dumps() + "\n" for rec in records)


def parse_json_trace(text: str) -> list[ModificationRecord]:
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            records.append(ModificationRecord.from_json(json.loads(raw)))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad trace record: {exc}", lineno) from None
    return records


# -- solutions ------------------------------------------------------------------------------


def emit_solution(cover: Iterable[int]) -> str:
    chosen = sorted(set(cover))
    return "\n".join([str(len(chosen)), *map(str, chosen)]) + "\n"


def parse_solution(text: str) -> set[int]:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith(("#", "c "))]
    if not lines:
        raise ParseError("empty solution file")
    try:
        size = int(lines[0])
        ids = [int(x) for x in lines[1:]]
    except ValueError:
        raise ParseError("solution entries must be integers") from None
    if size != len(ids):
        raise ParseError(f"solution declares {size} vertices but lists {len(ids)}")
    return set(ids)


# -- dispatch -----------------------------------------------------------------------------------


def parse_graph(text: str, fmt: GraphFormat | str) -> Graph:
    fmt = GraphFormat(fmt)
    if fmt is GraphFormat.PACE:
        return parse_pace(text)
    if fmt is GraphFormat.EDGE_LIST:
        return parse_edge_list(text)
    if fmt is GraphFormat.GRAPH6:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) != 1:
            raise ParseError(f"expected one graph6 line, found {len(lines)}")
        return parse_graph6(lines[0])
    if fmt is GraphFormat.JSON:
        return parse_graph_json(text)
    raise ParseError(f"format {fmt.value} cannot be parsed")


def emit_graph(graph: Graph, fmt: GraphFormat | str) -> str:
    fmt = GraphFormat(fmt)
    if fmt is GraphFormat.PACE:
        return emit_pace(graph)
    if fmt is GraphFormat.EDGE_LIST:
        return emit_edge_list(graph)
    if fmt is GraphFormat.GRAPH6:
        return emit_graph6(graph) + "\n"
    if fmt is GraphFormat.JSON:
        return emit_graph_json(graph) + "\n"
    return emit_graph_dot(graph)


def read_graph(path: str | Path, fmt: GraphFormat | str | None = None) -> Graph:
    fmt = guess_format(path) if fmt is None else GraphFormat(fmt)
    return parse_graph(Path(path).read_text(encoding="utf-8"), fmt)


def write_graph(graph: Graph, path: str | Path, fmt: GraphFormat | str | None = None) -> None:
    fmt = guess_format(path) if fmt is None else GraphFormat(fmt)
    Path(path).write_text(emit_graph(graph, fmt), encoding="utf-8")
