"""Half-integral LP relaxation of vertex cover.

The relaxation is solved on the bipartite double cover: every vertex ``v``
gets a left copy and a right copy, every edge ``uv`` becomes ``u_L v_R`` and
``v_L u_R``. A maximum matching there gives the LP optimum (twice the LP
value equals the matching size).
"""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Sequence

from .graph import Graph

HALF = Fraction(1, 2)
_INF = float("inf")


def hopcroft_karp(left_adj: Sequence[Sequence[int]], n_right: int) -> tuple[list[int], list[int]]:
    """Maximum bipartite matching.

    ``left_adj[i]`` lists right vertices adjacent to left vertex ``i``.
    Returns ``(mate_left, mate_right)`` with ``-1`` for unmatched.
    """
    n_left = len(left_adj)
    mate_l = [-1] * n_left
    mate_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if mate_l[u] < 0:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = _INF
        found = False
        while queue:
            u = queue.popleft()
            for r in left_adj[u]:
                w = mate_r[r]
                if w < 0:
                    found = True
                elif dist[w] == _INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(root: int) -> bool:
        # iterative augmenting-path search along the BFS layering
        stack = [(root, iter(left_adj[root]))]
        path: list[tuple[int, int]] = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for r in it:
                w = mate_r[r]
                if w < 0:
                    path.append((u, r))
                    for pu, pr in path:
                        mate_l[pu] = pr
                        mate_r[pr] = pu
                    return True
                if dist[w] == dist[u] + 1:
                    path.append((u, r))
                    stack.append((w, iter(left_adj[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = _INF
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if mate_l[u] < 0:
                dfs(u)
    return mate_l, mate_r


def strongly_connected_components(n: int, succ: Sequence[Sequence[int]]) -> list[list[int]]:
    """Tarjan's algorithm, iterative. Components come out sinks first."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for start in range(n):
        if index[start] >= 0:
            continue
        work = [(start, 0)]
        index[start] = low[start] = counter
        counter += 1
        stack.append(start)
        on_stack[start] = True
        while work:
            v, pos = work[-1]
            edges = succ[v]
            if pos < len(edges):
                work[-1] = (v, pos + 1)
                w = edges[pos]
                if index[w] < 0:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w]:
                    low[v] = min(low[v], index[w])
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def solve_lp_extreme(graph: Graph) -> dict[int, Fraction]:
    """Optimal half-integral LP solution with the fewest 1/2 entries.

    The residual graph of a maximum matching on the double cover has arcs
    ``u_L -> w_R`` for every edge and ``w_R -> u_L`` for every matched pair.
    Minimum covers of the double cover are exactly the successor-closed
    sets ``C`` that contain every unmatched left copy and no unmatched
    right copy, via ``x_v = ([v_L not in C] + [v_R in C]) / 2``. Starting
    from the forced part, each vertex is made integral if its two copies
    can still be separated consistently (``v_L`` in and ``v_R`` out gives 0,
    the reverse gives 1). Work happens on the component DAG, and closures
    stop at components that are already decided.
    """
    order = graph.vertices()
    n = len(order)
    index = {v: i for i, v in enumerate(order)}
    left_adj = [sorted(index[u] for u in graph.neighbors(v)) for v in order]
    mate_l, mate_r = hopcroft_karp(left_adj, n)
    succ: list[list[int]] = [[] for _ in range(2 * n)]
    for i in range(n):
        succ[i] = [n + j for j in left_adj[i]]
        if mate_l[i] >= 0:
            succ[n + mate_l[i]].append(i)
    comps = strongly_connected_components(2 * n, succ)
    comp_of = [0] * (2 * n)
    for c, members in enumerate(comps):
        for x in members:
            comp_of[x] = c
    n_comp = len(comps)
    dag_succ: list[set[int]] = [set() for _ in range(n_comp)]
    dag_pred: list[set[int]] = [set() for _ in range(n_comp)]
    for x in range(2 * n):
        cx = comp_of[x]
        for y in succ[x]:
            cy = comp_of[y]
            if cx != cy:
                dag_succ[cx].add(cy)
                dag_pred[cy].add(cx)
    inside: list[bool | None] = [None] * n_comp

    def closure(start: int, arcs: list[set[int]], stop: bool) -> set[int] | None:
        # components reachable from start that are not already `stop`;
        # None when a component with the opposite decision is hit
        if inside[start] is stop:
            return set()
        if inside[start] is (not stop):
            return None
        seen = {start}
        stack = [start]
        while stack:
            c = stack.pop()
            for d in arcs[c]:
                if d in seen or inside[d] is stop:
                    continue
                if inside[d] is (not stop):
                    return None
                seen.add(d)
                stack.append(d)
        return seen

    forced_in = [comp_of[i] for i in range(n) if mate_l[i] < 0]
    forced_out = [comp_of[n + j] for j in range(n) if mate_r[j] < 0]
    for c in forced_in:
        for d in closure(c, dag_succ, True) or ():
            inside[d] = True
    for c in forced_out:
        for d in closure(c, dag_pred, False) or ():
            inside[d] = False

    for i in range(n):
        cl, cr = comp_of[i], comp_of[n + i]
        if cl == cr:
            continue
        if inside[cl] is not None and inside[cr] is not None and inside[cl] != inside[cr]:
            continue
        for a, b in ((cl, cr), (cr, cl)):
            ins = closure(a, dag_succ, True)
            if ins is None:
                continue
            outs = closure(b, dag_pred, False)
            if outs is None or ins & outs:
                continue
            for d in ins:
                inside[d] = True
            for d in outs:
                inside[d] = False
            break

    x: dict[int, Fraction] = {}
    for i, v in enumerate(order):
        a = 0 if inside[comp_of[i]] is True else 1
        b = 1 if inside[comp_of[n + i]] is True else 0
        x[v] = Fraction(a + b, 2)
    return x


def lp_objective(x: dict[int, Fraction]) -> Fraction:
    return sum(x.values(), Fraction(0))


def count_halves(x: dict[int, Fraction]) -> int:
    return sum(1 for val in x.values() if val == HALF)
