"""Shared fixtures: brute-force reference oracles and random instance makers.

The oracles here recompute everything from first principles (pairwise
distance checks, Floyd-Warshall) so library bugs cannot hide behind shared
code paths.
"""
import math

import numpy as np

from dcrnp import Instance, bfs_from, build_graph
from dcrnp.kernels import INF


def pairwise_edges(instance: Instance) -> set[tuple[int, int]]:
    """Edge set derived pair by pair from the distance rules."""
    pts = [instance.sink, *instance.sensors, *instance.candidates]
    n = instance.n
    edges = set()
    for u in range(len(pts)):
        for v in range(u + 1, len(pts)):
            dx = pts[u][0] - pts[v][0]
            dy = pts[u][1] - pts[v][1]
            lim = instance.r if (1 <= u <= n or 1 <= v <= n) else instance.big_r
            if dx * dx + dy * dy <= lim * lim:
                edges.add((u, v))
    return edges


def floyd_warshall(total: int, edges) -> np.ndarray:
    d = np.full((total, total), np.inf)
    np.fill_diagonal(d, 0.0)
    for u, v in edges:
        d[u, v] = d[v, u] = 1.0
    for w in range(total):
        d = np.minimum(d, d[:, w : w + 1] + d[w : w + 1, :])
    return d


def hops_or_inf(fw: np.ndarray, u: int, v: int) -> int:
    h = fw[u, v]
    return INF if math.isinf(h) else int(h)


def rand_instance(rng, n, m, field=30.0, r=8.0, big_r=None, delta=4) -> Instance:
    """Raw uniform draws (no quantization, unlike the benchmark generator)."""
    big_r = r if big_r is None else big_r
    pts = rng.uniform(0.0, field, size=(n + m + 1, 2))
    return Instance(
        sensors=tuple(map(tuple, pts[1 : 1 + n])),
        candidates=tuple(map(tuple, pts[1 + n :])),
        sink=tuple(pts[0]),
        r=r,
        big_r=big_r,
        delta=delta,
    )


def wide_cover_pairs(graph, inst):
    """Budget-only cover sets with their upstream covers, level by level.

    Runs the standard level construction for the selection decisions, then
    recomputes every frontier's cover sets with the approach rule disabled.
    Yields (node, upstream node, covered, upstream covered) for each linked
    frontier/previous-level pair, for the nesting check.
    """
    from dcrnp import hop_table
    from dcrnp.sca import Frontier, compute_cover_elements, sca_step2

    trace = []
    sca_step2(graph, inst, trace=trace)
    hop_rows = hop_table(graph, sources=sorted(graph.sensor_ids))
    wide_prev = dict(trace[0].frontier.prev_cover)  # sink cover is budget-only
    pairs = []
    for t in trace:
        f = t.frontier
        wide = Frontier(
            level=f.level,
            prev_level=f.prev_level,
            placed=f.placed,
            connected=f.connected,
            unconnected=f.unconnected,
            prev_cover=wide_prev,
        )
        elements = compute_cover_elements(graph, hop_rows, wide, inst.delta, distance_rule=False)
        by_node = {e.node: e.covered for e in elements}
        for e in elements:
            for qb in f.prev_level:
                if graph.has_edge(e.node, qb):
                    pairs.append((e.node, qb, e.covered, wide_prev.get(qb, frozenset())))
        wide_prev = {v: by_node.get(v, frozenset()) for v in t.level_nodes}
    return pairs


def gated_instance(rng, n, m, field, r, mult=1.5, big_r=None, max_tries=200):
    """Instance that passes the reachability gate, delta = ceil(mult * depth).

    Returns (instance, graph).  Raises after max_tries sparse draws.
    """
    for _ in range(max_tries):
        inst = rand_instance(rng, n, m, field=field, r=r, big_r=big_r, delta=1)
        graph = build_graph(inst)
        dist, _ = bfs_from(graph, graph.SINK_ID)
        worst = max(int(dist[s]) for s in graph.sensor_ids)
        if worst >= INF:
            continue
        delta = max(1, math.ceil(mult * worst))
        inst = Instance(
            sensors=inst.sensors,
            candidates=inst.candidates,
            sink=inst.sink,
            r=inst.r,
            big_r=inst.big_r,
            delta=delta,
        )
        return inst, build_graph(inst)
    raise AssertionError("could not draw a connected instance; loosen the geometry")
