"""Exact minimum relay count by exhaustive subset search.

Subsets of the candidate pool are enumerated in ascending cardinality, so
the first cardinality containing a feasible subset is the optimum.  Two
prunings keep small instances fast without affecting the answer:

* candidates that cannot sit on any budgeted sensor-to-sink path (their
  full-graph distance to the sink plus the distance to their nearest sensor
  already exceeds delta) are dropped before enumeration; no optimal set can
  contain one, since removing it from a feasible set keeps the set feasible;
* enumeration stops at the first cardinality with a hit (all subsets of
  that cardinality are still scanned so the count of optima is exact).

``unpruned_minimum`` is a deliberately naive cross-check that scans every
subset with its own BFS; it exists to validate the pruned search.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations

from .hops import hop_table, induced_feasibility
from .model import Instance, TopologyGraph, build_graph
from .sca import Infeasible

GUARD = 24  # refuse unbounded enumeration beyond this many candidates


class CandidateLimitError(ValueError):
    """Candidate pool too large for unbounded enumeration."""


@dataclass(frozen=True)
class OracleResult:
    optimum: int
    relays: tuple[int, ...]  # one optimal set (lexicographically first)
    optimal_count: int  # feasible subsets at the optimal cardinality
    explored: int  # subsets tested


@dataclass(frozen=True)
class LimitExceeded:
    """No feasible subset within the requested cardinality limit."""

    limit: int
    explored: int


def subset_feasible(graph: TopologyGraph, relays, delta: int) -> bool:
    """Self-contained feasibility check (plain BFS, no shared search code)."""
    allowed = {graph.SINK_ID} | set(graph.sensor_ids) | {int(q) for q in relays}
    depth = {graph.SINK_ID: 0}
    queue = deque([graph.SINK_ID])
    while queue:
        u = queue.popleft()
        for v in graph.neighbors(u):
            v = int(v)
            if v in allowed and v not in depth:
                depth[v] = depth[u] + 1
                queue.append(v)
    return all(depth.get(s, delta + 1) <= delta for s in graph.sensor_ids)


def oracle_solve(
    instance: Instance,
    limit: int | None = None,
    graph: TopologyGraph | None = None,
) -> OracleResult | LimitExceeded | Infeasible:
    """Exact optimum for small candidate pools.

    Without ``limit`` the search refuses pools larger than GUARD candidates.
    With ``limit`` set, enumeration stops after that cardinality and reports
    LimitExceeded when no feasible subset was found by then.
    """
    if graph is None:
        graph = build_graph(instance)
    delta = instance.delta
    m = graph.n_candidates
    if limit is None and m > GUARD:
        raise CandidateLimitError(
            f"{m} candidates exceed the exhaustive-search guard of {GUARD}; "
            "set a cardinality limit to search anyway"
        )

    if not induced_feasibility(graph, graph.candidate_ids, delta)[0]:
        # monotonicity: no subset can beat the full pool
        return Infeasible(
            f"no candidate subset connects every sensor within {delta} hops",
            algorithm="oracle",
        )

    rows = hop_table(graph, sources=(graph.SINK_ID, *graph.sensor_ids))
    to_sink = rows.dist_from(graph.SINK_ID)
    useful = [
        q
        for q in graph.candidate_ids
        if int(to_sink[q]) + min(int(rows.dist_from(s)[q]) for s in graph.sensor_ids) <= delta
    ]

    cap = len(useful) if limit is None else min(limit, len(useful))
    explored = 0
    for k in range(cap + 1):
        hits: list[tuple[int, ...]] = []
        for combo in combinations(useful, k):
            explored += 1
            if induced_feasibility(graph, combo, delta)[0]:
                hits.append(combo)
        if hits:
            return OracleResult(
                optimum=k,
                relays=tuple(hits[0]),
                optimal_count=len(hits),
                explored=explored,
            )
    if limit is not None and cap < len(useful):
        return LimitExceeded(limit=limit, explored=explored)
    return Infeasible(
        f"no candidate subset connects every sensor within {delta} hops",
        algorithm="oracle",
    )


def unpruned_minimum(
    instance: Instance, graph: TopologyGraph | None = None
) -> OracleResult | Infeasible:
    """Scan all 2^m subsets with an independent feasibility check."""
    if graph is None:
        graph = build_graph(instance)
    delta = instance.delta
    pool = list(graph.candidate_ids)
    m = len(pool)
    if m > GUARD:
        raise CandidateLimitError(f"{m} candidates exceed the exhaustive-search guard of {GUARD}")
    best: int | None = None
    best_set: tuple[int, ...] = ()
    count = 0
    for mask in range(1 << m):
        subset = [pool[i] for i in range(m) if mask >> i & 1]
        if not subset_feasible(graph, subset, delta):
            continue
        size = len(subset)
        if best is None or size < best:
            best, best_set, count = size, tuple(subset), 1
        elif size == best:
            count += 1
    if best is None:
        return Infeasible(
            f"no candidate subset connects every sensor within {delta} hops",
            algorithm="oracle",
        )
    return OracleResult(optimum=best, relays=best_set, optimal_count=count, explored=1 << m)
