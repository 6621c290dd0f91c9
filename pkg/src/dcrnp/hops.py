"""Hop-count shortest paths, feasibility predicates, and canonical trees.

Hop distance is the edge count of a shortest path.  Unreachable pairs get
the sentinel INF (strictly greater than any achievable hop count), so sums
and comparisons propagate without special cases.  Ties between equal-length
paths are broken canonically: a node's parent in a search tree is its
lowest-id neighbor one layer closer to the source.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .kernels import INF
from .model import TopologyGraph


def _allowed_mask(graph: TopologyGraph, allowed: Iterable[int] | None) -> np.ndarray:
    if allowed is None:
        return np.ones(graph.n_nodes, dtype=np.uint8)
    mask = np.zeros(graph.n_nodes, dtype=np.uint8)
    ids = list(allowed)
    if ids:
        mask[ids] = 1
    return mask


def bfs_from(
    graph: TopologyGraph, source: int, allowed: Iterable[int] | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Hop distances and canonical parents from ``source``.

    ``allowed`` restricts the search to an induced subgraph; None means the
    whole graph.  The source must be allowed.
    """
    mask = _allowed_mask(graph, allowed)
    return kernels.bfs(graph.indptr, graph.indices, source, mask)


@dataclass(frozen=True)
class HopTable:
    """Per-source hop distances and canonical parents (one row per source)."""

    sources: tuple[int, ...]
    dist: np.ndarray  # shape (len(sources), n_nodes)
    parent: np.ndarray

    def _row(self, source: int) -> int:
        try:
            return self.sources.index(source)
        except ValueError:
            raise KeyError(f"source {source} not in hop table") from None

    def dist_from(self, source: int) -> np.ndarray:
        return self.dist[self._row(source)]

    def parent_from(self, source: int) -> np.ndarray:
        return self.parent[self._row(source)]

    def hop(self, source: int, v: int) -> int:
        return int(self.dist[self._row(source), v])


def hop_table(
    graph: TopologyGraph,
    sources: Sequence[int],
    allowed: Iterable[int] | None = None,
) -> HopTable:
    """BFS from every source over the same (induced) graph."""
    mask = _allowed_mask(graph, allowed)
    sources = tuple(int(s) for s in sources)
    dist = np.empty((len(sources), graph.n_nodes), dtype=np.int32)
    parent = np.empty_like(dist)
    for i, s in enumerate(sources):
        dist[i], parent[i] = kernels.bfs(graph.indptr, graph.indices, s, mask)
    return HopTable(sources=sources, dist=dist, parent=parent)


def feasible_node(dist_to_sensor: int, dist_to_sink: int, delta: int) -> bool:
    """Whether a node can sit on a sensor-to-sink path within the budget.

    True iff dist_to_sensor + dist_to_sink <= delta.  INF operands propagate
    naturally to False.
    """
    return dist_to_sensor + dist_to_sink <= delta


@dataclass(frozen=True)
class SpTree:
    """A canonical shortest-path tree rooted at ``root``.

    ``depth`` holds hop counts (INF when unreached); ``parent`` holds the
    canonical parent ids (-1 for the root and unreached nodes).  ``allowed``
    is the node set the tree was grown over, None meaning all nodes.
    """

    root: int
    parent: np.ndarray
    depth: np.ndarray
    allowed: frozenset[int] | None

    def depth_of(self, v: int) -> int:
        return int(self.depth[v])

    def path_to_root(self, v: int) -> list[int]:
        return canonical_path(self.parent, v, dist=self.depth)


def induced_feasibility(
    graph: TopologyGraph, relays: Iterable[int], delta: int
) -> tuple[bool, SpTree]:
    """Can every sensor reach the sink in <= delta hops using only ``relays``?

    The induced subgraph contains the sink, all sensors, and the given relay
    subset.  Returns the verdict together with the canonical tree grown from
    the sink over that subgraph.
    """
    allowed = {graph.SINK_ID} | set(graph.sensor_ids) | {int(q) for q in relays}
    dist, parent = bfs_from(graph, graph.SINK_ID, allowed)
    feasible = bool(all(dist[s] <= delta for s in graph.sensor_ids))
    return feasible, SpTree(graph.SINK_ID, parent, dist, frozenset(allowed))


def canonical_path(
    parents: np.ndarray, start: int, dist: np.ndarray | None = None
) -> list[int]:
    """Node ids from ``start`` to the tree root along parent links.

    Raises ValueError when ``dist`` marks the start unreachable.
    """
    if dist is not None and dist[start] >= INF:
        raise ValueError(f"node {start} is unreachable")
    path = [int(start)]
    v = int(start)
    while parents[v] != -1:
        v = int(parents[v])
        path.append(v)
    return path


def candidates_on_path(graph: TopologyGraph, path: Iterable[int]) -> list[int]:
    """Candidate-kind nodes along a path, in path order."""
    return [v for v in path if graph.is_candidate(v)]
