"""Baseline: shortest-path-tree seeding followed by relay pruning.

The baseline first grows the canonical shortest path tree over the whole
graph (sink, sensors, and every candidate).  The candidates lying on the
sensors' tree paths become the initial relay set; the shared pruning step
then removes the redundant ones.  By construction the final relays are a
subset of the initial tree's relays.
"""
from __future__ import annotations

from .hops import SpTree, bfs_from
from .kernels import INF
from .model import Instance, TopologyGraph, build_graph
from .sca import Infeasible, Solution, relays_on_tree, sca_step3


def sptirp_solve(instance: Instance, graph: TopologyGraph | None = None) -> Solution | Infeasible:
    """Solve by pruning the all-nodes shortest path tree."""
    if graph is None:
        graph = build_graph(instance)
    delta = instance.delta
    dist, parent = bfs_from(graph, graph.SINK_ID)
    for s in graph.sensor_ids:
        if dist[s] > delta:
            need = "unreachable" if dist[s] >= INF else f"{int(dist[s])} hops away"
            return Infeasible(
                f"sensor {s} is {need} even with every candidate deployed (budget {delta})",
                algorithm="sptirp",
            )
    tree = SpTree(graph.SINK_ID, parent, dist, None)
    initial = relays_on_tree(graph, tree)
    return sca_step3(graph, instance, initial, algorithm="sptirp")
