"""Set-covering relay placement under a hop budget.

``sca_solve`` runs a three-step pipeline:

1. Gate.  A search over the full graph decides whether any placement can
   work at all (some sensor out of reach within delta even with every
   candidate deployed -> infeasible), and whether none is needed (every
   sensor within delta over sensors alone -> a zero-relay solution).

2. Level construction (``sca_step2``).  The connected region grows outward
   from the sink one hop layer at a time.  At layer k the frontier consists
   of the unplaced candidates and unconnected sensors adjacent to layer k-1.
   Frontier sensors connect immediately at zero cost.  Every frontier node q
   gets a cover set Q(q): the still-unconnected sensors s with

       dist(s, q) + k <= delta

   that also pass the approach rule: some layer-(k-1) neighbor of q already
   counted s in its own cover set and sits strictly farther from s than q
   does.  A greedy set cover over these sets picks the layer-k nodes; picked
   candidates are deployed.  Distances here are always measured on the full
   graph.

3. Pruning (``sca_step3``).  Deployed relays are retried cheapest-first
   (fewest sensors that could route through them) and removed whenever the
   remaining set still connects every sensor within the budget.  Each
   successful removal rebuilds the tree, drops relays that fell off it,
   recomputes weights, and restarts the scan.  The result is 1-minimal:
   removing any single remaining relay breaks feasibility.

The same pruning step serves the baseline in :mod:`dcrnp.sptirp`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .hops import HopTable, SpTree, bfs_from, canonical_path, hop_table, induced_feasibility
from .kernels import INF
from .model import Instance, TopologyGraph, build_graph, instance_digest


class CoverError(RuntimeError):
    """Internal fault: the frontier cannot cover the remaining sensors."""


class SolutionFormatError(ValueError):
    """A solution file could not be parsed."""


@dataclass(frozen=True)
class Infeasible:
    """No relay placement can meet the hop budget."""

    reason: str
    algorithm: str = ""


@dataclass(frozen=True)
class Solution:
    """A feasible placement: relays, the routing tree, and per-sensor hops.

    ``tree_edges`` is the union of every sensor's path to the sink in the
    canonical tree, as sorted (low, high) pairs.  ``sensor_hops[i]`` is the
    hop count of sensor id i+1.
    """

    algorithm: str
    relays: tuple[int, ...]
    tree_edges: tuple[tuple[int, int], ...]
    sensor_hops: tuple[int, ...]
    feasible: bool = True
    instance_digest: str = ""

    @property
    def max_hops(self) -> int:
        return max(self.sensor_hops) if self.sensor_hops else 0

    @property
    def zero_relay(self) -> bool:
        """True when the sensors reach the sink without any relay."""
        return self.feasible and not self.relays


@dataclass(frozen=True)
class CoverElement:
    """A frontier node together with the sensors it can still cover."""

    node: int
    covered: frozenset[int]
    weight: int  # distinct candidates on the canonical paths to covered sensors
    cost: int  # 0 for sensors, 1 for candidates


@dataclass(frozen=True)
class Frontier:
    """Step-2 state entering layer ``level``.

    ``prev_level`` holds the layer level-1 nodes; ``placed`` everything on
    layers 0..level-1 (including the sink); ``connected``/``unconnected``
    partition the sensors as of the start of the layer; ``prev_cover`` maps
    each layer level-1 node to the cover set recorded when it was placed.
    """

    level: int
    prev_level: tuple[int, ...]
    placed: frozenset[int]
    connected: frozenset[int]
    unconnected: frozenset[int]
    prev_cover: Mapping[int, frozenset[int]]


@dataclass(frozen=True)
class LevelTrace:
    """One step-2 layer, recorded for inspection and tests."""

    frontier: Frontier
    members: tuple[int, ...]
    auto_sensors: tuple[int, ...]
    elements: tuple[CoverElement, ...]
    selected: tuple[int, ...]
    level_nodes: tuple[int, ...]


def frontier_members(graph: TopologyGraph, frontier: Frontier) -> list[int]:
    """Unplaced candidates and unconnected sensors adjacent to layer k-1."""
    members: set[int] = set()
    for u in frontier.prev_level:
        for v in graph.neighbors(u):
            v = int(v)
            if v not in frontier.placed:
                members.add(v)
    return sorted(members)


def compute_cover_elements(
    graph: TopologyGraph,
    hop_rows: HopTable,
    frontier: Frontier,
    delta: int,
    distance_rule: bool = True,
) -> list[CoverElement]:
    """Cover sets and weights for every frontier member with a non-empty set.

    ``hop_rows`` must hold full-graph rows for every sensor.  The universe is
    the unconnected sensors left after the frontier's own sensors connect.
    ``distance_rule=False`` drops the approach rule and keeps only the budget
    inequality, which widens every cover set (useful for diagnostics).
    """
    k = frontier.level
    members = frontier_members(graph, frontier)
    auto = {v for v in members if graph.is_sensor(v)}
    universe = frontier.unconnected - auto
    prev_level = set(frontier.prev_level)
    elements: list[CoverElement] = []
    for q in members:
        near = [int(v) for v in graph.neighbors(q) if int(v) in prev_level]
        covered = []
        for s in universe:
            d_sq = int(hop_rows.dist_from(s)[q])
            if d_sq + k > delta:
                continue
            if distance_rule:
                row = hop_rows.dist_from(s)
                if not any(
                    s in frontier.prev_cover.get(qb, ()) and d_sq < row[qb] for qb in near
                ):
                    continue
            covered.append(s)
        if covered:
            elements.append(
                CoverElement(
                    node=q,
                    covered=frozenset(covered),
                    weight=_cover_weight(graph, hop_rows, q, covered),
                    cost=0 if graph.is_sensor(q) else 1,
                )
            )
    return elements


def _cover_weight(
    graph: TopologyGraph, hop_rows: HopTable, q: int, covered: Iterable[int]
) -> int:
    """Distinct candidates on the canonical paths from q to each covered sensor."""
    seen: set[int] = set()
    for s in covered:
        for v in canonical_path(hop_rows.parent_from(s), q, dist=hop_rows.dist_from(s)):
            if graph.is_candidate(v):
                seen.add(v)
    return len(seen)


def greedy_cover(
    elements: Sequence[CoverElement], universe: Iterable[int]
) -> list[CoverElement]:
    """Greedy set cover over the frontier elements.

    Repeatedly selects the element covering the most still-uncovered sensors;
    ties prefer zero-cost sensors over candidates, then smaller weight, then
    smaller node id.  Raises CoverError when the union cannot reach the
    universe, which indicates a bug upstream.
    """
    remaining = set(universe)
    pool = sorted(elements, key=lambda e: e.node)
    chosen: list[CoverElement] = []
    taken: set[int] = set()
    while remaining:
        best: CoverElement | None = None
        best_key: tuple[int, int, int, int] | None = None
        for e in pool:
            if e.node in taken:
                continue
            gain = len(e.covered & remaining)
            if gain == 0:
                continue
            key = (-gain, e.cost, e.weight, e.node)
            if best_key is None or key < best_key:
                best, best_key = e, key
        if best is None:
            raise CoverError(f"{len(remaining)} sensors cannot be covered: {sorted(remaining)}")
        chosen.append(best)
        taken.add(best.node)
        remaining -= best.covered
    return chosen


def sca_step2(
    graph: TopologyGraph,
    instance: Instance,
    trace: list[LevelTrace] | None = None,
    distance_rule: bool = True,
) -> list[int]:
    """Grow layers from the sink until every sensor connects; return relays.

    Requires the gate to have passed (every sensor within delta over the
    full graph); under that precondition the loop ends at a layer <= delta.
    ``distance_rule`` is forwarded to the cover-set computation.
    """
    delta = instance.delta
    sensors = set(graph.sensor_ids)
    hop_rows = hop_table(graph, sources=sorted(sensors))

    unconnected = set(sensors)
    placed: set[int] = {graph.SINK_ID}
    prev_level: tuple[int, ...] = (graph.SINK_ID,)
    prev_cover: dict[int, frozenset[int]] = {
        graph.SINK_ID: frozenset(
            s for s in sensors if hop_rows.dist_from(s)[graph.SINK_ID] <= delta
        )
    }
    deployed: list[int] = []
    k = 0
    while unconnected:
        k += 1
        if k > delta:
            raise CoverError(f"layer {k} exceeds the hop budget {delta}")
        frontier = Frontier(
            level=k,
            prev_level=prev_level,
            placed=frozenset(placed),
            connected=frozenset(sensors - unconnected),
            unconnected=frozenset(unconnected),
            prev_cover=prev_cover,
        )
        members = frontier_members(graph, frontier)
        auto = [v for v in members if graph.is_sensor(v)]
        elements = compute_cover_elements(graph, hop_rows, frontier, delta, distance_rule)

        unconnected -= set(auto)
        level_nodes = set(auto)
        placed.update(auto)
        selected: list[int] = []
        if unconnected:
            chosen = greedy_cover(elements, unconnected)
            for e in chosen:
                selected.append(e.node)
                if graph.is_candidate(e.node):
                    level_nodes.add(e.node)
                    placed.add(e.node)
                    deployed.append(e.node)

        cover_by_node = {e.node: e.covered for e in elements}
        prev_cover = {v: cover_by_node.get(v, frozenset()) for v in level_nodes}
        prev_level = tuple(sorted(level_nodes))
        if trace is not None:
            trace.append(
                LevelTrace(
                    frontier=frontier,
                    members=tuple(members),
                    auto_sensors=tuple(auto),
                    elements=tuple(sorted(elements, key=lambda e: e.node)),
                    selected=tuple(selected),
                    level_nodes=prev_level,
                )
            )
    return sorted(deployed)


def relays_on_tree(graph: TopologyGraph, tree: SpTree) -> list[int]:
    """Candidates lying on some sensor-to-sink path of the tree."""
    seen: set[int] = set()
    for s in graph.sensor_ids:
        if tree.depth_of(s) >= INF:
            continue  # unreachable sensors contribute no path
        for v in tree.path_to_root(s):
            if graph.is_candidate(v):
                seen.add(v)
    return sorted(seen)


def _relay_weights(
    graph: TopologyGraph, relays: Sequence[int], delta: int
) -> dict[int, int]:
    """weight(q) = sensors whose budgeted route could pass through q,
    measured on the subgraph induced by the current relay set."""
    allowed = {graph.SINK_ID} | set(graph.sensor_ids) | set(relays)
    rows = hop_table(graph, sources=(graph.SINK_ID, *graph.sensor_ids), allowed=allowed)
    to_sink = rows.dist_from(graph.SINK_ID)
    weights: dict[int, int] = {}
    for q in relays:
        dk = int(to_sink[q])
        weights[q] = sum(
            1 for s in graph.sensor_ids if int(rows.dist_from(s)[q]) + dk <= delta
        )
    return weights


def sca_step3(
    graph: TopologyGraph,
    instance: Instance,
    relays: Iterable[int],
    algorithm: str = "sca",
) -> Solution:
    """Prune a feasible relay set down to a 1-minimal one.

    Relays are tried in ascending (weight, id) order.  A removal that keeps
    the induced subgraph feasible is committed: the relay set shrinks to the
    candidates still on the rebuilt tree, weights are recomputed, and every
    remaining relay becomes untried again.  A removal that breaks
    feasibility is rolled back and the relay is marked tried.  The loop ends
    when every remaining relay is tried.
    """
    delta = instance.delta
    current = sorted({int(q) for q in relays})
    feasible, tree = induced_feasibility(graph, current, delta)
    if not feasible:
        raise ValueError("pruning requires a feasible starting relay set")
    weights = _relay_weights(graph, current, delta)
    tried: set[int] = set()
    while True:
        untried = [q for q in current if q not in tried]
        if not untried:
            break
        q = min(untried, key=lambda v: (weights[v], v))
        trial = [v for v in current if v != q]
        ok, trial_tree = induced_feasibility(graph, trial, delta)
        if ok:
            current = relays_on_tree(graph, trial_tree)
            tree = trial_tree
            weights = _relay_weights(graph, current, delta)
            tried.clear()
        else:
            tried.add(q)
    feasible, tree = induced_feasibility(graph, current, delta)
    assert feasible
    return build_solution(graph, instance, current, algorithm, tree=tree)


def sca_solve(instance: Instance, graph: TopologyGraph | None = None) -> Solution | Infeasible:
    """Full pipeline: gate, level construction, pruning."""
    if graph is None:
        graph = build_graph(instance)
    delta = instance.delta
    dist_all, _ = bfs_from(graph, graph.SINK_ID)
    for s in graph.sensor_ids:
        if dist_all[s] > delta:
            need = "unreachable" if dist_all[s] >= INF else f"{int(dist_all[s])} hops away"
            return Infeasible(
                f"sensor {s} is {need} even with every candidate deployed (budget {delta})",
                algorithm="sca",
            )
    feasible_bare, bare_tree = induced_feasibility(graph, (), delta)
    if feasible_bare:
        return build_solution(graph, instance, (), "sca", tree=bare_tree)
    deployed = sca_step2(graph, instance)
    return sca_step3(graph, instance, deployed, algorithm="sca")


def build_solution(
    graph: TopologyGraph,
    instance: Instance,
    relays: Iterable[int],
    algorithm: str,
    tree: SpTree | None = None,
) -> Solution:
    """Assemble a Solution from a feasible relay set (and optionally its tree)."""
    relays = tuple(sorted({int(q) for q in relays}))
    if tree is None:
        ok, tree = induced_feasibility(graph, relays, instance.delta)
        if not ok:
            raise ValueError("relay set is not feasible")
    edges: set[tuple[int, int]] = set()
    on_paths: set[int] = set()
    sensor_hops: list[int] = []
    for s in graph.sensor_ids:
        path = tree.path_to_root(s)
        sensor_hops.append(len(path) - 1)
        on_paths.update(path)
        for u, v in zip(path, path[1:]):
            edges.add((min(u, v), max(u, v)))
    missing = [q for q in relays if q not in on_paths]
    if missing:
        raise ValueError(f"relay {missing[0]} does not lie on any sensor path")
    return Solution(
        algorithm=algorithm,
        relays=relays,
        tree_edges=tuple(sorted(edges)),
        sensor_hops=tuple(sensor_hops),
        instance_digest=instance_digest(instance),
    )


def serialize_solution(sol: Solution) -> bytes:
    """Canonical solution-file bytes (sorted keys, one field per line)."""
    relays = "[" + ", ".join(str(q) for q in sol.relays) + "]"
    hops_s = "[" + ", ".join(str(h) for h in sol.sensor_hops) + "]"
    edges = "[" + ", ".join(f"[{u}, {v}]" for u, v in sol.tree_edges) + "]"
    lines = [
        "{",
        f'"algorithm": {json.dumps(sol.algorithm)},',
        f'"feasible": {"true" if sol.feasible else "false"},',
        f'"relays": {relays},',
        f'"sensor_hops": {hops_s},',
        f'"tree_edges": {edges}',
        "}",
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


_SOLUTION_FIELDS = {"algorithm", "feasible", "relays", "sensor_hops", "tree_edges"}


def parse_solution(data: bytes | str) -> Solution:
    """Parse solution-file bytes; raises SolutionFormatError."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SolutionFormatError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise SolutionFormatError("top level must be an object")
    missing = _SOLUTION_FIELDS - raw.keys()
    if missing:
        raise SolutionFormatError(f"missing field {sorted(missing)[0]!r}")
    unknown = raw.keys() - _SOLUTION_FIELDS
    if unknown:
        raise SolutionFormatError(f"unknown field {sorted(unknown)[0]!r}")
    if not isinstance(raw["algorithm"], str):
        raise SolutionFormatError("algorithm: expected a string")
    if not isinstance(raw["feasible"], bool):
        raise SolutionFormatError("feasible: expected a boolean")
    for name in ("relays", "sensor_hops"):
        if not isinstance(raw[name], list) or any(
            isinstance(v, bool) or not isinstance(v, int) for v in raw[name]
        ):
            raise SolutionFormatError(f"{name}: expected a list of integers")
    edges = raw["tree_edges"]
    if not isinstance(edges, list) or any(
        not isinstance(e, list)
        or len(e) != 2
        or any(isinstance(v, bool) or not isinstance(v, int) for v in e)
        for e in edges
    ):
        raise SolutionFormatError("tree_edges: expected a list of [u, v] id pairs")
    feasible = raw["feasible"]
    relays = tuple(raw["relays"])
    return Solution(
        algorithm=raw["algorithm"],
        relays=relays,
        tree_edges=tuple((int(u), int(v)) for u, v in edges),
        sensor_hops=tuple(raw["sensor_hops"]),
        feasible=feasible,
    )
