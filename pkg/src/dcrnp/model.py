"""Problem instances and their hop-count topology graph.

An instance places one sink, ``n`` sensors, and ``m`` candidate relay sites
on the plane.  A sensor transmits over radius ``r``; relays and the sink
transmit over radius ``big_r`` (``r <= big_r``).  Two nodes are linked when
their Euclidean distance is at most ``r`` if either endpoint is a sensor,
and at most ``big_r`` otherwise.  Distance comparisons are exact, with no
epsilon.

Node ids are assigned deterministically: sink 0, sensors 1..n in input
order, candidates n+1..n+m in input order.

Instance file format (line-oriented JSON, sorted keys, one field per line,
coordinates and radii printed with 6 decimal places, delta as an integer)::

    {
    "R": 15.000000,
    "candidates": [[1.000000, 2.000000]],
    "delta": 4,
    "r": 10.000000,
    "sensors": [[0.000000, 5.000000]],
    "sink": [50.000000, 50.000000]
    }

Serialization is canonical: serializing a parsed file is a fixpoint.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from . import kernels
from .kernels import CANDIDATE, SENSOR, SINK


class Point(NamedTuple):
    x: float
    y: float


class InstanceFormatError(ValueError):
    """An instance file could not be parsed."""


class ValidationError(ValueError):
    """Instance fields violate the model invariants."""


def _as_point(value, name: str) -> Point:
    if (
        not isinstance(value, (tuple, list))
        or len(value) != 2
        or any(isinstance(c, bool) or not isinstance(c, (int, float)) for c in value)
    ):
        raise ValidationError(f"{name}: expected a pair of numbers")
    x, y = float(value[0]) + 0.0, float(value[1]) + 0.0  # + 0.0 folds -0.0 into 0.0
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValidationError(f"{name}: non-finite coordinate")
    return Point(x, y)


@dataclass(frozen=True)
class Instance:
    """One placement problem: geometry, radii, and the hop budget delta."""

    sensors: tuple[Point, ...]
    candidates: tuple[Point, ...]
    sink: Point
    r: float
    big_r: float
    delta: int

    def __post_init__(self) -> None:
        sensors = tuple(_as_point(p, f"sensors[{i}]") for i, p in enumerate(self.sensors))
        candidates = tuple(
            _as_point(p, f"candidates[{i}]") for i, p in enumerate(self.candidates)
        )
        sink = _as_point(self.sink, "sink")
        object.__setattr__(self, "sensors", sensors)
        object.__setattr__(self, "candidates", candidates)
        object.__setattr__(self, "sink", sink)
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "big_r", float(self.big_r))
        if not sensors:
            raise ValidationError("sensors: at least one sensor is required")
        if not (math.isfinite(self.r) and math.isfinite(self.big_r)):
            raise ValidationError("r/R: radii must be finite")
        if self.r < 0:
            raise ValidationError("r: radius must be non-negative")
        if self.r > self.big_r:
            raise ValidationError(f"r: sensor radius {self.r} exceeds relay radius {self.big_r}")
        if isinstance(self.delta, bool) or not isinstance(self.delta, int):
            raise ValidationError("delta: expected an integer")
        if self.delta < 1:
            raise ValidationError(f"delta: hop budget must be at least 1, got {self.delta}")
        seen: dict[Point, str] = {sink: "sink"}
        for name, pts in (("sensors", sensors), ("candidates", candidates)):
            for i, p in enumerate(pts):
                label = f"{name}[{i}]"
                if p in seen:
                    raise ValidationError(f"{label}: duplicate coordinate, also used by {seen[p]}")
                seen[p] = label

    @property
    def n(self) -> int:
        return len(self.sensors)

    @property
    def m(self) -> int:
        return len(self.candidates)

    @property
    def n_nodes(self) -> int:
        return 1 + self.n + self.m


def _fmt(value: float) -> str:
    return f"{value:.6f}"


def _fmt_point(p: Point) -> str:
    return f"[{_fmt(p.x)}, {_fmt(p.y)}]"


def _fmt_points(points: Iterable[Point]) -> str:
    return "[" + ", ".join(_fmt_point(p) for p in points) + "]"


def serialize_instance(instance: Instance) -> bytes:
    """Canonical instance-file bytes (sorted keys, 6-decimal coordinates)."""
    lines = [
        "{",
        f'"R": {_fmt(instance.big_r)},',
        f'"candidates": {_fmt_points(instance.candidates)},',
        f'"delta": {instance.delta},',
        f'"r": {_fmt(instance.r)},',
        f'"sensors": {_fmt_points(instance.sensors)},',
        f'"sink": {_fmt_point(instance.sink)}',
        "}",
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


_INSTANCE_FIELDS = {"R", "candidates", "delta", "r", "sensors", "sink"}


def parse_instance(data: bytes | str) -> Instance:
    """Parse instance-file bytes; raises InstanceFormatError or ValidationError."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data

    def _reject_constant(token: str):
        raise InstanceFormatError(f"non-finite value {token!r} is not allowed")

    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"line {exc.lineno}: {exc.msg}") from None
    if not isinstance(raw, dict):
        raise InstanceFormatError("top level must be an object")
    missing = _INSTANCE_FIELDS - raw.keys()
    if missing:
        raise InstanceFormatError(f"missing field {sorted(missing)[0]!r}")
    unknown = raw.keys() - _INSTANCE_FIELDS
    if unknown:
        raise InstanceFormatError(f"unknown field {sorted(unknown)[0]!r}")
    for name in ("r", "R"):
        if isinstance(raw[name], bool) or not isinstance(raw[name], (int, float)):
            raise InstanceFormatError(f"{name}: expected a number")
    if isinstance(raw["delta"], bool) or not isinstance(raw["delta"], int):
        raise InstanceFormatError("delta: expected an integer")
    for name in ("sensors", "candidates"):
        if not isinstance(raw[name], list):
            raise InstanceFormatError(f"{name}: expected a list of [x, y] pairs")
    return Instance(
        sensors=tuple(raw["sensors"]),
        candidates=tuple(raw["candidates"]),
        sink=raw["sink"],
        r=float(raw["r"]),
        big_r=float(raw["R"]),
        delta=raw["delta"],
    )


def instance_digest(instance: Instance) -> str:
    """Short stable digest of the canonical instance bytes."""
    return hashlib.sha256(serialize_instance(instance)).hexdigest()[:16]


@dataclass(frozen=True)
class TopologyGraph:
    """Immutable node table plus CSR adjacency for one instance.

    ``kinds`` holds kernels.SINK / SENSOR / CANDIDATE codes; neighbor lists
    are sorted ascending by node id.
    """

    coords: np.ndarray
    kinds: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    n_sensors: int
    n_candidates: int

    SINK_ID = 0

    @property
    def n_nodes(self) -> int:
        return 1 + self.n_sensors + self.n_candidates

    @property
    def sensor_ids(self) -> range:
        return range(1, 1 + self.n_sensors)

    @property
    def candidate_ids(self) -> range:
        return range(1 + self.n_sensors, self.n_nodes)

    def kind(self, u: int) -> int:
        return int(self.kinds[u])

    def is_sensor(self, u: int) -> bool:
        return self.kinds[u] == SENSOR

    def is_candidate(self, u: int) -> bool:
        return self.kinds[u] == CANDIDATE

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def degree(self, u: int) -> int:
        return int(self.indptr[u + 1] - self.indptr[u])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = int(np.searchsorted(row, v))
        return i < len(row) and row[i] == v


def build_graph(instance: Instance) -> TopologyGraph:
    """Assemble the topology graph for an instance."""
    n, m = instance.n, instance.m
    total = instance.n_nodes
    if total >= kernels.INF:
        raise ValidationError(f"instance too large: {total} nodes")
    coords = np.empty((total, 2), dtype=np.float64)
    coords[0] = instance.sink
    for i, p in enumerate(instance.sensors, start=1):
        coords[i] = p
    for i, p in enumerate(instance.candidates, start=1 + n):
        coords[i] = p
    kinds = np.full(total, CANDIDATE, dtype=np.int8)
    kinds[0] = SINK
    kinds[1 : 1 + n] = SENSOR
    indptr, indices = kernels.build_adjacency(coords, kinds, instance.r, instance.big_r)
    return TopologyGraph(
        coords=coords,
        kinds=kinds,
        indptr=indptr,
        indices=indices,
        n_sensors=n,
        n_candidates=m,
    )
