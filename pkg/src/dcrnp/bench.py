"""Seeded instance generation and the head-to-head experiment harness.

Instances are drawn with a named, versioned 64-bit PRNG (numpy PCG64).  The
sink sits at the field center; sensor coordinates are drawn first, then
candidate coordinates, uniformly over [0, field]^2, one point at a time.
Coordinates are quantized to 6 decimals at generation time so the in-memory
instance and its serialized form describe the same geometry; duplicate
points (probability ~0) are redrawn deterministically.

Experiment cells enumerate (sensor count, radii pair, delta, trial) in
config order.  The trial seed is ``base_seed XOR cell_index``; when a drawn
instance is infeasible it is resampled with a derived seed up to 10 times
before the trial is recorded as infeasible and excluded from the means.

A delta spec may be an integer (fixed hop budget) or a string like
``"1.5x"``: the budget becomes ceil(multiplier * d_spt) where d_spt is the
deepest sensor in the full-graph shortest path tree of that very instance,
which makes the drawn instance feasible by construction.

Persisted artifacts (summary CSV, plot data, metadata) contain no wall-clock
values, so a rerun with the same config is byte-identical.
"""
from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .hops import bfs_from
from .kernels import INF
from .model import Instance, Point, build_graph
from .sca import Infeasible, sca_solve
from .sptirp import sptirp_solve
from . import oracle as oracle_mod

PRNG_NAME = "numpy-pcg64"
PRNG_VERSION = 1

RESAMPLE_ATTEMPTS = 10
_RESAMPLE_STRIDE = 0x9E3779B97F4A7C15  # odd 64-bit constant for attempt derivation
_SEED_MASK = (1 << 64) - 1


def gen_instance(
    field: float, n: int, m: int, r: float, big_r: float, delta: int, seed: int
) -> Instance:
    """Draw one instance; identical arguments give identical instance bytes."""
    if field <= 0 or n < 1 or m < 0 or r <= 0 or big_r < r or delta < 1:
        raise ValueError("generator parameters must be positive with r <= R and delta >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    sink = Point(round(field / 2.0, 6), round(field / 2.0, 6))
    taken = {sink}

    def draw() -> Point:
        while True:
            p = Point(round(float(rng.uniform(0.0, field)), 6), round(float(rng.uniform(0.0, field)), 6))
            if p not in taken:
                taken.add(p)
                return p

    sensors = tuple(draw() for _ in range(n))
    candidates = tuple(draw() for _ in range(m))
    return Instance(
        sensors=sensors, candidates=candidates, sink=sink, r=float(r), big_r=float(big_r), delta=delta
    )


def spt_sensor_depth(instance: Instance) -> int | None:
    """Deepest sensor in the full-graph tree, or None when one is unreachable."""
    graph = build_graph(instance)
    dist, _ = bfs_from(graph, graph.SINK_ID)
    worst = max(int(dist[s]) for s in graph.sensor_ids)
    return None if worst >= INF else worst


def auto_delta(instance: Instance, multiplier: float) -> Instance | None:
    """Rescale the hop budget to ceil(multiplier * deepest sensor depth)."""
    worst = spt_sensor_depth(instance)
    if worst is None:
        return None
    return dataclasses.replace(instance, delta=max(1, math.ceil(multiplier * worst)))


def _parse_delta_spec(spec: int | str) -> tuple[str, float | int]:
    """Returns ("fixed", value) or ("scaled", multiplier)."""
    if isinstance(spec, bool):
        raise ValueError("delta spec: expected an integer or a multiplier string")
    if isinstance(spec, int):
        if spec < 1:
            raise ValueError(f"delta spec: fixed budget must be >= 1, got {spec}")
        return "fixed", spec
    if isinstance(spec, str) and spec.endswith("x"):
        try:
            mult = float(spec[:-1])
        except ValueError:
            raise ValueError(f"delta spec: cannot parse multiplier {spec!r}") from None
        if mult <= 0:
            raise ValueError(f"delta spec: multiplier must be positive, got {spec!r}")
        return "scaled", mult
    raise ValueError(f"delta spec: expected an integer or '<mult>x', got {spec!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    field: float
    candidates: int
    sensor_counts: tuple[int, ...]
    radii: tuple[tuple[float, float], ...]
    deltas: tuple[int | str, ...]
    trials: int
    base_seed: int
    with_oracle: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "sensor_counts", tuple(int(v) for v in self.sensor_counts))
        object.__setattr__(
            self, "radii", tuple((float(r), float(big)) for r, big in self.radii)
        )
        object.__setattr__(self, "deltas", tuple(self.deltas))
        if self.field <= 0:
            raise ValueError("field side must be positive")
        if self.candidates < 0:
            raise ValueError("candidate count must be non-negative")
        if not self.sensor_counts or any(v < 1 for v in self.sensor_counts):
            raise ValueError("sensor counts must be positive")
        if not self.radii or any(r <= 0 or big < r for r, big in self.radii):
            raise ValueError("each radii pair needs 0 < r <= R")
        if not self.deltas:
            raise ValueError("at least one delta spec is required")
        for spec in self.deltas:
            _parse_delta_spec(spec)
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    def to_dict(self) -> dict:
        return {
            "field": self.field,
            "candidates": self.candidates,
            "sensor_counts": list(self.sensor_counts),
            "radii": [list(pair) for pair in self.radii],
            "deltas": list(self.deltas),
            "trials": self.trials,
            "base_seed": self.base_seed,
            "with_oracle": self.with_oracle,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"unknown config field {sorted(unknown)[0]!r}")
        missing = {"field", "candidates", "sensor_counts", "radii", "deltas", "trials", "base_seed"} - set(raw)
        if missing:
            raise ValueError(f"missing config field {sorted(missing)[0]!r}")
        return cls(
            field=float(raw["field"]),
            candidates=int(raw["candidates"]),
            sensor_counts=tuple(raw["sensor_counts"]),
            radii=tuple(tuple(pair) for pair in raw["radii"]),
            deltas=tuple(raw["deltas"]),
            trials=int(raw["trials"]),
            base_seed=int(raw["base_seed"]),
            with_oracle=bool(raw.get("with_oracle", False)),
        )


DESK_CONFIG = ExperimentConfig(
    field=100.0,
    candidates=100,
    sensor_counts=(10, 20, 30),
    # r=10 sits below the connectivity threshold at this site density and
    # mostly gates out; the wider radii give the preset non-degenerate cells
    radii=((10.0, 10.0), (15.0, 15.0), (20.0, 20.0)),
    deltas=("1.5x",),
    trials=30,
    base_seed=20260814,
)

# full-protocol scale: dense candidate pool, sensor sweep, all radii pairs
FULL_CONFIG = ExperimentConfig(
    field=100.0,
    candidates=400,
    sensor_counts=tuple(range(10, 101, 10)),
    radii=((10.0, 10.0), (15.0, 15.0), (20.0, 20.0), (10.0, 15.0)),
    deltas=("1.2x", "1.5x", "2.0x"),
    trials=30,
    base_seed=20260814,
)


@dataclass(frozen=True)
class TrialRecord:
    cell_index: int
    n: int
    r: float
    big_r: float
    delta_spec: str
    trial: int
    seed: int  # seed of the instance actually used
    attempts: int
    feasible: bool
    delta: int | None
    sca_relays: int | None
    sptirp_relays: int | None
    sca_seconds: float
    sptirp_seconds: float
    oracle_optimum: int | None = None
    error: str | None = None


def _cells(config: ExperimentConfig):
    index = 0
    for n in config.sensor_counts:
        for r, big_r in config.radii:
            for spec in config.deltas:
                for trial in range(config.trials):
                    yield index, n, r, big_r, spec, trial
                    index += 1


def _resolve_instance(
    config: ExperimentConfig, n: int, r: float, big_r: float, spec: int | str, cell_index: int
) -> tuple[Instance | None, int, int]:
    """Sample an instance for one trial, resampling infeasible draws.

    Returns (instance or None, seed used, attempts).  The instance, when
    returned, passes the gate: every sensor within delta over the full graph.
    """
    kind, value = _parse_delta_spec(spec)
    base = (config.base_seed ^ cell_index) & _SEED_MASK
    seed = base
    for attempt in range(1, RESAMPLE_ATTEMPTS + 1):
        inst = gen_instance(config.field, n, config.candidates, r, big_r, 1, seed)
        worst = spt_sensor_depth(inst)
        if worst is not None:
            if kind == "fixed":
                target = int(value)
            else:
                target = max(1, math.ceil(float(value) * worst))
            if worst <= target:
                return dataclasses.replace(inst, delta=target), seed, attempt
        seed = (base ^ (attempt * _RESAMPLE_STRIDE)) & _SEED_MASK
    return None, seed, RESAMPLE_ATTEMPTS


def _run_trial(
    config: ExperimentConfig,
    inst: Instance,
    cell_index: int,
    n: int,
    r: float,
    big_r: float,
    spec: int | str,
    trial: int,
    seed: int,
    attempts: int,
) -> TrialRecord:
    common = dict(
        cell_index=cell_index,
        n=n,
        r=r,
        big_r=big_r,
        delta_spec=str(spec),
        trial=trial,
        seed=seed,
        attempts=attempts,
        delta=inst.delta,
    )
    try:
        graph = build_graph(inst)
        t0 = time.perf_counter()
        sca_sol = sca_solve(inst, graph)
        t1 = time.perf_counter()
        spt_sol = sptirp_solve(inst, graph)
        t2 = time.perf_counter()
        if isinstance(sca_sol, Infeasible) or isinstance(spt_sol, Infeasible):
            raise RuntimeError("gate-passing instance must be solvable")  # pragma: no cover
        opt = None
        if config.with_oracle and inst.m <= oracle_mod.GUARD:
            res = oracle_mod.oracle_solve(inst, graph=graph)
            opt = res.optimum if isinstance(res, oracle_mod.OracleResult) else None
    except Exception as exc:  # per-trial faults never abort the batch
        return TrialRecord(
            feasible=False,
            sca_relays=None,
            sptirp_relays=None,
            sca_seconds=0.0,
            sptirp_seconds=0.0,
            error=f"{type(exc).__name__}: {exc}",
            **common,
        )
    return TrialRecord(
        feasible=True,
        sca_relays=len(sca_sol.relays),
        sptirp_relays=len(spt_sol.relays),
        sca_seconds=t1 - t0,
        sptirp_seconds=t2 - t1,
        oracle_optimum=opt,
        **common,
    )


def run_experiment(
    config: ExperimentConfig, progress: Callable[[TrialRecord], None] | None = None
) -> list[TrialRecord]:
    """Run every cell sequentially and return one record per trial."""
    records: list[TrialRecord] = []
    for cell_index, n, r, big_r, spec, trial in _cells(config):
        inst, seed, attempts = _resolve_instance(config, n, r, big_r, spec, cell_index)
        if inst is None:
            rec = TrialRecord(
                cell_index=cell_index,
                n=n,
                r=r,
                big_r=big_r,
                delta_spec=str(spec),
                trial=trial,
                seed=seed,
                attempts=attempts,
                feasible=False,
                delta=None,
                sca_relays=None,
                sptirp_relays=None,
                sca_seconds=0.0,
                sptirp_seconds=0.0,
            )
        else:
            rec = _run_trial(config, inst, cell_index, n, r, big_r, spec, trial, seed, attempts)
        records.append(rec)
        if progress is not None:
            progress(rec)
    return records


@dataclass(frozen=True)
class CellSummary:
    n: int
    r: float
    big_r: float
    delta_spec: str
    trials: int  # feasible trials contributing to the means
    mean_sca: float
    sd_sca: float
    mean_sptirp: float
    sd_sptirp: float
    mean_diff: float
    rel_saving: float
    infeasible_count: int


@dataclass(frozen=True)
class Summary:
    cells: tuple[CellSummary, ...]

    def to_csv(self) -> bytes:
        lines = [
            "n,r,R,delta,trials,mean_sca,sd_sca,mean_sptirp,sd_sptirp,mean_diff,rel_saving,infeasible_count"
        ]
        for c in self.cells:
            lines.append(
                f"{c.n},{c.r:g},{c.big_r:g},{c.delta_spec},{c.trials},"
                f"{c.mean_sca:.6f},{c.sd_sca:.6f},{c.mean_sptirp:.6f},{c.sd_sptirp:.6f},"
                f"{c.mean_diff:.6f},{c.rel_saving:.6f},{c.infeasible_count}"
            )
        return ("\n".join(lines) + "\n").encode("utf-8")

    def pooled_saving(self) -> float:
        """Relative saving pooled over every feasible trial mean."""
        tot_spt = sum(c.mean_sptirp * c.trials for c in self.cells)
        tot_diff = sum(c.mean_diff * c.trials for c in self.cells)
        return tot_diff / tot_spt if tot_spt > 0 else 0.0


def _mean_sd(values: Sequence[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.std())  # population sd: stable for 1-trial cells


def summarize(records: Iterable[TrialRecord]) -> Summary:
    """Aggregate trial records per cell, in first-seen (config) order."""
    groups: dict[tuple, list[TrialRecord]] = {}
    for rec in records:
        groups.setdefault((rec.n, rec.r, rec.big_r, rec.delta_spec), []).append(rec)
    if not groups:
        raise ValueError("no records to summarize")
    cells = []
    for (n, r, big_r, spec), recs in groups.items():
        feas = [rec for rec in recs if rec.feasible]
        sca_counts = [float(rec.sca_relays) for rec in feas]
        spt_counts = [float(rec.sptirp_relays) for rec in feas]
        if feas:
            mean_sca, sd_sca = _mean_sd(sca_counts)
            mean_spt, sd_spt = _mean_sd(spt_counts)
            diffs = [s - c for s, c in zip(spt_counts, sca_counts)]
            mean_diff = float(np.mean(diffs))
            rel = mean_diff / mean_spt if mean_spt > 0 else 0.0
        else:
            mean_sca = sd_sca = mean_spt = sd_spt = mean_diff = rel = 0.0
        cells.append(
            CellSummary(
                n=n,
                r=r,
                big_r=big_r,
                delta_spec=spec,
                trials=len(feas),
                mean_sca=mean_sca,
                sd_sca=sd_sca,
                mean_sptirp=mean_spt,
                sd_sptirp=sd_spt,
                mean_diff=mean_diff,
                rel_saving=rel,
                infeasible_count=len(recs) - len(feas),
            )
        )
    return Summary(cells=tuple(cells))


def parse_summary_csv(data: bytes | str) -> Summary:
    """Parse ``Summary.to_csv`` output back into a Summary."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    lines = [ln for ln in text.splitlines() if ln]
    header = "n,r,R,delta,trials,mean_sca,sd_sca,mean_sptirp,sd_sptirp,mean_diff,rel_saving,infeasible_count"
    if not lines or lines[0] != header:
        raise ValueError("unrecognized summary header")
    cells = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 12:
            raise ValueError(f"bad summary row: {ln!r}")
        cells.append(
            CellSummary(
                n=int(parts[0]),
                r=float(parts[1]),
                big_r=float(parts[2]),
                delta_spec=parts[3],
                trials=int(parts[4]),
                mean_sca=float(parts[5]),
                sd_sca=float(parts[6]),
                mean_sptirp=float(parts[7]),
                sd_sptirp=float(parts[8]),
                mean_diff=float(parts[9]),
                rel_saving=float(parts[10]),
                infeasible_count=int(parts[11]),
            )
        )
    return Summary(cells=tuple(cells))


def emit_plotdata(summary: Summary) -> dict[str, bytes]:
    """Whitespace-delimited series files, one per (r, R, delta) combination.

    Each ``series_r{r}_R{R}_d{delta}.dat`` holds one row per sensor count:
    ``n mean_sca mean_sptirp mean_diff``.
    """
    series: dict[str, list[CellSummary]] = {}
    for c in summary.cells:
        name = f"series_r{c.r:g}_R{c.big_r:g}_d{c.delta_spec}.dat"
        series.setdefault(name, []).append(c)
    out: dict[str, bytes] = {}
    for name, cells in series.items():
        lines = ["# n mean_sca mean_sptirp mean_diff"]
        for c in cells:
            lines.append(f"{c.n} {c.mean_sca:.6f} {c.mean_sptirp:.6f} {c.mean_diff:.6f}")
        out[name] = ("\n".join(lines) + "\n").encode("utf-8")
    return out


def metadata(config: ExperimentConfig) -> bytes:
    """Deterministic metadata blob stored next to the experiment outputs."""
    payload = {
        "config": config.to_dict(),
        "prng": {"name": PRNG_NAME, "version": PRNG_VERSION},
        "resample_attempts": RESAMPLE_ATTEMPTS,
    }
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")
