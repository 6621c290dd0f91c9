"""Command-line front end: gen, solve, verify, compare, bench.

Exit codes: 0 success, 1 usage or input error (including an oracle refusal),
2 problem infeasible, 3 verification failure.

`verify` deliberately shares no graph or search code with the solvers: it
re-derives links from coordinates and radii, walks the listed tree edges
with its own breadth-first search, and cross-checks the recorded hop
counts.  A solution file is accepted only when it is a complete, consistent
certificate.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import sys
import time
from collections import deque
from pathlib import Path
from typing import Sequence

from . import __version__
from .bench import (
    DESK_CONFIG,
    FULL_CONFIG,
    ExperimentConfig,
    emit_plotdata,
    gen_instance,
    metadata,
    run_experiment,
    summarize,
)
from .model import Instance, build_graph, parse_instance, serialize_instance
from .hops import induced_feasibility
from .oracle import GUARD, LimitExceeded, OracleResult, oracle_solve
from .sca import (
    Infeasible,
    Solution,
    build_solution,
    parse_solution,
    sca_solve,
    serialize_solution,
)
from .sptirp import sptirp_solve

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_VERIFY_FAIL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage, which collides with "infeasible" here
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read_bytes(path: str) -> bytes:
    return Path(path).read_bytes()


def _write_bytes(path: str, data: bytes) -> None:
    Path(path).write_bytes(data)


def verify_solution(instance: Instance, sol: Solution) -> str | None:
    """First violation as text, or None when the solution checks out."""
    n, m = instance.n, instance.m
    total = 1 + n + m
    lo, hi = n + 1, n + m
    seen: set[int] = set()
    for q in sol.relays:
        if not (lo <= q <= hi):
            return f"relay id {q} out of range [{lo}, {hi}]"
        if q in seen:
            return f"relay id {q} listed twice"
        seen.add(q)
    if not sol.feasible:
        return "solution is marked infeasible"
    if len(sol.sensor_hops) != n:
        return f"sensor_hops has {len(sol.sensor_hops)} entries, expected {n}"

    pts = [instance.sink, *instance.sensors, *instance.candidates]
    deployed = {0} | set(range(1, n + 1)) | seen

    def linked(u: int, v: int) -> bool:
        dx = pts[u][0] - pts[v][0]
        dy = pts[u][1] - pts[v][1]
        lim = instance.r if (1 <= u <= n or 1 <= v <= n) else instance.big_r
        return dx * dx + dy * dy <= lim * lim

    adj: dict[int, list[int]] = {u: [] for u in deployed}
    for u, v in sol.tree_edges:
        for w in (u, v):
            if not (0 <= w < total):
                return f"tree edge [{u}, {v}]: node {w} out of range"
            if w not in deployed:
                return f"tree edge [{u}, {v}]: node {w} is not deployed"
        if u == v:
            return f"tree edge [{u}, {v}] is a self-loop"
        if not linked(u, v):
            return f"tree edge [{u}, {v}] exceeds the radio range"
        adj[u].append(v)
        adj[v].append(u)

    depth = {0: 0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in depth:
                depth[w] = depth[u] + 1
                queue.append(w)
    for i in range(1, n + 1):
        if i not in depth:
            return f"sensor {i} is not connected to the sink by the tree edges"
        if depth[i] > instance.delta:
            return f"sensor {i} needs {depth[i]} hops, budget is {instance.delta}"
        if depth[i] != sol.sensor_hops[i - 1]:
            return f"sensor {i}: recorded {sol.sensor_hops[i - 1]} hops, tree edges give {depth[i]}"
    in_edges = {w for e in sol.tree_edges for w in e}
    for q in sol.relays:
        if q not in in_edges:
            return f"relay {q} does not appear in any tree edge"
    return None


def cmd_gen(args: argparse.Namespace) -> int:
    inst = gen_instance(args.field, args.n, args.m, args.r, args.big_r, args.delta, args.seed)
    data = serialize_instance(inst)
    if args.out:
        _write_bytes(args.out, data)
        print(f"wrote {args.out}: n={inst.n} m={inst.m} r={inst.r:g} R={inst.big_r:g} delta={inst.delta}")
    else:
        sys.stdout.write(data.decode("utf-8"))
    return EXIT_OK


def _solution_summary(sol: Solution, delta: int) -> None:
    print(f"algorithm: {sol.algorithm}")
    print(f"relays: {len(sol.relays)}")
    print(f"max sensor hops: {sol.max_hops} (budget {delta})")


def cmd_solve(args: argparse.Namespace) -> int:
    inst = parse_instance(_read_bytes(args.instance))
    if args.algo == "sca":
        result: Solution | Infeasible = sca_solve(inst)
    elif args.algo == "sptirp":
        result = sptirp_solve(inst)
    else:
        res = oracle_solve(inst, limit=args.limit)
        if isinstance(res, LimitExceeded):
            print(
                f"error: no feasible set within cardinality limit {res.limit} "
                f"({res.explored} subsets tested); raise --limit",
                file=sys.stderr,
            )
            return EXIT_USAGE
        if isinstance(res, Infeasible):
            result = res
        else:
            graph = build_graph(inst)
            result = build_solution(graph, inst, res.relays, "oracle")
    if isinstance(result, Infeasible):
        if args.out:
            marker = Solution(
                algorithm=result.algorithm, relays=(), tree_edges=(), sensor_hops=(), feasible=False
            )
            _write_bytes(args.out, serialize_solution(marker))
        print(f"infeasible: {result.reason}")
        return EXIT_INFEASIBLE
    if args.out:
        _write_bytes(args.out, serialize_solution(result))
    _solution_summary(result, inst.delta)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    inst = parse_instance(_read_bytes(args.instance))
    sol = parse_solution(_read_bytes(args.solution))
    problem = verify_solution(inst, sol)
    if problem is None:
        worst = max(sol.sensor_hops) if sol.sensor_hops else 0
        print(f"ok: {len(sol.relays)} relays, max sensor hops {worst} <= {inst.delta}")
        return EXIT_OK
    print(f"verify failed: {problem}")
    return EXIT_VERIFY_FAIL


def cmd_compare(args: argparse.Namespace) -> int:
    inst = parse_instance(_read_bytes(args.instance))
    graph = build_graph(inst)
    t0 = time.perf_counter()
    sca = sca_solve(inst, graph)
    t1 = time.perf_counter()
    if isinstance(sca, Infeasible):
        print(f"infeasible: {sca.reason}")
        return EXIT_INFEASIBLE
    spt = sptirp_solve(inst, graph)
    t2 = time.perf_counter()
    assert not isinstance(spt, Infeasible)  # same gate as sca
    rows = [("sca", len(sca.relays), t1 - t0), ("sptirp", len(spt.relays), t2 - t1)]
    optimum = None
    if inst.m <= GUARD:
        t3 = time.perf_counter()
        res = oracle_solve(inst, graph=graph)
        t4 = time.perf_counter()
        assert isinstance(res, OracleResult)  # sca already found a feasible set
        optimum = res.optimum
        rows.append(("oracle", res.optimum, t4 - t3))
    print(f"{'algorithm':<10} {'relays':>6} {'seconds':>9}" + ("" if optimum is None else f" {'gap':>4}"))
    for name, count, secs in rows:
        line = f"{name:<10} {count:>6} {secs:>9.4f}"
        if optimum is not None:
            line += f" {count - optimum:>+4}"
        print(line)
    print(f"difference (sptirp - sca): {len(spt.relays) - len(sca.relays)}")
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    if args.config:
        raw = json.loads(_read_bytes(args.config).decode("utf-8"))
        if not isinstance(raw, dict):
            raise ValueError("config file: top level must be an object")
        config = ExperimentConfig.from_dict(raw)
    else:
        config = DESK_CONFIG if args.preset == "desk" else FULL_CONFIG
    if args.seed is not None:
        config = dataclasses.replace(config, base_seed=args.seed)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    records = run_experiment(config)
    summary = summarize(records)
    (outdir / "summary.csv").write_bytes(summary.to_csv())
    for name, blob in emit_plotdata(summary).items():
        (outdir / name).write_bytes(blob)
    (outdir / "meta.json").write_bytes(metadata(config))
    for c in summary.cells:
        print(
            f"n={c.n} r={c.r:g} R={c.big_r:g} delta={c.delta_spec}: "
            f"sca {c.mean_sca:.2f}, sptirp {c.mean_sptirp:.2f}, diff {c.mean_diff:.2f}, "
            f"saving {100 * c.rel_saving:.1f}% ({c.trials} trials, {c.infeasible_count} infeasible)"
        )
    print(f"pooled relative saving: {100 * summary.pooled_saving():.2f}%")
    print(f"wrote {outdir / 'summary.csv'} and {len(emit_plotdata(summary))} series files")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="dcrnp", description="Delay-constrained relay placement toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random instance file")
    p.add_argument("--n", type=int, required=True, help="sensor count")
    p.add_argument("--m", type=int, required=True, help="candidate site count")
    p.add_argument("--field", type=float, default=100.0, help="square field side (default 100)")
    p.add_argument("--r", type=float, required=True, help="sensor radius")
    p.add_argument("--R", dest="big_r", type=float, required=True, help="relay/sink radius")
    p.add_argument("--delta", type=int, required=True, help="hop budget")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output file (default: standard output)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="run one algorithm on an instance file")
    p.add_argument("instance", help="instance file")
    p.add_argument("--algo", choices=("sca", "sptirp", "oracle"), default="sca")
    p.add_argument("--limit", type=int, default=None, help="oracle cardinality limit")
    p.add_argument("--out", help="solution output file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="independently check a solution file")
    p.add_argument("instance", help="instance file")
    p.add_argument("solution", help="solution file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("compare", help="run both algorithms (and the oracle when small)")
    p.add_argument("instance", help="instance file")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="run a benchmark suite and write CSV + plot data")
    p.add_argument("--preset", choices=("desk", "full"), default="desk")
    p.add_argument("--config", help="JSON config file overriding the preset")
    p.add_argument("--seed", type=int, default=None, help="override the base seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
