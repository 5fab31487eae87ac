"""Command-line front end: capacity, single runs, rate sweeps, and the
finite-horizon hardness machinery.

Exit codes: 0 on success, 1 when a hardness equivalence check finds a
mismatch, 2 on malformed input or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .capacity import broadcast_capacity, clique_upper_bound
from .errors import UmwError
from .graphs import InterferenceModel, build_conflict_graph, dump_graph, parse_graph_file
from .hardness import (
    decide_broadcast,
    decide_mnae3sat,
    parse_clause_file,
    random_instance,
    reduce_to_broadcast,
)
from .report import (
    packets_csv_text,
    render_sweep_figure,
    render_trace_figure,
    saturation_csv_text,
    trace_csv_text,
    write_text,
)
from .simulate import SimConfig, measure_saturation, simulate


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="umwbcast",
        description="Throughput-optimal broadcast experiments on wireless "
        "networks with point-to-multipoint transmissions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_graph_args(sp):
        sp.add_argument("--graph", required=True, help="graph file to load")
        sp.add_argument(
            "--interference",
            choices=InterferenceModel.KINDS,
            default="primary",
            help="interference model (explicit uses the file's conflict lines)",
        )

    def add_sim_args(sp):
        sp.add_argument("--horizon", type=int, default=10_000, help="slots per run")
        sp.add_argument("--seed", type=int, default=0, help="base RNG seed")
        sp.add_argument("--p-on", type=float, default=1.0, dest="p_on",
                        help="per-slot probability a node can transmit")
        sp.add_argument("--solver", choices=["exact", "greedy"], default="exact",
                        help="route and activation solver")
        sp.add_argument("--arrivals", choices=["bernoulli", "poisson"],
                        default="bernoulli", help="external arrival process")

    sp = sub.add_parser("capacity", help="broadcast capacity and witness policy")
    add_graph_args(sp)
    sp.add_argument("--out", help="write JSON here instead of stdout")

    sp = sub.add_parser("simulate", help="run one seeded simulation")
    add_graph_args(sp)
    add_sim_args(sp)
    sp.add_argument("--lambda", type=float, required=True, dest="lam",
                    help="arrival rate in packets per slot")
    sp.add_argument("--out", help="trace CSV path (packet CSV and figure go alongside)")
    sp.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    sp = sub.add_parser("sweep", help="stability sweep over arrival rates")
    add_graph_args(sp)
    add_sim_args(sp)
    sp.add_argument("--lambda-grid", required=True, dest="lambda_grid",
                    metavar="A:B:STEP", help="inclusive arrival-rate grid")
    sp.add_argument("--runs", type=int, default=3, help="seeded runs per grid point")
    sp.add_argument("--jobs", type=int, default=1, help="parallel workers")
    sp.add_argument("--threshold", type=float, default=0.01,
                    help="stability cutoff on pending copies per slot")
    sp.add_argument("--out", help="saturation CSV path (figure goes alongside)")
    sp.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    sp = sub.add_parser("reduce", help="reduce a clause file to a broadcast instance")
    sp.add_argument("--clauses", required=True, help="clause file (p mnae3 header)")
    sp.add_argument("--out", help="write the instance graph file here")

    sp = sub.add_parser("hardness", help="check SAT/broadcast decision equivalence")
    group = sp.add_mutually_exclusive_group(required=True)
    group.add_argument("--clauses", help="clause file with one instance")
    group.add_argument("--random", nargs=4, type=int,
                       metavar=("VARS", "CLAUSES", "COUNT", "SEED"),
                       help="check COUNT random instances")
    return parser


def _load_network(args):
    parsed = parse_graph_file(Path(args.graph).read_text(encoding="utf-8"))
    if args.interference == "primary":
        model = InterferenceModel.primary()
    elif args.interference == "none":
        model = InterferenceModel.none()
    else:
        model = InterferenceModel.explicit(parsed.conflict_pairs)
    return parsed.graph, build_conflict_graph(parsed.graph, model)


def _parse_lambda_grid(spec: str) -> list[float]:
    parts = spec.split(":")
    if len(parts) != 3:
        raise UmwError(f"lambda grid must be A:B:STEP, got {spec!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise UmwError(f"non-numeric lambda grid {spec!r}") from None
    if step <= 0 or stop < start:
        raise UmwError("lambda grid needs step > 0 and B >= A")
    grid = []
    k = 0
    while True:
        value = round(start + k * step, 10)
        if value > stop + 1e-9:
            break
        grid.append(value)
        k += 1
    return grid


def _make_config(args, lam: float) -> SimConfig:
    return SimConfig(
        lam=lam,
        horizon=args.horizon,
        seed=args.seed,
        arrival_process=args.arrivals,
        p_on=args.p_on,
        route_solver=args.solver,
        activation_solver=args.solver,
    )


def cmd_capacity(args) -> int:
    g, cg = _load_network(args)
    result = broadcast_capacity(g, cg, exact=True)
    payload = result.to_json_dict()
    payload["clique_upper_bound"] = clique_upper_bound(g, cg)
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_simulate(args) -> int:
    g, cg = _load_network(args)
    trace = simulate(g, cg, _make_config(args, args.lam))
    if args.out:
        out = Path(args.out)
        write_text(out, trace_csv_text(trace))
        write_text(out.with_name(out.stem + "_packets.csv"), packets_csv_text(trace))
        if not args.no_plot:
            render_trace_figure(trace, out.with_suffix(".png"))
        print(
            f"delivered {trace.delivered[-1]}/{trace.arrivals[-1]} packets, "
            f"throughput {trace.throughput():.4f}/slot, "
            f"mean delay {trace.mean_delay():.2f} slots, "
            f"pending/slot {trace.backlog_rate():.5f}"
        )
    else:
        sys.stdout.write(trace_csv_text(trace))
    return 0


def cmd_sweep(args) -> int:
    g, cg = _load_network(args)
    grid = _parse_lambda_grid(args.lambda_grid)
    rows = measure_saturation(
        g,
        cg,
        _make_config(args, grid[0]),
        grid,
        args.runs,
        threshold=args.threshold,
        jobs=args.jobs,
    )
    comments = [
        f"graph={args.graph} interference={args.interference}",
        f"horizon={args.horizon} runs={args.runs} p_on={args.p_on} solver={args.solver}",
        f"arrivals={args.arrivals} threshold={args.threshold}",
        f"seed policy: run k of every point uses seed {args.seed}+k",
    ]
    text = saturation_csv_text(rows, comments)
    if args.out:
        out = Path(args.out)
        write_text(out, text)
        if not args.no_plot:
            capacity = None
            if g.node_count <= 16:
                capacity = broadcast_capacity(g, cg).lambda_star
            render_sweep_figure(rows, out.with_suffix(".png"), capacity=capacity)
    else:
        sys.stdout.write(text)
    return 0


def cmd_reduce(args) -> int:
    inst = parse_clause_file(Path(args.clauses).read_text(encoding="utf-8"))
    bi = reduce_to_broadcast(inst)
    text = (
        f"# broadcast instance: {bi.packet_count} packets, horizon {bi.horizon} slots\n"
        + dump_graph(bi.graph)
    )
    if args.out:
        write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_hardness(args) -> int:
    if args.clauses:
        instances = [parse_clause_file(Path(args.clauses).read_text(encoding="utf-8"))]
    else:
        n_vars, n_clauses, count, seed = args.random
        rng = np.random.default_rng(seed)
        instances = [random_instance(n_vars, n_clauses, rng) for _ in range(count)]
    yn = {True: "yes", False: "no"}
    mismatches = 0
    for idx, inst in enumerate(instances):
        sat = decide_mnae3sat(inst)
        via_broadcast = decide_broadcast(reduce_to_broadcast(inst))
        if sat != via_broadcast:
            mismatches += 1
        verdict = "match" if sat == via_broadcast else "MISMATCH"
        print(f"instance {idx}: sat={yn[sat]} broadcast={yn[via_broadcast]} {verdict}")
    print(f"{len(instances) - mismatches}/{len(instances)} match")
    return 1 if mismatches else 0


_COMMANDS = {
    "capacity": cmd_capacity,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "reduce": cmd_reduce,
    "hardness": cmd_hardness,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (UmwError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
