"""Command-line front end.

Subcommands map one-to-one onto the library layers: match (debugging the
exact matcher), lp-solve (either LP route), decompose (mixture extraction),
chain-sweep and gamma (reference-chain analysis), simulate (slotted runs),
and figures (the standard figure-ready data files). Inputs are JSON files;
edge-valued vectors are given as [u, v, value] triples so vertex names never
need a reserved separator. All outputs are deterministic for a fixed
invocation (stable ordering, no timestamps), and validation failures exit
nonzero with the full violation list on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .decomposition import DecompositionError, decompose
from .lp import solve_algorithm1, solve_algorithm2
from .matching import max_weight_matching
from .model import (
    Edge,
    InvalidInstanceError,
    canonical_edge,
    edge_name,
    load_instance,
)
from .refchain import coherence_factor
from .sim import (
    SimConfig,
    run,
    summary_dict,
    trace_to_csv,
)
from .sweeps import (
    GAP_COLUMNS,
    SWEEP_COLUMNS,
    SweepSpec,
    compare_variants,
    gap_profile_rows,
    gaps_to_csv,
    run_sweep,
    standard_grid,
    sweep_to_csv,
    write_data_file,
)

EXIT_OK = 0
EXIT_INPUT = 2  # malformed or invalid inputs
EXIT_DOMAIN = 3  # well-formed inputs outside the math's domain


def _load_edge_values(path: str) -> dict[Edge, float]:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a JSON list of [u, v, value] triples")
    out: dict[Edge, float] = {}
    for rec in data:
        if not (isinstance(rec, list) and len(rec) == 3):
            raise ValueError(f"{path}: bad record {rec!r}, expected [u, v, value]")
        u, v, val = rec
        out[canonical_edge(str(u), str(v))] = float(val)
    return out


def _edge_triples(values: dict[Edge, float]) -> list[list]:
    return [[u, v, values[(u, v)]] for (u, v) in sorted(values)]


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _emit_json(obj, path: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", path)


def _cmd_match(args) -> int:
    inst = load_instance(args.instance)
    weights = _load_edge_values(args.weights)
    res = max_weight_matching(inst, weights)
    _emit_json(
        {
            "matching": [list(e) for e in sorted(res.matching)],
            "weight": res.weight,
        },
        args.out,
    )
    return EXIT_OK


def _solution_dict(sol) -> dict:
    return {
        "x": _edge_triples(sol.x),
        "value": sol.objective_value,
        "cuts": [sorted(c.odd_set) for c in sol.active_cuts],
        "objective_trace": sol.objective_trace,
        "duality_gap": sol.duality_gap,
    }


def _cmd_lp_solve(args) -> int:
    inst = load_instance(args.instance)
    weights = _load_edge_values(args.weights)
    if args.alg == "1":
        sol = solve_algorithm1(inst, weights)
    else:
        sol = solve_algorithm2(inst, weights)
    _emit_json(_solution_dict(sol), args.out)
    return EXIT_OK


def _cmd_decompose(args) -> int:
    inst = load_instance(args.instance)
    x = _load_edge_values(args.x)
    mixture = decompose(inst, x)
    _emit_json(
        {
            "atoms": [
                {
                    "probability": a.probability,
                    "matching": [list(e) for e in sorted(a.matching)],
                }
                for a in mixture.atoms
            ]
        },
        args.out,
    )
    return EXIT_OK


def _parse_floats(raw: str) -> list[float]:
    return [float(tok) for tok in raw.split(",") if tok != ""]


def _parse_ints(raw: str) -> list[int]:
    return [int(tok) for tok in raw.split(",") if tok != ""]


def _cmd_chain_sweep(args) -> int:
    spec = SweepSpec(
        lambdas=_parse_floats(args.lambdas),
        mu_factors=_parse_floats(args.mu_factors),
        buffers=_parse_ints(args.buffers),
        variants=[v for v in args.variants.split(",") if v],
    )
    rows = run_sweep(spec)
    text = sweep_to_csv(rows)
    if args.out is None:
        sys.stdout.write(text)
    else:
        write_data_file(
            args.out,
            text,
            metadata={
                "columns": SWEEP_COLUMNS,
                "grid": {
                    "lambdas": spec.lambdas,
                    "mu_factors": spec.mu_factors,
                    "buffers": spec.buffers,
                    "variants": spec.variants,
                },
            },
        )
    if args.compare_out is not None:
        _emit_json(compare_variants(rows).to_dict(), args.compare_out)
    return EXIT_OK


def _cmd_gamma(args) -> int:
    inst = load_instance(args.instance)
    rep = coherence_factor(inst, args.policy)
    _emit_json(
        {
            "policy": rep.policy,
            "gamma": rep.gamma,
            "clipped": rep.clipped,
            "gamma_product": rep.gamma_product,
            "node_availability": rep.node_availability,
            "edge_bound": {edge_name(e): b for e, b in rep.edge_bound.items()},
        },
        args.out,
    )
    return EXIT_OK


def _cmd_simulate(args) -> int:
    inst = load_instance(args.instance)
    policy = {"1": "alg1", "2": "alg2", "fixed": "fixed-mixture"}[args.alg]
    fixed_mixture = None
    if policy == "fixed-mixture":
        if args.fixed_x is None:
            raise ValueError("--alg fixed requires --fixed-x")
        fixed_mixture = decompose(inst, _load_edge_values(args.fixed_x))
    elif args.fixed_x is not None:
        raise ValueError("--fixed-x only applies with --alg fixed")
    cfg = SimConfig(
        instance=inst,
        frame_length=args.frame,
        horizon=args.horizon,
        seed=args.seed,
        policy=policy,
        fixed_mixture=fixed_mixture,
        warmup=args.warmup,
        adaptive_frames=args.adaptive,
        collect_trace=args.trace_out is not None,
    )
    stats = run(cfg)
    if args.trace_out is not None:
        _emit(trace_to_csv(stats), args.trace_out)
    _emit_json(summary_dict(stats), args.stats_out)
    return EXIT_OK


def _cmd_figures(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    grid = standard_grid()
    rows = run_sweep(grid)
    write_data_file(
        os.path.join(args.out_dir, "availability_sweep.csv"),
        sweep_to_csv(rows),
        metadata={
            "columns": SWEEP_COLUMNS,
            "grid": {
                "lambdas": grid.lambdas,
                "mu_factors": grid.mu_factors,
                "buffers": grid.buffers,
                "variants": grid.variants,
            },
        },
    )
    gap_lambdas = [0.3]
    gap_factors = [0.05, 0.1]
    gap_buffers = list(range(5, 26))
    gaps = gap_profile_rows(gap_lambdas, gap_factors, gap_buffers)
    write_data_file(
        os.path.join(args.out_dir, "gap_profile.csv"),
        gaps_to_csv(gaps),
        metadata={
            "columns": GAP_COLUMNS,
            "grid": {
                "lambdas": gap_lambdas,
                "mu_factors": gap_factors,
                "buffers": gap_buffers,
                "variants": ["alg1"],
                "reference_buffer": 200,
            },
        },
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qswitch")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("match", help="exact max-weight matching")
    p.add_argument("--instance", required=True)
    p.add_argument("--weights", required=True, help="JSON list of [u, v, weight]")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_match)

    p = sub.add_parser("lp-solve", help="scheduling LP (cutting-plane or scaled)")
    p.add_argument("--alg", choices=["1", "2"], required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--weights", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_lp_solve)

    p = sub.add_parser("decompose", help="convex decomposition into matchings")
    p.add_argument("--instance", required=True)
    p.add_argument("--x", required=True, help="JSON list of [u, v, value]")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("chain-sweep", help="availability sweep over a parameter grid")
    p.add_argument("--lambdas", default="0.1,0.2,0.3,0.4,0.5")
    p.add_argument("--mu-factors", dest="mu_factors", default="0.05,0.1")
    p.add_argument("--buffers", default="5,10,15,20,25")
    p.add_argument("--variants", default="alg1,alg2")
    p.add_argument("--out", help="CSV path (sidecar written next to it); stdout if omitted")
    p.add_argument("--compare-out", dest="compare_out", help="variant comparison JSON")
    p.set_defaults(func=_cmd_chain_sweep)

    p = sub.add_parser("gamma", help="coherence factor of an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--policy", choices=["alg1", "alg2"], default="alg1")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_gamma)

    p = sub.add_parser("simulate", help="slotted simulation run")
    p.add_argument("--instance", required=True)
    p.add_argument("--frame", type=int, default=100)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--alg", choices=["1", "2", "fixed"], default="1")
    p.add_argument("--fixed-x", dest="fixed_x", help="edge vector decomposed once and replayed")
    p.add_argument("--warmup", type=int, default=0)
    p.add_argument("--adaptive", action="store_true", help="backlog-scaled frame lengths")
    p.add_argument("--trace-out", dest="trace_out", help="per-slot trace CSV")
    p.add_argument("--stats-out", dest="stats_out", help="summary JSON; stdout if omitted")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("figures", help="emit the standard figure data files")
    p.add_argument("--out-dir", dest="out_dir", required=True)
    p.set_defaults(func=_cmd_figures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DecompositionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
