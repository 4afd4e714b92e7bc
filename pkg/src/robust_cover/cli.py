"""Command-line entry point: ``robust-cover <command> ...``.

Commands: ``gen``, ``cuts``, ``build``, ``solve``, ``verify``, ``bench``.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .core import (DEFAULT_ALPHAS, DEFAULT_BETAS, ConfigError, RobustConfig, read_instance,
                   read_solution, validate, write_solution)
from .generator import generate_suite, write_suite
from .harness import (DESK_FAMILIES, DESK_GAMMAS, TABLE1, full_matrix_size, report, run_matrix,
                      summarize)
from .linearization import build_family, gap_rows
from .lpformat import read_lp, write_lp
from .milp import build_gutlcscp_la, build_rutlcscp_la_rc, build_tlcscp
from .oracle import verify
from .solver import SolverOptions, solve


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _words(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _gamma(text: str, m: int):
    """``2``, ``all`` (= m) or a comma list with one budget per node."""
    if text.strip() == "all":
        return m
    vals = [int(t) for t in text.split(",")]
    return vals[0] if len(vals) == 1 else tuple(vals)


def _emit(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_gen(args) -> int:
    insts = generate_suite(args.row, args.replicates, args.seed)
    for p in write_suite(insts, args.out):
        print(p)
    return 0


def cmd_cuts(args) -> int:
    betas = _floats(args.betas)
    if args.gap_grid:
        fh = open(args.dump, "w", newline="") if args.dump else sys.stdout
        try:
            writer = csv.writer(fh)
            writer.writerow(["m", "n", "exact_feasible", "la_feasible"])
            for m, n, e, la in gap_rows(args.alpha, betas, args.gap_grid):
                writer.writerow([repr(m), repr(n), int(e), int(la)])
        finally:
            if args.dump:
                fh.close()
        return 0
    fam = build_family(args.alpha, betas)
    _emit({
        "alpha": fam.alpha,
        "box_rhs": fam.box_rhs,
        "cuts": [{"beta": c.beta, "gamma": c.gamma, "delta": c.delta, "log_rhs": c.log_rhs}
                 for c in fam.cuts],
    }, args.dump)
    return 0


def _load_instance(path):
    inst = read_instance(path)
    problems = validate(inst)
    if problems:
        raise ConfigError("invalid instance: " + "; ".join(problems))
    return inst


def _build(args):
    inst = _load_instance(args.instance)
    if args.variant == "tlcscp":
        return inst, build_tlcscp(inst)
    betas = _floats(args.betas) if args.betas else DEFAULT_BETAS
    if args.variant == "gutlcscp-la":
        return inst, build_gutlcscp_la(inst, args.alpha, betas)
    config = RobustConfig(args.alpha, _gamma(args.gamma, inst.m), tuple(betas))
    return inst, build_rutlcscp_la_rc(inst, config, literal_dual=args.literal_dual)


def cmd_build(args) -> int:
    _, model = _build(args)
    if args.dump_lp:
        write_lp(model, args.dump_lp)
    _emit({"name": model.name, "variables": model.n_vars, "rows": model.n_rows,
           "rows_by_label": model.label_counts()}, None)
    return 0


def cmd_solve(args) -> int:
    if bool(args.model) == bool(args.instance):
        raise ConfigError("give exactly one of --model or --instance")
    model = read_lp(args.model) if args.model else _build(args)[1]
    opts = SolverOptions(time_limit_s=args.time_limit, node_limit=args.node_limit)
    sol = solve(model, opts)
    if args.out:
        write_solution(sol, args.out)
    _emit(sol.to_dict(), None)
    return 0


def cmd_verify(args) -> int:
    inst = _load_instance(args.instance)
    sol = read_solution(args.solution)
    config = RobustConfig(args.alpha, _gamma(args.gamma, inst.m))
    rep = verify(inst, sol, config)
    _emit(rep.to_dict(), args.out)
    return 0


def cmd_bench(args) -> int:
    if args.full:
        families, gammas, reps = list(TABLE1), ["sweep"], 5
        print(f"full matrix: {full_matrix_size()} runs", file=sys.stderr)
    else:
        families, gammas, reps = _words(args.families), _words(args.gammas), args.replicates
    opts = None
    if args.time_limit:
        opts = SolverOptions(time_limit_s=args.time_limit)
    records = run_matrix(families, _floats(args.alphas), gammas, replicates=reps,
                         base_seed=args.seed, options=opts, workers=args.workers)
    summary = summarize(records)
    for p in report(summary, records, args.out):
        print(p)
    print(summary.global_line())
    return 0


def _add_model_args(p, required_instance=True):
    p.add_argument("--instance", required=required_instance, help="instance JSON file")
    p.add_argument("--variant", default="rutlcscp-la-rc",
                   choices=["tlcscp", "gutlcscp-la", "rutlcscp-la-rc"])
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--gamma", default="0", help="budget, 'all', or one budget per node (comma list)")
    p.add_argument("--betas", default=None, help="comma list of tangent weights")
    p.add_argument("--paper-literal-dual", dest="literal_dual", action="store_true",
                   help="use ln(p_nom+p_dev) - ln(p_dev) in the dual rows")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="robust-cover", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate benchmark-family instances")
    p.add_argument("--row", required=True)
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("cuts", help="tangent cut family or its feasibility grid")
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--betas", default=",".join(str(b) for b in DEFAULT_BETAS))
    p.add_argument("--dump", help="output file (JSON, or CSV with --gap-grid)")
    p.add_argument("--gap-grid", type=int, default=0, metavar="N",
                   help="emit the N x N exact-vs-linearised feasibility grid as CSV")
    p.set_defaults(func=cmd_cuts)

    p = sub.add_parser("build", help="build a model and optionally dump it in LP format")
    _add_model_args(p)
    p.add_argument("--dump-lp", help="write the model to this LP file")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("solve", help="solve an LP file or an instance")
    p.add_argument("--model", help="LP file")
    _add_model_args(p, required_instance=False)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--out", help="solution JSON file")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check a solution against the exact robust constraints")
    p.add_argument("--instance", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", default="0")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="run the experiment matrix and write reports")
    p.add_argument("--families", default=",".join(DESK_FAMILIES))
    p.add_argument("--alphas", default=",".join(str(a) for a in DEFAULT_ALPHAS))
    p.add_argument("--gammas", default=",".join(DESK_GAMMAS),
                   help="integers, 'all' (= m) or 'sweep' (0..m)")
    p.add_argument("--replicates", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--time-limit", type=float, default=None,
                   help="per-solve limit in seconds (default: $RCK_TIME_LIMIT_S)")
    p.add_argument("--out", required=True)
    p.add_argument("--full", action="store_true",
                   help="all ten families, Gamma = 0..m, five replicates")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
