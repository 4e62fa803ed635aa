"""Command-line surface: solve, eval, export-lp, gen, bench, serve.

Exit codes: 0 success, 1 solved-but-infeasible, 2 usage error, 3 runtime
error. Cap exhaustion is a success with the status in the payload.
Timestamps and wall times live in the `meta` field so that identical
inputs produce byte-identical payloads elsewhere.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from .exact import SolveLimits
from .generators import (
    gen_knapsack_reduction,
    gen_observation1,
    gen_proxy,
    gen_random,
)
from .greedy import greedy_budget, greedy_topk
from .milp import build_milp, export_lp
from .model import (
    Instance,
    InvalidInstanceError,
    PlanStatus,
    ProblemSpec,
    make_plan,
    validate_instance,
)
from .runner import SOLVERS, solve

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_RUNTIME)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}", EXIT_RUNTIME)
    try:
        return validate_instance(raw)
    except InvalidInstanceError as exc:
        raise CliError(f"{path}: " + "; ".join(exc.errors), EXIT_RUNTIME)


def _write_json(path: str, payload: dict) -> None:
    text = json.dumps(payload, indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _problem_spec(args, instance: Instance) -> ProblemSpec:
    keep = []
    if args.keep:
        index = instance.id_to_index()
        for pid in args.keep.split(","):
            pid = pid.strip()
            if pid not in index:
                raise CliError(f"unknown photo id in --keep: {pid!r}", EXIT_USAGE)
            keep.append(index[pid])
    try:
        if args.variant == "topk":
            if args.k is None:
                raise CliError("--variant topk requires --k", EXIT_USAGE)
            spec = ProblemSpec.topk(args.k, keep_set=keep, margin=args.margin)
        else:
            if args.d is None:
                raise CliError("--variant budget requires --d", EXIT_USAGE)
            spec = ProblemSpec.budget(args.d, keep_set=keep, margin=args.margin)
        spec.check(instance)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    return spec


def _variant_json(spec: ProblemSpec) -> dict:
    if spec.variant.value == "topk":
        return {"kind": "topk", "k": spec.k}
    return {"kind": "budget", "d": spec.d}


def cmd_solve(args) -> int:
    instance = _load_instance(args.input)
    spec = _problem_spec(args, instance)
    limits = SolveLimits(node_cap=args.node_cap, time_cap=args.time_cap)
    try:
        report = solve(instance, spec, solver=args.solver, limits=limits)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    payload = {
        "input": args.input,
        "variant": _variant_json(spec),
        "solver": args.solver,
        "margin": spec.margin,
        "keep": sorted(instance.photo_ids[i] for i in spec.keep_set),
        "plan": report.plan.to_json_dict(instance),
        "report": report.to_json_dict(instance),
        "meta": {
            "created_at": datetime.now(timezone.utc).isoformat(),
            "wall_time_s": report.wall_time,
        },
    }
    _write_json(args.output, payload)
    if report.plan.status is PlanStatus.INFEASIBLE:
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_eval(args) -> int:
    instance = _load_instance(args.input)
    try:
        with open(args.plan, encoding="utf-8") as fh:
            plan_raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read plan {args.plan}: {exc}", EXIT_RUNTIME)
    deleted_ids = plan_raw.get("plan", plan_raw).get("deleted")
    if not isinstance(deleted_ids, list):
        raise CliError("plan JSON must contain a 'deleted' list", EXIT_USAGE)
    index = instance.id_to_index()
    missing = [pid for pid in deleted_ids if pid not in index]
    if missing:
        raise CliError(f"plan names unknown photos: {missing}", EXIT_USAGE)
    if len(set(deleted_ids)) >= instance.num_photos:
        raise CliError("plan must keep at least one photo", EXIT_USAGE)
    plan = make_plan(instance, (index[p] for p in deleted_ids), PlanStatus.FEASIBLE)
    payload = {
        "input": args.input,
        "plan": plan.to_json_dict(instance),
        "meta": {"created_at": datetime.now(timezone.utc).isoformat()},
    }
    _write_json(args.output, payload)
    return EXIT_OK


def cmd_export_lp(args) -> int:
    instance = _load_instance(args.input)
    spec = _problem_spec(args, instance)
    model = build_milp(instance, spec)
    text = export_lp(model)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text, encoding="utf-8")
    return EXIT_OK


def cmd_gen(args) -> int:
    extra = {}
    try:
        if args.kind == "obs1":
            instance = gen_observation1(args.n, args.epsilon)
        elif args.kind == "knapsack":
            values = [int(v) for v in args.values.split(",")]
            weights = [int(w) for w in args.weights.split(",")]
            red = gen_knapsack_reduction(values, weights, args.value_bound,
                                         args.capacity)
            instance = red.instance
            extra["knapsack"] = {
                "values": list(red.values),
                "weights": list(red.weights),
                "value_bound": red.value_bound,
                "capacity": red.capacity,
            }
        elif args.kind == "random":
            instance = gen_random(args.n, args.m, args.concentration, args.seed)
        else:
            base = _load_instance(args.base)
            instance = gen_proxy(base, args.noise_scale, args.seed)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    payload = instance.to_json_dict()
    payload.update(extra)
    _write_json(args.output, payload)
    return EXIT_OK


def _bench_obs1(seed: int, outdir: Path) -> None:
    rows = []
    for n in (1, 5, 10, 20):
        instance = gen_observation1(n, 0.1)
        g = greedy_topk(instance, 2)
        r = solve(instance, ProblemSpec.topk(2))
        rows.append({
            "collection_size": instance.num_photos,
            "uniform_photos": n,
            "greedy_deletions": len(g.deleted),
            "optimal_deletions": len(r.plan.deleted),
        })
    _write_csv(outdir / "obs1_gap.csv", rows)


def _bench_random(seed: int, outdir: Path) -> None:
    sizes = (8, 12, 16)
    m = 16
    reps = 10
    topk_rows, budget_rows, overlap_rows = [], [], []
    for size in sizes:
        for k in (1, 2):
            greedy_frac, opt_frac, used = [], [], 0
            for rep in range(reps):
                inst = gen_random(size, m, 1.0, seed=seed * 1000 + size * 10 + rep)
                spec = ProblemSpec.topk(k)
                g = greedy_topk(inst, k)
                r = solve(inst, spec)
                if r.plan.status is PlanStatus.INFEASIBLE:
                    continue
                used += 1
                opt_frac.append(len(r.plan.deleted) / size)
                if g.status is not PlanStatus.INFEASIBLE:
                    greedy_frac.append(len(g.deleted) / size)
            topk_rows.append({
                "collection_size": size,
                "k": k,
                "instances": used,
                "optimal_deleted_fraction": round(sum(opt_frac) / max(len(opt_frac), 1), 4),
                "greedy_deleted_fraction": round(sum(greedy_frac) / max(len(greedy_frac), 1), 4),
            })
        for frac in (0.125, 0.25, 0.375, 0.5):
            d = max(int(size * frac), 1)
            g_pk, o_pk = [], []
            for rep in range(reps):
                inst = gen_random(size, m, 1.0, seed=seed * 1000 + size * 10 + rep)
                g_pk.append(greedy_budget(inst, d).protected_k)
                o_pk.append(solve(inst, ProblemSpec.budget(d)).plan.protected_k)
            budget_rows.append({
                "collection_size": size,
                "budget_fraction": frac,
                "budget": d,
                "optimal_protected_k": round(sum(o_pk) / reps, 3),
                "greedy_protected_k": round(sum(g_pk) / reps, 3),
            })
        for lo_frac, hi_frac in ((0.125, 0.25), (0.25, 0.5)):
            lo = max(int(size * lo_frac), 1)
            hi = max(int(size * hi_frac), 1)
            dropped, total = 0, 0
            for rep in range(reps):
                inst = gen_random(size, m, 1.0, seed=seed * 1000 + size * 10 + rep)
                lo_set = solve(inst, ProblemSpec.budget(lo)).plan.deleted
                hi_set = solve(inst, ProblemSpec.budget(hi)).plan.deleted
                dropped += len(lo_set - hi_set)
                total += len(lo_set)
            overlap_rows.append({
                "collection_size": size,
                "budgets": f"{lo}->{hi}",
                "dropped_fraction": round(dropped / max(total, 1), 4),
            })
    _write_csv(outdir / "topk_deletions.csv", topk_rows)
    _write_csv(outdir / "budget_protected.csv", budget_rows)
    _write_csv(outdir / "budget_overlap.csv", overlap_rows)


def _write_csv(path: Path, rows: list[dict]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def cmd_bench(args) -> int:
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    if args.suite == "obs1":
        _bench_obs1(args.seed, outdir)
    elif args.suite == "random":
        _bench_random(args.seed, outdir)
    else:
        raise CliError(f"unknown suite {args.suite!r}", EXIT_USAGE)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(registry_dir=args.registry_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geocensor",
        description="Select photo deletions that defeat collection geolocation.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_spec_flags(p):
        p.add_argument("--variant", choices=("topk", "budget"), required=True)
        p.add_argument("--k", type=int, default=None,
                       help="top-k guarantee target")
        p.add_argument("--d", type=int, default=None,
                       help="deletion budget")
        p.add_argument("--margin", type=float, default=0.0,
                       help="score margin added to the true location")
        p.add_argument("--keep", default="",
                       help="comma-separated photo ids that must not be deleted")

    p = sub.add_parser("solve", help="solve an instance and write a plan")
    p.add_argument("--input", required=True)
    add_spec_flags(p)
    p.add_argument("--solver", choices=SOLVERS, default="exact")
    p.add_argument("--time-cap", type=float, default=300.0)
    p.add_argument("--node-cap", type=int, default=10_000_000)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("eval", help="recompute protected-k for an external plan")
    p.add_argument("--input", required=True)
    p.add_argument("--plan", required=True)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("export-lp", help="write the MILP encoding as an LP file")
    p.add_argument("--input", required=True)
    add_spec_flags(p)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_export_lp)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("--kind", choices=("obs1", "knapsack", "random", "proxy"),
                   required=True)
    p.add_argument("--n", type=int, default=8)
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--epsilon", type=float, default=0.1)
    p.add_argument("--values", default="")
    p.add_argument("--weights", default="")
    p.add_argument("--value-bound", type=int, default=1)
    p.add_argument("--capacity", type=int, default=1)
    p.add_argument("--concentration", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--base", default="")
    p.add_argument("--noise-scale", type=float, default=0.0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="run a benchmark suite, writing CSV tables")
    p.add_argument("--suite", choices=("obs1", "random"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8337)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--registry-dir", default=None,
                   help="directory for file-backed instance snapshots")
    p.set_defaults(func=cmd_serve)
    return parser


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except Exception as exc:  # noqa: BLE001 - surfaced as exit code 3
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    sys.exit(run_cli())
