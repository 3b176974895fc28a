"""Command-line entry point: ``kcutlab <subcommand> ...``.

Exit codes: 0 success, 1 input or solver error, 2 certification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .bench import BenchConfig, bench_run
from .certify import THEOREMS, certify
from .errors import KcutError
from .exact import branch_and_bound_opt, brute_force_opt
from .formulations import (
    build_bqo,
    build_emilo,
    build_misdo,
    build_remilo,
    build_vmilo,
)
from .graph import complete_graph, gen_instance, read_graph, render_edge_list
from .model import export_lp_format, export_sdpa_format
from .polytopes import lift, member_emilo, member_misdo, member_vmilo, sample_fractional_x
from .relaxations import (
    bqo_relax_bound,
    check_simplex_rows,
    emilo_relax_bound,
    remilo_relax_bound,
    vmilo_relax_bound,
    vmilo_relax_bound_lp,
)

EXIT_ERROR = 1
EXIT_CERT_FAIL = 2


def _emit(args, payload: dict, text: str):
    print(json.dumps(payload, indent=2) if args.json else text)


def cmd_solve(args) -> int:
    g = read_graph(args.file)
    if args.method == "brute":
        value, p = brute_force_opt(g, args.k)
        status, upper = "optimal", value
    else:
        res = branch_and_bound_opt(g, args.k, time_cap=args.time_cap)
        value, p, upper = res.value, res.partition, res.upper
        status = "optimal" if res.status == "proved" else "timeout"
    payload = {"value": value, "upper": upper, "status": status, "assignment": list(p.assignment)}
    _emit(args, payload, f"value {value:g} ({status}, upper {upper:g})\n"
                         f"assignment {' '.join(map(str, p.assignment))}")
    return 0


def cmd_relax(args) -> int:
    g = read_graph(args.file)
    if args.method == "vmilo":
        bound = vmilo_relax_bound_lp(g, args.k)
        extra = {"closed_form": vmilo_relax_bound(g)}
    elif args.method == "emilo":
        bound, extra = emilo_relax_bound(g, args.k, lazy=args.lazy), {}
    elif args.method == "remilo":
        bound, extra = remilo_relax_bound(g, args.k, lazy=args.lazy), {}
    else:
        res = bqo_relax_bound(g, args.k, time_cap=args.time_cap)
        bound, extra = res.value, {"lower": res.lower, "status": res.status}
    payload = {"method": args.method, "k": args.k, "bound": bound, **extra}
    _emit(args, payload, f"{args.method} bound {bound:.10g}")
    return 0


def _read_x(path) -> np.ndarray:
    text = Path(path).read_text().replace(",", " ")
    rows = [list(map(float, ln.split())) for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    return np.array(rows)


def cmd_lift_check(args) -> int:
    """Lift fractional assignments and test them against every relaxation."""
    if args.x:
        xs = [check_simplex_rows(_read_x(args.x))]
        n, k = xs[0].shape
    else:
        n, k = args.n, args.k
        xs = sample_fractional_x(n, k, args.seed, args.samples)
    g = read_graph(args.graph) if args.graph else complete_graph(n)
    if g.n != n:
        raise KcutError(f"graph has {g.n} vertices but x has {n} rows")
    fails = {"vmilo": 0, "emilo": 0, "misdo1": 0, "misdo2": 0}
    first = {}
    for x in xs:
        checks = {
            "vmilo": member_vmilo(g, k, x, lift(x, g, "y").payload),
            "emilo": member_emilo(lift(x, None, "z").payload, n, k),
            "misdo1": member_misdo(lift(x, None, "Z").payload, k, "I"),
            "misdo2": member_misdo(lift(x, None, "Zbar").payload, k, "II"),
        }
        for name, res in checks.items():
            if not res.ok:
                fails[name] += 1
                first.setdefault(name, res.witness)
    payload = {"n": n, "k": k, "points": len(xs), "failures": fails, "witnesses": first}
    text = "\n".join(f"{name:7s} {len(xs) - f}/{len(xs)} inside" + (f"  ({first[name]})" if f else "")
                     for name, f in fails.items())
    _emit(args, payload, text)
    return EXIT_CERT_FAIL if any(fails.values()) else 0


def cmd_certify(args) -> int:
    rep = certify(args.theorem, samples=args.samples, seed=args.seed)
    if args.out:
        Path(args.out).write_text(rep.to_json() + "\n")
    if args.json:
        print(rep.to_json())
    else:
        for c in rep.checks:
            mark = "PASS" if c.ok else "FAIL"
            worst = "n/a" if c.worst == float("-inf") else f"{c.worst:.3e}"
            print(f"{mark} {c.name}: {c.count - c.failures}/{c.count}, worst violation {worst}"
                  + (f" [{c.witness}]" if c.witness else ""))
        print(f"theorem {rep.theorem}: {'PASS' if rep.passed else 'FAIL'} in {rep.seconds:.2f}s")
    return 0 if rep.passed else EXIT_CERT_FAIL


def cmd_bench(args) -> int:
    cfg = BenchConfig.from_json(args.config)
    if args.workers:
        cfg.workers = args.workers
    reports, summary = bench_run(cfg)
    for row in summary:
        if row["n"] == "all":
            print(f"k={row['k']} {row['method']:13s} geomean scaled bound {row['geomean_scaled']:.4f}"
                  f" over {row['count']} instances")
    failed = [(r.instance, x.method, x.status) for r in reports for x in r.results
              if x.status.startswith("error")]
    for inst, meth, status in failed:
        print(f"{inst} {meth}: {status}", file=sys.stderr)
    return 0


BUILDERS = {
    "bqo": lambda g, k, lazy: build_bqo(g, k),
    "vmilo": lambda g, k, lazy: build_vmilo(g, k),
    "emilo": lambda g, k, lazy: build_emilo(g, k, lazy_cliques=lazy),
    "remilo": lambda g, k, lazy: build_remilo(g, k, lazy_cliques=lazy)[0],
    "misdo1": lambda g, k, lazy: build_misdo(g, k, "I"),
    "misdo2": lambda g, k, lazy: build_misdo(g, k, "II"),
}


def cmd_export(args) -> int:
    g = read_graph(args.file)
    model = BUILDERS[args.formulation](g, args.k, args.lazy)
    text = export_lp_format(model) if args.format == "lp" else export_sdpa_format(model)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return 0


def cmd_gen(args) -> int:
    params = {}
    for item in args.param:
        key, _, val = item.partition("=")
        params[key] = float(val) if "." in val else int(val)
    text = render_edge_list(gen_instance(args.kind, params, args.seed))
    if args.output == "-":
        sys.stdout.write(text)
    else:
        Path(args.output).write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kcutlab", description="Max k-cut formulation workbench.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, graph=True, k=True):
        if graph:
            p.add_argument("file", help="edge-list instance (1-based ids, 'n m' header)")
        if k:
            p.add_argument("--k", type=int, required=True, help="number of parts (>= 2)")
        p.add_argument("--json", action="store_true", help="print JSON instead of text")

    p = sub.add_parser("solve", help="exact optimum by enumeration or branch-and-bound")
    common(p)
    p.add_argument("--method", choices=["bnb", "brute"], default="bnb")
    p.add_argument("--time-cap", type=float, default=60.0)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("relax", help="continuous relaxation bound")
    common(p)
    p.add_argument("--method", choices=["vmilo", "emilo", "remilo", "bqo"], required=True)
    p.add_argument("--lazy", action="store_true", help="separate clique rows instead of adding all")
    p.add_argument("--time-cap", type=float, default=30.0)
    p.set_defaults(func=cmd_relax)

    p = sub.add_parser("lift-check", help="lift fractional assignments and test membership")
    p.add_argument("--x", help="file with n rows of k entries (whitespace or comma separated)")
    p.add_argument("--graph", help="edge list for the y lifting (default: complete graph)")
    p.add_argument("--n", type=int, default=6)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_lift_check)

    p = sub.add_parser("certify", help="sampled certification; exit code 2 on any failure")
    p.add_argument("--theorem", choices=THEOREMS, required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write the JSON report here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("bench", help="run a JSON-configured bound comparison")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export", help="write a formulation in LP or SDPA format")
    p.add_argument("file")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--formulation", choices=sorted(BUILDERS), required=True)
    p.add_argument("--format", choices=["lp", "sdpa"], required=True)
    p.add_argument("--lazy", action="store_true")
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("gen", help="generate a random, band or spin-glass instance")
    p.add_argument("kind", choices=["random", "band", "spinglass"])
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default="-")
    p.set_defaults(func=cmd_gen)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (KcutError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
