"""Batch bound comparison: run each method on each instance, scale, summarise.

A config is a JSON object::

    {
      "instances": ["path/to/g.txt", {"kind": "random", "params": {"n": 8, "p": 0.5}}],
      "k": [2, 3],
      "methods": ["exact", "emilo-relax", "vmilo-relax"],
      "time_cap": 30,               # seconds, or {"exact": 60, "emilo-relax": 10}
      "seed": 0,
      "workers": null,              # null means os.cpu_count()
      "csv": "bench.csv", "summary_csv": "summary.csv", "json": "bench.json",
      "export_dir": "exports"
    }

Scaled bounds divide each method's bound by the smallest bound reported on
the same instance and k. Summaries are geometric means of scaled bounds per
(k, n, density bucket, method), plus one pooled ``all`` row per (k, method).
"""

from __future__ import annotations

import csv
import json
import math
import os
import signal
import time
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .errors import KcutError
from .exact import branch_and_bound_opt, brute_force_opt
from .formulations import build_misdo
from .graph import Graph, density_bucket, gen_instance, graph_stats, read_graph
from .model import export_sdpa_format
from .relaxations import (
    BoundReport,
    MethodResult,
    bqo_relax_bound,
    emilo_relax_bound,
    remilo_relax_bound,
    vmilo_relax_bound_lp,
)

METHODS = ("exact", "bqo", "vmilo-relax", "emilo-relax", "remilo-relax", "misdo-export")
EXACT_ENUM_LIMIT = 10**6
CSV_FIELDS = ("instance", "n", "m", "density", "k", "method", "bound", "scaled_bound",
              "status", "seconds")
SUMMARY_FIELDS = ("k", "n", "density_bucket", "method", "count", "geomean_scaled")


class TimeLimit(Exception):
    pass


@dataclass
class BenchConfig:
    instances: list
    k: list[int]
    methods: list[str]
    time_cap: float | dict = 60.0
    seed: int = 0
    workers: int | None = None
    csv: str | None = None
    summary_csv: str | None = None
    json: str | None = None
    export_dir: str | None = None
    base_dir: str = field(default=".", repr=False)

    def __post_init__(self):
        if not self.instances:
            raise ValueError("config lists no instances")
        self.k = [int(k) for k in (self.k if isinstance(self.k, list) else [self.k])]
        if any(k < 2 for k in self.k):
            raise ValueError(f"every k must be >= 2, got {self.k}")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        caps = self.time_cap.values() if isinstance(self.time_cap, dict) else [self.time_cap]
        if any(float(c) <= 0 for c in caps):
            raise ValueError("time caps must be positive")

    @classmethod
    def from_json(cls, source) -> "BenchConfig":
        """Load from a path or an already-parsed dict. Relative paths resolve
        against the config file's directory."""
        if isinstance(source, dict):
            return cls(**source)
        path = Path(source)
        data = json.loads(path.read_text())
        data.setdefault("base_dir", str(path.parent))
        return cls(**data)

    def cap(self, method) -> float:
        if isinstance(self.time_cap, dict):
            return float(self.time_cap.get(method, 60.0))
        return float(self.time_cap)

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else Path(self.base_dir) / p


def load_instance(spec, cfg: BenchConfig, index: int) -> tuple[str, Graph]:
    if isinstance(spec, str):
        path = cfg.resolve(spec)
        return path.stem, read_graph(path)
    kind = spec["kind"]
    params = spec.get("params", {})
    seed = int(spec.get("seed", cfg.seed + index))
    name = spec.get("name") or f"{kind}-" + "-".join(f"{a}{b}" for a, b in sorted(params.items())) + f"-s{seed}"
    return name, gen_instance(kind, params, seed)


def _exact(g, k, cap):
    if k ** max(g.n - 1, 0) <= EXACT_ENUM_LIMIT:
        return brute_force_opt(g, k)[0], "optimal"
    res = branch_and_bound_opt(g, k, time_cap=cap)
    return res.upper, "optimal" if res.status == "proved" else "timeout-bound"


def run_method(g: Graph, name: str, k: int, method: str, cap: float, seed: int,
               export_dir: str | None = None) -> MethodResult:
    t0 = time.perf_counter()
    bound, status = None, "ok"
    try:
        with _alarm(cap):
            if method == "exact":
                bound, status = _exact(g, k, 0.9 * cap)
            elif method == "bqo":
                res = bqo_relax_bound(g, k, time_cap=0.9 * cap, seed=seed)
                bound, status = res.value, res.status
            elif method == "vmilo-relax":
                bound = vmilo_relax_bound_lp(g, k)
            elif method == "emilo-relax":
                bound = emilo_relax_bound(g, k, lazy=True)
            elif method == "remilo-relax":
                bound = remilo_relax_bound(g, k, lazy=True)
            elif method == "misdo-export":
                out = Path(export_dir or ".")
                out.mkdir(parents=True, exist_ok=True)
                (out / f"{name}_k{k}_misdo1.dat-s").write_text(export_sdpa_format(build_misdo(g, k, "I")))
                status = "external"
            else:
                raise ValueError(f"unknown method {method!r}")
    except TimeLimit:
        bound, status = None, "timeout"
    except (KcutError, ValueError, MemoryError) as exc:
        bound, status = None, f"error: {type(exc).__name__}: {exc}"
    return MethodResult(method, bound, status, time.perf_counter() - t0)


class _alarm:
    """Raise TimeLimit after ``seconds`` of wall time where SIGALRM exists."""

    def __init__(self, seconds):
        self.seconds = seconds
        self.armed = hasattr(signal, "setitimer")

    def __enter__(self):
        if self.armed:
            try:
                self.old = signal.signal(signal.SIGALRM, self._fire)
            except ValueError:  # not in the main thread
                self.armed = False
                return self
            signal.setitimer(signal.ITIMER_REAL, self.seconds)
        return self

    @staticmethod
    def _fire(signum, frame):
        raise TimeLimit()

    def __exit__(self, *exc):
        if self.armed:
            signal.setitimer(signal.ITIMER_REAL, 0)
            signal.signal(signal.SIGALRM, self.old)
        return False


def _job(args):
    idx, name, g, k, method, cap, seed, export_dir = args
    return idx, k, method, run_method(g, name, k, method, cap, seed, export_dir)


def bench_run(cfg: BenchConfig):
    """Run the whole grid. Returns ``(reports, summary_rows)``."""
    graphs = [load_instance(spec, cfg, i) for i, spec in enumerate(cfg.instances)]
    export_dir = str(cfg.resolve(cfg.export_dir)) if cfg.export_dir else None
    jobs = [(i, name, g, k, meth, cfg.cap(meth), cfg.seed, export_dir)
            for i, (name, g) in enumerate(graphs) for k in cfg.k for meth in cfg.methods]
    workers = cfg.workers or os.cpu_count() or 1
    if workers == 1 or len(jobs) == 1:
        outcomes = [_job(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            outcomes = list(pool.map(_job, jobs))

    order = {m: i for i, m in enumerate(cfg.methods)}
    grouped = defaultdict(list)
    for idx, k, method, res in outcomes:
        grouped[idx, k].append(res)
    reports = []
    for (idx, k) in sorted(grouped):
        name, g = graphs[idx]
        n, m, dens = graph_stats(g)
        rep = BoundReport(name, n, m, dens, k, sorted(grouped[idx, k], key=lambda r: order[r.method]))
        rep.scale()
        reports.append(rep)
    summary = summarize(reports)
    if cfg.csv:
        write_csv(cfg.resolve(cfg.csv), [row for r in reports for row in r.rows()], CSV_FIELDS)
    if cfg.summary_csv:
        write_csv(cfg.resolve(cfg.summary_csv), summary, SUMMARY_FIELDS)
    if cfg.json:
        cfg.resolve(cfg.json).write_text(json.dumps(
            {"reports": [r.to_dict() for r in reports], "summary": summary}, indent=2))
    return reports, summary


def geometric_mean(values) -> float:
    values = list(values)
    return math.exp(sum(math.log(v) for v in values) / len(values))


def summarize(reports) -> list[dict]:
    batches = defaultdict(list)
    for rep in reports:
        bucket = density_bucket(rep.density)
        for r in rep.results:
            if r.scaled is None:
                continue
            batches[rep.k, str(rep.n), bucket, r.method].append(r.scaled)
            batches[rep.k, "all", "all", r.method].append(r.scaled)

    def key(item):
        k, n, bucket, method = item
        return (k, n == "all", int(n) if n != "all" else 0, bucket, method)

    return [
        {"k": k, "n": n, "density_bucket": bucket, "method": method,
         "count": len(batches[k, n, bucket, method]),
         "geomean_scaled": geometric_mean(batches[k, n, bucket, method])}
        for k, n, bucket, method in sorted(batches, key=key)
    ]


def write_csv(path, rows, fields):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({f: "" if row.get(f) is None else row.get(f) for f in fields})
