"""Benchmark sweeps over random instances.

Every (n, k, repetition) point generates one instance with seed
``base_seed + repetition`` and runs each algorithm on it. Output CSV rows:

* ``run``  one per (algorithm, n, k, seed), with raw size and wall-clock seconds;
* ``mean`` one per (algorithm, n, k), averaging successful runs and adding
  log10(n) / log10(mean seconds) for log-log runtime plots.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .greedy import SOLVERS
from .instances import generate_random_instance
from .report import SolutionReport, write_report

ALGORITHMS = ("gpot", "gfix", "gvar", "mcs-round", "mcs-trivial")
COLUMNS = (
    "kind", "algorithm", "n", "k", "L", "seed", "primers", "normalized", "seconds",
    "runs", "log10_n", "log10_seconds", "status", "error",
)


@dataclass
class BenchConfig:
    algorithms: tuple[str, ...] = ("gpot", "gfix", "gvar")
    n_values: tuple[int, ...] = (50, 100)
    k_values: tuple[int, ...] = (8, 10, 12)
    L: int = 1000
    repetitions: int = 10
    base_seed: int = 0
    reports_dir: Path | None = None
    jobs: int = 1
    max_edges: int = 20_000
    backend: str | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown:
            raise ValueError(f"unknown algorithms {sorted(unknown)}; choose from {ALGORITHMS}")
        if not self.algorithms or not self.n_values or not self.k_values:
            raise ValueError("need at least one algorithm, n value and k value")


def normalized_size(report: SolutionReport | int, n: int) -> float:
    """Primer count relative to the trivial two-primers-per-target cover."""
    if n < 1:
        raise ValueError("n must be >= 1")
    count = report if isinstance(report, int) else report.count
    return count / (2 * n)


def _run_mcs(instance, algorithm, seed, max_edges):
    from .mcs import build_amplification_graph, solve_mcs_rounding, solve_trivial

    start = time.perf_counter()
    g = build_amplification_graph(instance, max_edges=max_edges)
    sol = solve_mcs_rounding(g, seed) if algorithm == "mcs-round" else solve_trivial(g)
    return sol.size, time.perf_counter() - start, None


def run_point(args) -> list[dict]:
    algorithms, n, k, L, seed, reports_dir, max_edges, backend = args
    instance = generate_random_instance(n, L, k, seed)
    rows = []
    for algo in algorithms:
        row = {"kind": "run", "algorithm": algo, "n": n, "k": k, "L": L, "seed": seed, "status": "ok", "error": ""}
        try:
            if algo in SOLVERS:
                rep = SOLVERS[algo](instance, backend=backend, seed=seed)
                size, seconds = rep.count, rep.seconds
                if reports_dir is not None:
                    path = Path(reports_dir) / f"{algo}_n{n}_k{k}_L{L}_s{seed}.json"
                    path.write_bytes(write_report(rep))
            else:
                size, seconds, _ = _run_mcs(instance, algo, seed, max_edges)
            row.update(primers=size, normalized=normalized_size(size, n), seconds=seconds)
        except Exception as exc:  # recorded per row; the sweep continues
            row.update(primers="", normalized="", seconds="", status="error", error=f"{type(exc).__name__}: {exc}")
        rows.append(row)
    return rows


def run_bench(config: BenchConfig) -> list[dict]:
    if config.reports_dir is not None:
        Path(config.reports_dir).mkdir(parents=True, exist_ok=True)
    points = [
        (config.algorithms, n, k, config.L, config.base_seed + r, config.reports_dir, config.max_edges, config.backend)
        for n in config.n_values
        for k in config.k_values
        for r in range(config.repetitions)
    ]
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            chunks = list(pool.map(run_point, points))
    else:
        chunks = [run_point(p) for p in points]
    runs = [row for chunk in chunks for row in chunk]

    means = []
    for n in config.n_values:
        for k in config.k_values:
            for algo in config.algorithms:
                ok = [r for r in runs if r["algorithm"] == algo and r["n"] == n and r["k"] == k and r["status"] == "ok"]
                row = {"kind": "mean", "algorithm": algo, "n": n, "k": k, "L": config.L, "seed": "", "runs": len(ok),
                       "status": "ok" if ok else "error", "error": ""}
                if ok:
                    secs = sum(r["seconds"] for r in ok) / len(ok)
                    row.update(
                        primers=sum(r["primers"] for r in ok) / len(ok),
                        normalized=sum(r["normalized"] for r in ok) / len(ok),
                        seconds=secs,
                        log10_n=math.log10(n),
                        log10_seconds=math.log10(secs) if secs > 0 else "",
                    )
                means.append(row)
    return runs + means


def bench_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n", restval="")
    writer.writeheader()
    for row in rows:
        out = dict(row)
        for key in ("normalized", "seconds", "primers", "log10_n", "log10_seconds"):
            if isinstance(out.get(key), float):
                out[key] = f"{out[key]:.6g}"
        writer.writerow(out)
    return buf.getvalue()
