"""Time the compiled and pure-Python greedy kernels on the same index.

    python benchmarks/bench_kernels.py -n 500 -L 1000 -k 10 --repeat 3
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from primerset import kernels
from primerset.greedy import _filter_index
from primerset.instances import generate_random_instance
from primerset.seq import build_index, enumerate_candidates, half_threshold


def _best_of(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-n", type=int, default=500)
    ap.add_argument("-L", type=int, default=1000)
    ap.add_argument("-k", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    inst = generate_random_instance(args.n, args.L, args.k, args.seed)
    start = time.perf_counter()
    full = build_index(inst, enumerate_candidates(inst, "full"))
    half = build_index(inst, enumerate_candidates(inst, "half"))
    keep = half.positions >= half_threshold(inst.L)
    print(f"n={args.n} L={args.L} k={args.k}: {len(full)} candidates, {len(full.positions)} occurrences, "
          f"index built in {time.perf_counter() - start:.2f}s")
    half = _filter_index(half, keep)  # same filtering the solver applies
    jobs = {
        "gpot": lambda b: kernels.greedy_potential(full, b),
        "gfix": lambda b: kernels.greedy_count(half, half.max_positions(), kernels.MODE_FIX, b),
        "gvar": lambda b: kernels.greedy_count(full, full.max_positions(), kernels.MODE_VAR, b),
    }
    backends = sorted(kernels.BACKENDS)
    print(f"{'kernel':<6} " + " ".join(f"{b:>12}" for b in backends) + "   speedup  primers")
    for name, job in jobs.items():
        times, outs = {}, {}
        for b in backends:
            times[b], outs[b] = _best_of(lambda: job(b), args.repeat)
        ref = outs[backends[0]]
        for b in backends[1:]:
            if not (np.array_equal(outs[b][0], ref[0]) and np.array_equal(outs[b][1], ref[1])):
                raise SystemExit(f"{name}: backend {b} disagrees with {backends[0]}")
        speedup = times["python"] / times["compiled"] if "compiled" in times else float("nan")
        cols = " ".join(f"{times[b] * 1e3:>10.1f}ms" for b in backends)
        print(f"{name:<6} {cols} {speedup:>8.1f}x  {len(ref[0]):>7}")


if __name__ == "__main__":
    main()
