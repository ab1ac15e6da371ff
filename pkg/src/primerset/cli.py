"""Command-line interface: ``primerset <command> ...``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from pathlib import Path

from . import kernels
from .bench import ALGORITHMS, BenchConfig, bench_csv, run_bench
from .greedy import SOLVERS, verify_cover
from .instances import (
    extract_from_genome,
    generate_random_instance,
    instance_sha256,
    parse_loci,
    read_fasta,
    read_instance,
    write_instance,
)
from .mcs import (
    brute_force_mcs,
    build_amplification_graph,
    build_mcs_ilp,
    generate_gap_instance,
    parse_graph,
    solve_mcs_rounding,
    solve_relaxation,
    solve_trivial,
    verify_multicolor,
    write_graph,
)
from .report import REPORT_FORMAT, read_report, write_report
from .seq import CandidateSet


class CliError(Exception):
    pass


def _write(path: str | None, data: bytes | str) -> None:
    """Write atomically so a failed run never leaves a partial artifact."""
    if isinstance(data, str):
        data = data.encode()
    if path is None or path == "-":
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, target)
    except BaseException:
        os.unlink(tmp)
        raise


def _json(doc: dict) -> bytes:
    return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode()


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(",") if v)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def cmd_gen(args) -> None:
    inst = generate_random_instance(args.n, args.L, args.k, args.seed, delta=args.delta)
    _write(args.output, write_instance(inst))


def cmd_extract(args) -> None:
    _, genome = read_fasta(Path(args.genome).read_text())
    loci = parse_loci(Path(args.loci).read_text())
    inst = extract_from_genome(genome, loci, args.L, args.k, delta=args.delta)
    _write(args.output, write_instance(inst))


def _load_candidates(path, instance):
    if path is None:
        return None
    lines = [ln.split("#", 1)[0].strip() for ln in Path(path).read_text().splitlines()]
    return CandidateSet.from_primers([ln for ln in lines if ln], k=instance.k)


def cmd_solve(args) -> None:
    inst = read_instance(args.instance)
    report = SOLVERS[args.algo](inst, _load_candidates(args.candidates, inst), backend=args.backend, seed=args.seed)
    _write(args.output, write_report(report, args.format))


def _load_graph(path: str, args):
    text = Path(path).read_text()
    if text.startswith("MCSGRAPH"):
        return parse_graph(text), None
    inst = read_instance(path)
    return build_amplification_graph(inst, max_edges=args.max_edges), inst


def cmd_mcs(args) -> None:
    g, inst = _load_graph(args.input, args)
    if args.dump_graph:
        _write(args.dump_graph, write_graph(g))
    if args.dump_lp:
        _write(args.dump_lp, build_mcs_ilp(g).dump())
    start = time.perf_counter()
    if args.algo == "round":
        sol = solve_mcs_rounding(g, args.seed, args.max_restarts, prune_result=not args.no_prune, scaled_lp=args.scaled_lp)
    elif args.algo == "trivial":
        sol = solve_trivial(g)
    else:
        sol = brute_force_mcs(g)
    doc = sol.to_dict(g)
    doc.update(
        seconds=round(time.perf_counter() - start, 3),
        seed=args.seed,
        graph={"vertices": g.num_vertices, "edges": len(g.edges), "colors": len(g.colors),
               "max_class_size": g.max_class_size},
        instance_sha256=instance_sha256(inst) if inst is not None else None,
    )
    if inst is not None:
        check = verify_cover(inst, doc["labels"])
        doc["uniqueness"] = {str(t): c for t, c in sorted(check.pair_counts.items())}
    _write(args.output, _json(doc))


def cmd_gap(args) -> None:
    start = time.perf_counter()
    gap = generate_gap_instance(args.n, args.s, args.seed)
    g = gap.graph
    lp = solve_relaxation(g)
    runs = []
    for r in range(args.runs):
        sol = solve_mcs_rounding(g, args.seed + r, args.max_restarts, lp=lp)
        runs.append({"seed": args.seed + r, "size": sol.size, "unpruned_size": sol.unpruned_size,
                     "restarts": sol.restarts, "round_color_failures": sol.round_color_failures,
                     "round_color_observations": sol.round_color_observations})
    doc = {
        "format": "primerset-gap/1",
        "n": args.n, "s": args.s, "seed": args.seed,
        "edges": len(g.edges), "colors": len(g.colors), "max_class_size": g.max_class_size,
        "certificate_max_violation": gap.certificate_violation(),
        "certificate_bound": gap.lp_bound,
        "lp_objective": round(lp.objective, 9),
        "trivial_size": solve_trivial(g).size,
        "rounding": runs,
        "seconds": round(time.perf_counter() - start, 3),
    }
    if args.graph_out:
        _write(args.graph_out, write_graph(g))
    _write(args.output, _json(doc))


def cmd_bench(args) -> None:
    config = BenchConfig(
        algorithms=tuple(args.algos.split(",")),
        n_values=args.n,
        k_values=args.k,
        L=args.L,
        repetitions=args.seeds,
        base_seed=args.base_seed,
        reports_dir=Path(args.reports_dir) if args.reports_dir else None,
        jobs=args.jobs,
        backend=args.backend,
    )
    _write(args.output, bench_csv(run_bench(config)))


def cmd_verify(args) -> None:
    text = Path(args.report).read_text()
    doc = json.loads(text)
    fmt = doc.get("format")
    if fmt == REPORT_FORMAT:
        inst = read_instance(args.input)
        report = read_report(text)
        check = verify_cover(inst, report.primers)
        problems = [f"target {t} not covered" for t in check.violations]
        for w in report.witnesses:
            if w.t + w.t_prime < inst.L:
                problems.append(f"witness for target {w.target} has t + t' < L")
    elif fmt == "primerset-mcs/1":
        g, _ = _load_graph(args.input, args)
        check = verify_multicolor(g, doc["vertices"])
        problems = [f"color {c} not induced" for c in check.uncovered]
    else:
        raise CliError(f"unrecognised report format {fmt!r}")
    if problems:
        raise CliError("verification failed: " + "; ".join(problems))
    print("ok")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="primerset", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a uniform random instance")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--delta", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("extract", help="build an instance from a FASTA genome and a loci list")
    p.add_argument("--genome", required=True)
    p.add_argument("--loci", required=True)
    p.add_argument("-L", type=int, required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--delta", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("solve", help="select a primer cover")
    p.add_argument("instance")
    p.add_argument("--algo", choices=sorted(SOLVERS), default="gpot")
    p.add_argument("--candidates", help="file with one (possibly degenerate) primer per line")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--seed", type=int)
    p.add_argument("--backend", choices=sorted(kernels.BACKENDS))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("mcs", help="minimum multi-colored subgraph on an instance or graph dump")
    p.add_argument("input")
    p.add_argument("--algo", choices=("round", "trivial", "exact"), default="round")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-restarts", type=int, default=20)
    p.add_argument("--no-prune", action="store_true")
    p.add_argument("--scaled-lp", action="store_true", help="solve the scaled LP instead of scaling the solution")
    p.add_argument("--max-edges", type=int, default=20_000)
    p.add_argument("--dump-graph")
    p.add_argument("--dump-lp")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_mcs)

    p = sub.add_parser("gap", help="random-matching integrality gap instance")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("-s", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=1)
    p.add_argument("--max-restarts", type=int, default=20)
    p.add_argument("--graph-out")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("bench", help="sweep algorithms over random instances")
    p.add_argument("--algos", default="gpot,gfix,gvar", help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    p.add_argument("--n", type=_int_list, default=(50, 100))
    p.add_argument("--k", type=_int_list, default=(8, 10, 12))
    p.add_argument("-L", type=int, default=1000)
    p.add_argument("--seeds", type=int, default=10, help="repetitions per point")
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--reports-dir")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--backend", choices=sorted(kernels.BACKENDS))
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("verify", help="re-check a solve or mcs report")
    p.add_argument("input", help="instance file or graph dump the report refers to")
    p.add_argument("report")
    p.add_argument("--max-edges", type=int, default=20_000)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (CliError, OSError, ValueError, RuntimeError) as exc:
        print(f"primerset {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
