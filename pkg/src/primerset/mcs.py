"""Minimum multi-colored subgraph: model, primer reduction, LP rounding and oracles.

Given a graph whose edges carry one or more colors, find a small vertex set
whose induced subgraph holds at least one edge of every color. The rounding
solver solves the LP relaxation once, scales the edge values by
sqrt(max class size), and takes the union of ``ceil(ln m) + 2`` independent
rounds, restarting with fresh randomness while some color stays uncovered.

Graph dump format::

    MCSGRAPH 1 vertices=<V> edges=<E> colors=<m>
    v <index> <label>            # optional, one per labelled vertex
    e <index> <u> <v>            # u == v is a self-loop
    c <index> <edge> <edge> ...
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from .lp import LpProblem, LpSolution, max_violation, solve_lp
from .seq import CandidateSet, HybridizationIndex, Instance, build_index, enumerate_candidates

DEFAULT_BUDGET = 10**7
BUDGET_ENV = "PRIMERSET_MCS_BUDGET"


class InfeasibleTargetError(ValueError):
    def __init__(self, message: str, targets: list[int]):
        super().__init__(message)
        self.targets = targets


class RoundingFailure(RuntimeError):
    def __init__(self, message: str, uncovered: list[int]):
        super().__init__(message)
        self.uncovered = uncovered


class McsBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class ColoredGraph:
    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    colors: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        edges = tuple((min(u, v), max(u, v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "colors", tuple(tuple(sorted(set(c))) for c in self.colors))
        if len(set(edges)) != len(edges):
            raise ValueError("duplicate edges")
        for u, v in edges:
            if not (0 <= u < self.num_vertices and 0 <= v < self.num_vertices):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
        if not self.colors:
            raise ValueError("graph needs at least one color class")
        used = set()
        for c, cls in enumerate(self.colors):
            if not cls:
                raise ValueError(f"color class {c} is empty")
            for e in cls:
                if not 0 <= e < len(edges):
                    raise ValueError(f"color class {c} references missing edge {e}")
            used.update(cls)
        if used != set(range(len(edges))):
            raise ValueError("every edge must belong to some color class")
        if self.labels is not None and len(self.labels) != self.num_vertices:
            raise ValueError("label count differs from vertex count")

    @property
    def max_class_size(self) -> int:
        return max(len(c) for c in self.colors)

    def label(self, v: int) -> str:
        return self.labels[v] if self.labels is not None else str(v)

    def non_isolated(self) -> list[int]:
        return sorted({v for e in self.edges for v in e})


def build_amplification_graph(
    instance: Instance,
    candidates: CandidateSet | None = None,
    index: HybridizationIndex | None = None,
    max_edges: int | None = None,
) -> ColoredGraph:
    """Primers as vertices; an edge {p, p'} of color i when p covers f^i at t,
    p' covers r^i at t' and t + t' >= L (p == p' gives a self-loop)."""
    if index is None:
        index = build_index(instance, candidates if candidates is not None else enumerate_candidates(instance))
    L = index.L
    owner = np.repeat(np.arange(len(index)), np.diff(index.offsets))
    per_target = [([], []) for _ in range(instance.n)]
    for p, i, s, t in zip(owner.tolist(), index.targets.tolist(), index.strands.tolist(), index.positions.tolist()):
        per_target[i][s].append((t, p))

    edge_id: dict[tuple[int, int], int] = {}
    colors, empty = [], []
    for i, (fwd, rev) in enumerate(per_target):
        cls = set()
        for t, p in fwd:
            for u, q in rev:
                if t + u >= L:
                    e = (min(p, q), max(p, q))
                    if e not in edge_id:
                        edge_id[e] = len(edge_id)
                        if max_edges is not None and len(edge_id) > max_edges:
                            raise McsBudgetError(f"amplification graph exceeds {max_edges} edges")
                    cls.add(edge_id[e])
        if not cls:
            empty.append(instance.targets[i].id)
        colors.append(cls)
    if empty:
        raise InfeasibleTargetError(f"targets {empty} have no feasible primer pair", empty)

    used = sorted({v for e in edge_id for v in e})
    remap = {v: j for j, v in enumerate(used)}
    edges = [None] * len(edge_id)
    for (u, v), e in edge_id.items():
        edges[e] = (remap[u], remap[v])
    labels = tuple(index.candidates.labels(used))
    return ColoredGraph(len(used), tuple(edges), tuple(tuple(sorted(c)) for c in colors), labels)


def build_mcs_ilp(g: ColoredGraph, cover: float = 1.0) -> LpProblem:
    """LP with x_v, y_e in [0, 1]: each color covered ``>= cover`` and y linked to x.

    ``cover=1`` gives the relaxation of the integer program; the solution is
    integral-intent only in the sense that 0/1 points are its integer points.
    """
    prob = LpProblem()
    bound = 1.0 if cover == 1.0 else None
    xs = [prob.add_variable(f"x{v}", 1.0, bound) for v in range(g.num_vertices)]
    # y_e <= x_v <= 1 already follows from a linking row, so y needs no explicit bound
    ys = [prob.add_variable(f"y{e}", 0.0) for e in range(len(g.edges))]
    for cls in g.colors:
        prob.add_constraint({ys[e]: 1.0 for e in cls}, ">=", cover)
    for cls in g.colors:
        touching: dict[int, list[int]] = {}
        for e in cls:
            for v in set(g.edges[e]):
                touching.setdefault(v, []).append(e)
        for v in sorted(touching):
            row = {ys[e]: 1.0 for e in touching[v]}
            row[xs[v]] = -1.0
            prob.add_constraint(row, "<=", 0.0)
    return prob


def solve_relaxation(g: ColoredGraph, scaled: bool = False) -> LpSolution:
    cover = math.sqrt(g.max_class_size) if scaled else 1.0
    sol = solve_lp(build_mcs_ilp(g, cover))
    if not sol.optimal:
        raise RuntimeError(f"LP relaxation not solved: {sol.status}")
    return sol


@dataclass
class EdgeProbabilities:
    p: np.ndarray
    factor: float
    scaled_x: np.ndarray
    capped: int


def scale_solution(g: ColoredGraph, lp: LpSolution, factor: float | None = None, tol: float = 1e-9) -> EdgeProbabilities:
    """p_e = min(factor * y_e, 1) with factor = sqrt(max class size) by default."""
    factor = math.sqrt(g.max_class_size) if factor is None else factor
    nv = g.num_vertices
    y = np.clip(lp.x[nv : nv + len(g.edges)], 0.0, None)
    scaled = factor * y
    for c, cls in enumerate(g.colors):
        total = scaled[list(cls)].sum()
        if total < math.sqrt(g.max_class_size) - tol * factor:
            raise ValueError(f"scaled covering row of color {c} is infeasible ({total})")
    p = np.minimum(scaled, 1.0)
    return EdgeProbabilities(p, factor, factor * lp.x[:nv], int((scaled > 1.0).sum()))


def _incidences(g: ColoredGraph) -> tuple[np.ndarray, np.ndarray]:
    verts, edges = [], []
    for e, (u, v) in enumerate(g.edges):
        verts.append(u)
        edges.append(e)
        if v != u:
            verts.append(v)
            edges.append(e)
    return np.array(verts, dtype=np.int64), np.array(edges, dtype=np.int64)


def round_once(g: ColoredGraph, p: np.ndarray, rng: np.random.Generator, _inc=None) -> set[int]:
    """One Bernoulli(p_e) draw per (vertex, edge) incidence; a vertex joins if any draw hits."""
    verts, edges = _inc if _inc is not None else _incidences(g)
    hits = rng.random(len(verts)) < np.asarray(p)[edges]
    return set(np.unique(verts[hits]).tolist())


@dataclass
class MulticolorCheck:
    witnesses: dict[int, int]
    uncovered: list[int]

    @property
    def ok(self) -> bool:
        return not self.uncovered


def verify_multicolor(g: ColoredGraph, S: Iterable[int]) -> MulticolorCheck:
    S = set(S)
    witnesses, uncovered = {}, []
    for c, cls in enumerate(g.colors):
        for e in cls:
            u, v = g.edges[e]
            if u in S and v in S:
                witnesses[c] = e
                break
        else:
            uncovered.append(c)
    return MulticolorCheck(witnesses, uncovered)


@dataclass
class McsSolution:
    vertices: list[int]
    witnesses: dict[int, int]
    algorithm: str
    rounds: int = 0
    restarts: int = 0
    seed: int | None = None
    unpruned_size: int | None = None
    lp_objective: float | None = None
    # per (round, color) observations of "S_j induces no edge of the color"
    round_color_failures: int = 0
    round_color_observations: int = 0
    extra: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_dict(self, g: ColoredGraph) -> dict:
        return {
            "format": "primerset-mcs/1",
            "algorithm": self.algorithm,
            "vertices": self.vertices,
            "labels": [g.label(v) for v in self.vertices],
            "size": self.size,
            "unpruned_size": self.unpruned_size,
            "rounds": self.rounds,
            "restarts": self.restarts,
            "seed": self.seed,
            "lp_objective": None if self.lp_objective is None else round(self.lp_objective, 9),
            "round_color_failures": self.round_color_failures,
            "round_color_observations": self.round_color_observations,
            "witnesses": [
                {"color": c, "edge": e, "endpoints": [g.label(v) for v in g.edges[e]]}
                for c, e in sorted(self.witnesses.items())
            ],
            **self.extra,
        }


def prune(g: ColoredGraph, S: Iterable[int]) -> list[int]:
    """Drop vertices (highest index first) whose removal keeps every color induced."""
    S = set(S)
    for v in sorted(S, reverse=True):
        S.discard(v)
        if not verify_multicolor(g, S).ok:
            S.add(v)
    return sorted(S)


def rounds_per_attempt(num_colors: int) -> int:
    return math.ceil(math.log(num_colors)) + 2


def solve_mcs_rounding(
    g: ColoredGraph,
    seed: int,
    max_restarts: int = 20,
    *,
    prune_result: bool = True,
    scaled_lp: bool = False,
    lp: LpSolution | None = None,
) -> McsSolution:
    if lp is None:
        lp = solve_relaxation(g, scaled=scaled_lp)
    probs = scale_solution(g, lp, factor=1.0 if scaled_lp else None)
    rng = np.random.Generator(np.random.PCG64(seed))
    inc = _incidences(g)
    t = rounds_per_attempt(len(g.colors))
    failures = observations = 0
    uncovered: list[int] = []
    for attempt in range(max_restarts + 1):
        S: set[int] = set()
        for _ in range(t):
            Sj = round_once(g, probs.p, rng, inc)
            miss = len(verify_multicolor(g, Sj).uncovered)
            failures += miss
            observations += len(g.colors)
            S |= Sj
        check = verify_multicolor(g, S)
        if check.ok:
            unpruned = len(S)
            verts = prune(g, S) if prune_result else sorted(S)
            return McsSolution(
                verts, verify_multicolor(g, verts).witnesses, "mcs-round", t, attempt, seed, unpruned,
                lp.objective, failures, observations,
                {"scale_factor": probs.factor, "capped_edges": probs.capped},
            )
        uncovered = check.uncovered
    raise RoundingFailure(
        f"colors {uncovered} still uncovered after {max_restarts} restarts", uncovered
    )


def solve_trivial(g: ColoredGraph) -> McsSolution:
    S = set()
    for cls in g.colors:
        S.update(g.edges[min(cls)])
    verts = sorted(S)
    return McsSolution(verts, verify_multicolor(g, verts).witnesses, "mcs-trivial")


def brute_force_mcs(g: ColoredGraph, budget: int | None = None) -> McsSolution:
    budget = budget if budget is not None else int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))
    verts = g.non_isolated()
    spent = 0
    for size in range(1, len(verts) + 1):
        spent += math.comb(len(verts), size)
        if spent > budget:
            raise McsBudgetError(f"exact search needs more than {budget} subsets")
        for S in combinations(verts, size):
            check = verify_multicolor(g, S)
            if check.ok:
                return McsSolution(list(S), check.witnesses, "mcs-exact")
    raise AssertionError("the full vertex set always induces every color")


@dataclass
class GapInstance:
    graph: ColoredGraph
    s: int
    x: np.ndarray
    y: np.ndarray

    @property
    def lp_bound(self) -> float:
        return self.graph.num_vertices / self.s

    def certificate_violation(self) -> float:
        """Largest violation of the fractional certificate x = y = 1/s on the unscaled LP."""
        prob = build_mcs_ilp(self.graph)
        return max_violation(prob, np.concatenate([self.x, self.y]))


def generate_gap_instance(n: int, s: int, seed: int) -> GapInstance:
    """n color classes, each a uniformly random matching of s edges on n vertices."""
    if s < 1 or n < 2 * s:
        raise ValueError(f"need s >= 1 and n >= 2s (n={n}, s={s})")
    rng = np.random.Generator(np.random.PCG64(seed))
    edge_id: dict[tuple[int, int], int] = {}
    colors = []
    for _ in range(n):
        perm = rng.permutation(n)[: 2 * s]
        cls = []
        for a, b in zip(perm[0::2].tolist(), perm[1::2].tolist()):
            e = (min(a, b), max(a, b))
            cls.append(edge_id.setdefault(e, len(edge_id)))
        colors.append(tuple(cls))
    edges = [None] * len(edge_id)
    for e, i in edge_id.items():
        edges[i] = e
    g = ColoredGraph(n, tuple(edges), tuple(colors))
    gap = GapInstance(g, s, np.full(n, 1.0 / s), np.full(len(edges), 1.0 / s))
    if gap.certificate_violation() > 1e-12:
        raise AssertionError("fractional certificate is infeasible")
    return gap


def write_graph(g: ColoredGraph) -> str:
    lines = [f"MCSGRAPH 1 vertices={g.num_vertices} edges={len(g.edges)} colors={len(g.colors)}"]
    if g.labels is not None:
        lines += [f"v {v} {label}" for v, label in enumerate(g.labels)]
    lines += [f"e {i} {u} {v}" for i, (u, v) in enumerate(g.edges)]
    lines += [f"c {c} " + " ".join(map(str, cls)) for c, cls in enumerate(g.colors)]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> ColoredGraph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("MCSGRAPH 1 "):
        raise ValueError("not a graph dump (missing 'MCSGRAPH 1' header)")
    header = dict(part.split("=", 1) for part in lines[0].split()[2:])
    nv, ne, nc = int(header["vertices"]), int(header["edges"]), int(header["colors"])
    labels: dict[int, str] = {}
    edges: dict[int, tuple[int, int]] = {}
    colors: dict[int, tuple[int, ...]] = {}
    for lineno, line in enumerate(lines[1:], 2):
        parts = line.split()
        try:
            if parts[0] == "v":
                labels[int(parts[1])] = parts[2]
            elif parts[0] == "e":
                edges[int(parts[1])] = (int(parts[2]), int(parts[3]))
            elif parts[0] == "c":
                colors[int(parts[1])] = tuple(int(e) for e in parts[2:])
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise ValueError(f"line {lineno}: cannot parse {line!r}") from None
    if sorted(edges) != list(range(ne)) or sorted(colors) != list(range(nc)):
        raise ValueError("edge/color indices do not match the header counts")
    if labels and sorted(labels) != list(range(nv)):
        raise ValueError("labels must cover every vertex")
    return ColoredGraph(
        nv,
        tuple(edges[i] for i in range(ne)),
        tuple(colors[i] for i in range(nc)),
        tuple(labels[i] for i in range(nv)) if labels else None,
    )
