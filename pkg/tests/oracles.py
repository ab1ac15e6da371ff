"""Independent brute-force oracles shared by the unit and acceptance tests."""

import itertools
import math

import numpy as np

TOL = 1e-7


def _inequalities(problem):
    A, senses, b = problem.rows()
    n = problem.num_variables
    G, h = [np.eye(n)], [np.zeros(n)]
    for row, s, rhs in zip(A, senses, b):
        if s in (">=", "=="):
            G.append(row[None, :])
            h.append([rhs])
        if s in ("<=", "=="):
            G.append(-row[None, :])
            h.append([-rhs])
    return np.vstack(G), np.concatenate([np.atleast_1d(v) for v in h])


def brute_force_lp(problem):
    """Returns (status, objective) for min c.x."""
    G, h = _inequalities(problem)
    c = np.array(problem.costs, dtype=float)
    n = len(c)
    best = math.inf
    for rows in itertools.combinations(range(len(G)), n):
        M = G[list(rows)]
        if abs(np.linalg.det(M)) < 1e-9:
            continue
        x = np.linalg.solve(M, h[list(rows)])
        if np.all(G @ x >= h - TOL):
            best = min(best, float(c @ x))
    if math.isinf(best):
        return "infeasible", math.nan
    for rows in itertools.combinations(range(len(G)), n - 1):
        M = G[list(rows)]
        if n > 1 and np.linalg.matrix_rank(M) < n - 1:
            continue
        d = np.linalg.svd(M)[2][-1] if n > 1 else np.ones(1)
        for ray in (d, -d):
            if np.all(G @ ray >= -TOL) and c @ ray < -TOL:
                return "unbounded", -math.inf
    return "optimal", best


def min_multicolor_size(g):
    """Smallest vertex subset inducing an edge of every color, by bitmask enumeration."""
    nv = g.num_vertices
    best = nv
    for mask in range(1 << nv):
        size = bin(mask).count("1")
        if size >= best:
            continue
        if all(any(mask >> u & 1 and mask >> v & 1 for u, v in (g.edges[e] for e in cls)) for cls in g.colors):
            best = size
    return best


def random_colored_graph(rng, max_vertices=8, max_colors=4):
    from primerset.mcs import ColoredGraph

    nv = int(rng.integers(2, max_vertices + 1))
    pairs = [(u, v) for u in range(nv) for v in range(u, nv)]
    m = int(rng.integers(1, min(max_colors, len(pairs)) + 1))
    num_edges = int(rng.integers(m, min(len(pairs), 3 * m) + 1))
    chosen = rng.choice(len(pairs), size=num_edges, replace=False)
    edges = [pairs[i] for i in sorted(chosen)]
    colors = [[] for _ in range(m)]
    for e in range(num_edges):
        colors[e % m if e < m else int(rng.integers(m))].append(e)
    return ColoredGraph(nv, tuple(edges), tuple(tuple(c) for c in colors))


def random_lp(rng, with_bounds=True):
    """<= 5 variables, <= 6 rows, integer coefficients in [-5, 5].

    Half of the draws are built around an integer point x0 >= 0 so they are
    feasible; the rest have uniform right-hand sides in [-5, 5].
    """
    from primerset.lp import LpProblem

    prob = LpProblem()
    n = int(rng.integers(1, 6))
    x0 = rng.integers(0, 4, size=n) if rng.random() < 0.5 else None
    for j in range(n):
        upper = float(rng.integers(1, 6)) if with_bounds and rng.random() < 0.3 else None
        if upper is not None and x0 is not None:
            upper = max(upper, float(x0[j]))
        prob.add_variable(f"x{j}", float(rng.integers(-5, 6)), upper)
    for _ in range(int(rng.integers(0, 7))):
        a = rng.integers(-5, 6, size=n)
        sense = str(rng.choice([">=", "<=", "=="], p=[0.45, 0.45, 0.1]))
        if x0 is None:
            rhs = float(rng.integers(-5, 6))
        else:
            slack = float(rng.integers(0, 3))
            rhs = float(a @ x0) + {">=": -slack, "<=": slack, "==": 0.0}[sense]
        prob.add_constraint({j: float(a[j]) for j in range(n)}, sense, rhs)
    return prob


_COMPLEMENT = str.maketrans("acgt", "tgca")


def rfind_position(primer, s):
    """1-based last landing site of a non-degenerate primer, or 0."""
    return s.rfind(str(primer).translate(_COMPLEMENT)[::-1]) + 1


def phi_oracle(instance, primers):
    total = 0
    for tp in instance.targets:
        f = max((rfind_position(p, tp.forward) for p in primers), default=0)
        r = max((rfind_position(p, tp.reverse) for p in primers), default=0)
        total += min(instance.L, f + r)
    return total
