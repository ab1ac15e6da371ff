"""Dense two-phase primal simplex (Dantzig pricing, Bland's rule on degenerate stalls).

Problems are ``min c.x`` subject to sparse rows ``a.x >= b``, ``a.x <= b`` or
``a.x == b`` and ``0 <= x_j <= u_j``; finite upper bounds become explicit
rows. Sized for desk-scale relaxations (a few thousand columns at most).

Text dump format (one item per line)::

    LP 1 variables=<n> constraints=<m>
    var <name> <cost> <upper|inf>
    row <sense> <rhs> <name>:<coef> <name>:<coef> ...
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

SENSES = (">=", "<=", "==")
OPTIMAL, INFEASIBLE, UNBOUNDED, ITERATION_LIMIT = "optimal", "infeasible", "unbounded", "iteration_limit"
_PIVOT_TOL = 1e-11
_STALL_LIMIT = 50  # degenerate pivots before switching to Bland's rule


@dataclass(frozen=True)
class Constraint:
    coeffs: dict[int, float]
    sense: str
    rhs: float


@dataclass
class LpProblem:
    names: list[str] = field(default_factory=list)
    costs: list[float] = field(default_factory=list)
    upper: list[float | None] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)

    @property
    def num_variables(self) -> int:
        return len(self.names)

    def add_variable(self, name: str, cost: float = 0.0, upper: float | None = None) -> int:
        if not name or any(ch.isspace() for ch in name) or ":" in name:
            raise ValueError(f"bad variable name {name!r}")
        self.names.append(name)
        self.costs.append(float(cost))
        self.upper.append(None if upper is None or math.isinf(upper) else float(upper))
        return len(self.names) - 1

    def add_constraint(self, coeffs: dict[int, float], sense: str, rhs: float) -> None:
        if sense not in SENSES:
            raise ValueError(f"sense must be one of {SENSES}")
        row = {}
        for j, a in coeffs.items():
            if not 0 <= j < self.num_variables:
                raise ValueError(f"constraint references undeclared variable {j}")
            if a != 0:
                row[j] = row.get(j, 0.0) + float(a)
        self.constraints.append(Constraint({j: a for j, a in row.items() if a != 0}, sense, float(rhs)))

    def rows(self) -> tuple[np.ndarray, list[str], np.ndarray]:
        """Dense (A, senses, b) with the constraint rows first, then one row per finite upper bound."""
        n = self.num_variables
        bounds = [j for j, u in enumerate(self.upper) if u is not None]
        A = np.zeros((len(self.constraints) + len(bounds), n))
        senses, b = [], []
        for i, c in enumerate(self.constraints):
            for j, a in c.coeffs.items():
                A[i, j] = a
            senses.append(c.sense)
            b.append(c.rhs)
        for r, j in enumerate(bounds, len(self.constraints)):
            A[r, j] = 1.0
            senses.append("<=")
            b.append(self.upper[j])
        return A, senses, np.array(b, dtype=float)

    def dump(self) -> str:
        lines = [f"LP 1 variables={self.num_variables} constraints={len(self.constraints)}"]
        for name, cost, up in zip(self.names, self.costs, self.upper):
            lines.append(f"var {name} {cost!r} {'inf' if up is None else repr(up)}")
        for c in self.constraints:
            terms = " ".join(f"{self.names[j]}:{a!r}" for j, a in sorted(c.coeffs.items()))
            lines.append(f"row {c.sense} {c.rhs!r} {terms}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def parse(cls, text: str) -> LpProblem:
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("LP 1 "):
            raise ValueError("not an LP dump (missing 'LP 1' header)")
        prob = cls()
        by_name = {}
        for lineno, line in enumerate(lines[1:], 2):
            parts = line.split()
            if parts[0] == "var" and len(parts) == 4:
                by_name[parts[1]] = prob.add_variable(parts[1], float(parts[2]), float(parts[3]))
            elif parts[0] == "row" and len(parts) >= 3:
                coeffs = {}
                for term in parts[3:]:
                    name, _, a = term.rpartition(":")
                    coeffs[by_name[name]] = float(a)
                prob.add_constraint(coeffs, parts[1], float(parts[2]))
            else:
                raise ValueError(f"line {lineno}: cannot parse {line!r}")
        return prob


@dataclass
class LpSolution:
    status: str
    x: np.ndarray
    objective: float
    duals: np.ndarray | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status == OPTIMAL


def max_violation(problem: LpProblem, x: np.ndarray) -> float:
    """Largest violation over all rows and the bounds 0 <= x <= u."""
    A, senses, b = problem.rows()
    ax = A @ x
    worst = float(max(0.0, -x.min(initial=0.0)))
    for v, s, rhs in zip(ax, senses, b):
        if s == ">=":
            worst = max(worst, rhs - v)
        elif s == "<=":
            worst = max(worst, v - rhs)
        else:
            worst = max(worst, abs(v - rhs))
    return worst


class _Tableau:
    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.rows_kept = list(range(len(basis)))
        self.iterations = 0

    def pivot(self, r: int, j: int) -> None:
        T = self.T
        T[r] /= T[r, j]
        col = T[:, j].copy()
        col[r] = 0.0
        rows = np.flatnonzero(col)
        T[rows] -= np.outer(col[rows], T[r])
        self.basis[r] = j
        self.iterations += 1

    def set_objective(self, cost: np.ndarray) -> None:
        m = len(self.basis)
        T = self.T
        T[m, :-1] = cost
        T[m, -1] = 0.0
        cb = cost[self.basis]
        T[m] -= cb @ T[:m]

    def run(self, allowed: np.ndarray, opt_tol: float, max_iter: int) -> str:
        """Dantzig pricing; Bland's rule takes over during degenerate stalls so cycling cannot occur."""
        m = len(self.basis)
        T = self.T
        stall = 0
        while True:
            if self.iterations >= max_iter:
                return ITERATION_LIMIT
            reduced = np.where(allowed, T[m, :-1], 0.0)
            entering = np.flatnonzero(reduced < -opt_tol)
            if len(entering) == 0:
                return OPTIMAL
            j = int(entering[0]) if stall >= _STALL_LIMIT else int(entering[np.argmin(reduced[entering])])
            col = T[:m, j]
            rows = np.flatnonzero(col > _PIVOT_TOL)
            if len(rows) == 0:
                return UNBOUNDED
            ratios = T[rows, -1] / col[rows]
            best = ratios.min()
            ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
            r = int(min(ties, key=lambda i: self.basis[i]))
            stall = stall + 1 if best <= 1e-12 else 0
            self.pivot(r, j)


def solve_lp(
    problem: LpProblem, feas_tol: float = 1e-9, opt_tol: float = 1e-9, max_iter: int = 200_000
) -> LpSolution:
    A, senses, b = problem.rows()
    m, n = A.shape
    cost = np.array(problem.costs, dtype=float)
    if m == 0:
        if (cost < -opt_tol).any():
            return LpSolution(UNBOUNDED, np.zeros(n), -math.inf)
        return LpSolution(OPTIMAL, np.zeros(n), 0.0, np.zeros(0))

    flip = b < 0
    A[flip] *= -1
    b = np.where(flip, -b, b)
    senses = [
        {">=": "<=", "<=": ">=", "==": "=="}[s] if f else s for s, f in zip(senses, flip)
    ]

    n_slack = sum(s != "==" for s in senses)
    n_art = sum(s != "<=" for s in senses)
    N = n + n_slack + n_art
    S = np.zeros((m, N))
    S[:, :n] = A
    basis = []
    sc, ac = n, n + n_slack
    artificial = np.zeros(N, dtype=bool)
    for i, s in enumerate(senses):
        if s == "<=":
            S[i, sc] = 1.0
            basis.append(sc)
            sc += 1
        else:
            if s == ">=":
                S[i, sc] = -1.0
                sc += 1
            S[i, ac] = 1.0
            artificial[ac] = True
            basis.append(ac)
            ac += 1

    T = np.zeros((m + 1, N + 1))
    T[:m, :N] = S
    T[:m, -1] = b
    tab = _Tableau(T, basis)

    if n_art:
        tab.set_objective(artificial.astype(float))
        status = tab.run(np.ones(N, dtype=bool), opt_tol, max_iter)
        if status == ITERATION_LIMIT:
            return LpSolution(ITERATION_LIMIT, _primal(tab, n), math.nan, iterations=tab.iterations)
        if -tab.T[m, -1] > feas_tol:
            return LpSolution(INFEASIBLE, _primal(tab, n), math.nan, iterations=tab.iterations)
        _drive_out_artificials(tab, artificial)

    full_cost = np.zeros(N)
    full_cost[:n] = cost
    tab.set_objective(full_cost)
    status = tab.run(~artificial, opt_tol, max_iter)
    x = _primal(tab, n)
    if status == UNBOUNDED:
        return LpSolution(UNBOUNDED, x, -math.inf, iterations=tab.iterations)
    if status == ITERATION_LIMIT:
        return LpSolution(ITERATION_LIMIT, x, float(cost @ x), iterations=tab.iterations)

    x, duals = _refine(S, b, tab, n, full_cost, tab.rows_kept)
    duals = np.where(flip, -duals, duals)
    return LpSolution(OPTIMAL, x, float(cost @ x), duals, tab.iterations)


def _primal(tab: _Tableau, n: int) -> np.ndarray:
    x = np.zeros(n)
    for i, j in enumerate(tab.basis):
        if j < n:
            x[j] = tab.T[i, -1]
    return x


def _drive_out_artificials(tab: _Tableau, artificial: np.ndarray) -> None:
    """Pivot zero-level artificials out of the basis; drop rows that are redundant."""
    kept = tab.rows_kept
    r = 0
    while r < len(tab.basis):
        if artificial[tab.basis[r]]:
            row = tab.T[r, :-1]
            cols = np.flatnonzero(~artificial & (np.abs(row) > 1e-9))
            if len(cols):
                tab.pivot(r, int(cols[0]))
            else:
                tab.T = np.delete(tab.T, r, axis=0)
                del tab.basis[r]
                del kept[r]
                continue
        r += 1


def _refine(S, b, tab, n, full_cost, kept_rows):
    """Recompute the basic solution and row duals directly from the final basis."""
    basis = tab.basis
    B = S[np.ix_(kept_rows, basis)]
    xb = np.linalg.solve(B, b[kept_rows])
    x = np.zeros(S.shape[1])
    x[basis] = xb
    x[np.abs(x) < 1e-13] = 0.0
    y_kept = np.linalg.solve(B.T, full_cost[basis])
    duals = np.zeros(S.shape[0])
    duals[kept_rows] = y_kept
    return x[:n], duals
