"""Primer cover solvers: G-POT, G-FIX, G-VAR, cover verification and an exact oracle.

G-POT grows a primer set by the largest increase of the potential

    phi(P) = sum_i min(L, |fbar_i| + |rbar_i|)

where fbar_i / rbar_i are the longest prefixes of f^i / r^i covered by P.
phi reaches n*L exactly when P is an L-restricted cover.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

import numpy as np

from . import kernels
from .instances import instance_sha256
from .report import SolutionReport, Witness
from .seq import (
    FORWARD,
    REVERSE,
    CandidateSet,
    HybridizationIndex,
    Instance,
    PrimerLike,
    build_index,
    enumerate_candidates,
    half_threshold,
    hybridization_position,
)

DEFAULT_SIZE_CAP = 4
DEFAULT_BUDGET = 10**7
BUDGET_ENV = "PRIMERSET_ORACLE_BUDGET"


class InfeasibleInstanceError(ValueError):
    """No candidate set can cover the listed (1-based) targets."""

    def __init__(self, message: str, targets: list[int]):
        super().__init__(message)
        self.targets = targets


class OracleBudgetError(RuntimeError):
    pass


def oracle_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    return int(os.environ.get(BUDGET_ENV, DEFAULT_BUDGET))


@dataclass
class CoverState:
    """Covered prefix lengths per target plus the cached potential."""

    L: int
    forward: list[int]
    reverse: list[int]
    selected: list[str] = field(default_factory=list)
    potential: int = 0

    @classmethod
    def empty(cls, n: int, L: int) -> CoverState:
        return cls(L, [0] * n, [0] * n)

    def recompute_potential(self) -> int:
        return sum(min(self.L, f + r) for f, r in zip(self.forward, self.reverse))

    def add(self, p: PrimerLike, index: HybridizationIndex) -> int:
        """Insert ``p``; returns the increase of the potential."""
        before = self.potential
        for target, strand, t in index.occurrences(p):
            side = self.forward if strand == "forward" else self.reverse
            if t > side[target - 1]:
                side[target - 1] = t
        self.selected.append(str(p))
        self.potential = self.recompute_potential()
        return self.potential - before


def gain(p: PrimerLike, target_id: int, state: CoverState, index: HybridizationIndex) -> int:
    f = state.forward[target_id - 1]
    r = state.reverse[target_id - 1]
    L = state.L
    if f + r >= L:
        return 0
    delta = 0
    t = index.position(p, target_id, FORWARD)
    if t is not None and t > f:
        delta += t - f
    t = index.position(p, target_id, REVERSE)
    if t is not None and t > r:
        delta += t - r
    return min(delta, L - (f + r))


def total_gain(p: PrimerLike, state: CoverState, index: HybridizationIndex) -> int:
    touched = {target for target, _, _ in index.occurrences(p)}
    return sum(gain(p, i, state, index) for i in touched)


def potential(instance: Instance, primers: Iterable[PrimerLike]) -> int:
    """phi(P) recomputed from scratch by direct window scans."""
    primers = list(primers)
    total = 0
    for tp in instance.targets:
        f = max((hybridization_position(p, tp.forward) or 0 for p in primers), default=0)
        r = max((hybridization_position(p, tp.reverse) or 0 for p in primers), default=0)
        total += min(instance.L, f + r)
    return total


@dataclass
class CoverCheck:
    witnesses: list[Witness]
    violations: list[int]
    pair_counts: dict[int, int]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_cover(instance: Instance, primers: Iterable[PrimerLike]) -> CoverCheck:
    """Check the L-restricted cover conditions for every target.

    Each witness uses the largest forward and reverse positions reached by the
    set; ``pair_counts`` gives the number of distinct primer sets {p, p'}
    satisfying the conditions per target (1 means unique amplification).
    """
    primers = list(primers)
    n, L = instance.n, instance.L
    if not primers:
        return CoverCheck([], [t.id for t in instance.targets], {t.id: 0 for t in instance.targets})
    cands = CandidateSet.from_primers(primers, k=instance.k)
    index = build_index(instance, cands)
    owner = np.repeat(np.arange(len(cands)), np.diff(index.offsets))
    order = np.lexsort((owner, index.strands, index.targets))
    tgt = index.targets[order].tolist()
    strand = index.strands[order].tolist()
    pos = index.positions[order].tolist()
    own = owner[order].tolist()
    labels = cands.labels(range(len(cands)))

    per_target: list[tuple[list, list]] = [([], []) for _ in range(n)]
    for i, s, t, p in zip(tgt, strand, pos, own):
        per_target[i][s].append((t, p))

    witnesses, violations, counts = [], [], {}
    for i, tp in enumerate(instance.targets):
        fwd, rev = per_target[i]
        pairs = {frozenset((p, q)) for t, p in fwd for u, q in rev if t + u >= L}
        counts[tp.id] = len(pairs)
        if not pairs:
            violations.append(tp.id)
            continue
        t, p = max(fwd, key=lambda e: (e[0], -e[1]))
        u, q = max(rev, key=lambda e: (e[0], -e[1]))
        witnesses.append(Witness(tp.id, labels[p], t, labels[q], u, 2 * L + tp.locus_length - (t + u), len(pairs)))
    return CoverCheck(witnesses, violations, counts)


def _candidates(instance: Instance, candidates, window: str) -> CandidateSet:
    if candidates is None:
        return enumerate_candidates(instance, window)
    if not isinstance(candidates, CandidateSet):
        candidates = CandidateSet.from_primers(candidates, k=instance.k)
    if candidates.k != instance.k:
        raise ValueError(f"candidate length {candidates.k} != k={instance.k}")
    if candidates.max_degeneracy() > instance.delta:
        raise ValueError(f"candidate degeneracy {candidates.max_degeneracy()} exceeds delta={instance.delta}")
    return candidates


def _filter_index(index: HybridizationIndex, keep: np.ndarray) -> HybridizationIndex:
    owner = np.repeat(np.arange(len(index)), np.diff(index.offsets))[keep]
    offsets = np.zeros(len(index) + 1, dtype=np.int64)
    np.cumsum(np.bincount(owner, minlength=len(index)), out=offsets[1:])
    return HybridizationIndex(
        index.candidates, offsets, index.targets[keep], index.strands[keep], index.positions[keep], index.n, index.L
    )


def _report(instance, algorithm, index, selected, progress, seconds, seed) -> SolutionReport:
    primers = index.candidates.labels(selected)
    check = verify_cover(instance, primers)
    if not check.ok:
        raise AssertionError(f"{algorithm} produced an invalid cover; failing targets {check.violations}")
    return SolutionReport(
        algorithm=algorithm,
        primers=primers,
        witnesses=check.witnesses,
        seconds=seconds,
        seed=seed,
        parameters={"n": instance.n, "L": instance.L, "k": instance.k, "delta": instance.delta},
        instance_sha256=instance_sha256(instance),
        progress=[int(v) for v in progress],
    )


def _uncoverable(instance: Instance, best: np.ndarray) -> list[int]:
    bad = np.flatnonzero((best[:, 0] + best[:, 1] < instance.L) | (best == 0).any(axis=1))
    return [instance.targets[i].id for i in bad]


def _top_up(index: HybridizationIndex, selected: list[int], progress: list[int]):
    """Cover strings the potential left empty.

    Only reachable for k = 1, where a single side can land at t = L and
    saturate min(L, F + R) on its own. Any hit on the empty side then suffices.
    """
    owner = np.repeat(np.arange(len(index)), np.diff(index.offsets))
    hit = np.zeros((index.n, 2), dtype=bool)
    for p in selected:
        sl = slice(index.offsets[p], index.offsets[p + 1])
        hit[index.targets[sl], index.strands[sl]] = True
    while not hit.all():
        open_ = ~hit[index.targets, index.strands]
        p = int(np.argmax(np.bincount(owner[open_], minlength=len(index))))
        sl = slice(index.offsets[p], index.offsets[p + 1])
        hit[index.targets[sl], index.strands[sl]] = True
        selected.append(p)
        progress.append(progress[-1])
    return selected, progress


def solve_gpot(instance: Instance, candidates=None, *, backend: str | None = None, seed=None) -> SolutionReport:
    start = time.perf_counter()
    cands = _candidates(instance, candidates, "full")
    index = build_index(instance, cands)
    bad = _uncoverable(instance, index.max_positions())
    if bad:
        raise InfeasibleInstanceError(f"no candidate pair covers targets {bad} within L={instance.L}", bad)
    selected, progress, complete = kernels.greedy_potential(index, backend)
    if not complete:
        raise RuntimeError("greedy stalled below n*L on a feasible instance")
    selected, progress = _top_up(index, list(selected), list(progress))
    return _report(instance, "gpot", index, selected, progress, time.perf_counter() - start, seed)


def solve_gfix(instance: Instance, candidates=None, *, backend: str | None = None, seed=None) -> SolutionReport:
    """Classical greedy set cover where a string counts only when hit at t >= ceil(L/2)."""
    start = time.perf_counter()
    cands = _candidates(instance, candidates, "half")
    index = build_index(instance, cands)
    index = _filter_index(index, index.positions >= half_threshold(instance.L))
    best = index.max_positions()
    missing = sorted({instance.targets[i].id for i in np.flatnonzero((best == 0).any(axis=1))})
    if missing:
        raise InfeasibleInstanceError(f"targets {missing} have a string with no half-window candidate", missing)
    selected, progress, complete = kernels.greedy_count(index, best, kernels.MODE_FIX, backend)
    if not complete:
        raise RuntimeError("G-FIX stalled on a feasible instance")
    return _report(instance, "gfix", index, selected, progress, time.perf_counter() - start, seed)


def solve_gvar(instance: Instance, candidates=None, *, backend: str | None = None, seed=None) -> SolutionReport:
    """Full-window greedy set cover; covering one side at t truncates the other to t' >= L - t."""
    start = time.perf_counter()
    cands = _candidates(instance, candidates, "full")
    index = build_index(instance, cands)
    best = index.max_positions()
    bad = _uncoverable(instance, best)
    if bad:
        raise InfeasibleInstanceError(f"no candidate pair covers targets {bad} within L={instance.L}", bad)
    selected, progress, complete = kernels.greedy_count(index, best, kernels.MODE_VAR, backend)
    if not complete:
        raise RuntimeError("G-VAR stalled on a feasible instance")
    return _report(instance, "gvar", index, selected, progress, time.perf_counter() - start, seed)


SOLVERS = {"gpot": solve_gpot, "gfix": solve_gfix, "gvar": solve_gvar}


@dataclass(frozen=True)
class OracleResult:
    optimal_size: int
    cover: tuple[str, ...]
    search_space_size: int


def brute_force_optimal(
    instance: Instance,
    candidates=None,
    size_cap: int = DEFAULT_SIZE_CAP,
    budget: int | None = None,
) -> OracleResult:
    """Exact minimum cover by increasing-size subset enumeration.

    Positions come from direct window scans, not from the index.
    """
    budget = oracle_budget(budget)
    cands = list(_candidates(instance, candidates, "full"))
    if math.comb(len(cands), min(size_cap, len(cands))) > budget:
        raise OracleBudgetError(
            f"C({len(cands)}, {size_cap}) subsets exceed the oracle budget {budget}"
        )
    L = instance.L
    fpos = np.array([[hybridization_position(p, t.forward) or 0 for t in instance.targets] for p in cands])
    rpos = np.array([[hybridization_position(p, t.reverse) or 0 for t in instance.targets] for p in cands])
    if cands and not np.all(fpos.max(axis=0) + rpos.max(axis=0) >= L):
        bad = [instance.targets[i].id for i in np.flatnonzero(fpos.max(axis=0) + rpos.max(axis=0) < L)]
        raise InfeasibleInstanceError(f"targets {bad} cannot be covered by the candidate set", bad)
    examined = 0
    for size in range(1, min(size_cap, len(cands)) + 1):
        for subset in combinations(range(len(cands)), size):
            examined += 1
            rows = list(subset)
            if np.all(fpos[rows].max(axis=0) + rpos[rows].max(axis=0) >= L):
                return OracleResult(size, tuple(cands[j] for j in subset), examined)
    raise OracleBudgetError(f"no cover of size <= {size_cap}; raise size_cap to search further")
