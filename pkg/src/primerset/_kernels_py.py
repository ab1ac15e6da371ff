"""Pure-Python greedy kernels (fallback for the compiled ``_kernels`` module).

Both kernels run lazy greedy over a CSR occurrence index: every primer's
gain can only shrink as coverage grows, so a stale heap key is an upper
bound and a popped entry whose fresh gain equals its key is the exact
argmax. Heap keys are (-gain, id); ids follow lexicographic primer order,
so ties resolve to the smallest primer string.

Each kernel returns ``(selected_ids, progress_after_each_step, complete)``.
"""

from __future__ import annotations

import heapq

import numpy as np

MODE_FIX = 0
MODE_VAR = 1


def _pot_gain(p, offsets, targets, strands, positions, F, R, L):
    total = 0
    j, end = offsets[p], offsets[p + 1]
    while j < end:
        i = targets[j]
        f, r = F[i], R[i]
        delta = 0
        while j < end and targets[j] == i:
            t = positions[j]
            if strands[j] == 0:
                if t > f:
                    delta += t - f
            elif t > r:
                delta += t - r
            j += 1
        if f + r < L:
            room = L - f - r
            total += delta if delta < room else room
    return total


def greedy_potential(offsets, targets, strands, positions, n, L):
    offsets = offsets.tolist()
    targets = targets.tolist()
    strands = strands.tolist()
    positions = positions.tolist()
    F = [0] * n
    R = [0] * n
    heap = []
    for p in range(len(offsets) - 1):
        g = _pot_gain(p, offsets, targets, strands, positions, F, R, L)
        if g > 0:
            heap.append((-g, p))
    heapq.heapify(heap)

    goal = n * L
    phi = 0
    selected, trace = [], []
    while phi < goal and heap:
        neg, p = heapq.heappop(heap)
        g = _pot_gain(p, offsets, targets, strands, positions, F, R, L)
        if g != -neg:
            if g > 0:
                heapq.heappush(heap, (-g, p))
            continue
        for j in range(offsets[p], offsets[p + 1]):
            i, t = targets[j], positions[j]
            if strands[j] == 0:
                if t > F[i]:
                    F[i] = t
            elif t > R[i]:
                R[i] = t
        phi += g
        selected.append(p)
        trace.append(phi)
    return np.array(selected, dtype=np.int64), np.array(trace, dtype=np.int64), phi >= goal


def _count_gain(p, offsets, targets, strands, positions, cov, best, L, mode, apply=False):
    total = 0
    j, end = offsets[p], offsets[p + 1]
    while j < end:
        i = targets[j]
        tf = tr = 0
        while j < end and targets[j] == i:
            if strands[j] == 0:
                tf = positions[j]
            else:
                tr = positions[j]
            j += 1
        cf, cr = cov[2 * i], cov[2 * i + 1]
        if mode == MODE_FIX:
            hit_f = tf > 0 and cf == 0
            hit_r = tr > 0 and cr == 0
        elif cf and cr:
            continue
        elif cf:
            hit_f, hit_r = False, tr > 0 and tr + cf >= L
        elif cr:
            hit_f, hit_r = tf > 0 and tf + cr >= L, False
        else:
            # a side only counts if the opposite side can still be completed
            hit_f = tf > 0 and tf + best[2 * i + 1] >= L
            hit_r = tr > 0 and tr + best[2 * i] >= L
            if hit_f and hit_r and tf + tr < L:
                if tf >= tr:
                    hit_r = False
                else:
                    hit_f = False
        if apply:
            if hit_f:
                cov[2 * i] = tf
            if hit_r:
                cov[2 * i + 1] = tr
        total += hit_f + hit_r
    return total


def greedy_count(offsets, targets, strands, positions, n, L, best, mode):
    """Greedy over the 2n strings as set-cover elements (G-FIX / G-VAR rules).

    ``best[2i+s]`` is the largest position any candidate reaches on string
    (i, s); with ``mode == MODE_VAR`` covering one side at t restricts the
    other side to positions >= L - t.
    """
    offsets = offsets.tolist()
    targets = targets.tolist()
    strands = strands.tolist()
    positions = positions.tolist()
    best = np.asarray(best).tolist()
    cov = [0] * (2 * n)
    args = (offsets, targets, strands, positions, cov, best, L, mode)
    heap = []
    for p in range(len(offsets) - 1):
        g = _count_gain(p, *args)
        if g > 0:
            heap.append((-g, p))
    heapq.heapify(heap)

    goal = 2 * n
    covered = 0
    selected, trace = [], []
    while covered < goal and heap:
        neg, p = heapq.heappop(heap)
        g = _count_gain(p, *args)
        if g != -neg:
            if g > 0:
                heapq.heappush(heap, (-g, p))
            continue
        _count_gain(p, *args, apply=True)
        covered += g
        selected.append(p)
        trace.append(covered)
    return np.array(selected, dtype=np.int64), np.array(trace, dtype=np.int64), covered >= goal
