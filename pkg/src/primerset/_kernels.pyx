# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled greedy kernels; same contract as ``_kernels_py``."""

import numpy as np

from libcpp.pair cimport pair
from libcpp.queue cimport priority_queue
from libcpp.vector cimport vector

ctypedef long long i64
ctypedef pair[i64, i64] entry

cdef enum:
    MODE_FIX = 0
    MODE_VAR = 1


cdef i64 _pot_gain(i64 p, const i64[:] offsets, const int[:] targets,
                   const signed char[:] strands, const int[:] positions,
                   i64* F, i64* R, i64 L) nogil:
    cdef i64 total = 0, j = offsets[p], end = offsets[p + 1]
    cdef i64 i, f, r, t, delta, room
    while j < end:
        i = targets[j]
        f = F[i]
        r = R[i]
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


def greedy_potential(i64[:] offsets, int[:] targets, signed char[:] strands,
                     int[:] positions, i64 n, i64 L):
    cdef vector[i64] F = vector[i64](n, 0)
    cdef vector[i64] R = vector[i64](n, 0)
    cdef priority_queue[entry] heap
    cdef vector[i64] selected, trace
    cdef i64 p, g, j, i, t, phi = 0, goal = n * L
    cdef i64 n_primers = offsets.shape[0] - 1
    cdef entry top

    with nogil:
        for p in range(n_primers):
            g = _pot_gain(p, offsets, targets, strands, positions, F.data(), R.data(), L)
            if g > 0:
                heap.push(entry(g, -p))
        while phi < goal and not heap.empty():
            top = heap.top()
            heap.pop()
            p = -top.second
            g = _pot_gain(p, offsets, targets, strands, positions, F.data(), R.data(), L)
            if g != top.first:
                if g > 0:
                    heap.push(entry(g, -p))
                continue
            for j in range(offsets[p], offsets[p + 1]):
                i = targets[j]
                t = positions[j]
                if strands[j] == 0:
                    if t > F[i]:
                        F[i] = t
                elif t > R[i]:
                    R[i] = t
            phi += g
            selected.push_back(p)
            trace.push_back(phi)

    return (np.array(selected, dtype=np.int64), np.array(trace, dtype=np.int64), phi >= goal)


cdef i64 _count_gain(i64 p, const i64[:] offsets, const int[:] targets,
                     const signed char[:] strands, const int[:] positions,
                     i64* cov, const i64[:] best, i64 L, int mode, bint apply) nogil:
    cdef i64 total = 0, j = offsets[p], end = offsets[p + 1]
    cdef i64 i, tf, tr, cf, cr
    cdef bint hit_f, hit_r
    while j < end:
        i = targets[j]
        tf = 0
        tr = 0
        while j < end and targets[j] == i:
            if strands[j] == 0:
                tf = positions[j]
            else:
                tr = positions[j]
            j += 1
        cf = cov[2 * i]
        cr = cov[2 * i + 1]
        if mode == MODE_FIX:
            hit_f = tf > 0 and cf == 0
            hit_r = tr > 0 and cr == 0
        elif cf != 0 and cr != 0:
            continue
        elif cf != 0:
            hit_f = False
            hit_r = tr > 0 and tr + cf >= L
        elif cr != 0:
            hit_f = tf > 0 and tf + cr >= L
            hit_r = False
        else:
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


def greedy_count(i64[:] offsets, int[:] targets, signed char[:] strands,
                 int[:] positions, i64 n, i64 L, i64[:] best, int mode):
    cdef vector[i64] cov = vector[i64](2 * n, 0)
    cdef priority_queue[entry] heap
    cdef vector[i64] selected, trace
    cdef i64 p, g, covered = 0, goal = 2 * n
    cdef i64 n_primers = offsets.shape[0] - 1
    cdef entry top

    with nogil:
        for p in range(n_primers):
            g = _count_gain(p, offsets, targets, strands, positions, cov.data(), best, L, mode, False)
            if g > 0:
                heap.push(entry(g, -p))
        while covered < goal and not heap.empty():
            top = heap.top()
            heap.pop()
            p = -top.second
            g = _count_gain(p, offsets, targets, strands, positions, cov.data(), best, L, mode, False)
            if g != top.first:
                if g > 0:
                    heap.push(entry(g, -p))
                continue
            _count_gain(p, offsets, targets, strands, positions, cov.data(), best, L, mode, True)
            covered += g
            selected.push_back(p)
            trace.push_back(covered)

    return (np.array(selected, dtype=np.int64), np.array(trace, dtype=np.int64), covered >= goal)
