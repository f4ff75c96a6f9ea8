"""Compiled Phase A / Phase B imprint search.

Imprints are subsets of at most 128 sublines stored as (lo, hi) uint64 pairs.
``Dn[d]``/``D[d]`` hold the candidates disjoint from the first d choices; the
Phase A list at depth d is the part of D[d] containing the selected subline.
"""

from __future__ import annotations

import numba
import numpy as np

# counters layout
PHASE_A_NODES, GENERATED, PROCESSED, PRUNED, PHASE_B_NODES, FOUND = range(6)
N_COUNTERS = 6


@numba.njit(cache=True, inline="always")
def _bit(lo, hi, s):
    if s < 64:
        return (lo >> np.uint64(s)) & np.uint64(1)
    return (hi >> np.uint64(s - 64)) & np.uint64(1)


@numba.njit(cache=True)
def _phase_b(lo, hi, cand, ncand, ulo, uhi, need_more, picks):
    """Depth-first search for ``need_more`` pairwise disjoint candidates.

    Later levels only see candidates after the current one, so every subset
    is tried once.  Returns (found, nodes); on success ``picks`` holds them.
    """
    levels = need_more + 1
    buf = np.empty((levels, ncand), dtype=np.int64)
    bn = np.zeros(levels, dtype=np.int64)
    bpos = np.zeros(levels, dtype=np.int64)
    blo = np.zeros(levels, dtype=np.uint64)
    bhi = np.zeros(levels, dtype=np.uint64)
    for i in range(ncand):
        buf[0, i] = cand[i]
    bn[0] = ncand
    blo[0] = ulo
    bhi[0] = uhi
    nodes = 0
    t = 0
    while t >= 0:
        if bpos[t] >= bn[t]:
            t -= 1
            continue
        c = buf[t, bpos[t]]
        bpos[t] += 1
        picks[t] = c
        u_lo = blo[t] | lo[c]
        u_hi = bhi[t] | hi[c]
        need_after = need_more - (t + 1)
        if need_after == 0:
            nodes += 1
            return True, nodes
        n = 0
        for p in range(bpos[t], bn[t]):
            x = buf[t, p]
            if (lo[x] & u_lo) == 0 and (hi[x] & u_hi) == 0:
                buf[t + 1, n] = x
                n += 1
        if n >= need_after:
            nodes += 1
            bn[t + 1] = n
            bpos[t + 1] = 0
            blo[t + 1] = u_lo
            bhi[t + 1] = u_hi
            t += 1
    return False, nodes


@numba.njit(cache=True)
def search(lo, hi, first_list, s_bits, need, stop_on_first):
    """Phase A over ``first_list`` followed by Phase B at every partial family.

    ``s_bits[0]`` is the subline of the first list; the others are selected
    adaptively.  Returns (counters, solution) with solution padded by -1.
    """
    n_all = lo.shape[0]
    depth = s_bits.shape[0]
    counters = np.zeros(N_COUNTERS, dtype=np.int64)
    solution = np.full(need, -1, dtype=np.int64)
    D = np.empty((depth + 1, n_all), dtype=np.int64)
    Dn = np.zeros(depth + 1, dtype=np.int64)
    A = np.empty((depth, n_all), dtype=np.int64)
    An = np.zeros(depth, dtype=np.int64)
    pos = np.zeros(depth, dtype=np.int64)
    Ulo = np.zeros(depth + 1, dtype=np.uint64)
    Uhi = np.zeros(depth + 1, dtype=np.uint64)
    remaining = np.zeros(depth, dtype=np.int64)  # bitmask over s indices
    chosen = np.full(depth, -1, dtype=np.int64)
    picks = np.full(need, -1, dtype=np.int64)
    for x in range(n_all):
        D[0, x] = x
    Dn[0] = n_all
    for i in range(first_list.shape[0]):
        A[0, i] = first_list[i]
    An[0] = first_list.shape[0]
    remaining[0] = ((1 << depth) - 1) & ~1
    d = 0
    while d >= 0:
        if pos[d] >= An[d]:
            d -= 1
            continue
        m = A[d, pos[d]]
        pos[d] += 1
        chosen[d] = m
        counters[PHASE_A_NODES] += 1
        u_lo = Ulo[d] | lo[m]
        u_hi = Uhi[d] | hi[m]
        Ulo[d + 1] = u_lo
        Uhi[d + 1] = u_hi
        n = 0
        for p in range(Dn[d]):
            x = D[d, p]
            if (lo[x] & u_lo) == 0 and (hi[x] & u_hi) == 0:
                D[d + 1, n] = x
                n += 1
        Dn[d + 1] = n
        rem = remaining[d]
        best_i = -1
        best_c = 0
        if rem != 0 and d + 1 < need:
            for i in range(depth):
                if (rem >> i) & 1:
                    c = 0
                    for p in range(n):
                        x = D[d + 1, p]
                        if _bit(lo[x], hi[x], s_bits[i]):
                            c += 1
                    if best_i < 0 or c > best_c:
                        best_i = i
                        best_c = c
        if best_i >= 0 and best_c > 0:
            k = 0
            for p in range(n):
                x = D[d + 1, p]
                if _bit(lo[x], hi[x], s_bits[best_i]):
                    A[d + 1, k] = x
                    k += 1
            An[d + 1] = k
            pos[d + 1] = 0
            remaining[d + 1] = rem & ~(1 << best_i)
            d += 1
            continue
        # leaf: a Phase A partial family of d + 1 orbits
        counters[GENERATED] += 1
        need_more = need - (d + 1)
        if n < need_more:
            counters[PRUNED] += 1
            continue
        counters[PROCESSED] += 1
        found = need_more == 0
        if not found:
            found, nodes = _phase_b(lo, hi, D[d + 1], n, u_lo, u_hi, need_more, picks)
            counters[PHASE_B_NODES] += nodes
        if found:
            counters[FOUND] += 1
            for i in range(d + 1):
                solution[i] = chosen[i]
            for i in range(need_more):
                solution[d + 1 + i] = picks[i]
            if stop_on_first:
                return counters, solution
    return counters, solution


def split_masks(masks: list[int]) -> tuple[np.ndarray, np.ndarray]:
    full = (1 << 64) - 1
    lo = np.array([m & full for m in masks], dtype=np.uint64)
    hi = np.array([(m >> 64) & full for m in masks], dtype=np.uint64)
    return lo, hi
