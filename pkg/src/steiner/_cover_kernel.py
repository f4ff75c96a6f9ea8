"""Compiled Algorithm X over uint64 word arrays.

Mirrors the pure Python solver in ``cover`` step for step (same branching
rule, same node accounting) so either engine gives identical statistics.
"""

from __future__ import annotations

import numba
import numpy as np

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)


@numba.njit(cache=True, inline="always")
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return np.int64((x * _H01) >> np.uint64(56))


@numba.njit(cache=True, inline="always")
def _lowbit(x):
    return _popcount((x & (~x + np.uint64(1))) - np.uint64(1))


@numba.njit(cache=True)
def search(row_cols, row_bits, clash, n_rows, n_cols, mode, max_solutions):
    """Depth-first exact cover.

    mode: 0 count, 1 first, 2 all.  Returns (count, nodes, solutions, n_stored)
    where ``solutions`` rows hold chosen column indices padded with -1.
    """
    rw = row_bits.shape[1]
    cw = clash.shape[1]
    depth_max = n_rows + 1
    unc = np.zeros((depth_max + 1, rw), dtype=np.uint64)
    avail = np.zeros((depth_max + 1, cw), dtype=np.uint64)
    cand = np.zeros((depth_max + 1, cw), dtype=np.uint64)
    chosen = np.full(depth_max + 1, -1, dtype=np.int64)
    sols = np.full((max_solutions, depth_max), -1, dtype=np.int64)
    n_stored = 0
    for r in range(n_rows):
        unc[0, r >> 6] |= np.uint64(1) << np.uint64(r & 63)
    for c in range(n_cols):
        avail[0, c >> 6] |= np.uint64(1) << np.uint64(c & 63)
    count = 0
    nodes = 0
    depth = 0
    entering = True
    while depth >= 0:
        if entering:
            nodes += 1
            done = True
            for w in range(rw):
                if unc[depth, w] != 0:
                    done = False
                    break
            if done:
                count += 1
                if mode != 0 and n_stored < max_solutions:
                    for i in range(depth):
                        sols[n_stored, i] = chosen[i]
                    n_stored += 1
                if mode == 1:
                    return count, nodes, sols, n_stored
                depth -= 1
                entering = False
                continue
            best_deg = -1
            best_row = -1
            for w in range(rw):
                u = unc[depth, w]
                while u != 0:
                    b = _lowbit(u)
                    u &= u - np.uint64(1)
                    r = w * 64 + b
                    deg = 0
                    for cwi in range(cw):
                        deg += _popcount(row_cols[r, cwi] & avail[depth, cwi])
                    if best_deg < 0 or deg < best_deg:
                        best_deg = deg
                        best_row = r
                        if deg == 0:
                            break
                if best_deg == 0:
                    break
            if best_deg == 0:
                depth -= 1
                entering = False
                continue
            for cwi in range(cw):
                cand[depth, cwi] = row_cols[best_row, cwi] & avail[depth, cwi]
        # take the next candidate column at this depth
        c = -1
        for cwi in range(cw):
            x = cand[depth, cwi]
            if x != 0:
                b = _lowbit(x)
                cand[depth, cwi] = x & (x - np.uint64(1))
                c = cwi * 64 + b
                break
        if c < 0:
            depth -= 1
            entering = False
            continue
        chosen[depth] = c
        for w in range(rw):
            unc[depth + 1, w] = unc[depth, w] & ~row_bits[c, w]
        for cwi in range(cw):
            avail[depth + 1, cwi] = avail[depth, cwi] & ~clash[c, cwi]
        depth += 1
        entering = True
    return count, nodes, sols, n_stored


def pack(masks: list[int], bits: int) -> np.ndarray:
    words = max(1, (bits + 63) // 64)
    out = np.zeros((len(masks), words), dtype=np.uint64)
    full = (1 << 64) - 1
    for i, m in enumerate(masks):
        for w in range(words):
            out[i, w] = (m >> (64 * w)) & full
    return out
