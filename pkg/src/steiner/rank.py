"""Rank of point-block incidence matrices over GF(p).

Rows are packed into Python integers: one bit per column over GF(2), and a
(nonzero, sign) pair of bitmasks per row over GF(3), where an entry is 1 when
its nonzero bit is set and its sign bit clear, and 2 when both are set.
"""

from __future__ import annotations

import numpy as np

from .design import Design
from .field import is_prime


def _incidence_rows(d: Design) -> list[int]:
    idx = d.point_index()
    rows = [0] * d.v
    for j, blk in enumerate(d.blocks):
        bit = 1 << j
        for pt in blk:
            rows[idx[pt]] |= bit
    return rows


def rank_gf2(rows: list[int]) -> int:
    """Rank over GF(2) of the rows given as bitmasks."""
    pivots: dict[int, int] = {}
    for r in rows:
        while r:
            top = r.bit_length() - 1
            piv = pivots.get(top)
            if piv is None:
                pivots[top] = r
                break
            r ^= piv
    return len(pivots)


def _gf3_add(am: int, as_: int, bm: int, bs: int) -> tuple[int, int]:
    both = am & bm
    same = both & ~(as_ ^ bs)
    m = (am ^ bm) | same
    # single nonzero keeps its sign; 1+1=2 and 2+2=1 flip it
    s = (am & ~bm & as_) | (bm & ~am & bs) | (same & ~as_)
    return m, s & m


def rank_gf3(rows: list[tuple[int, int]]) -> int:
    """Rank over GF(3) of bitsliced rows ``(nonzero_mask, sign_mask)``."""
    pivots: dict[int, tuple[int, int]] = {}
    for m, s in rows:
        while m:
            top = m.bit_length() - 1
            piv = pivots.get(top)
            if piv is None:
                # scale so the pivot entry is 1
                if (s >> top) & 1:
                    s ^= m
                pivots[top] = (m, s)
                break
            pm, ps = piv
            if (s >> top) & 1:
                # entry is 2: add the pivot row once
                m, s = _gf3_add(m, s, pm, ps)
            else:
                # entry is 1: subtract, i.e. add the negated pivot row
                m, s = _gf3_add(m, s, pm, ps ^ pm)
    return len(pivots)


def rank_mod_p(matrix: np.ndarray, p: int) -> int:
    """Dense Gaussian elimination over GF(p)."""
    a = np.array(matrix, dtype=np.int64) % p
    rows, cols = a.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(a[rank:, c])[0]
        if len(nz) == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            a[[rank, piv]] = a[[piv, rank]]
        a[rank] = a[rank] * pow(int(a[rank, c]), p - 2, p) % p
        below = np.nonzero(a[:, c])[0]
        below = below[below != rank]
        if len(below):
            a[below] = (a[below] - np.outer(a[below, c], a[rank])) % p
        rank += 1
    return rank


def incidence_matrix(d: Design) -> np.ndarray:
    """The v x b 0/1 point-block incidence matrix."""
    m = np.zeros((d.v, d.b), dtype=np.int8)
    arr = d.block_array()
    for j in range(arr.shape[1]):
        m[arr[:, j], np.arange(d.b)] = 1
    return m


def p_rank(d: Design, p: int) -> int:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if p == 2:
        return rank_gf2(_incidence_rows(d))
    if p == 3:
        return rank_gf3([(r, 0) for r in _incidence_rows(d)])
    return rank_mod_p(incidence_matrix(d), p)
