"""Slow, independent reference computations used to cross-check the package.

Nothing here imports from ``steiner``: field arithmetic, elimination, subspace
enumeration and cover counting are all redone from scratch.
"""

from __future__ import annotations

import itertools
from collections import Counter

import numpy as np


class PolyField:
    """GF(p^n) as coefficient tuples (constant term first), multiplied by schoolbook."""

    def __init__(self, p: int, poly: tuple[int, ...]):
        self.p = p
        self.n = len(poly) - 1
        self.poly = poly
        self.q = p**self.n

    def vec(self, code: int) -> list[int]:
        out = []
        for _ in range(self.n):
            code, r = divmod(code, self.p)
            out.append(r)
        return out

    def code(self, vec) -> int:
        return sum((c % self.p) * self.p**i for i, c in enumerate(vec))

    def add(self, a: int, b: int) -> int:
        return self.code([x + y for x, y in zip(self.vec(a), self.vec(b))])

    def neg(self, a: int) -> int:
        return self.code([-x for x in self.vec(a)])

    def mul(self, a: int, b: int) -> int:
        va, vb = self.vec(a), self.vec(b)
        prod = [0] * (2 * self.n - 1)
        for i, x in enumerate(va):
            for j, y in enumerate(vb):
                prod[i + j] += x * y
        for d in range(len(prod) - 1, self.n - 1, -1):
            c = prod[d] % self.p
            if c:
                for i in range(self.n + 1):
                    prod[d - self.n + i] -= c * self.poly[i]
        return self.code(prod[: self.n])

    def pow(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def powers(self, g: int, count: int) -> list[int]:
        out, c = [], 1
        for _ in range(count):
            out.append(c)
            c = self.mul(c, g)
        return out


def rank_mod_p(rows, p: int) -> int:
    """Dense Gaussian elimination over GF(p), one pivot column at a time."""
    m = np.array(rows, dtype=np.int64) % p
    rank = 0
    for c in range(m.shape[1]):
        nz = np.nonzero(m[rank:, c])[0]
        if len(nz) == 0:
            continue
        piv = rank + nz[0]
        m[[rank, piv]] = m[[piv, rank]]
        m[rank] = m[rank] * pow(int(m[rank, c]), p - 2, p) % p
        others = np.nonzero(m[:, c])[0]
        others = others[others != rank]
        m[others] = (m[others] - np.outer(m[others, c], m[rank])) % p
        rank += 1
        if rank == m.shape[0]:
            break
    return rank


def pair_coverage(blocks) -> Counter:
    cov: Counter = Counter()
    for b in blocks:
        for x, y in itertools.combinations(sorted(b), 2):
            cov[(x, y)] += 1
    return cov


def is_steiner(points, blocks, lam: int = 1) -> bool:
    cov = pair_coverage(blocks)
    return all(cov[pair] == lam for pair in itertools.combinations(sorted(points), 2)) \
        and sum(cov.values()) == lam * len(points) * (len(points) - 1) // 2


def binary_subspaces(v: int, d: int) -> set[frozenset[int]]:
    """All d-dimensional subspaces of F_2^v as frozensets of nonzero vectors."""
    found: set[frozenset[int]] = set()

    def grow(basis: list[int], span: set[int]):
        if len(basis) == d:
            found.add(frozenset(span - {0}))
            return
        for x in range(max(basis, default=0) + 1, 1 << v):
            if x not in span:
                grow(basis + [x], span | {s ^ x for s in span})

    grow([], {0})
    return found


def cover_count_bruteforce(rows: int, supports: list[frozenset[int]]) -> int:
    """Exact covers by checking all 2^n column subsets at once.

    Subset ORs and popcount sums are built by doubling: after column i the
    arrays hold every subset of columns 0..i.
    """
    ors = np.zeros(1, dtype=np.int64)
    sums = np.zeros(1, dtype=np.int64)
    for s in supports:
        m = sum(1 << r for r in s)
        ors = np.concatenate([ors, ors | m])
        sums = np.concatenate([sums, sums + len(s)])
    full = (1 << rows) - 1
    return int(np.count_nonzero((ors == full) & (sums == rows)))


def cover_count_recursive(rows: int, supports: list[frozenset[int]]) -> int:
    """Exact covers by the naive 'first uncovered row' recursion."""
    def go(uncovered: frozenset[int], cols: list[frozenset[int]]) -> int:
        if not uncovered:
            return 1
        r = min(uncovered)
        total = 0
        for c in cols:
            if r in c and c <= uncovered:
                total += go(uncovered - c, [x for x in cols if not x & c])
        return total

    return go(frozenset(range(rows)), list(supports))


def singer_orbits_bruteforce(field: PolyField, subspaces) -> list[list[frozenset[int]]]:
    """Orbits of subspaces under multiplication by x, members listed by orbit."""
    mulx = [field.mul(c, 2) for c in range(field.q)]
    seen: set = set()
    orbits = []
    for s in sorted(subspaces, key=sorted):
        if s in seen:
            continue
        orb, cur = [], s
        while cur not in seen:
            seen.add(cur)
            orb.append(cur)
            cur = frozenset(mulx[c] for c in cur)
        orbits.append(orb)
    return orbits


def km_oracle(v: int, k: int, poly: tuple[int, ...]):
    """(row orbits, column orbits, m) with m[i][j] counted member by member."""
    f = PolyField(2, poly)
    rows = singer_orbits_bruteforce(f, binary_subspaces(v, 2))
    cols = singer_orbits_bruteforce(f, binary_subspaces(v, k))
    m = [[sum(1 for member in col if min(row, key=sorted) <= member) for col in cols]
         for row in rows]
    return rows, cols, m


def fano_subplanes_through_zero(poly: tuple[int, ...] = (1, 0, 0, 0, 1, 0, 0, 0, 0, 1)):
    """Naturally embedded Fano subplanes of the cyclic PG(2,8) that contain point 0.

    Point of a nonzero element = its discrete log mod 73.  Every subplane through
    point 0 is the GF(2)-span of 1, s*x^a, t*x^b for GF(8) scalars s, t.
    """
    f = PolyField(2, poly)
    label = [0] * f.q
    c = 1
    for e in range(f.q - 1):
        label[c] = e % 73
        c = f.mul(c, 2)
    scalars = f.powers(f.pow(2, 73), 7)
    xs = f.powers(2, 73)

    def line_through_zero(a: int) -> set[int]:
        return {label[1 ^ f.mul(s, xs[a])] for s in scalars} | {0, a}

    found: set[frozenset[int]] = set()
    for a in range(1, 73):
        on = line_through_zero(a)
        for b in range(a + 1, 73):
            if b in on:
                continue
            for s in scalars:
                u = f.mul(s, xs[a])
                for t in scalars:
                    w = f.mul(t, xs[b])
                    span = (1, u, w, 1 ^ u, 1 ^ w, u ^ w, 1 ^ u ^ w)
                    found.add(frozenset(label[z] for z in span))
    return found


def translate_orbits(sets, n: int = 73) -> set[tuple[int, ...]]:
    """Canonical (least sorted tuple) representative of each Z_n translate orbit."""
    return {min(tuple(sorted((p + j) % n for p in s)) for j in range(n)) for s in sets}
