"""Isomorphism testing for block designs.

Non-isomorphism is certified cheaply where possible (p-ranks, block
intersection distribution, and point invariants refined along blocks).  When
the invariants agree, a backtracking search looks for a point bijection.  For
linear spaces (lambda = 1) the search propagates: two mapped points fix the
image of their line, and two mapped lines fix the image of their meet, so a
handful of base points usually determine the whole map.  Mapped lines must
also agree on the crossing counts below, which prunes wrong branches early in
designs far from projective geometry.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .design import Design
from .field import prime_factors
from .rank import p_rank

# line pairs through a common point, summed over points
CROSSING_BUDGET = 400_000


@dataclass
class IsoResult:
    isomorphic: bool
    witness: dict[int, int] | None = None
    reason: str = ""
    nodes: int = 0

    def __bool__(self) -> bool:
        return self.isomorphic


class _Structure:
    """Index-based view of a design used by the search."""

    def __init__(self, d: Design):
        self.d = d
        self.v = d.v
        arr = d.block_array()
        self.blocks = [tuple(int(x) for x in row) for row in arr]
        self.block_sets = [frozenset(b) for b in self.blocks]
        self.through: list[list[int]] = [[] for _ in range(self.v)]
        for j, blk in enumerate(self.blocks):
            for x in blk:
                self.through[x].append(j)
        self.block_index = Counter(frozenset(b) for b in self.blocks)
        self.linear = d.lam == 1 and len(self.block_index) == len(self.blocks)
        self.line_of: dict[tuple[int, int], int] = {}
        if self.linear:
            for j, blk in enumerate(self.blocks):
                for x, y in itertools.permutations(blk, 2):
                    if (x, y) in self.line_of:
                        self.linear = False
                    self.line_of[x, y] = j
        self.crossing: dict[tuple[int, int], int] | None = None
        self.line_colour: list | None = None
        work = sum(len(t) * (len(t) - 1) // 2 for t in self.through)
        if self.linear and d.k >= 3 and work <= CROSSING_BUDGET:
            self._compute_crossings()

    def meet(self, a: int, b: int) -> int | None:
        common = self.block_sets[a] & self.block_sets[b]
        return next(iter(common)) if common else None

    def _compute_crossings(self) -> None:
        """For lines L, M through P: how many pairs of their transversals meet.

        Transversals join a point of L - P to a point of M - P; only pairs with
        distinct endpoints on both lines are counted.  Every such pair meets in
        a projective space.
        """
        crossing: dict[tuple[int, int], int] = {}
        for p in range(self.v):
            lines = self.through[p]
            others = [[x for x in self.blocks[j] if x != p] for j in lines]
            for i1, i2 in itertools.combinations(range(len(lines)), 2):
                trans = [(x, y, self.block_sets[self.line_of[x, y]])
                         for x in others[i1] for y in others[i2]]
                cnt = 0
                for (x, y, t), (x2, y2, t2) in itertools.combinations(trans, 2):
                    if x != x2 and y != y2 and not t.isdisjoint(t2):
                        cnt += 1
                crossing[lines[i1], lines[i2]] = crossing[lines[i2], lines[i1]] = cnt
        self.crossing = crossing
        per_line: list[Counter] = [Counter() for _ in self.blocks]
        for (la, _), cnt in crossing.items():
            per_line[la][cnt] += 1
        self.line_colour = [tuple(sorted(c.items())) for c in per_line]

    def point_profile(self) -> list[tuple]:
        out = []
        for p in range(self.v):
            hist = Counter(self.crossing[a, b]
                           for a, b in itertools.combinations(self.through[p], 2))
            out.append(tuple(sorted(hist.items())))
        return out


def intersection_distribution(d: Design) -> Counter:
    """Histogram of |B ∩ B'| over unordered pairs of blocks."""
    through: list[list[int]] = [[] for _ in range(d.v)]
    idx = d.point_index()
    for j, blk in enumerate(d.blocks):
        for x in blk:
            through[idx[x]].append(j)
    pair_hits: Counter = Counter()
    for t in through:
        for a, b in itertools.combinations(t, 2):
            pair_hits[a, b] += 1
    hist = Counter(pair_hits.values())
    hist[0] = d.b * (d.b - 1) // 2 - sum(hist.values())
    return hist


def transversal_profile(d: Design) -> list[tuple]:
    """Per-point histogram of crossing counts over pairs of lines through the point."""
    s = _Structure(d)
    if s.crossing is None:
        raise ValueError("transversal profile needs a linear space with k >= 3 within budget")
    return s.point_profile()


def _joint_refine(sa: _Structure, sb: _Structure, ca: list, cb: list) -> tuple[list[int], list[int]]:
    """Colour refinement along blocks, run on both designs in one colour namespace."""
    cur_a, cur_b = ca, cb
    while True:
        table = {c: i for i, c in enumerate(sorted(set(cur_a) | set(cur_b), key=repr))}
        a = [table[c] for c in cur_a]
        b = [table[c] for c in cur_b]
        raw_a = _signature(sa, a)
        raw_b = _signature(sb, b)
        if len(set(raw_a)) == len(set(a)) and len(set(raw_b)) == len(set(b)):
            return a, b
        cur_a, cur_b = raw_a, raw_b


def _signature(s: _Structure, col: list[int]) -> list:
    block_sig = [tuple(sorted(col[x] for x in blk)) for blk in s.blocks]
    return [(col[x], tuple(sorted(block_sig[j] for j in s.through[x]))) for x in range(s.v)]


def _rank_primes(d: Design) -> list[int]:
    if d.k < 2 or (d.lam * (d.v - 1)) % (d.k - 1):
        return []
    n = d.lam * (d.v - 1) // (d.k - 1) - d.lam
    return prime_factors(n) if n > 1 else []


def designs_isomorphic(a: Design, b: Design, use_invariants: bool = True) -> IsoResult:
    """Decide isomorphism; the witness maps a's point labels to b's."""
    if (a.v, a.k, a.b, a.lam) != (b.v, b.k, b.b, b.lam):
        return IsoResult(False, reason="parameters differ")
    if Counter(map(len, a.blocks)) != Counter(map(len, b.blocks)):
        return IsoResult(False, reason="block sizes differ")
    if use_invariants:
        for p in _rank_primes(a):
            ra, rb = p_rank(a, p), p_rank(b, p)
            if ra != rb:
                return IsoResult(False, reason=f"{p}-rank {ra} != {rb}")
        if intersection_distribution(a) != intersection_distribution(b):
            return IsoResult(False, reason="block intersection distribution differs")
    sa, sb = _Structure(a), _Structure(b)
    if sorted(sa.block_index.values()) != sorted(sb.block_index.values()):
        return IsoResult(False, reason="repeated-block pattern differs")
    if sa.linear != sb.linear:
        return IsoResult(False, reason="only one design is a linear space")
    col_a: list = [len(t) for t in sa.through]
    col_b: list = [len(t) for t in sb.through]
    if sa.crossing is not None and sb.crossing is not None:
        if Counter(sa.line_colour) != Counter(sb.line_colour):
            return IsoResult(False, reason="line crossing profile differs")
        pa, pb = sa.point_profile(), sb.point_profile()
        if Counter(pa) != Counter(pb):
            return IsoResult(False, reason="transversal profile differs")
        col_a = list(zip(col_a, pa))
        col_b = list(zip(col_b, pb))
    else:
        sa.crossing = sb.crossing = None
    col_a, col_b = _joint_refine(sa, sb, col_a, col_b)
    if Counter(col_a) != Counter(col_b):
        return IsoResult(False, reason="refined point colours differ")
    search = _Search(sa, sb, col_a, col_b)
    phi = search.run()
    if phi is None:
        return IsoResult(False, reason="exhaustive search found no bijection", nodes=search.nodes)
    witness = {a.points[i]: b.points[phi[i]] for i in range(a.v)}
    return IsoResult(True, witness, "bijection found", search.nodes)


class _Conflict(Exception):
    pass


class _Search:
    """Depth-first search over partial maps (phi, inverse, line map, ...)."""

    def __init__(self, sa: _Structure, sb: _Structure, col_a: list[int], col_b: list[int]):
        self.sa, self.sb = sa, sb
        self.col_a, self.col_b = col_a, col_b
        self.nodes = 0
        self.by_colour: dict[int, list[int]] = {}
        for y, c in enumerate(col_b):
            self.by_colour.setdefault(c, []).append(y)

    def run(self) -> list[int] | None:
        v = self.sa.v
        state = ([-1] * v, [-1] * v, {}, {}, [], [])
        return self._branch(state)

    def _branch(self, state) -> list[int] | None:
        self.nodes += 1
        x, candidates = self._next_point(state)
        if x is None:
            phi = state[0]
            return phi if self._check_blocks(phi) else None
        for y in candidates:
            child = _copy(state)
            try:
                self._assign(child, x, y)
            except _Conflict:
                continue
            found = self._branch(child)
            if found is not None:
                return found
        return None

    def _next_point(self, state) -> tuple[int | None, list[int]]:
        """Unmapped point with the fewest possible images.

        Points on a mapped line can only go to the free points of its image
        line; otherwise any free point of the same colour is a candidate.
        """
        phi, inv, psi = state[0], state[1], state[2]
        best = None
        for la, lb in psi.items():
            free_a = [p for p in self.sa.blocks[la] if phi[p] == -1]
            if not free_a:
                continue
            free_b = [p for p in self.sb.blocks[lb]
                      if inv[p] == -1 and self.col_b[p] == self.col_a[free_a[0]]]
            if best is None or len(free_b) < len(best[1]):
                best = (free_a[0], free_b)
                if len(free_b) <= 1:
                    break
        if best is not None:
            return best
        try:
            x = phi.index(-1)
        except ValueError:
            return None, []
        return x, [y for y in self.by_colour[self.col_a[x]] if inv[y] == -1]

    def _assign(self, state, x: int, y: int) -> None:
        phi, inv, psi, psi_inv, mapped_pts, mapped_lines = state
        sa, sb = self.sa, self.sb
        check_cross = sa.crossing is not None
        queue = [(x, y)]
        while queue:
            x, y = queue.pop()
            if phi[x] == y:
                continue
            if phi[x] != -1 or inv[y] != -1 or self.col_a[x] != self.col_b[y]:
                raise _Conflict
            phi[x], inv[y] = y, x
            if not sa.linear:
                mapped_pts.append(x)
                continue
            new_lines = []
            for m in mapped_pts:
                la, lb = sa.line_of[x, m], sb.line_of[y, phi[m]]
                cur = psi.get(la)
                if cur is None:
                    if lb in psi_inv:
                        raise _Conflict
                    if check_cross and sa.line_colour[la] != sb.line_colour[lb]:
                        raise _Conflict
                    psi[la], psi_inv[lb] = lb, la
                    new_lines.append((la, lb))
                elif cur != lb:
                    raise _Conflict
            mapped_pts.append(x)
            for la, lb in new_lines:
                for ma, mb in mapped_lines:
                    c = sa.meet(la, ma)
                    d = sb.meet(lb, mb)
                    if (c is None) != (d is None):
                        raise _Conflict
                    if c is None:
                        continue
                    if check_cross and sa.crossing[la, ma] != sb.crossing[lb, mb]:
                        raise _Conflict
                    if phi[c] != d:
                        queue.append((c, d))
                mapped_lines.append((la, lb))
                self._force_last(state, la, lb, queue)

    def _force_last(self, state, la: int, lb: int, queue: list) -> None:
        phi, inv = state[0], state[1]
        free_a = [p for p in self.sa.blocks[la] if phi[p] == -1]
        free_b = [p for p in self.sb.blocks[lb] if inv[p] == -1]
        if len(free_a) != len(free_b):
            raise _Conflict
        if len(free_a) == 1:
            queue.append((free_a[0], free_b[0]))

    def _check_blocks(self, phi: list[int]) -> bool:
        image = Counter(frozenset(phi[x] for x in blk) for blk in self.sa.blocks)
        return image == self.sb.block_index


def _copy(state):
    phi, inv, psi, psi_inv, pts, lines = state
    return (phi[:], inv[:], dict(psi), dict(psi_inv), pts[:], lines[:])
