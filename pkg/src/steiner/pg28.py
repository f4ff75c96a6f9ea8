"""Cyclic model of PG(2,8) inside GF(512) and the subplane imprint search.

GF(512) is a 3-dimensional space over its subfield GF(8) = {0} ∪ <x^73>, so
the projective points are the 73 cosets x^t <x^73>.  A point is labelled by
a residue mod 73; multiplying by x shifts every label by one and acts on the
plane as a Singer cycle W of order 73.  Naturally embedded Fano subplanes
are the projective images of GF(2)-subspaces of dimension 3 whose nonzero
vectors lie on 7 distinct points.
"""

from __future__ import annotations

import itertools
import os
import time
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import LabelingMismatch
from .field import FieldTable, default_field

N_POINTS = 73
FIELD_ORDER = 511
SCALAR_STEP = 73  # x^73 generates GF(8)^*
TARGET_LINE = (1, 2, 35, 37, 42, 45, 47, 54, 63)
CACHE_VERSION = 1
ORBITS_NEEDED = 12
SUBLINES_PER_LINE = 84


@dataclass(frozen=True)
class CyclicPlane:
    """Points are labels 0..72; line j is ``base_line + j``; line 0 is the base line.

    ``multiplier`` c relabels the natural residue t (of x^t) as c*t mod 73, and
    ``translation`` is the offset with base_line = c * D0 + translation, where
    D0 is the natural line through residues 0 and 1.
    """

    field: FieldTable
    multiplier: int
    translation: int
    base_line: tuple[int, ...]

    @cached_property
    def lines(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted((p + j) % N_POINTS for p in self.base_line))
                     for j in range(N_POINTS))

    @cached_property
    def line_of(self) -> np.ndarray:
        """73 x 73 table of the line id through two distinct points (-1 on the diagonal)."""
        out = np.full((N_POINTS, N_POINTS), -1, dtype=np.int64)
        for j, line in enumerate(self.lines):
            for a, b in itertools.permutations(line, 2):
                out[a, b] = j
        return out

    @cached_property
    def _unscale(self) -> int:
        return pow(self.multiplier, -1, N_POINTS)

    def label_of(self, code: int) -> int:
        return self.multiplier * (self.field.log_of(code) % N_POINTS) % N_POINTS

    def representative(self, label: int) -> int:
        """The element x^t with t in [0, 73) lying on point ``label``."""
        return self.field.exp(self._unscale * label % N_POINTS)

    @cached_property
    def label_table(self) -> np.ndarray:
        """Point label of every nonzero code; entry 0 is -1."""
        out = np.full(self.field.q, -1, dtype=np.int64)
        for e in range(FIELD_ORDER):
            out[self.field.exp(e)] = self.multiplier * (e % N_POINTS) % N_POINTS
        return out

    @property
    def norm(self) -> tuple[int, int]:
        return self.translation, self.multiplier


def _natural_line(field: FieldTable) -> list[int]:
    """Residues of the GF(8)-span of 1 and x."""
    pts = set()
    for i in range(7):
        a = field.exp(SCALAR_STEP * i)
        pts.add(0)
        for j in range(7):
            b = field.mul(field.exp(SCALAR_STEP * j), field.x)
            pts.add(field.log_of(field.add(a, b)) % N_POINTS)
    pts.add(1)
    return sorted(pts)


def build_plane(field: FieldTable | None = None,
                target: tuple[int, ...] | None = TARGET_LINE) -> CyclicPlane:
    """Plane over GF(2^9), relabelled by the least multiplier making ``target`` a line.

    ``target`` must contain labels 1 and 2.  With ``target=None`` no relabelling
    is done and line 0 is the natural line through 1 and 2.
    """
    if field is None:
        field = default_field(2, 9)
    if field.p != 2 or field.n != 9:
        raise ValueError("the cyclic PG(2,8) model needs GF(2^9)")
    d0 = _natural_line(field)
    want = None if target is None else tuple(sorted(target))
    for c in range(1, N_POINTS):
        scaled = [c * t % N_POINTS for t in d0]
        for s in range(N_POINTS):
            line = tuple(sorted((t + s) % N_POINTS for t in scaled))
            if 1 in line and 2 in line:
                if want is None or line == want:
                    return CyclicPlane(field, c, s, line)
                break
        if want is None:
            break
    raise LabelingMismatch(f"{target} is not a line under any multiplier of the natural labelling")


def is_planar_difference_set(block, n: int = N_POINTS) -> bool:
    diffs = [(a - b) % n for a in block for b in block if a != b]
    return len(diffs) == n - 1 and set(diffs) == set(range(1, n))


# -- sublines -------------------------------------------------------------------

def sublines(plane: CyclicPlane, line: int) -> list[tuple[int, int, int]]:
    """3-point sets of ``line`` whose representatives can be scaled to sum to zero.

    For two points with fixed representatives u, v, the third point is that of
    u + v*s for each of the seven GF(8) scalars s.
    """
    f = plane.field
    pts = plane.lines[line]
    found = set()
    for p, q in itertools.combinations(pts, 2):
        u, w = plane.representative(p), plane.representative(q)
        for i in range(7):
            r = plane.label_of(f.add(u, f.mul(w, f.exp(SCALAR_STEP * i))))
            found.add(tuple(sorted((p, q, r))))
    return sorted(found)


# -- Fano subplanes ---------------------------------------------------------------

@dataclass(frozen=True)
class FanoOrbit:
    representative: tuple[int, ...]
    index: int

    @property
    def members(self) -> list[tuple[int, ...]]:
        return [tuple(sorted((p + j) % N_POINTS for p in self.representative))
                for j in range(N_POINTS)]


@dataclass(frozen=True)
class ImprintRecord:
    orbit: FanoOrbit
    line: int
    imprint: frozenset[tuple[int, int, int]]


@dataclass
class OrbitCatalogue:
    """All Fano subplane orbits plus enumeration statistics."""

    plane: CyclicPlane
    orbits: list[FanoOrbit]
    subplanes_through_zero: int
    generating_triples: int

    @property
    def dedup_factor(self) -> float:
        return self.generating_triples / max(1, self.subplanes_through_zero)


def _pack7(rows: np.ndarray) -> np.ndarray:
    keys = np.zeros(rows.shape[0], dtype=np.int64)
    for c in range(rows.shape[1]):
        keys = (keys << 7) | rows[:, c]
    return keys


def _unpack7(key: int, n: int = 7) -> tuple[int, ...]:
    return tuple((key >> (7 * (n - 1 - i))) & 127 for i in range(n))


def enumerate_fano_orbits(plane: CyclicPlane) -> OrbitCatalogue:
    """Spans of {1, b, c} over GF(2) with 1, b, c on non-collinear points.

    Every subplane through point 0 contains exactly one GF(2)-subspace with
    the vector 1, and each such subspace arises from 24 ordered pairs (b, c).
    Each W-orbit has 7 members through point 0.
    """
    f = plane.field
    labels = plane.label_table
    codes = np.arange(1, f.q, dtype=np.int64)
    p0 = labels[1]
    b_codes = codes[labels[codes] != p0]
    rows = []
    triples = 0
    for b in b_codes:
        line = plane.line_of[p0, labels[b]]
        on_line = np.isin(labels[codes], plane.lines[line])
        c = codes[~on_line]
        triples += len(c)
        vecs = np.stack([np.full_like(c, 1), np.full_like(c, b), c, c ^ 1, c ^ b,
                         np.full_like(c, 1 ^ b), c ^ 1 ^ b], axis=1)
        pts = np.sort(labels[vecs], axis=1)
        rows.append(np.unique(_pack7(pts)))
    keys = np.unique(np.concatenate(rows))
    pts = np.array([_unpack7(int(k)) for k in keys], dtype=np.int64)
    canon = None
    for j in range(N_POINTS):
        shifted = _pack7(np.sort((pts + j) % N_POINTS, axis=1))
        canon = shifted if canon is None else np.minimum(canon, shifted)
    reps = np.unique(canon)
    orbits = [FanoOrbit(_unpack7(int(k)), i) for i, k in enumerate(reps)]
    return OrbitCatalogue(plane, orbits, len(keys), triples)


def secant_triples(plane: CyclicPlane, subplane) -> dict[int, tuple[int, int, int]]:
    """Line id -> the 3 points of ``subplane`` on it, for lines meeting it in 3 points."""
    by_line: dict[int, set] = {}
    for a, b in itertools.combinations(subplane, 2):
        by_line.setdefault(int(plane.line_of[a, b]), set()).update((a, b))
    return {j: tuple(sorted(s)) for j, s in by_line.items() if len(s) == 3}


def imprint(orbit: FanoOrbit, plane: CyclicPlane, line: int) -> ImprintRecord:
    """Distinct 3-point intersections of the orbit's members with ``line``.

    The member rep + (line - j) meets ``line`` in the shift of the rep's secant
    triple on line j, so the 7 secant lines of the representative give them all.
    """
    out = set()
    for j, tri in secant_triples(plane, orbit.representative).items():
        s = (line - j) % N_POINTS
        out.add(tuple(sorted((p + s) % N_POINTS for p in tri)))
    return ImprintRecord(orbit, line, frozenset(out))


# -- cache ----------------------------------------------------------------------

def cache_dir() -> Path:
    env = os.environ.get("STEINER_CACHE_DIR")
    return Path(env) if env else Path.home() / ".cache" / "steiner"


def _cache_header(plane: CyclicPlane, n_orbits: int) -> str:
    s, c = plane.norm
    return f"pg28 field={plane.field.spec} norm={s},{c} orbits={n_orbits} version={CACHE_VERSION}"


def _cache_path(plane: CyclicPlane) -> Path:
    s, c = plane.norm
    poly = "".join(map(str, plane.field.spec.poly))
    return cache_dir() / f"pg28-v{CACHE_VERSION}-{poly}-{s}-{c}.txt"


def write_cache(cat: OrbitCatalogue, path: Path) -> None:
    plane = cat.plane
    lines = [_cache_header(plane, len(cat.orbits)) +
             f" through0={cat.subplanes_through_zero} triples={cat.generating_triples}"]
    lines += [" ".join(map(str, o.representative)) for o in cat.orbits]
    lines.append("imprints line=0")
    for o in cat.orbits:
        rec = imprint(o, plane, 0)
        lines.append(" ".join(",".join(map(str, t)) for t in sorted(rec.imprint)))
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text("\n".join(lines) + "\n")
    tmp.replace(path)


def read_cache(plane: CyclicPlane, path: Path) -> OrbitCatalogue | None:
    try:
        text = path.read_text().splitlines()
    except OSError:
        return None
    if not text:
        return None
    head = dict(tok.split("=", 1) for tok in text[0].split()[1:])
    n = int(head.get("orbits", -1))
    expected = _cache_header(plane, n)
    if not text[0].startswith(expected) or len(text) < n + 1:
        return None
    orbits = [FanoOrbit(tuple(int(x) for x in text[1 + i].split()), i) for i in range(n)]
    return OrbitCatalogue(plane, orbits, int(head["through0"]), int(head["triples"]))


def fano_orbits(plane: CyclicPlane, use_cache: bool = True) -> list[FanoOrbit]:
    return fano_catalogue(plane, use_cache).orbits


def fano_catalogue(plane: CyclicPlane, use_cache: bool = True) -> OrbitCatalogue:
    path = _cache_path(plane)
    if use_cache:
        cat = read_cache(plane, path)
        if cat is not None:
            return cat
    cat = enumerate_fano_orbits(plane)
    if use_cache:
        try:
            write_cache(cat, path)
        except OSError:
            pass
    return cat


# -- perfect-cover search -------------------------------------------------------

@dataclass
class SearchReport:
    solution: list[ImprintRecord] | None
    phase_a_nodes: int
    partial_families: int
    processed: int
    pruned: int
    phase_b_nodes: int
    seconds: float
    candidates: int
    first_list: int

    @property
    def audit_ok(self) -> bool:
        return self.processed + self.pruned == self.partial_families

    def to_json(self) -> dict:
        sol = None
        if self.solution is not None:
            sol = [{"orbit": r.orbit.index, "representative": list(r.orbit.representative),
                    "imprint": sorted(map(list, r.imprint))} for r in self.solution]
        return {"outcome": "none" if sol is None else "solution", "solution": sol,
                "phase_a_nodes": self.phase_a_nodes, "partial_families": self.partial_families,
                "processed": self.processed, "pruned": self.pruned,
                "phase_b_nodes": self.phase_b_nodes, "candidates": self.candidates,
                "first_list": self.first_list, "seconds": round(self.seconds, 3)}


def anchor_sublines(plane: CyclicPlane, line: int) -> list[tuple[int, int, int]]:
    """The seven sublines through the two smallest labels of ``line``."""
    a, b = plane.lines[line][:2]
    return [s for s in sublines(plane, line) if a in s and b in s]


def candidate_list(plane: CyclicPlane, line: int,
                   orbits: list[FanoOrbit] | None = None) -> list[ImprintRecord]:
    """Orbits whose imprint on ``line`` has 7 distinct sublines, in orbit order.

    A member of a perfect cover needs 7 sublines of its own (12 * 7 = 84), so
    orbits with repeated intersections are dropped up front.
    """
    if orbits is None:
        orbits = fano_orbits(plane)
    recs = (imprint(o, plane, line) for o in orbits)
    return [r for r in recs if len(r.imprint) == 7]


def anchor_lists(plane: CyclicPlane, line: int,
                 candidates: list[ImprintRecord]) -> list[list[ImprintRecord]]:
    return [[r for r in candidates if s in r.imprint] for s in anchor_sublines(plane, line)]


def _masks(plane: CyclicPlane, line: int, candidates: list[ImprintRecord]):
    index = {s: i for i, s in enumerate(sublines(plane, line))}
    masks = [sum(1 << index[t] for t in r.imprint) for r in candidates]
    s_bits = [index[s] for s in anchor_sublines(plane, line)]
    return masks, s_bits


def search_masks_python(masks: list[int], first_list: list[int], s_bits: list[int],
                        need: int = ORBITS_NEEDED, stop_on_first: bool = True):
    """Reference implementation of the compiled Phase A / Phase B search.

    Same traversal and counters as ``_imprint_kernel.search``; returns
    (counters, solution indices or None).
    """
    counters = [0] * 6
    depth = len(s_bits)
    found: list[int] | None = None

    def phase_b(cand: list[int], union: int, need_more: int) -> list[int] | None:
        stack = [(cand, 0, union)]
        picks: list[int] = []
        while stack:
            lst, pos, u = stack[-1]
            if pos >= len(lst):
                stack.pop()
                if picks:
                    picks.pop()
                continue
            c = lst[pos]
            stack[-1] = (lst, pos + 1, u)
            u2 = u | masks[c]
            need_after = need_more - len(stack)
            if need_after == 0:
                counters[4] += 1
                return picks + [c]
            filt = [x for x in lst[pos + 1:] if not masks[x] & u2]
            if len(filt) >= need_after:
                counters[4] += 1
                picks.append(c)
                stack.append((filt, 0, u2))
        return None

    def phase_a(alist: list[int], pool: list[int], union: int, remaining: list[int],
                chosen: list[int]) -> bool:
        nonlocal found
        for m in alist:
            counters[0] += 1
            u = union | masks[m]
            sub = [x for x in pool if not masks[x] & u]
            best_i, best = -1, []
            for i in (remaining if len(chosen) + 1 < need else []):
                f = [x for x in sub if masks[x] >> s_bits[i] & 1]
                if best_i < 0 or len(f) > len(best):
                    best_i, best = i, f
            if best:
                rest = [i for i in remaining if i != best_i]
                if phase_a(best, sub, u, rest, chosen + [m]):
                    return True
                continue
            counters[1] += 1
            need_more = need - len(chosen) - 1
            if len(sub) < need_more:
                counters[3] += 1
                continue
            counters[2] += 1
            got = phase_b(sub, u, need_more) if need_more else []
            if got is not None:
                counters[5] += 1
                found = chosen + [m] + got
                if stop_on_first:
                    return True
        return False

    phase_a(list(first_list), list(range(len(masks))), 0, list(range(1, depth)), [])
    return counters, found


def _run_chunk(args):
    from . import _imprint_kernel as kern

    lo, hi, first, s_bits, need = args
    counters, sol = kern.search(lo, hi, first, s_bits, need, True)
    return counters, sol


def search_perfect_cover(plane: CyclicPlane, line: int = 0,
                         candidates: list[ImprintRecord] | None = None,
                         workers: int = 1, first_slice: slice | None = None,
                         engine: str = "compiled") -> SearchReport:
    """Exhaustive Phase A / Phase B search for 12 orbits with disjoint imprints.

    Phase A walks the first anchor list and then always the largest list
    still disjoint from the choices so far; each leaf is handed to Phase B,
    which tries every subset of the remaining disjoint candidates.  With
    ``workers > 1`` the first list is split into contiguous chunks and the
    first solution in chunk order is reported, so results do not depend on
    the worker count.
    """
    start = time.perf_counter()
    if candidates is None:
        candidates = candidate_list(plane, line)
    masks, s_bits = _masks(plane, line, candidates)
    first = [i for i, m in enumerate(masks) if m >> s_bits[0] & 1]
    if first_slice is not None:
        first = first[first_slice]
    if engine == "python":
        counters, sol = search_masks_python(masks, first, s_bits)
    elif engine == "compiled":
        from . import _imprint_kernel as kern

        lo, hi = kern.split_masks(masks)
        sb = np.array(s_bits, dtype=np.int64)
        n_chunks = max(1, min(workers, len(first)))
        bounds = np.linspace(0, len(first), n_chunks + 1).astype(int)
        jobs = [(lo, hi, np.array(first[a:b], dtype=np.int64), sb, ORBITS_NEEDED)
                for a, b in zip(bounds[:-1], bounds[1:])]
        if n_chunks == 1:
            results = [_run_chunk(jobs[0])]
        else:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(n_chunks) as pool:
                results = list(pool.map(_run_chunk, jobs))
        counters = [0] * 6
        sol = None
        for cnt, s in results:
            if sol is not None:
                break
            counters = [a + int(b) for a, b in zip(counters, cnt)]
            if cnt[5]:
                sol = [int(x) for x in s]
    else:
        raise ValueError(f"unknown engine {engine!r}")
    solution = None if sol is None else [candidates[i] for i in sol]
    return SearchReport(solution, counters[0], counters[1], counters[2], counters[3],
                        counters[4], time.perf_counter() - start, len(candidates), len(first))


def verify_cover(records: list[ImprintRecord], plane: CyclicPlane) -> bool:
    """12 pairwise disjoint imprints of size 7 covering all 84 sublines, on every line.

    Records of genuine orbits are re-imprinted on all 73 lines; records whose
    orbit has no representative (synthetic fixtures) are checked on their own line.
    """
    if len(records) != ORBITS_NEEDED:
        return False
    genuine = all(r.orbit.representative for r in records)
    lines = range(N_POINTS) if genuine else sorted({r.line for r in records})
    for j in lines:
        full = set(sublines(plane, j))
        seen: set = set()
        for r in records:
            imp = r.imprint if r.line == j else imprint(r.orbit, plane, j).imprint
            if len(imp) != 7 or seen & imp or not imp <= full:
                return False
            seen |= imp
        if seen != full:
            return False
    return True


def planted_candidates(plane: CyclicPlane, line: int = 0, seed: int = 0,
                       decoys: int = 40) -> tuple[list[ImprintRecord], list[ImprintRecord]]:
    """A synthetic candidate list hiding one perfect cover of ``line``.

    The 84 sublines are shuffled into 12 imprints of size 7 (the planted
    family, placed first) followed by random 7-subline decoys.
    """
    rng = np.random.default_rng(seed)
    subs = sublines(plane, line)
    order = rng.permutation(len(subs))
    planted = []
    for k in range(ORBITS_NEEDED):
        imp = frozenset(subs[i] for i in order[7 * k:7 * k + 7])
        planted.append(ImprintRecord(FanoOrbit((), -1 - k), line, imp))
    decoy = []
    for k in range(decoys):
        pick = rng.choice(len(subs), 7, replace=False)
        decoy.append(ImprintRecord(FanoOrbit((), -100 - k), line,
                                   frozenset(subs[i] for i in pick)))
    return planted, planted + decoy
