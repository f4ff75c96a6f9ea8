"""The Design data model and the checks that run on it."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DesignParametersInadmissible,
    IndexOutOfRange,
    MalformedBlock,
    MissingEmbedding,
    NonCanonicalRepresentative,
    NonInjectiveEmbedding,
    SizeBudgetExceeded,
)
from .field import FieldSpec, FieldTable, build_field, is_prime, prime_factors

PG_POINT_BUDGET = 10_000
PG_LINE_BUDGET = 2_000_000


@dataclass(frozen=True)
class Embedding:
    """Point label -> field element code."""

    field: FieldTable
    map: dict[int, int]

    def __call__(self, point: int) -> int:
        return self.map[point]


@dataclass(frozen=True)
class Design:
    v: int
    k: int
    points: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]
    lam: int = 1
    embedding: Embedding | None = None

    @classmethod
    def make(cls, points: Iterable[int], blocks: Iterable[Iterable[int]], k: int | None = None,
             lam: int = 1, embedding: Embedding | None = None) -> "Design":
        points = tuple(points)
        blocks = tuple(tuple(sorted(b)) for b in blocks)
        if len(set(points)) != len(points):
            raise MalformedBlock("point labels are not distinct")
        if k is None:
            k = len(blocks[0]) if blocks else 0
        return cls(len(points), k, points, blocks, lam, embedding)

    @property
    def b(self) -> int:
        return len(self.blocks)

    def relabel(self, perm: dict[int, int]) -> "Design":
        """The image of this design under a point bijection ``perm``."""
        emb = None
        if self.embedding is not None:
            emb = Embedding(self.embedding.field,
                            {perm[p]: c for p, c in self.embedding.map.items()})
        return Design.make(sorted(perm[p] for p in self.points),
                           [[perm[p] for p in blk] for blk in self.blocks],
                           self.k, self.lam, emb)

    def point_index(self) -> dict[int, int]:
        return {p: i for i, p in enumerate(self.points)}

    def block_array(self) -> np.ndarray:
        """Blocks as a (b, k) array of point indices."""
        idx = self.point_index()
        try:
            return np.array([[idx[p] for p in blk] for blk in self.blocks],
                            dtype=np.int64).reshape(len(self.blocks), self.k)
        except KeyError as exc:
            raise MalformedBlock(f"block contains unknown point {exc.args[0]}") from None

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        out = {"v": self.v, "k": self.k, "lambda": self.lam,
               "points": list(self.points), "blocks": [list(b) for b in self.blocks]}
        if self.embedding is not None:
            out["embedding"] = {"field": self.embedding.field.spec.to_json(),
                                "map": {str(p): c for p, c in self.embedding.map.items()}}
        return out

    @classmethod
    def from_json(cls, data: dict) -> "Design":
        emb = None
        if data.get("embedding"):
            f = build_field(FieldSpec.from_json(data["embedding"]["field"]))
            emb = Embedding(f, {int(p): int(c) for p, c in data["embedding"]["map"].items()})
        d = cls.make(data["points"], data["blocks"], data["k"], data.get("lambda", 1), emb)
        if d.v != data["v"]:
            raise MalformedBlock(f"v={data['v']} but {d.v} points listed")
        return d


@dataclass(frozen=True)
class Resolution:
    classes: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"classes": [list(c) for c in self.classes]}

    @classmethod
    def from_json(cls, data: dict) -> "Resolution":
        return cls(tuple(tuple(int(i) for i in c) for c in data["classes"]))


def save_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj.to_json()))


def load_design(path: str | Path) -> Design:
    return Design.from_json(json.loads(Path(path).read_text()))


def load_resolution(path: str | Path) -> Resolution:
    return Resolution.from_json(json.loads(Path(path).read_text()))


@dataclass
class VerificationReport:
    is_2_design: bool
    lambda_observed: tuple[int, int]
    replication: Fraction
    replication_integral: bool
    failures: list = dc_field(default_factory=list)


def verify_design(d: Design) -> VerificationReport:
    """Check that every pair of distinct points lies in exactly ``d.lam`` blocks."""
    for blk in d.blocks:
        if len(blk) != d.k or len(set(blk)) != d.k:
            raise MalformedBlock(f"block {blk} does not have {d.k} distinct points")
    arr = d.block_array()
    v = d.v
    counts = np.zeros(v * v, dtype=np.int64)
    for i, j in itertools.combinations(range(d.k), 2):
        a, b = arr[:, i], arr[:, j]
        lo, hi = np.minimum(a, b), np.maximum(a, b)
        counts += np.bincount(lo * v + hi, minlength=v * v)
    counts = counts.reshape(v, v)
    iu = np.triu_indices(v, 1)
    pair_counts = counts[iu]
    bad = np.nonzero(pair_counts != d.lam)[0]
    failures = [((d.points[iu[0][t]], d.points[iu[1][t]]), int(pair_counts[t])) for t in bad]
    observed = (int(pair_counts.min()), int(pair_counts.max())) if len(pair_counts) else (0, 0)
    r = Fraction(d.lam * (v - 1), d.k - 1) if d.k > 1 else Fraction(0)
    return VerificationReport(not failures, observed, r, r.denominator == 1, failures)


def admissible_primes(v: int, k: int) -> set[int]:
    """Primes whose powers can carry an EA(q)-additive (v,k,1) design."""
    if not v > k > 2:
        raise DesignParametersInadmissible(f"need v > k > 2, got v={v}, k={k}")
    if (v - k) % (k - 1):
        raise DesignParametersInadmissible(f"(v-k)/(k-1) = {v - k}/{k - 1} is not integral")
    m = (v - k) // (k - 1)
    if m == 1:
        return set()
    return set(prime_factors(m))


def admissible_field_orders(v: int, k: int, modulus: int, exponent_bound: int = 64) -> list[int]:
    """All admissible q = rho^m (m <= exponent_bound) with q = 1 mod ``modulus``."""
    if modulus < 2:
        raise ValueError("modulus must be at least 2")
    out = []
    for rho in admissible_primes(v, k):
        for m in range(1, exponent_bound + 1):
            if pow(rho, m, modulus) == 1:
                out.append(rho**m)
    return sorted(out)


def least_admissible_field_orders(v: int, k: int, modulus: int,
                                  exponent_bound: int = 64) -> dict[int, int]:
    """Smallest admissible order for each admissible prime, when one exists."""
    least: dict[int, int] = {}
    for q in admissible_field_orders(v, k, modulus, exponent_bound):
        rho = prime_factors(q)[0]
        least.setdefault(rho, q)
    return least


def is_additive(d: Design) -> bool:
    if d.embedding is None:
        raise MissingEmbedding("design has no field embedding")
    emap = d.embedding.map
    if set(emap) != set(d.points):
        raise MissingEmbedding("embedding does not cover exactly the point set")
    if len(set(emap.values())) != len(emap):
        raise NonInjectiveEmbedding("two points share a field element")
    f = d.embedding.field
    return all(f.sum(emap[p] for p in blk) == 0 for blk in d.blocks)


def verify_resolution(d: Design, r: Resolution) -> bool:
    b = len(d.blocks)
    seen = [0] * b
    points = set(d.points)
    ok = True
    for cls in r.classes:
        covered: list[int] = []
        for i in cls:
            if not 0 <= i < b:
                raise IndexOutOfRange(f"block index {i} outside [0, {b})")
            seen[i] += 1
            covered.extend(d.blocks[i])
        if len(covered) != len(points) or set(covered) != points:
            ok = False
    return ok and all(c == 1 for c in seen)


def pg_point_line_design(n: int, p: int) -> Design:
    """Points and lines of PG(n, p), points labelled 0..v-1.

    Labels follow the order of canonical representatives (first nonzero
    coordinate 1) read as base-p little-endian integers.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    dim = n + 1
    v = (p**dim - 1) // (p - 1)
    b = v * (v - 1) // (p * (p + 1))
    if v > PG_POINT_BUDGET or b > PG_LINE_BUDGET:
        raise SizeBudgetExceeded(f"PG({n},{p}) has {v} points and {b} lines")
    vecs = _canonical_vectors(dim, p)
    codes = [_vec_code(x, p) for x in vecs]
    label = {c: i for i, c in enumerate(codes)}
    lines = set()
    for i in range(v):
        a = vecs[i]
        for j in range(i + 1, v):
            bvec = vecs[j]
            pts = {i, j}
            for lam in range(1, p):
                w = [(x + lam * y) % p for x, y in zip(a, bvec)]
                pts.add(label[_vec_code(_normalize(w, p), p)])
            lines.add(tuple(sorted(pts)))
    return Design.make(range(v), sorted(lines), p + 1)


def _canonical_vectors(dim: int, p: int) -> list[tuple[int, ...]]:
    out = []
    for code in range(1, p**dim):
        vec = []
        c = code
        for _ in range(dim):
            c, r = divmod(c, p)
            vec.append(r)
        if next(x for x in vec if x) == 1:
            out.append(tuple(vec))
    return out


def _normalize(vec: Sequence[int], p: int) -> tuple[int, ...]:
    lead = next(x for x in vec if x)
    inv = pow(lead, p - 2, p)
    return tuple(x * inv % p for x in vec)


def _vec_code(vec: Sequence[int], p: int) -> int:
    return sum(x * p**i for i, x in enumerate(vec))


def canonical_representative(c: int, field: FieldTable, p: int) -> int:
    """The unique GF(p)-scalar multiple of ``c`` lying in R_{q,(q-1)/(p-1)}.

    Unique only when gcd((q-1)/(p-1), p-1) = 1, which holds for the fields used here.
    """
    if c == 0:
        raise NonCanonicalRepresentative("zero is not a projective point")
    m = field.order // (p - 1)
    e = field.log_of(c)
    hits = [e + m * j for j in range(p - 1) if (e + m * j) % (p - 1) == 0]
    if len(hits) != 1:
        raise NonCanonicalRepresentative(f"no unique canonical multiple of {c}")
    return field.exp(hits[0])


def is_projective_line(block: Iterable[int], field: FieldTable, p: int) -> bool:
    """Whether ``block`` is the set of canonical points on a GF(p)-line of GF(q)."""
    block = list(block)
    if len(block) != p + 1:
        return False
    for c in block:
        if c == 0 or field.log_of(c) % (p - 1):
            raise NonCanonicalRepresentative(f"{c} is not a canonical representative")
    a, b = block[0], block[1]
    m = field.order // (p - 1)
    line = {a, b}
    for j in range(p - 1):
        lam = field.exp(m * j)
        line.add(canonical_representative(field.add(a, field.mul(lam, b)), field, p))
    return line == set(block)


def line_identification(d: Design, p: int) -> int | None:
    """Least t with gcd(t, q-1) = 1 such that c -> c^t sends every block to a GF(p)-line.

    Needs an embedding into GF(q) whose points are canonical representatives.
    Returns None when no power map works.
    """
    if d.embedding is None:
        raise MissingEmbedding("design has no field embedding")
    f = d.embedding.field
    emb = d.embedding.map
    blocks = [[emb[x] for x in blk] for blk in d.blocks]
    for t in range(1, f.order):
        if math.gcd(t, f.order) != 1:
            continue
        if all(is_projective_line([f.pow(c, t) for c in blk], f, p) for blk in blocks):
            return t
    return None
