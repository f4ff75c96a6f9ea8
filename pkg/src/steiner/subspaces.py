"""GF(2)-subspaces of GF(2^v), Singer-cycle orbits and the Kramer-Mesner matrix.

A subspace is stored as the sorted list of codes of its nonzero vectors.
Because element codes are the coefficient bit patterns, field addition is
XOR and a subspace is a set of integers closed under XOR.  Tables of many
subspaces are numpy arrays with one row per subspace; each row is packed
into a single int64 key (members most significant first) so that numeric
key order equals lexicographic order of member lists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .design import Design, Embedding, verify_design
from .errors import SizeBudgetExceeded
from .field import FieldTable, default_field

SUBSPACE_BUDGET = 5_000_000


@dataclass(frozen=True)
class Subspace:
    dim: int
    members: tuple[int, ...]

    @property
    def key(self) -> tuple[int, ...]:
        return self.members

    def times(self, field: FieldTable, c: int) -> "Subspace":
        return Subspace(self.dim, tuple(sorted(field.mul(m, c) for m in self.members)))


def span(basis: list[int]) -> tuple[int, ...]:
    """Sorted nonzero members of the GF(2)-span of ``basis``."""
    out = {0}
    for b in basis:
        out |= {x ^ b for x in out}
    out.discard(0)
    return tuple(sorted(out))


def gaussian_binomial(v: int, d: int, q: int = 2) -> int:
    num = den = 1
    for i in range(d):
        num *= q ** (v - i) - 1
        den *= q ** (d - i) - 1
    return num // den


def _check_binary(field: FieldTable) -> None:
    if field.p != 2:
        raise ValueError("subspace machinery needs a field of characteristic 2")


class SubspaceTable:
    """All subspaces of one dimension, rows sorted by canonical key."""

    def __init__(self, field: FieldTable, dim: int, members: np.ndarray):
        self.field = field
        self.dim = dim
        self.members = members
        self.bits = field.n
        keys = _pack(members, self.bits)
        order = np.argsort(keys, kind="stable")
        self.members = members[order]
        self.keys = keys[order]

    def __len__(self) -> int:
        return len(self.keys)

    def __getitem__(self, i: int) -> Subspace:
        return Subspace(self.dim, tuple(int(x) for x in self.members[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def lookup(self, members: np.ndarray) -> np.ndarray:
        """Row indices of the subspaces whose sorted member rows are given."""
        keys = _pack(members, self.bits)
        idx = np.searchsorted(self.keys, keys)
        idx = np.minimum(idx, len(self.keys) - 1)
        if not np.array_equal(self.keys[idx], keys):
            raise KeyError("member set is not an enumerated subspace")
        return idx


def _pack(members: np.ndarray, bits: int) -> np.ndarray:
    keys = np.zeros(members.shape[0], dtype=np.int64)
    for col in range(members.shape[1]):
        keys = (keys << bits) | members[:, col].astype(np.int64)
    return keys


def _echelon_bases(v: int, d: int) -> np.ndarray:
    """Row-reduced echelon bases: one (d,) row of basis vectors per subspace.

    Basis vector i has its lowest set bit at pivot c_i; bits at other pivots
    are zero and bits above c_i elsewhere are free.
    """
    chunks = []
    for pivots in itertools.combinations(range(v), d):
        free = [[c for c in range(piv + 1, v) if c not in pivots] for piv in pivots]
        nfree = sum(len(f) for f in free)
        combos = np.arange(1 << nfree, dtype=np.int64)
        basis = np.zeros((1 << nfree, d), dtype=np.int64)
        shift = 0
        for i, piv in enumerate(pivots):
            vec = np.full(1 << nfree, 1 << piv, dtype=np.int64)
            for c in free[i]:
                vec |= ((combos >> shift) & 1) << c
                shift += 1
            basis[:, i] = vec
        chunks.append(basis)
    return np.concatenate(chunks) if chunks else np.zeros((0, d), dtype=np.int64)


def _span_rows(bases: np.ndarray) -> np.ndarray:
    d = bases.shape[1]
    cols = []
    for t in range(1, 1 << d):
        acc = np.zeros(bases.shape[0], dtype=np.int64)
        for i in range(d):
            if (t >> i) & 1:
                acc ^= bases[:, i]
        cols.append(acc)
    out = np.stack(cols, axis=1)
    out.sort(axis=1)
    return out


def enumerate_subspaces(field: FieldTable, dim: int,
                        budget: int = SUBSPACE_BUDGET) -> SubspaceTable:
    _check_binary(field)
    v = field.n
    if not 1 <= dim <= v:
        raise ValueError(f"dimension {dim} outside [1, {v}]")
    count = gaussian_binomial(v, dim)
    if count > budget:
        raise SizeBudgetExceeded(f"{count} subspaces of dimension {dim} exceed the budget")
    if ((1 << dim) - 1) * v > 63:
        raise SizeBudgetExceeded(f"{dim}-subspaces of GF(2^{v}) do not fit a 63-bit key")
    members = _span_rows(_echelon_bases(v, dim))
    table = SubspaceTable(field, dim, members.astype(np.int32))
    assert len(table) == count
    return table


@dataclass(frozen=True)
class SubspaceOrbit:
    representative: Subspace
    size: int
    index: int


@dataclass
class OrbitPartition:
    """Singer orbits of a SubspaceTable; ``orbit_of[row]`` is the orbit index."""

    table: SubspaceTable
    orbits: list[SubspaceOrbit]
    orbit_of: np.ndarray

    def member_rows(self, j: int) -> np.ndarray:
        return np.nonzero(self.orbit_of == j)[0]


def _times_x(field: FieldTable) -> np.ndarray:
    return np.array([field.mul(c, field.x) for c in range(field.q)], dtype=np.int32)


def singer_partition(table: SubspaceTable) -> OrbitPartition:
    """Orbits under multiplication by the primitive element, sorted by representative."""
    mulx = _times_x(table.field)
    image = mulx[table.members]
    image.sort(axis=1)
    perm = table.lookup(image)
    n = len(table)
    raw = np.full(n, -1, dtype=np.int64)
    reps, sizes = [], []
    # rows are key-sorted, so the first unvisited row of each cycle is its minimum
    for start in range(n):
        if raw[start] != -1:
            continue
        label = len(reps)
        size = 0
        i = start
        while raw[i] == -1:
            raw[i] = label
            size += 1
            i = perm[i]
        reps.append(start)
        sizes.append(size)
    orbits = [SubspaceOrbit(table[r], s, j) for j, (r, s) in enumerate(zip(reps, sizes))]
    return OrbitPartition(table, orbits, raw)


def singer_orbits(subspaces: SubspaceTable, field: FieldTable | None = None) -> list[SubspaceOrbit]:
    if field is not None and field != subspaces.field:
        raise ValueError("subspaces belong to a different field")
    return singer_partition(subspaces).orbits


def _contained_line_indices(dim: int) -> list[tuple[int, int, int]]:
    """Index triples (into the XOR-combination order) forming each 2-subspace."""
    out = []
    n = 1 << dim
    for a in range(1, n):
        for b in range(a + 1, n):
            c = a ^ b
            if c > b:
                out.append((a, b, c))
    return out


@dataclass
class KMInstance:
    v: int
    k: int
    field: FieldTable
    rows: OrbitPartition
    cols: OrbitPartition
    matrix: np.ndarray
    compatible_cols: list[int]

    @property
    def row_orbits(self) -> list[SubspaceOrbit]:
        return self.rows.orbits

    @property
    def col_orbits(self) -> list[SubspaceOrbit]:
        return self.cols.orbits

    def entries(self):
        """Nonzero (i, j, m) sorted by (i, j)."""
        ii, jj = np.nonzero(self.matrix)
        for i, j in zip(ii, jj):
            yield int(i), int(j), int(self.matrix[i, j])

    def dump(self, path: str | Path) -> None:
        lines = [f"km v={self.v} k={self.k} rows={len(self.row_orbits)} "
                 f"cols={len(self.col_orbits)} field={self.field.spec}"]
        lines += [f"{i} {j} {m}" for i, j, m in self.entries()]
        lines.append("compatible: " + " ".join(map(str, self.compatible_cols)))
        Path(path).write_text("\n".join(lines) + "\n")


def km_matrix(v: int, k: int, field: FieldTable | None = None) -> KMInstance:
    """Kramer-Mesner matrix of 2-subspaces against k-subspaces under the Singer cycle.

    Every k-subspace is scanned once: each of its 2-subspaces is looked up and
    the hit is charged to the (row orbit, column orbit) pair.  Summed over an
    orbit this counts |O_i| * m_ij, because each member of row orbit i lies in
    the same number m_ij of members of column orbit j.
    """
    if k <= 2:
        raise ValueError(f"k must exceed 2, got {k}")
    if field is None:
        field = default_field(2, v)
    if field.n != v:
        raise ValueError(f"field has degree {field.n}, expected {v}")
    rows = singer_partition(enumerate_subspaces(field, 2))
    cols = singer_partition(enumerate_subspaces(field, k))
    bases = _echelon_bases(v, k)
    combos = np.zeros((bases.shape[0], 1 << k), dtype=np.int64)
    for t in range(1, 1 << k):
        for i in range(k):
            if (t >> i) & 1:
                combos[:, t] ^= bases[:, i]
    col_of = cols.orbit_of[cols.table.lookup(np.sort(combos[:, 1:], axis=1))]
    counts = np.zeros((len(rows.orbits), len(cols.orbits)), dtype=np.int64)
    for a, b, c in _contained_line_indices(k):
        line = np.sort(combos[:, [a, b, c]], axis=1)
        row_of = rows.orbit_of[rows.table.lookup(line)]
        np.add.at(counts, (row_of, col_of), 1)
    sizes = np.array([o.size for o in rows.orbits], dtype=np.int64)
    if np.any(counts % sizes[:, None]):
        raise AssertionError("orbit counts are not divisible by row orbit sizes")
    matrix = counts // sizes[:, None]
    compatible = [j for j in range(matrix.shape[1]) if matrix[:, j].max() <= 1]
    return KMInstance(v, k, field, rows, cols, matrix, compatible)


def orbit_blocks(part: OrbitPartition, j: int) -> list[tuple[int, ...]]:
    return [tuple(int(x) for x in part.table.members[r]) for r in part.member_rows(j)]


def assemble_from_solution(inst: KMInstance, chosen_cols) -> Design:
    """Design on the nonzero field elements whose blocks are the chosen column orbits."""
    blocks = []
    for j in sorted(chosen_cols):
        blocks.extend(orbit_blocks(inst.cols, j))
    points = list(range(1, inst.field.q))
    k = (1 << inst.k) - 1
    return Design.make(points, blocks, k, 1, Embedding(inst.field, {c: c for c in points}))


def is_subspace(members, k: int | None = None) -> bool:
    s = set(members)
    if 0 in s:
        return False
    if k is not None and len(s) != (1 << k) - 1:
        return False
    closed = s | {0}
    return all(a ^ b in closed for a in s for b in s)


def verify_qanalog(d: Design, field: FieldTable, k: int) -> bool:
    """Every block plus zero is a k-subspace and every 2-subspace lies in exactly one block.

    A 2-subspace {a, b, a^b} lies in a subspace block exactly when a and b do,
    so the second condition is ordinary pair coverage with lambda = 1.
    """
    _check_binary(field)
    if set(d.points) != set(range(1, field.q)):
        raise ValueError("points must be all nonzero codes of the field")
    if not d.blocks:
        return False
    if not all(is_subspace(b, k) for b in d.blocks):
        return False
    if d.lam != 1 or d.k != (1 << k) - 1:
        d = Design.make(d.points, d.blocks, (1 << k) - 1, 1, d.embedding)
    return verify_design(d).is_2_design


def _exact_generators(m: int) -> int:
    """Nonzero elements of GF(2^m) lying in no proper subfield."""
    total = 0
    for d in range(1, m + 1):
        if m % d == 0:
            total += _mobius(m // d) * (2**d - 1)
    return total


def _mobius(n: int) -> int:
    out, p = 1, 2
    while p * p <= n:
        if n % p == 0:
            n //= p
            if n % p == 0:
                return 0
            out = -out
        p += 1
    return -out if n > 1 else out


def singer_orbit_count(v: int, d: int) -> int:
    """Number of Singer orbits on d-subspaces of GF(2^v), by Burnside's lemma.

    Multiplication by g fixes a subspace exactly when the subspace is a vector
    space over GF(2)(g) = GF(2^m); there are [v/m, d/m]_{2^m} of those.
    """
    fixed = 0
    for m in range(1, v + 1):
        if v % m == 0 and d % m == 0:
            fixed += _exact_generators(m) * gaussian_binomial(v // m, d // m, 2**m)
    return fixed // (2**v - 1)
