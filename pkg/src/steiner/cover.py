"""Exact cover by Algorithm X over bitsets.

Rows are constraints and columns are candidate subsets of rows.  The set of
still-usable columns is one Python integer, so removing every column that
clashes with a choice is a single AND.  Branching always picks the uncovered
row with the fewest usable columns (lowest row index on ties) and tries its
columns in ascending id, so ``nodes_explored`` is reproducible.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyColumn


class Mode(enum.Enum):
    COUNT = "count"
    FIRST = "first"
    ALL = "all"


@dataclass(frozen=True)
class CoverInstance:
    rows: int
    columns: tuple[frozenset[int], ...]
    column_ids: tuple[int, ...]

    def __post_init__(self):
        if len(self.columns) != len(self.column_ids):
            raise ValueError("columns and column_ids differ in length")
        seen = set()
        for cid, sup in zip(self.column_ids, self.columns):
            if not sup:
                raise EmptyColumn(f"column {cid} has empty support")
            if min(sup) < 0 or max(sup) >= self.rows:
                raise ValueError(f"column {cid} touches a row outside [0, {self.rows})")
            if (cid, sup) in seen:
                raise ValueError(f"column {cid} listed twice")
            seen.add((cid, sup))

    @classmethod
    def make(cls, rows: int, supports: Iterable[Iterable[int]],
             ids: Sequence[int] | None = None) -> "CoverInstance":
        cols = tuple(frozenset(s) for s in supports)
        if ids is None:
            ids = range(len(cols))
        return cls(rows, cols, tuple(ids))

    def dump(self, path: str | Path) -> None:
        lines = [f"cover rows={self.rows} cols={len(self.columns)}"]
        for cid, sup in zip(self.column_ids, self.columns):
            lines.append(f"{cid}: " + " ".join(map(str, sorted(sup))))
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "CoverInstance":
        text = Path(path).read_text().splitlines()
        head = dict(tok.split("=") for tok in text[0].split()[1:])
        ids, sups = [], []
        for line in text[1:]:
            if not line.strip():
                continue
            cid, _, rest = line.partition(":")
            ids.append(int(cid))
            sups.append([int(x) for x in rest.split()])
        if len(ids) != int(head["cols"]):
            raise ValueError(f"header says {head['cols']} columns, file has {len(ids)}")
        return cls.make(int(head["rows"]), sups, ids)


@dataclass
class CoverOutcome:
    mode: Mode
    count: int
    solutions: list[frozenset[int]] = field(default_factory=list)
    nodes_explored: int = 0
    seconds: float = 0.0

    def to_json(self) -> dict:
        return {"mode": self.mode.value, "count": self.count,
                "solutions": [sorted(s) for s in self.solutions],
                "nodes_explored": self.nodes_explored, "seconds": round(self.seconds, 3)}


class _Solver:
    def __init__(self, inst: CoverInstance, mode: Mode):
        self.mode = mode
        order = sorted(range(len(inst.columns)), key=lambda c: inst.column_ids[c])
        self.ids = [inst.column_ids[c] for c in order]
        sups = [inst.columns[c] for c in order]
        self.row_cols = [0] * inst.rows
        for c, sup in enumerate(sups):
            for r in sup:
                self.row_cols[r] |= 1 << c
        self.row_bits = [sum(1 << r for r in sup) for sup in sups]
        # columns sharing a row with column c, c included
        self.clash = []
        for sup in sups:
            m = 0
            for r in sup:
                m |= self.row_cols[r]
            self.clash.append(m)
        self.rows = inst.rows
        self.nodes = 0
        self.count = 0
        self.solutions: list[frozenset[int]] = []
        self.stop = False

    def run(self) -> None:
        self._search((1 << self.rows) - 1, (1 << len(self.ids)) - 1, [])

    def _search(self, uncovered: int, avail: int, chosen: list[int]) -> None:
        self.nodes += 1
        if not uncovered:
            self.count += 1
            if self.mode is not Mode.COUNT:
                self.solutions.append(frozenset(self.ids[c] for c in chosen))
            if self.mode is Mode.FIRST:
                self.stop = True
            return
        best_row, best_cols, best_deg = -1, 0, None
        u = uncovered
        while u:
            low = u & -u
            r = low.bit_length() - 1
            cols = self.row_cols[r] & avail
            deg = cols.bit_count()
            if best_deg is None or deg < best_deg:
                best_row, best_cols, best_deg = r, cols, deg
                if deg == 0:
                    return
            u ^= low
        cols = best_cols
        while cols:
            low = cols & -cols
            c = low.bit_length() - 1
            chosen.append(c)
            self._search(uncovered & ~self.row_bits[c], avail & ~self.clash[c], chosen)
            chosen.pop()
            if self.stop:
                return
            cols ^= low


def solve(inst: CoverInstance, mode: Mode | str = Mode.COUNT,
          engine: str = "compiled") -> CoverOutcome:
    """Solve with the compiled kernel, or ``engine="python"`` for the reference loop."""
    mode = Mode(mode)
    if engine not in ("compiled", "python"):
        raise ValueError(f"unknown engine {engine!r}")
    start = time.perf_counter()
    s = _Solver(inst, mode)
    if inst.rows == 0:
        s.nodes, s.count = 1, 1
        if mode is not Mode.COUNT:
            s.solutions.append(frozenset())
    elif engine == "python":
        s.run()
    else:
        _run_compiled(s, inst.rows)
    return CoverOutcome(mode, s.count, s.solutions, s.nodes, time.perf_counter() - start)


def _run_compiled(s: _Solver, rows: int) -> None:
    from . import _cover_kernel as kern

    n_cols = len(s.ids)
    args = (kern.pack(s.row_cols, n_cols), kern.pack(s.row_bits, rows),
            kern.pack(s.clash, n_cols), rows, n_cols)
    code = {Mode.COUNT: 0, Mode.FIRST: 1, Mode.ALL: 2}[s.mode]
    cap = 1 if s.mode is Mode.COUNT else 64
    count, nodes, sols, stored = kern.search(*args, code, cap)
    if s.mode is Mode.ALL and stored < count:
        # the buffer overflowed; rerun with room for every solution
        count, nodes, sols, stored = kern.search(*args, code, count)
    s.count, s.nodes = int(count), int(nodes)
    if s.mode is not Mode.COUNT:
        s.solutions = [frozenset(s.ids[c] for c in row if c >= 0) for row in sols[:stored]]


def from_km(inst) -> CoverInstance:
    """Compatible Kramer-Mesner columns; column j covers the rows with entry 1."""
    m = inst.matrix
    sups = [[int(i) for i in (m[:, j] == 1).nonzero()[0]] for j in inst.compatible_cols]
    keep = [(j, s) for j, s in zip(inst.compatible_cols, sups) if s]
    return CoverInstance.make(m.shape[0], [s for _, s in keep], [j for j, _ in keep])


def is_exact_cover(inst: CoverInstance, chosen: Iterable[int]) -> bool:
    by_id = dict(zip(inst.column_ids, inst.columns))
    seen: list[int] = []
    for cid in chosen:
        seen.extend(by_id[cid])
    return len(seen) == inst.rows and set(seen) == set(range(inst.rows))
