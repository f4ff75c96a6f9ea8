"""Command-line pipelines with machine-readable run reports.

Every command prints one line per check and can write a JSON report with
``--report PATH``.  The exit code is 0 exactly when no check failed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .errors import SteinerError


class LongRunRequired(SteinerError):
    """A long-running step was requested without --long."""


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class RunReport:
    command: str
    parameters: dict
    outcome: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0
    artifacts: list[str] = field(default_factory=list)
    fields: list[str] = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = "") -> bool:
        if any(c.name == name for c in self.checks):
            raise ValueError(f"duplicate check {name!r}")
        self.checks.append(Check(name, bool(passed), detail))
        return bool(passed)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failed(self) -> list[str]:
        return [c.name for c in self.checks if not c.passed]

    def to_json(self) -> dict:
        return {"command": self.command, "version": __version__, "parameters": self.parameters,
                "fields": self.fields, "outcome": self.outcome,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                           for c in self.checks],
                "passed": sum(c.passed for c in self.checks), "failed": self.failed,
                "seconds": round(self.seconds, 3), "artifacts": self.artifacts}

    def render(self) -> str:
        lines = [f"{self.command}: {'ok' if self.ok else 'FAILED'} ({self.seconds:.2f} s)"]
        for key, val in self.outcome.items():
            if isinstance(val, dict):
                flat = {k: v for k, v in val.items() if not isinstance(v, (dict, list))}
                lines.append(f"  {key}: {flat}")
            elif not isinstance(val, list) or len(val) <= 12:
                lines.append(f"  {key}: {val}")
        for c in self.checks:
            lines.append(f"  [{'pass' if c.passed else 'FAIL'}] {c.name}"
                         + (f": {c.detail}" if c.detail else ""))
        return "\n".join(lines)


# -- commands -----------------------------------------------------------------------

def cmd_build_design(family: str, out: str | None = None) -> RunReport:
    from .design import (is_additive, line_identification, pg_point_line_design, save_json,
                         verify_design, verify_resolution)
    from .difference import paper_design
    from .iso import designs_isomorphic
    from .rank import p_rank

    rep = RunReport("build-design", {"family": family, "out": out})
    d, res = paper_design(family)
    f = d.embedding.field
    rep.fields.append(str(f.spec))
    vr = verify_design(d)
    rep.outcome.update(v=d.v, k=d.k, blocks=d.b)
    rep.check("verify_design", vr.is_2_design, f"lambda observed {vr.lambda_observed}")
    rep.check("additive", is_additive(d), str(f.spec))
    if res is not None:
        rep.outcome["parallel_classes"] = len(res.classes)
        rep.check("resolution", verify_resolution(d, res),
                  f"{len(res.classes)} classes of {len(res.classes[0])} blocks")
        rank = p_rank(d, 2)
        rep.outcome["2-rank"] = rank
    else:
        rank = p_rank(d, 3)
        rep.outcome["3-rank"] = rank
        t = line_identification(d, 3)
        rep.outcome["line_power_map"] = t
        iso = designs_isomorphic(d, pg_point_line_design(4, 3))
        rep.outcome["isomorphic_to_PG(4,3)"] = iso.isomorphic
        rep.outcome["iso_reason"] = iso.reason
        if family == "121-4-1-1":
            rep.check("isomorphic_to_PG(4,3)", iso.isomorphic, iso.reason)
    if out:
        save_json(d, out)
        rep.artifacts.append(out)
        if res is not None:
            rpath = str(Path(out).with_suffix("")) + ".resolution.json"
            save_json(res, rpath)
            rep.artifacts.append(rpath)
    return rep


def cmd_km(v: int, k: int, mode: str = "count", dump: str | None = None,
           long_run: bool = False) -> RunReport:
    from .cover import Mode, from_km, solve
    from .subspaces import (assemble_from_solution, enumerate_subspaces, km_matrix,
                            singer_orbit_count, singer_partition, verify_qanalog)
    from .field import default_field

    rep = RunReport("km", {"v": v, "k": k, "mode": mode, "dump": dump})
    if k <= 2:
        raise ValueError(f"k must exceed 2, got {k}")
    if v >= 10:
        if not long_run:
            raise LongRunRequired(f"v={v} is a long run; pass --long")
        # orbit counting only: rows are enumerated, columns counted by Burnside
        f = default_field(2, v)
        rep.fields.append(str(f.spec))
        rows = singer_partition(enumerate_subspaces(f, 2, budget=50_000_000))
        n_rows = len(rows.orbits)
        rep.outcome.update(row_orbits=n_rows, col_orbits=singer_orbit_count(v, k))
        rep.check("row_orbit_count", n_rows == singer_orbit_count(v, 2),
                  f"enumerated {n_rows}, Burnside {singer_orbit_count(v, 2)}")
        return rep
    inst = km_matrix(v, k)
    rep.fields.append(str(inst.field.spec))
    rep.outcome.update(row_subspaces=len(inst.rows.table), col_subspaces=len(inst.cols.table),
                       row_orbits=len(inst.row_orbits), col_orbits=len(inst.col_orbits),
                       compatible=len(inst.compatible_cols))
    rep.check("row_orbit_count", len(inst.row_orbits) == singer_orbit_count(v, 2))
    rep.check("col_orbit_count", len(inst.col_orbits) == singer_orbit_count(v, k))
    if dump:
        inst.dump(dump)
        rep.artifacts.append(dump)
    out = solve(from_km(inst), Mode(mode))
    rep.outcome.update(solutions=out.count, nodes_explored=out.nodes_explored,
                       solve_seconds=round(out.seconds, 3))
    for n, sol in enumerate(out.solutions):
        d = assemble_from_solution(inst, sol)
        rep.check(f"solution_{n}_is_qanalog", verify_qanalog(d, inst.field, k))
    return rep


def cmd_imprint_search(full: bool = False, workers: int = 1, long_run: bool = False,
                       planted: bool = False) -> RunReport:
    from .cover import CoverInstance, solve
    from .errors import LabelingMismatch
    from . import pg28

    rep = RunReport("imprints", {"full": full, "workers": workers, "planted": planted})
    try:
        plane = pg28.build_plane()
        rep.outcome["labelling"] = "reference line reached"
    except LabelingMismatch:
        plane = pg28.build_plane(target=None)
        rep.outcome["labelling"] = "reference line unreachable; natural line through 1, 2 used"
    rep.fields.append(str(plane.field.spec))
    rep.outcome.update(norm=list(plane.norm), line=list(plane.base_line))
    subs = pg28.sublines(plane, 0)
    rep.check("sublines_on_line", len(subs) == 84, f"{len(subs)}")
    anchors = pg28.anchor_sublines(plane, 0)
    rep.check("sublines_through_1_2", len(anchors) == 7, f"{len(anchors)}")
    cat = pg28.fano_catalogue(plane)
    sizes = {len(set(o.members)) for o in cat.orbits}
    rep.outcome.update(orbits=len(cat.orbits), dedup_factor=cat.dedup_factor)
    rep.check("orbit_sizes_73", sizes == {73}, f"{sizes}")
    cands = pg28.candidate_list(plane, 0, cat.orbits)
    lists = pg28.anchor_lists(plane, 0, cands)
    rep.outcome["candidates"] = len(cands)
    rep.check("anchor_lists_105", all(len(x) == 105 for x in lists),
              f"{[len(x) for x in lists]}")
    index = {s: i for i, s in enumerate(subs)}
    inst = CoverInstance.make(84, [[index[t] for t in r.imprint] for r in cands],
                              [r.orbit.index for r in cands])
    ec = solve(inst)
    rep.outcome["exact_cover_solutions"] = ec.count
    if full or planted:
        if full and not long_run:
            raise LongRunRequired("the full search is a long run; pass --long")
        if planted:
            fixture, cands = pg28.planted_candidates(plane, 0)
        sr = pg28.search_perfect_cover(plane, 0, cands, workers=workers)
        rep.outcome["search"] = sr.to_json()
        rep.check("audit", sr.audit_ok,
                  f"{sr.processed} processed + {sr.pruned} pruned of {sr.partial_families}")
        if planted:
            rep.check("planted_found", sr.solution is not None
                      and pg28.verify_cover(sr.solution, plane))
        else:
            rep.check("search_agrees_with_exact_cover",
                      (sr.solution is None) == (ec.count == 0))
    return rep


def cmd_verify(path: str, additive: bool = False, resolution: str | None = None,
               ranks: list[int] | None = None, expect_ranks: list[int] | None = None) -> RunReport:
    from .design import is_additive, load_design, load_resolution, verify_design, verify_resolution
    from .rank import p_rank

    rep = RunReport("verify", {"path": path, "additive": additive, "resolution": resolution,
                               "ranks": ranks, "expect_ranks": expect_ranks})
    d = load_design(path)
    vr = verify_design(d)
    rep.outcome.update(v=d.v, k=d.k, blocks=d.b, replication=str(vr.replication))
    shown = "; ".join(f"{p}: {c}" for p, c in vr.failures[:10])
    rep.check("verify_design", vr.is_2_design,
              f"{len(vr.failures)} pair failures" + (f" ({shown})" if shown else ""))
    if d.embedding is not None:
        rep.fields.append(str(d.embedding.field.spec))
    if additive:
        rep.check("additive", is_additive(d))
    if resolution:
        rep.check("resolution", verify_resolution(d, load_resolution(resolution)))
    for i, p in enumerate(ranks or []):
        r = p_rank(d, p)
        rep.outcome[f"{p}-rank"] = r
        if expect_ranks and i < len(expect_ranks):
            rep.check(f"{p}-rank", r == expect_ranks[i], f"{r} (expected {expect_ranks[i]})")
    return rep


def cmd_admissible(v: int, k: int, modulus: int, max_exp: int = 64,
                   zero_sum_k: int | None = None, long_run: bool = False) -> RunReport:
    from .design import admissible_field_orders, admissible_primes, least_admissible_field_orders
    from .field import default_field, prime_factors, roots_of_unity, zero_sum_k_subsets

    rep = RunReport("admissible", {"v": v, "k": k, "modulus": modulus, "max_exp": max_exp,
                                   "zero_sum_k": zero_sum_k})
    primes = sorted(admissible_primes(v, k))
    least = least_admissible_field_orders(v, k, modulus, max_exp)
    orders = admissible_field_orders(v, k, modulus, max_exp)
    rep.outcome.update(primes=primes, least_orders={str(p): q for p, q in least.items()},
                       orders=orders[:20])
    rep.outcome["least_orders_as_powers"] = [f"{p}^{_log(q, p)}" for p, q in least.items()]
    if zero_sum_k is not None:
        if not long_run:
            raise LongRunRequired("zero-sum subset checks in large fields need --long")
        for p, q in sorted(least.items()):
            n = _log(q, p)
            f = default_field(p, n)
            rep.fields.append(str(f.spec))
            group = roots_of_unity(f, modulus)
            hits = list(zero_sum_k_subsets(list(group.elements), zero_sum_k, f, limit=1))
            rep.outcome[f"zero_sum_{zero_sum_k}_subsets_in_R_{q}_{modulus}"] = len(hits)
    return rep


def _log(q: int, p: int) -> int:
    n = 0
    while q > 1:
        q //= p
        n += 1
    return n


def cmd_iso(a: str, b: str, expect: str | None = None) -> RunReport:
    from .design import load_design
    from .iso import designs_isomorphic

    rep = RunReport("iso", {"a": a, "b": b, "expect": expect})
    res = designs_isomorphic(load_design(a), load_design(b))
    rep.outcome.update(isomorphic=res.isomorphic, reason=res.reason, nodes=res.nodes)
    if res.witness is not None:
        rep.outcome["witness"] = {str(x): y for x, y in sorted(res.witness.items())}
    if expect is not None:
        rep.check("expected", res.isomorphic == (expect == "iso"), expect)
    return rep


# -- argument parsing ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="steiner", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--report", help="write the JSON run report here")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of text")
    common.add_argument("--long", action="store_true", help="allow long-running steps")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-design", parents=[common], help="develop a stored family")
    p.add_argument("--family", required=True)
    p.add_argument("--out")

    p = sub.add_parser("km", parents=[common], help="Kramer-Mesner matrix and exact cover")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=["count", "first", "all"], default="count")
    p.add_argument("--dump")

    p = sub.add_parser("imprints", parents=[common], help="PG(2,8) subplane imprint search")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--quick", action="store_true", help="structural checks only (default)")
    g.add_argument("--full", action="store_true", help="exhaustive search (needs --long)")
    g.add_argument("--planted", action="store_true", help=argparse.SUPPRESS)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("verify", parents=[common], help="check a design file")
    p.add_argument("path")
    p.add_argument("--additive", action="store_true")
    p.add_argument("--resolution")
    p.add_argument("--rank", type=int, action="append", default=[])
    p.add_argument("--expect-rank", type=int, action="append", default=[])

    p = sub.add_parser("admissible", parents=[common], help="admissible field orders")
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mod", type=int, required=True)
    p.add_argument("--max-exp", type=int, default=64)
    p.add_argument("--zero-sum-k", type=int)

    p = sub.add_parser("iso", parents=[common], help="design isomorphism")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--expect", choices=["iso", "noniso"])
    return ap


def run(args: argparse.Namespace) -> RunReport:
    c = args.command
    if c == "build-design":
        return cmd_build_design(args.family, args.out)
    if c == "km":
        return cmd_km(args.v, args.k, args.mode, args.dump, args.long)
    if c == "imprints":
        return cmd_imprint_search(args.full, args.workers, args.long, args.planted)
    if c == "verify":
        return cmd_verify(args.path, args.additive, args.resolution, args.rank, args.expect_rank)
    if c == "admissible":
        return cmd_admissible(args.v, args.k, args.mod, args.max_exp, args.zero_sum_k, args.long)
    if c == "iso":
        return cmd_iso(args.a, args.b, args.expect)
    raise ValueError(c)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        rep = run(args)
    except (SteinerError, ValueError, OSError, KeyError) as exc:
        print(f"steiner {args.command}: error: {exc}", file=sys.stderr)
        return 2
    rep.seconds = time.perf_counter() - start
    if args.report:
        Path(args.report).write_text(json.dumps(rep.to_json(), indent=2))
    print(json.dumps(rep.to_json(), indent=2) if args.json else rep.render())
    return 0 if rep.ok else 1


if __name__ == "__main__":
    sys.exit(main())
