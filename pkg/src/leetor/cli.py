"""Command line front end: ``leetor compute | table | verify | pages``."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources
from pathlib import Path
from typing import Iterator

from . import __version__
from .cube import DEFAULT_MAX_CROSSINGS, KH, LEE, build_complex, verify_d_squared
from .diagram import Diagram, braid_closure, parse_pd, random_braid_word
from .errors import LeetorError, MalformedPd, MultiComponent, SizeLimitExceeded
from .homology import compute_homology
from .invariants import build_report, filtered_page_oracle, page_dims

log = logging.getLogger("leetor")

EXIT_OK, EXIT_ERROR, EXIT_PARSE, EXIT_SIZE, EXIT_MULTI, EXIT_INVARIANT = 0, 1, 2, 3, 4, 5


# table ------------------------------------------------------------------------------

def bundled_table(extended: bool = False) -> Path:
    name = "knots_extended.jsonl" if extended else "knots.jsonl"
    return Path(str(resources.files("leetor") / "data" / name))


def read_table(path: str | os.PathLike) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            try:
                entry = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedPd(f"{path}:{lineno}: {exc}") from None
            if "name" not in entry or "pd" not in entry:
                raise MalformedPd(f"{path}:{lineno}: entries need 'name' and 'pd'")
            yield entry


def lookup(name: str) -> dict:
    for ext in (False, True):
        for entry in read_table(bundled_table(ext)):
            if entry["name"] == name:
                return entry
    raise MalformedPd(f"no knot named {name!r} in the bundled tables")


def entry_diagram(entry: dict) -> Diagram:
    return parse_pd(entry["pd"], unknot_marker=bool(entry.get("unknot")) or not entry["pd"].strip())


# cache ------------------------------------------------------------------------------

class Cache:
    def __init__(self, directory: str | None):
        self.dir = Path(directory) if directory else None
        if self.dir:
            self.dir.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(**parts) -> str:
        blob = json.dumps({**parts, "version": __version__}, sort_keys=True)
        return hashlib.sha256(blob.encode()).hexdigest()

    def get(self, key: str) -> str | None:
        if not self.dir:
            return None
        p = self.dir / f"{key}.json"
        return p.read_text(encoding="utf-8") if p.exists() else None

    def put(self, key: str, text: str) -> None:
        if self.dir:
            tmp = self.dir / f".{key}.{os.getpid()}.tmp"
            tmp.write_text(text, encoding="utf-8")
            tmp.replace(self.dir / f"{key}.json")


# computations -----------------------------------------------------------------------

def compute_text(d: Diagram, *, theory: str, name: str | None, unknotting_number: int | None,
                 pages: int | None, max_crossings: int, cache: Cache) -> str:
    """Canonical JSON for one diagram, through the cache."""
    key = Cache.key(pd=d.pd(), theory=theory, name=name, u=unknotting_number, pages=pages)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if theory == KH:
        if d.multi_component:
            raise MultiComponent(f"diagram has {d.component_count} components")
        module, _ = compute_homology(build_complex(d, KH, max_crossings=max_crossings))
        out = {"name": name, "pd": d.pd(), **module.to_dict()}
        text = json.dumps(out, sort_keys=True)
    else:
        report = build_report(d, name=name, unknotting_number=unknotting_number, pages=pages,
                              max_crossings=max_crossings)
        text = report.to_json()
    cache.put(key, text)
    return text


def _check_entry(entry: dict, report: dict) -> list[str]:
    problems = []
    u = entry.get("unknotting_number")
    if u is not None:
        if report["u_X"] > u:
            problems.append(f"u_X = {report['u_X']} > u = {u}")
        if u <= 2 and not report["knight_move"]["holds"]:
            problems.append("knight move fails although u <= 2")
        if u <= 2 and report["u_X"] > 0 and report["collapse_page"] != 2:
            problems.append(f"collapse page {report['collapse_page']} although u <= 2")
    for k, v in (entry.get("expected") or {}).items():
        if report.get(k) != v:
            problems.append(f"expected {k} = {v!r}, got {report.get(k)!r}")
    return problems


def _table_worker(args: tuple) -> dict:
    entry, max_crossings, cache_dir = args
    name = entry["name"]
    try:
        d = entry_diagram(entry)
        text = compute_text(d, theory=LEE, name=name, unknotting_number=entry.get("unknotting_number"),
                            pages=None, max_crossings=max_crossings, cache=Cache(cache_dir))
        report = json.loads(text)
        return {"name": name, "report": report, "problems": _check_entry(entry, report)}
    except LeetorError as exc:
        return {"name": name, "error": f"{type(exc).__name__}: {exc}", "exit_code": exc.exit_code}


# argument parsing -------------------------------------------------------------------

def _add_diagram_args(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pd", help="PD code, e.g. 'X[1,5,2,4] X[3,1,4,6] X[5,3,6,2]'")
    g.add_argument("--name", help="knot name from the bundled tables, e.g. 3_1 or 3_1_mirror")
    g.add_argument("--unknot", action="store_true", help="the crossingless unknot")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--max-crossings", type=int, default=DEFAULT_MAX_CROSSINGS, metavar="N")
    p.add_argument("--cache-dir", default=os.environ.get("LEETOR_CACHE"), metavar="PATH",
                   help="result cache (default: $LEETOR_CACHE, off if unset)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leetor", description="Khovanov and Lee homology of knot diagrams.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="homology and invariants of one knot")
    _add_diagram_args(p)
    _add_common(p)
    p.add_argument("--theory", choices=(KH, LEE), default=LEE)
    p.add_argument("--pages", type=int, metavar="N", help="also emit pages E_1..E_N")

    p = sub.add_parser("table", help="batch over a JSON-lines knot table")
    p.add_argument("path", nargs="?", help="table file (default: bundled table)")
    p.add_argument("--extended", action="store_true", help="use the bundled 7-8 crossing table")
    p.add_argument("--jobs", type=int, default=1, metavar="N")
    _add_common(p)

    p = sub.add_parser("verify", help="crossing-change identity suite")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--pd")
    g.add_argument("--name")
    g.add_argument("--random", type=int, metavar="SEED", help="random braid closure with this seed")
    p.add_argument("--crossings", type=int, default=6, help="length of the random braid word")
    p.add_argument("--crossing", type=int, metavar="I", help="1-based crossing (default: all)")
    p.add_argument("--corrupt-signs", action="store_true", help="negative control: drop the cube signs")
    p.add_argument("--json", action="store_true")
    p.add_argument("--max-crossings", type=int, default=DEFAULT_MAX_CROSSINGS, metavar="N")

    p = sub.add_parser("pages", help="Lee spectral sequence pages")
    _add_diagram_args(p)
    p.add_argument("--pages", type=int, default=3, metavar="N")
    p.add_argument("--oracle", action="store_true", help="cross-check against the filtered computation")
    p.add_argument("--json", action="store_true")
    p.add_argument("--max-crossings", type=int, default=DEFAULT_MAX_CROSSINGS, metavar="N")
    return parser


def _diagram_from(args) -> tuple[Diagram, str | None, int | None]:
    if getattr(args, "unknot", False):
        return parse_pd("", unknot_marker=True), "0_1", 0
    if getattr(args, "name", None):
        entry = lookup(args.name)
        return entry_diagram(entry), entry["name"], entry.get("unknotting_number")
    return parse_pd(args.pd), None, None


def _emit(obj, as_json: bool, text: str | None = None) -> None:
    if as_json:
        print(json.dumps(obj, sort_keys=True))
    else:
        print(text if text is not None else json.dumps(obj, sort_keys=True, indent=2))


def _fmt_table(rows: list[list[int]]) -> str:
    return "  ".join(f"({h},{q})" + (f"^{m}" if m > 1 else "") for h, q, m in rows) or "0"


def cmd_compute(args) -> int:
    d, name, u = _diagram_from(args)
    if d.n > args.max_crossings:
        raise SizeLimitExceeded(f"{d.n} crossings exceeds the cap of {args.max_crossings}")
    text = compute_text(d, theory=args.theory, name=name, unknotting_number=u, pages=args.pages,
                        max_crossings=args.max_crossings, cache=Cache(args.cache_dir))
    if args.json:
        print(text)
        return EXIT_OK
    r = json.loads(text)
    lines = [f"knot      {r.get('name') or '-'}", f"pd        {r['pd'] or '(crossingless unknot)'}"]
    if args.theory == KH:
        lines.append(f"Kh        {_fmt_table(r['kh'])}")
    else:
        lines += [
            f"Kh        {_fmt_table(r['kh_poincare'])}",
            f"Lee free  {r['lee_free_gradings']}",
            f"Lee tors  {r['lee_torsion']}",
            f"s         {r['s']}",
            f"u_X, u_t  {r['u_X']}, {r['u_t']}",
            f"collapse  E_{r['collapse_page']}",
            f"knight    {'holds' if r['knight_move']['holds'] else 'fails at ' + str(r['knight_move']['counterexample'])}",
        ]
        for n, rows in sorted((r.get("pages") or {}).items(), key=lambda kv: int(kv[0])):
            lines.append(f"E_{n:<8}{_fmt_table(rows)}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_table(args) -> int:
    path = args.path or bundled_table(args.extended)
    entries = list(read_table(path))
    jobs = [(e, args.max_crossings, args.cache_dir) for e in entries]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_table_worker, jobs))
    else:
        results = [_table_worker(j) for j in jobs]
    errors = sum(1 for r in results if "error" in r)
    violations = sum(len(r.get("problems", ())) for r in results)
    summary = {"entries": len(results), "errors": errors, "violations": violations}
    if args.json:
        print(json.dumps({"results": results, "summary": summary}, sort_keys=True))
    else:
        for r in results:
            if "error" in r:
                print(f"{r['name']:<14} ERROR {r['error']}")
                continue
            rep = r["report"]
            flag = "ok" if not r["problems"] else "VIOLATION " + "; ".join(r["problems"])
            print(f"{r['name']:<14} s={rep['s']:>3} u_X={rep['u_X']} u_t={rep['u_t']} "
                  f"E_{rep['collapse_page']} knight={'y' if rep['knight_move']['holds'] else 'n'}  {flag}")
        print(f"{len(results)} entries, {errors} errors, {violations} violations")
    if violations:
        return EXIT_INVARIANT
    return EXIT_ERROR if errors else EXIT_OK


def cmd_verify(args) -> int:
    from .crossing_maps import identity_suite

    if args.random is not None:
        rng = random.Random(args.random)
        strands = 3 if args.crossings % 2 == 0 else 2
        d = braid_closure(random_braid_word(rng, args.crossings, strands), strands)
        name = f"random[{args.random}]"
    elif args.name:
        entry = lookup(args.name)
        d, name = entry_diagram(entry), entry["name"]
    else:
        d, name = parse_pd(args.pd), None
    if d.n > args.max_crossings:
        raise SizeLimitExceeded(f"{d.n} crossings exceeds the cap of {args.max_crossings}")
    out: dict = {"name": name, "pd": d.pd()}
    if args.corrupt_signs:
        rep = verify_d_squared(build_complex(d, LEE, sign_rule=lambda u, i: 1))
        out["d_squared"] = {"ok": rep.ok, "first_failure": rep.first_failure}
        out["ok"] = rep.ok
        out["failed"] = None if rep.ok else "d_squared"
    else:
        if d.n == 0:
            raise MalformedPd("the crossingless unknot has no crossing to change")
        idx = [args.crossing - 1] if args.crossing else list(range(d.n))
        for i in idx:
            if not 0 <= i < d.n:
                raise MalformedPd(f"crossing {i + 1} out of range 1..{d.n}")
        suites = [identity_suite(d, i).to_dict() for i in idx]
        out["crossings"] = suites
        out["ok"] = all(s["ok"] for s in suites)
        out["failed"] = next((f"crossing {s['crossing']}: " + next(k for k, v in s["checks"].items() if not v)
                              for s in suites if not s["ok"]), None)
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        print(f"pd {out['pd']}")
        if "d_squared" in out:
            print(f"d^2 = 0: {'pass' if out['ok'] else 'FAIL at ' + json.dumps(out['d_squared']['first_failure'])}")
        for s in out.get("crossings", []):
            checks = " ".join(f"{k}={'pass' if v else 'FAIL'}" for k, v in s["checks"].items())
            print(f"crossing {s['crossing']} ({'+' if s['sign'] > 0 else '-'}): {checks}")
            if s["edge_signs"]:
                print(f"  g*f* = sign * 2X_i, sign by edge: {s['edge_signs']}")
        print("all identities hold" if out["ok"] else f"FAILED: {out['failed']}")
    return EXIT_OK if out["ok"] else EXIT_INVARIANT


def cmd_pages(args) -> int:
    d, name, _ = _diagram_from(args)
    if d.multi_component:
        raise MultiComponent(f"diagram has {d.component_count} components")
    cx = build_complex(d, LEE, max_crossings=args.max_crossings)
    module, _ = compute_homology(cx)
    table = {}
    agree = True
    for n in range(1, args.pages + 1):
        closed = page_dims(module, n)
        table[str(n)] = sorted([h, q, m] for (h, q), m in closed.items())
        if args.oracle and filtered_page_oracle(cx, n) != closed:
            agree = False
    out = {"name": name, "pd": d.pd(), "pages": table}
    if args.oracle:
        out["oracle_agrees"] = agree
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        for n, rows in table.items():
            print(f"E_{n}: {_fmt_table(rows)}")
        if args.oracle:
            print("filtered oracle agrees" if agree else "filtered oracle DISAGREES")
    return EXIT_OK if agree else EXIT_INVARIANT


COMMANDS = {"compute": cmd_compute, "table": cmd_table, "verify": cmd_verify, "pages": cmd_pages}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except LeetorError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
