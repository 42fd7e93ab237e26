"""Knot invariants read off Lee homology.

Page indexing: ``E_1`` is Khovanov homology and ``d_n`` has bidegree
``(1, 4n)``.  A torsion summand ``Q[t]/t^k`` generated in bidegree
``(h, q)`` is the target of a pair cancelled by ``d_k``; its source sits at
``(h - 1, q - 4k)``.
"""

from __future__ import annotations

import json
import weakref
from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

from .cube import LEE, DEFAULT_MAX_CROSSINGS, CubeComplex, build_complex
from .diagram import Diagram
from .errors import BoundViolation, FreePartMalformed, MultiComponent
from .homology import GradedModule, compute_homology, torsion_invariants
from .snf import div_coeff

__all__ = [
    "s_invariant",
    "collapse_page",
    "page_dims",
    "filtered_page_oracle",
    "knight_move_check",
    "KnightMove",
    "unknotting_lower_bound",
    "KnotReport",
    "build_report",
    "sparse_rank",
    "echelon_pivots",
]


def s_invariant(g: GradedModule) -> int:
    free = g.free()
    if len(free) != 2:
        raise FreePartMalformed(f"free rank is {len(free)}, a knot has 2")
    (h1, q1), (h2, q2) = sorted((s.h, s.q) for s in free)
    if h1 != 0 or h2 != 0:
        raise FreePartMalformed(f"free generators in homological degrees {h1}, {h2}")
    if q2 - q1 != 2:
        raise FreePartMalformed(f"free generators at q = {q1}, {q2} do not differ by 2")
    return (q1 + q2) // 2


def collapse_page(g: GradedModule) -> int:
    return 1 + g.max_torsion_order


def page_dims(g: GradedModule, n: int) -> Counter:
    """Bigraded dimensions of ``E_n`` from the module structure."""
    if n < 1:
        raise ValueError("pages start at 1")
    out: Counter = Counter()
    for s in g.summands:
        if s.order is None:
            out[(s.h, s.q)] += 1
        elif s.order >= n:
            out[(s.h, s.q)] += 1
            out[(s.h - 1, s.q - 4 * s.order)] += 1
    return +out


# filtered oracle --------------------------------------------------------------

def sparse_rank(rows: list[dict[int, int]]) -> int:
    """Exact rank over ``Q`` of a sparse matrix given as a list of row dicts."""
    rows = [dict(r) for r in rows if r]
    pivots: dict[int, dict[int, Fraction]] = {}
    rank = 0
    rows.sort(key=len)
    for r in rows:
        r = {j: Fraction(v) for j, v in r.items()}
        while r:
            j = min(r)
            p = pivots.get(j)
            if p is None:
                c = r[j]
                pivots[j] = {k: v / c for k, v in r.items()}
                rank += 1
                break
            f = r[j]
            for k, v in p.items():
                val = r.get(k, 0) - f * v
                if val:
                    r[k] = val
                else:
                    r.pop(k, None)
    return rank


# rank profiles depend only on the complex, so pages 1, 2, ... share them
_PROFILES: "weakref.WeakKeyDictionary[CubeComplex, dict]" = weakref.WeakKeyDictionary()


def echelon_pivots(rows: list[dict[int, int]]) -> list[tuple[int, int]]:
    """Pivot positions ``(row, column)`` of an echelon form built row by row.

    Each row is reduced only by earlier rows, on its leftmost entry, so the
    rank of ``rows[:i]`` restricted to columns ``< j`` is the number of
    pivots with row ``< i`` and column ``< j``.
    """
    pivots: dict[int, dict[int, Fraction | int]] = {}
    out = []
    for i, r in enumerate(rows):
        r = {j: v for j, v in r.items() if v}
        while r:
            j = min(r)
            p = pivots.get(j)
            if p is None:
                c = r[j]
                pivots[j] = {k: div_coeff(v, c) for k, v in r.items()}
                out.append((i, j))
                break
            f = r[j]
            for k, v in p.items():
                val = r.get(k, 0) - f * v
                if val:
                    r[k] = val
                else:
                    r.pop(k, None)
    return out


def filtered_page_oracle(c: CubeComplex, n: int) -> Counter:
    """``E_n`` of the Lee complex at ``t = 1`` filtered by ``q``, from ranks alone.

    With ``F^p`` spanned by generators of filtration ``>= p`` and
    ``rho_h(a, b)`` the rank of ``F^a C^h -> C^{h+1} / F^b``::

        dim E_r^{p,h} = n^{p,h} - rho_h(p, p+r) + rho_h(p+1, p+r)
                        + rho_{h-1}(p-r+1, p) - rho_{h-1}(p-r+1, p+1)

    Each residue class of ``q`` mod 4 is a separate filtered complex with
    ``p = q // 4``.
    """
    if c.theory != LEE:
        raise ValueError("the filtered oracle needs the Lee complex")
    if n < 1:
        raise ValueError("pages start at 1")
    gh, gq = c.gr_h, c.gr_q
    filt = [q // 4 for q in gq]
    by_hc: dict[tuple[int, int], list[int]] = defaultdict(list)
    for g in range(c.size):
        by_hc[(gh[g], gq[g] % 4)].append(g)
    # t = 1 differential, columns = sources
    cols: list[dict[int, int]] = []
    for g in range(c.size):
        col: dict[int, int] = {}
        for y, coef, _ in c.succ[g]:
            val = col.get(y, 0) + coef
            if val:
                col[y] = val
            else:
                col.pop(y, None)
        cols.append(col)

    profiles = _PROFILES.setdefault(c, {})

    def profile(h: int, cls: int) -> list[tuple[int, int]]:
        # Row operations that only add earlier rows to later ones keep the rank of
        # every leading block, so one echelon pass over sources ordered by
        # decreasing filtration (targets by increasing filtration) gives all of
        # rho_h(a, b): it counts pivots (i, j) with filt(i) >= a and filt(j) < b.
        key = (h, cls)
        if key not in profiles:
            src = sorted(by_hc.get(key, ()), key=lambda g: (-filt[g], len(cols[g])))
            rows = [cols[g] for g in src]
            tgt = sorted({y for r in rows for y in r}, key=lambda y: (filt[y], y))
            pos = {y: i for i, y in enumerate(tgt)}
            ordered = [{pos[y]: v for y, v in r.items()} for r in rows]
            profiles[key] = [(filt[src[i]], filt[tgt[j]]) for i, j in echelon_pivots(ordered)]
        return profiles[key]

    @lru_cache(maxsize=None)
    def rho(h: int, cls: int, a: int, b: int) -> int:
        if b <= a:
            return 0
        return sum(1 for fs, ft in profile(h, cls) if fs >= a and ft < b)

    out: Counter = Counter()
    for (h, cls), gens in by_hc.items():
        count = Counter(filt[g] for g in gens)
        for p, npq in count.items():
            r = n
            dim = (
                npq
                - rho(h, cls, p, p + r)
                + rho(h, cls, p + 1, p + r)
                + rho(h - 1, cls, p - r + 1, p)
                - rho(h - 1, cls, p - r + 1, p + 1)
            )
            if dim:
                out[(h, 4 * p + cls)] += dim
    return +out


# knight moves -------------------------------------------------------------------

@dataclass
class KnightMove:
    holds: bool
    pawn_pair: list[list[int]]
    knight_pairs: list[list[list[int]]] = field(default_factory=list)
    counterexample: list[int] | None = None

    def to_dict(self) -> dict:
        d = {"holds": self.holds, "pawn_pair": self.pawn_pair}
        if self.holds:
            d["knight_pairs"] = self.knight_pairs
        else:
            d["counterexample"] = self.counterexample
        return d


def knight_move_check(kh: Counter | dict, s: int) -> KnightMove:
    """Pawn pair at ``(0, s -+ 1)``, everything else paired ``(h, q)`` with ``(h+1, q+4)``."""
    rest = Counter({k: v for k, v in kh.items() if v})
    pawn = [[0, s - 1], [0, s + 1]]
    for h, q in pawn:
        if rest[(h, q)] < 1:
            return KnightMove(False, pawn, counterexample=[h, q])
        rest[(h, q)] -= 1
    pairs = []
    for h, q in sorted(rest):
        m = rest[(h, q)]
        if m <= 0:
            continue
        partner = (h + 1, q + 4)
        if rest[partner] < m:
            return KnightMove(False, pawn, counterexample=[h, q])
        rest[partner] -= m
        rest[(h, q)] = 0
        pairs.extend([[[h, q], [h + 1, q + 4]]] * m)
    return KnightMove(True, pawn, pairs)


# reports -------------------------------------------------------------------------

@dataclass
class KnotReport:
    name: str | None
    pd: str
    kh_poincare: list[list[int]]
    lee_free_gradings: list[list[int]]
    lee_torsion: list[list[int]]
    s: int
    u_X: int
    u_t: int
    collapse_page: int
    knight_move: dict
    unknotting_number: int | None = None
    pages: dict[str, list[list[int]]] | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["pages"] is None:
            del d["pages"]
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)


def unknotting_lower_bound(report: KnotReport) -> int:
    u = report.unknotting_number
    if u is not None and report.u_X > u:
        raise BoundViolation(f"u_X = {report.u_X} exceeds the unknotting number {u}")
    return report.u_X


def _table(c: Counter) -> list[list[int]]:
    return sorted([h, q, d] for (h, q), d in c.items())


def build_report(
    d: Diagram,
    *,
    name: str | None = None,
    unknotting_number: int | None = None,
    pages: int | None = None,
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
    edge: int = 1,
) -> KnotReport:
    if d.multi_component:
        raise MultiComponent(f"diagram has {d.component_count} components; invariants are knot-only")
    cx = build_complex(d, LEE, max_crossings=max_crossings)
    module, basis = compute_homology(cx)
    s = s_invariant(module)
    tor = torsion_invariants(module, basis, edge)
    km = knight_move_check(module.kh_dimensions(), s)
    report = KnotReport(
        name=name,
        pd=d.pd(),
        kh_poincare=_table(module.kh_dimensions()),
        lee_free_gradings=[[f.h, f.q] for f in module.free()],
        lee_torsion=[[t.h, t.q, t.order] for t in module.torsion()],
        s=s,
        u_X=tor["u_X"],
        u_t=tor["u_t"],
        collapse_page=collapse_page(module),
        knight_move=km.to_dict(),
        unknotting_number=unknotting_number,
    )
    if pages:
        report.pages = {str(n): _table(page_dims(module, n)) for n in range(1, pages + 1)}
    unknotting_lower_bound(report)
    return report
