"""Crossing-change maps between the Lee complexes of ``D+`` and ``D-``.

``D-`` is ``D+`` with crossing ``c`` switched.  Its 0-resolution at ``c``
is the 1-resolution of ``D+`` and vice versa, so vertex ``v`` of one cube
and ``v xor e_c`` of the other carry the same circles.

With ``c`` ordered last the maps are
``f(a0, a1) = ((X_j - X_k) a1, a0)`` and ``g(b0, b1) = ((X_j - X_k) b1, b0)``.
We keep the PD order of crossings.  Both cubes are conjugated by the
isomorphism ``x_v -> (-1)^{v_c * #{i > c : v_i = 1}} x_v`` that moves
crossing ``c`` to the end.

``f`` is a sum of two chain maps.  The identity block preserves ``gr_h``
and lowers ``gr_q`` by 2.  The ``(X_j - X_k)`` block lowers ``gr_h`` by 2
and ``gr_q`` by 6.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .cube import LEE, CubeComplex, apply_table, build_complex, saddle_images, verify_d_squared
from .diagram import Diagram, change_crossing
from .errors import IdentityFailed, LemmaViolated, MultiComponent, WrongCrossingSign
from .homology import HomologyBasis, compute_homology, torsion_invariants, x_action

__all__ = [
    "ChainMap",
    "Homotopy",
    "build_f",
    "build_g",
    "build_hedden_ni_homotopy",
    "multiplication_map",
    "identity_suite",
    "induced_map",
    "crossing_change_experiment",
]

Table = list[list[tuple[int, int, int]]]
Vec = dict[int, dict[int, object]]


def _unit(g: int) -> Vec:
    return {g: {0: 1}}


def _row(table: Table, g: int) -> dict:
    """Row ``g`` of a table as ``{(gen, t power): coeff}``."""
    acc: dict = {}
    for y, c, e in table[g]:
        acc[y, e] = acc.get((y, e), 0) + c
    return acc


def _composed_row(first: Table, second: Table, g: int, acc: dict | None = None) -> dict:
    """Row ``g`` of ``second o first`` in the same flat form."""
    acc = {} if acc is None else acc
    for y, c, e in first[g]:
        for z, c2, e2 in second[y]:
            k = (z, e + e2)
            acc[k] = acc.get(k, 0) + c * c2
    return acc


def _clean(row: dict) -> dict:
    return {k: v for k, v in row.items() if v}


def _as_entries(row: dict) -> list[tuple[int, int, int]]:
    return [(y, c, e) for (y, e), c in sorted(row.items()) if c]


@dataclass
class ChainMap:
    source: CubeComplex
    target: CubeComplex
    table: Table
    name: str = "map"

    def apply(self, vec: Vec) -> Vec:
        return apply_table(self.table, vec)

    def image(self, g: int) -> Vec:
        return apply_table(self.table, _unit(g))

    def then(self, other: "ChainMap") -> "ChainMap":
        """``other o self``."""
        if other.source is not self.target:
            raise ValueError("maps are not composable")
        table = [_as_entries(_composed_row(self.table, other.table, g)) for g in range(self.source.size)]
        return ChainMap(self.source, other.target, table, f"{other.name}o{self.name}")

    def commutator_failure(self) -> int | None:
        """First generator ``x`` with ``delta(phi x) != phi(delta x)``, if any."""
        src, tgt = self.source.succ, self.target.succ
        for g in range(self.source.size):
            if _clean(_composed_row(self.table, tgt, g)) != _clean(_composed_row(src, self.table, g)):
                return g
        return None

    def first_difference(self, other: "ChainMap") -> int | None:
        for g in range(self.source.size):
            if _clean(_row(self.table, g)) != _clean(_row(other.table, g)):
                return g
        return None

    def bidegrees(self) -> set[tuple[int, int]]:
        """The set of ``(delta gr_h, delta gr_q)`` over all nonzero entries."""
        s, t = self.source, self.target
        return {
            (t.gr_h[y] - s.gr_h[g], t.gr_q[y] - 4 * e - s.gr_q[g])
            for g, out in enumerate(self.table)
            for y, _, e in out
        }


@dataclass
class Homotopy:
    complex: CubeComplex
    table: Table
    crossing: int

    def apply(self, vec: Vec) -> Vec:
        return apply_table(self.table, vec)

    def boundary(self) -> ChainMap:
        """``delta H + H delta`` as a chain map."""
        c = self.complex
        table = []
        for g in range(c.size):
            row = _composed_row(self.table, c.succ, g)
            table.append(_as_entries(_composed_row(c.succ, self.table, g, row)))
        return ChainMap(c, c, table, "dH+Hd")


def _mult_images(c: CubeComplex, edges: list[tuple[int, int]], g: int) -> list[tuple[int, int, int]]:
    """``sum coeff * X_edge`` applied to generator ``g`` as ``(mask, coeff, t power)``."""
    v, mask = c.gen_vertex[g], c.gen_mask[g]
    r = c.resolutions[v]
    acc: dict[tuple[int, int], int] = {}
    for edge, coeff in edges:
        bit = 1 << r.circle(edge)
        if mask & bit:
            if c.theory != LEE:
                continue
            key = (mask ^ bit, 1)
        else:
            key = (mask | bit, 0)
        acc[key] = acc.get(key, 0) + coeff
    return [(m, co, e) for (m, e), co in sorted(acc.items()) if co]


def multiplication_map(c: CubeComplex, edges: list[tuple[int, int]], name: str = "X") -> ChainMap:
    """Multiplication by ``sum coeff * X_edge`` on ``c``."""
    table = []
    for g in range(c.size):
        v = c.gen_vertex[g]
        table.append([(c.generator(v, m), co, e) for m, co, e in _mult_images(c, edges, g)])
    return ChainMap(c, c, table, name)


def _later_ones(v: int, c: int) -> int:
    return bin(v >> (c + 1)).count("1")


def _swap_map(src: CubeComplex, tgt: CubeComplex, c: int, jk: tuple[int, int], name: str) -> ChainMap:
    """Identity on ``v_c = 0`` into ``v + e_c``; ``X_j - X_k`` on ``v_c = 1`` into ``v - e_c``."""
    j, k = jk
    bit = 1 << c
    table = []
    for g in range(src.size):
        v, mask = src.gen_vertex[g], src.gen_mask[g]
        sign = -1 if _later_ones(v, c) & 1 else 1
        if not v & bit:
            table.append([(tgt.generator(v | bit, mask), sign, 0)])
        else:
            w = v ^ bit
            table.append([
                (tgt.generator(w, m), sign * co, e) for m, co, e in _mult_images(src, [(j, 1), (k, -1)], g)
            ])
    return ChainMap(src, tgt, table, name)


def _pair(d: Diagram, c: int, want: int) -> Diagram:
    if not 0 <= c < d.n:
        raise IndexError(f"crossing {c} out of range for {d.n} crossings")
    if d.crossings[c].sign != want:
        kind = "positive" if want > 0 else "negative"
        raise WrongCrossingSign(f"crossing {c + 1} is not {kind}")
    return change_crossing(d, c)


def build_f(d_plus: Diagram, c: int, theory: str = LEE, *, complexes=None) -> ChainMap:
    """``f: C(D+) -> C(D-)`` for the positive crossing ``c`` (0-based)."""
    d_minus = _pair(d_plus, c, 1)
    src, tgt = complexes or (build_complex(d_plus, theory), build_complex(d_minus, theory))
    return _swap_map(src, tgt, c, d_plus.crossings[c].diagonal, "f")


def build_g(d_minus: Diagram, c: int, theory: str = LEE, *, complexes=None) -> ChainMap:
    """``g: C(D-) -> C(D+)`` for the negative crossing ``c`` (0-based)."""
    d_plus = _pair(d_minus, c, -1)
    src, tgt = complexes or (build_complex(d_minus, theory), build_complex(d_plus, theory))
    return _swap_map(src, tgt, c, d_plus.crossings[c].diagonal, "g")


def build_hedden_ni_homotopy(d: Diagram, c: int, theory: str = LEE, *, complex_=None) -> Homotopy:
    """``H``: the saddle of the switched crossing, run from the 1- to the 0-resolution.

    Satisfies ``delta H + H delta = X_j + X_k`` for either sign of ``c``.
    """
    cx = complex_ or build_complex(d, theory)
    if not 0 <= c < d.n:
        raise IndexError(f"crossing {c} out of range for {d.n} crossings")
    flipped = d.crossings[c].reversed()
    bit = 1 << c
    table: Table = [[] for _ in range(cx.size)]
    for v in range(1 << d.n):
        if not v & bit:
            continue
        w = v ^ bit
        _, images = saddle_images(cx.resolutions[v], cx.resolutions[w], flipped, theory)
        sign = -1 if bin(v & (bit - 1)).count("1") & 1 else 1
        for mask in range(1 << cx.resolutions[v].k):
            g = cx.generator(v, mask)
            table[g] = [(cx.generator(w, m), sign * co, e) for m, e, co in images[mask]]
    return Homotopy(cx, table, c)


# homology level ------------------------------------------------------------------

def induced_map(phi: ChainMap, src: HomologyBasis, tgt: HomologyBasis) -> dict:
    """``phi_*`` as ``{(h, j): {(h', j'): poly}}`` on nontrivial homology generators."""
    out = {}
    red_t = tgt.reduction
    for h, d in src.degrees.items():
        for j, o in enumerate(d.orders):
            if o == 0:
                continue
            z = red_t.project(phi.apply(src.reduction.include(d.generators[j])))
            by_h: dict[int, Vec] = {}
            for y, poly in z.items():
                by_h.setdefault(tgt.complex.gr_h[y], {})[y] = poly
            col = {}
            for hh, part in by_h.items():
                for jj, poly in enumerate(tgt.coordinates(hh, part)):
                    if poly:
                        col[(hh, jj)] = poly
            out[(h, j)] = col
    return out


def _compose(a: dict, b: dict, basis: HomologyBasis) -> dict:
    """``b o a`` reduced modulo the torsion orders of ``basis``."""
    out = {}
    for key, col in a.items():
        acc: dict = {}
        for mid, p in col.items():
            for tgt, q in b.get(mid, {}).items():
                poly = acc.setdefault(tgt, {})
                for e1, c1 in p.items():
                    for e2, c2 in q.items():
                        e = e1 + e2
                        poly[e] = poly.get(e, 0) + c1 * c2
        out[key] = _normalise(acc, basis)
    return out


def _normalise(col: dict, basis: HomologyBasis) -> dict:
    res = {}
    for (h, j), poly in col.items():
        o = basis.degrees[h].orders[j]
        p = {e: c for e, c in poly.items() if c and (o is None or e < o)}
        if p:
            res[(h, j)] = p
    return res


def _x_induced(basis: HomologyBasis, edge: int, scale: int) -> dict:
    out = {}
    table = basis.complex.multiplication(edge)
    for h, d in basis.degrees.items():
        for j, o in enumerate(d.orders):
            if o == 0:
                continue
            coords = x_action(basis, edge, h, j, 0, table)
            col = {(h, jj): {e: scale * c for e, c in p.items()} for jj, p in enumerate(coords) if p}
            out[(h, j)] = _normalise(col, basis)
    return out


@dataclass
class SuiteReport:
    crossing: int
    sign: int
    checks: dict[str, bool] = field(default_factory=dict)
    details: dict[str, object] = field(default_factory=dict)
    edge_signs: dict[int, int] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def first_failure(self) -> str | None:
        return next((k for k, v in self.checks.items() if not v), None)

    def to_dict(self) -> dict:
        return {
            "crossing": self.crossing + 1,
            "sign": self.sign,
            "ok": self.ok,
            "checks": dict(self.checks),
            "details": {k: v for k, v in self.details.items()},
            "edge_signs": {str(k): v for k, v in sorted(self.edge_signs.items())},
        }


@lru_cache(maxsize=4)
def _lee_data(d: Diagram) -> tuple[CubeComplex, bool]:
    # a knot's own complex is shared by the suites of all its crossings
    cx = build_complex(d, LEE)
    return cx, verify_d_squared(cx).ok


@lru_cache(maxsize=4)
def _lee_basis(d: Diagram) -> HomologyBasis:
    return compute_homology(_lee_data(d)[0])[1]


@lru_cache(maxsize=64)
def _two_x(d: Diagram, edge: int) -> dict:
    return _x_induced(_lee_basis(d), edge, 2)


def identity_suite(d: Diagram, c: int, *, homology_level: bool = True, raise_on_failure: bool = False) -> SuiteReport:
    """Every chain-level identity for a change at crossing ``c`` (0-based), plus ``g_* f_* = +-2X_*``."""
    sign = d.crossings[c].sign
    d_other = change_crossing(d, c)
    d_plus, d_minus = (d, d_other) if sign > 0 else (d_other, d)
    (cp, ok_p), (cm, ok_m) = _lee_data(d_plus), _lee_data(d_minus)
    rep = SuiteReport(c, sign)
    rep.checks["d_squared"] = ok_p and ok_m
    f = build_f(d_plus, c, complexes=(cp, cm))
    g = build_g(d_minus, c, complexes=(cm, cp))
    j, k = d_plus.crossings[c].diagonal
    for name, phi in (("f_chain_map", f), ("g_chain_map", g)):
        bad = phi.commutator_failure()
        rep.checks[name] = bad is None
        if bad is not None:
            rep.details[name] = bad
    diff_p = multiplication_map(cp, [(j, 1), (k, -1)], "Xj-Xk")
    diff_m = multiplication_map(cm, [(j, 1), (k, -1)], "Xj-Xk")
    for name, lhs, rhs in (("g_after_f", f.then(g), diff_p), ("f_after_g", g.then(f), diff_m)):
        bad = lhs.first_difference(rhs)
        rep.checks[name] = bad is None
        if bad is not None:
            rep.details[name] = bad
    for label, dd, cx in (("plus", d_plus, cp), ("minus", d_minus, cm)):
        hom = build_hedden_ni_homotopy(dd, c, complex_=cx)
        jj, kk = dd.crossings[c].diagonal
        bad = hom.boundary().first_difference(multiplication_map(cx, [(jj, 1), (kk, 1)]))
        rep.checks[f"homotopy_{label}"] = bad is None
        if bad is not None:
            rep.details[f"homotopy_{label}"] = bad
    if homology_level and d.is_knot:
        bp, bm = _lee_basis(d_plus), _lee_basis(d_minus)
        gf = _compose(induced_map(f, bp, bm), induced_map(g, bm, bp), bp)
        ok = True
        for edge in range(1, d.edge_count + 1):
            two_x = _two_x(d_plus, edge)
            if gf == two_x:
                rep.edge_signs[edge] = 1
            elif gf == {key: {kk: {e: -v for e, v in p.items()} for kk, p in col.items()} for key, col in two_x.items()}:
                rep.edge_signs[edge] = -1
            else:
                ok = False
                rep.details.setdefault("homology_2x", edge)
        rep.checks["homology_2x"] = ok
    if raise_on_failure and not rep.ok:
        name = rep.first_failure()
        raise IdentityFailed(f"{name} failed at crossing {c + 1}: {rep.details.get(name)}")
    return rep


def _u_x(d: Diagram) -> tuple[int, bool]:
    module, basis = compute_homology(build_complex(d, LEE))
    trivial = dict(module.kh_dimensions()) == {(0, -1): 1, (0, 1): 1}
    return torsion_invariants(module, basis)["u_X"], trivial


def crossing_change_experiment(d: Diagram, crossings: list[int]) -> dict:
    """Change the given crossings (0-based) one at a time; ``|delta u_X| <= 1`` at every step."""
    if d.multi_component:
        raise MultiComponent("crossing-change experiment needs a knot")
    steps = []
    current = d
    u_prev, trivial = _u_x(current)
    start = u_prev
    for c in crossings:
        nxt = change_crossing(current, c)
        u_next, trivial = _u_x(nxt)
        step = {"crossing": c + 1, "u_X_before": u_prev, "u_X_after": u_next}
        steps.append(step)
        if abs(u_next - u_prev) > 1:
            raise LemmaViolated(f"u_X jumped from {u_prev} to {u_next} at crossing {c + 1}")
        current, u_prev = nxt, u_next
    report = {"steps": steps, "u_X_start": start, "ends_trivial": trivial}
    if trivial and steps:
        report["unknotting_bound"] = {"changes": len(steps), "u_X": start, "holds": start <= len(steps)}
    return report
