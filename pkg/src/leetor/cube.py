"""The cube of resolutions and its bigraded chain complex.

Generators are pairs ``(vertex, circle subset)`` taken as a ``Q[t]``-basis of
``C = (+)_v R_v``; for the Khovanov theory the same generators span the
complex over ``Q`` (``t = 0``).  Generators are numbered vertex by vertex in
binary order of the vertex and, inside a vertex, lexicographically by the
sorted circle subset.

A differential entry from a generator of quantum degree ``q_a`` to one of
degree ``q_b`` is ``c * t^e`` with ``e = (q_b - q_a) / 4``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

from .circle_algebra import LeeElement, circles_of
from .diagram import Diagram, Resolution, resolve, vertex_bits
from .errors import NonPlanarDiagram, SizeLimitExceeded, VertexMismatch
from .snf import MonomialMatrix

__all__ = [
    "KH",
    "LEE",
    "EdgeMap",
    "CubeComplex",
    "build_complex",
    "edge_map_apply",
    "saddle_images",
    "verify_d_squared",
    "DSquaredReport",
    "standard_sign",
    "DEFAULT_MAX_CROSSINGS",
]

KH = "kh"
LEE = "lee"
DEFAULT_MAX_CROSSINGS = 16

# images[mask] = [(target mask, t power, coefficient), ...]
Images = list[list[tuple[int, int, int]]]
Vec = dict[int, dict[int, object]]


def standard_sign(u: int, i: int) -> int:
    """``(-1)^{eps_{u,v}}`` with ``eps = sum_{j<i} u_j``."""
    return -1 if bin(u & ((1 << i) - 1)).count("1") & 1 else 1


@lru_cache(maxsize=None)
def subset_order(k: int) -> tuple[tuple[int, ...], dict[int, int]]:
    """Circle subsets of ``range(k)`` as masks, lexicographic in the sorted subset."""
    masks = sorted(range(1 << k), key=circles_of)
    return tuple(masks), {m: i for i, m in enumerate(masks)}


def saddle_images(ru: Resolution, rv: Resolution, crossing, theory: str) -> tuple[str, Images]:
    """Merge or split map ``R_u -> R_v`` for resolutions differing at ``crossing``.

    Merge is the projection (``X^2 = t``, or ``0`` for Khovanov); split is the
    projection followed by multiplication by ``X_j + X_k``.
    """
    j, k = crossing.diagonal
    reps: dict[int, int] = {}
    for e, c in enumerate(ru.circle_of_edge, start=1):
        reps.setdefault(c, e)
    phi = [1 << rv.circle(reps[c]) for c in range(ru.k)]
    if rv.k == ru.k - 1:
        kind = "merge"
    elif rv.k == ru.k + 1:
        kind = "split"
        src = ru.circle(j)
        b1, b2 = 1 << rv.circle(j), 1 << rv.circle(k)
        phi[src] = b1
    else:
        raise NonPlanarDiagram(
            f"changing one smoothing took {ru.k} circles to {rv.k}; the PD code is not planar"
        )
    size = 1 << ru.k
    tm = [0] * size
    tp = [0] * size
    for s in range(1, size):
        low = s & -s
        prev = s ^ low
        b = phi[low.bit_length() - 1]
        if tm[prev] & b:
            tm[s] = tm[prev] ^ b
            tp[s] = tp[prev] + 1
        else:
            tm[s] = tm[prev] | b
            tp[s] = tp[prev]
    lee = theory == LEE
    images: Images = []
    if kind == "merge":
        for s in range(size):
            if tp[s] == 0:
                images.append([(tm[s], 0, 1)])
            else:
                images.append([(tm[s], tp[s], 1)] if lee else [])
    else:
        sbit = 1 << src
        for s in range(size):
            mm = tm[s]
            if s & sbit:
                out = [(mm | b2, 0, 1)]
                if lee:
                    out.insert(0, (mm ^ b1, 1, 1))
            else:
                out = [(mm | b1, 0, 1), (mm | b2, 0, 1)]
            images.append(out)
    return kind, images


@dataclass
class EdgeMap:
    source: int
    target: int
    crossing: int
    kind: str
    sign: int
    images: Images

    def __post_init__(self):
        if self.target != self.source | (1 << self.crossing) or self.source & (1 << self.crossing):
            raise ValueError("edge maps go from u to u + e_i")


class CubeComplex:
    """Bigraded cube complex of a diagram for the Khovanov or Lee theory."""

    def __init__(self, diagram: Diagram, theory: str, sign_rule: Callable[[int, int], int] = standard_sign):
        if theory not in (KH, LEE):
            raise ValueError(f"theory must be {KH!r} or {LEE!r}")
        self.theory = theory
        self.diagram = diagram
        self.sign_rule = sign_rule
        n = self.n = diagram.n
        self.resolutions = [resolve(diagram, v) for v in range(1 << n)]
        self.offset: list[int] = []
        gv: list[int] = []
        gm: list[int] = []
        gh: list[int] = []
        gq: list[int] = []
        npl, nmi = diagram.n_plus, diagram.n_minus
        for v, r in enumerate(self.resolutions):
            self.offset.append(len(gv))
            height = bin(v).count("1")
            q0 = npl - 2 * nmi + height + r.k
            for mask in subset_order(r.k)[0]:
                gv.append(v)
                gm.append(mask)
                gh.append(height - nmi)
                gq.append(q0 - 2 * bin(mask).count("1"))
        self.gen_vertex, self.gen_mask, self.gr_h, self.gr_q = gv, gm, gh, gq
        self.size = len(gv)
        self.succ: list[list[tuple[int, int, int]]] = [[] for _ in range(self.size)]
        self._edge_kinds: dict[tuple[int, int], str] = {}
        for u in range(1 << n):
            for i in range(n):
                if not (u >> i) & 1:
                    self._add_edge(u, i)

    # generators -------------------------------------------------------
    def generator(self, vertex: int, mask: int) -> int:
        return self.offset[vertex] + subset_order(self.resolutions[vertex].k)[1][mask]

    def degrees(self) -> list[int]:
        return sorted(set(self.gr_h))

    def generators_in_degree(self, h: int) -> list[int]:
        return [g for g in range(self.size) if self.gr_h[g] == h]

    # edge maps --------------------------------------------------------
    def edge_map(self, u: int, i: int) -> EdgeMap:
        v = u | (1 << i)
        kind, images = saddle_images(
            self.resolutions[u], self.resolutions[v], self.diagram.crossings[i], self.theory
        )
        return EdgeMap(u, v, i, kind, self.sign_rule(u, i), images)

    def edge_kind(self, u: int, i: int) -> str:
        return self._edge_kinds[(u, i)]

    def _add_edge(self, u: int, i: int) -> None:
        e = self.edge_map(u, i)
        self._edge_kinds[(u, i)] = e.kind
        korder = subset_order(self.resolutions[u].k)[0]
        tindex = subset_order(self.resolutions[e.target].k)[1]
        base_u, base_v = self.offset[u], self.offset[e.target]
        succ = self.succ
        sign = e.sign
        for idx, mask in enumerate(korder):
            out = succ[base_u + idx]
            for tmask, tpow, c in e.images[mask]:
                out.append((base_v + tindex[tmask], sign * c, tpow))

    # elements ---------------------------------------------------------
    def element_to_vec(self, a: LeeElement) -> Vec:
        vec: Vec = {}
        for (v, s, p), c in a.terms.items():
            if v >= len(self.resolutions) or s >> self.resolutions[v].k:
                raise VertexMismatch(f"term X{circles_of(s)}@{v} is not a basis element of this cube")
            g = self.generator(v, s)
            poly = vec.setdefault(g, {})
            poly[p] = poly.get(p, 0) + c
        return vec

    def vec_to_element(self, vec: Vec) -> LeeElement:
        terms = {}
        for g, poly in vec.items():
            for p, c in poly.items():
                if c:
                    terms[(self.gen_vertex[g], self.gen_mask[g], p)] = c
        return LeeElement(terms, self.n)

    def apply_differential(self, vec: Vec) -> Vec:
        return apply_table(self.succ, vec)

    def multiplication(self, edge: int) -> list[list[tuple[int, int, int]]]:
        """Chain-level multiplication by ``X_edge`` as ``gen -> [(gen, coeff, t power)]``."""
        if not 1 <= edge <= self.diagram.edge_count:
            raise ValueError(f"edge {edge} out of range")
        out: list[list[tuple[int, int, int]]] = []
        lee = self.theory == LEE
        for g in range(self.size):
            v, mask = self.gen_vertex[g], self.gen_mask[g]
            bit = 1 << self.resolutions[v].circle(edge)
            if mask & bit:
                out.append([(self.generator(v, mask ^ bit), 1, 1)] if lee else [])
            else:
                out.append([(self.generator(v, mask | bit), 1, 0)])
        return out

    # matrices ---------------------------------------------------------
    def degree_matrix(self, h: int) -> tuple[MonomialMatrix, list[int], list[int]]:
        """``delta: C^h -> C^{h+1}`` with the generator lists for columns and rows."""
        cols = self.generators_in_degree(h)
        rows = self.generators_in_degree(h + 1)
        rindex = {g: i for i, g in enumerate(rows)}
        m = MonomialMatrix(len(rows), len(cols))
        for j, g in enumerate(cols):
            for y, c, e in self.succ[g]:
                m.add(rindex[y], j, c, e)
        return m, cols, rows

    def blocks(self) -> dict[tuple[int, int], MonomialMatrix]:
        """Differential grouped by the bigrading of its source generators."""
        by_src: dict[tuple[int, int], list[int]] = {}
        for g in range(self.size):
            by_src.setdefault((self.gr_h[g], self.gr_q[g]), []).append(g)
        out = {}
        for key, cols in sorted(by_src.items()):
            targets = sorted({y for g in cols for y, _, _ in self.succ[g]})
            rindex = {y: i for i, y in enumerate(targets)}
            m = MonomialMatrix(len(targets), len(cols))
            for j, g in enumerate(cols):
                for y, c, e in self.succ[g]:
                    m.add(rindex[y], j, c, e)
            out[key] = m
        return out

    def homogeneity_violations(self) -> list[tuple[int, int]]:
        bad = []
        lee = self.theory == LEE
        for g, out in enumerate(self.succ):
            for y, c, e in out:
                if self.gr_h[y] != self.gr_h[g] + 1:
                    bad.append((g, y))
                elif lee and self.gr_q[y] - self.gr_q[g] != 4 * e:
                    bad.append((g, y))
                elif not lee and (e != 0 or self.gr_q[y] != self.gr_q[g]):
                    bad.append((g, y))
        return bad

    def dump(self) -> dict:
        """Debug summary for regression diffs."""
        n = self.n
        verts = []
        for v, r in enumerate(self.resolutions):
            verts.append({"v": "".join(map(str, vertex_bits(v, n))), "k": r.k})
        blocks = {}
        for (h, q), m in self.blocks().items():
            blocks[f"{h},{q}"] = {"rows": m.nrows, "cols": m.ncols, "nnz": m.nnz}
        return {
            "theory": self.theory,
            "pd": self.diagram.pd(),
            "crossings": n,
            "generators": self.size,
            "vertices": verts,
            "blocks": blocks,
        }

    def dumps(self) -> str:
        return json.dumps(self.dump(), sort_keys=True)


def apply_table(table: list[list[tuple[int, int, int]]], vec: Vec) -> Vec:
    """Apply a ``gen -> [(gen, coeff, t power)]`` table to a sparse vector."""
    out: Vec = {}
    for g, poly in vec.items():
        for y, c, e in table[g]:
            acc = out.get(y)
            if acc is None:
                acc = out[y] = {}
            for p, a in poly.items():
                k = p + e
                acc[k] = acc.get(k, 0) + a * c
    # drop cancelled terms in one sweep rather than on every update
    for y in [y for y, acc in out.items() if not all(acc.values())]:
        acc = {k: v for k, v in out[y].items() if v}
        if acc:
            out[y] = acc
        else:
            del out[y]
    return out


def vec_add(vec: Vec, g: int, p: int, c) -> None:
    if not c:
        return
    poly = vec.get(g)
    if poly is None:
        vec[g] = {p: c}
        return
    val = poly.get(p, 0) + c
    if val:
        poly[p] = val
    else:
        del poly[p]
        if not poly:
            del vec[g]


def build_complex(
    d: Diagram,
    theory: str = LEE,
    *,
    max_crossings: int = DEFAULT_MAX_CROSSINGS,
    sign_rule: Callable[[int, int], int] = standard_sign,
) -> CubeComplex:
    if d.n > max_crossings:
        raise SizeLimitExceeded(f"{d.n} crossings exceeds the cap of {max_crossings}")
    return CubeComplex(d, theory, sign_rule)


def edge_map_apply(e: EdgeMap, a: LeeElement, n: int | None = None) -> LeeElement:
    """Apply a signed edge map to an element living at ``e.source``."""
    n = a.n if n is None else n
    out: dict[tuple[int, int, int], object] = {}
    for (v, s, p), c in a.terms.items():
        if v != e.source:
            raise VertexMismatch(f"term at vertex {v}, edge map starts at {e.source}")
        for tmask, tpow, coeff in e.images[s]:
            key = (e.target, tmask, p + tpow)
            out[key] = out.get(key, 0) + e.sign * coeff * c
    return LeeElement(out, n)


@dataclass
class DSquaredReport:
    ok: bool
    theory: str
    checked_squares: int
    failures: list[dict] = field(default_factory=list)

    @property
    def first_failure(self) -> dict | None:
        return self.failures[0] if self.failures else None


def verify_d_squared(c: CubeComplex, *, max_failures: int = 10) -> DSquaredReport:
    """Check ``delta o delta = 0`` square by square.

    For every ``u`` and crossings ``i < j`` with ``u_i = u_j = 0`` the two
    signed paths ``u -> u+e_i -> w`` and ``u -> u+e_j -> w`` must cancel on
    every generator of ``R_u``.
    """
    n = c.n
    failures: list[dict] = []
    squares = 0
    succ, gv = c.succ, c.gen_vertex
    for u in range(1 << n):
        base = c.offset[u]
        count = 1 << c.resolutions[u].k
        zeros = [i for i in range(n) if not (u >> i) & 1]
        if len(zeros) < 2:
            continue
        # delta^2 of every generator of R_u; a surviving term names the failing square
        bad_targets = set()
        for g in range(base, base + count):
            acc: dict[tuple[int, int], int] = {}
            for y, c1, e1 in succ[g]:
                for z, c2, e2 in succ[y]:
                    key = (z, e1 + e2)
                    acc[key] = acc.get(key, 0) + c1 * c2
            bad_targets.update(gv[z] for (z, _), v in acc.items() if v)
        squares += len(zeros) * (len(zeros) - 1) // 2
        for w in sorted(bad_targets):
            diff = w ^ u
            i, j = [b for b in range(n) if (diff >> b) & 1]
            if len(failures) < max_failures:
                failures.append(
                    {
                        "u": "".join(map(str, vertex_bits(u, n))),
                        "w": "".join(map(str, vertex_bits(w, n))),
                        "paths": [
                            "".join(map(str, vertex_bits(u | (1 << i), n))),
                            "".join(map(str, vertex_bits(u | (1 << j), n))),
                        ],
                        "crossings": [i + 1, j + 1],
                    }
                )
    return DSquaredReport(not failures, c.theory, squares, failures)
