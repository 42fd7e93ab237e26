"""Homology of the cube complex.

The complex is first shrunk by Gaussian elimination along unit entries
(``t``-exponent 0).  Every elimination is a strong deformation retraction, and
we keep enough data to push chains through both directions:
``include`` (reduced -> original) and ``project`` (original -> reduced).

After elimination every surviving entry is divisible by ``t``.  So the
reduced complex at ``t = 0`` has zero differential and its bigraded
dimensions are the Khovanov homology.  The ``Q[t]``-module structure comes
from a graded Smith normal form in each homological degree.
"""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .cube import KH, LEE, CubeComplex, vec_add
from .errors import CeilingRelationViolated, InvariantViolation, NotACycleAfterMultiplication
from .snf import MonomialMatrix, div_coeff, graded_snf

__all__ = [
    "Summand",
    "GradedModule",
    "Reduction",
    "HomologyBasis",
    "compute_homology",
    "x_action",
    "x_action_matrix",
    "XAction",
    "x_action_on_torsion",
    "nilpotency_index",
    "torsion_invariants",
    "check_x_squared",
]

Poly = dict[int, object]
Vec = dict[int, Poly]


@dataclass(frozen=True)
class Summand:
    """One cyclic summand: ``Q[t]`` if ``order`` is None, else ``Q[t]/t^order``.

    ``(h, q)`` is the bidegree of its generator, which is the top ``q`` of
    a torsion summand.
    """

    h: int
    q: int
    order: int | None = None

    @property
    def is_free(self) -> bool:
        return self.order is None

    def _key(self) -> tuple[int, int, int]:
        return (self.h, self.q, -1 if self.order is None else self.order)

    def __lt__(self, other: "Summand") -> bool:
        return self._key() < other._key()


@dataclass
class GradedModule:
    theory: str
    summands: list[Summand]

    def free(self) -> list[Summand]:
        return sorted(s for s in self.summands if s.order is None)

    def torsion(self) -> list[Summand]:
        return sorted(s for s in self.summands if s.order is not None)

    def kh_dimensions(self) -> Counter:
        """Bigraded dimensions after setting ``t = 0`` (Khovanov homology)."""
        out: Counter = Counter()
        for s in self.summands:
            out[(s.h, s.q)] += 1
            if s.order is not None:
                out[(s.h - 1, s.q - 4 * s.order)] += 1
        return +out

    def dimensions(self) -> Counter:
        return +Counter((s.h, s.q) for s in self.summands)

    @property
    def max_torsion_order(self) -> int:
        return max((s.order for s in self.summands if s.order is not None), default=0)

    def to_dict(self) -> dict:
        out = {"kh": sorted([h, q, d] for (h, q), d in self.kh_dimensions().items())}
        if self.theory == LEE:
            out["lee_free"] = [[s.h, s.q] for s in self.free()]
            out["lee_torsion"] = [[s.h, s.q, s.order] for s in self.torsion()]
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


# polynomial / vector helpers ------------------------------------------------

def _padd(p: Poly, e: int, c) -> None:
    if not c:
        return
    v = p.get(e, 0) + c
    if v:
        p[e] = v
    else:
        del p[e]


def _vadd_poly(vec: Vec, g: int, poly: Poly, c, shift: int) -> None:
    for e, a in poly.items():
        vec_add(vec, g, e + shift, a * c)


@dataclass
class _Step:
    b: int
    a: int
    inv: object
    row_a: dict[int, tuple]  # x -> (coeff, exp) of x -> a, x != b
    col_b: dict[int, tuple]  # y -> (coeff, exp) of b -> y, y != a


class Reduction:
    """Gaussian elimination of a cube complex along its unit entries."""

    def __init__(self, cx: CubeComplex):
        self.complex = cx
        n = cx.size
        succ: list[dict[int, tuple]] = [dict() for _ in range(n)]
        pred: list[dict[int, tuple]] = [dict() for _ in range(n)]
        for g, out in enumerate(cx.succ):
            for y, c, e in out:
                old = succ[g].get(y)
                if old is not None:
                    c += old[0]
                    if old[1] != e:
                        raise InvariantViolation("differential entry is not a monomial")
                if c:
                    succ[g][y] = pred[y][g] = (c, e)
                else:
                    succ[g].pop(y, None)
                    pred[y].pop(g, None)
        alive = [True] * n
        steps: list[_Step] = []

        # global Markowitz order: cheapest fill-in first, costs rechecked lazily
        def cost(b, a):
            return (len(pred[a]) - 1) * (len(succ[b]) - 1)

        heap = [(cost(b, a), b, a) for b in range(n) for a, (_, e) in succ[b].items() if e == 0]
        heapq.heapify(heap)
        while heap:
            k, b, a = heapq.heappop(heap)
            if not (alive[a] and alive[b]):
                continue
            ent = succ[b].get(a)
            if ent is None or ent[1] != 0:
                continue
            k2 = cost(b, a)
            if k2 > k:
                heapq.heappush(heap, (k2, b, a))
                continue
            col = succ[b].keys() - {a}
            for x in self._eliminate(succ, pred, alive, steps, b, a):
                for y in col:
                    ent = succ[x].get(y)
                    if ent is not None and ent[1] == 0:
                        heapq.heappush(heap, (cost(x, y), x, y))
        self.steps = steps
        self.alive = alive
        self.succ = succ
        self.pred = pred
        self.generators = [g for g in range(n) if alive[g]]
        self._a_step = {s.a: i for i, s in enumerate(steps)}
        self._b_step = {s.b: i for i, s in enumerate(steps)}
        touch: dict[int, list[int]] = {}
        for i, s in enumerate(steps):
            for x in s.row_a:
                touch.setdefault(x, []).append(i)
        self._row_touch = touch

    @staticmethod
    def _eliminate(succ, pred, alive, steps, b, a) -> list[int]:
        ca, _ = succ[b][a]
        inv = div_coeff(1, ca)
        row_a = {x: v for x, v in pred[a].items() if x != b}
        col_b = {y: v for y, v in succ[b].items() if y != a}
        steps.append(_Step(b, a, inv, row_a, col_b))
        for g in (a, b):
            for y in succ[g]:
                del pred[y][g]
            for x in pred[g]:
                del succ[x][g]
            succ[g] = {}
            pred[g] = {}
            alive[g] = False
        touched = []
        for x, (cx_, ex) in row_a.items():
            f = -cx_ * inv
            sx = succ[x]
            unit_added = False
            for y, (cy, ey) in col_b.items():
                e = ex + ey
                old = sx.get(y)
                if old is None:
                    val = f * cy
                    sx[y] = pred[y][x] = (val, e)
                    unit_added |= e == 0
                    continue
                if old[1] != e:
                    raise InvariantViolation("fill-in entry is not a monomial")
                val = old[0] + f * cy
                if val:
                    sx[y] = pred[y][x] = (val, e)
                else:
                    del sx[y]
                    del pred[y][x]
            if unit_added:
                touched.append(x)
        return touched

    # chain maps -----------------------------------------------------------
    def include(self, vec: Vec) -> Vec:
        """Reduced chain -> chain of the full complex (a cycle goes to a cycle)."""
        out: Vec = {g: dict(p) for g, p in vec.items()}
        heap: list[int] = []
        queued: set[int] = set()

        def push(g):
            for i in self._row_touch.get(g, ()):
                if i not in queued:
                    queued.add(i)
                    heapq.heappush(heap, -i)

        for g in out:
            push(g)
        while heap:
            i = -heapq.heappop(heap)
            s = self.steps[i]
            acc: Poly = {}
            for x, (c, e) in s.row_a.items():
                p = out.get(x)
                if p:
                    for pe, pc in p.items():
                        _padd(acc, pe + e, pc * c)
            if acc:
                _vadd_poly(out, s.b, acc, -s.inv, 0)
                push(s.b)
        return out

    def project(self, vec: Vec) -> Vec:
        """Chain of the full complex -> reduced chain."""
        out: Vec = {g: dict(p) for g, p in vec.items()}
        heap: list[int] = []
        queued: set[int] = set()

        def push(g):
            i = self._a_step.get(g)
            if i is None:
                i = self._b_step.get(g)
            if i is not None and i not in queued:
                queued.add(i)
                heapq.heappush(heap, i)

        for g in out:
            push(g)
        while heap:
            i = heapq.heappop(heap)
            s = self.steps[i]
            out.pop(s.b, None)
            pa = out.pop(s.a, None)
            if pa:
                for y, (c, e) in s.col_b.items():
                    _vadd_poly(out, y, pa, -s.inv * c, e)
                    push(y)
        return out

    def differential(self, vec: Vec) -> Vec:
        out: Vec = {}
        for g, p in vec.items():
            for y, (c, e) in self.succ[g].items():
                _vadd_poly(out, y, p, c, e)
        return out

    # matrices -------------------------------------------------------------
    def generators_in_degree(self, h: int) -> list[int]:
        gh = self.complex.gr_h
        return [g for g in self.generators if gh[g] == h]

    def degree_matrix(self, h: int) -> tuple[MonomialMatrix, list[int], list[int]]:
        cols = self.generators_in_degree(h)
        rows = self.generators_in_degree(h + 1)
        rindex = {g: i for i, g in enumerate(rows)}
        m = MonomialMatrix(len(rows), len(cols))
        for j, g in enumerate(cols):
            for y, (c, e) in self.succ[g].items():
                m.add(rindex[y], j, c, e)
        return m, cols, rows

    @property
    def residual_entries(self) -> int:
        return sum(len(self.succ[g]) for g in self.generators)


def _sub(m: MonomialMatrix, rows: list[int], cols: list[int]) -> MonomialMatrix:
    cidx = {c: j for j, c in enumerate(cols)}
    out = MonomialMatrix(len(rows), len(cols))
    for i, r in enumerate(rows):
        for c, (v, e) in m.rows[r].items():
            j = cidx.get(c)
            if j is not None:
                out.add(i, j, v, e)
    return out


def _column_vec(m: MonomialMatrix, j: int, labels: list[int]) -> Vec:
    return {labels[i]: {e: c} for i, (c, e) in m.cols[j].items()}


@dataclass
class _DegreeData:
    h: int
    gens: list[int]
    kernel: MonomialMatrix  # gens x m
    kernel_inverse: MonomialMatrix  # m x gens, left inverse on the kernel
    u2: MonomialMatrix
    orders: list[int | None]  # per kernel coordinate: 0 trivial, k torsion, None free
    generators: list[Vec]
    q: list[int]


@dataclass
class HomologyBasis:
    """Explicit generators and coordinates for ``H`` of the reduced complex."""

    reduction: Reduction
    degrees: dict[int, _DegreeData] = field(default_factory=dict)

    @property
    def complex(self) -> CubeComplex:
        return self.reduction.complex

    def summands(self, h: int) -> list[tuple[int, Summand]]:
        d = self.degrees.get(h)
        if d is None:
            return []
        return [(j, Summand(h, d.q[j], o)) for j, o in enumerate(d.orders) if o != 0]

    def coordinates(self, h: int, z: Vec) -> list[Poly]:
        """Coordinates of a reduced cycle; torsion coordinates are reduced mod ``t^k``."""
        d = self.degrees[h]
        index = {g: i for i, g in enumerate(d.gens)}
        for g in z:
            if g not in index:
                raise NotACycleAfterMultiplication(f"generator {g} is not in degree {h}")
        if self.reduction.differential(z):
            raise NotACycleAfterMultiplication("chain is not a cycle")
        y = _apply(d.kernel_inverse, {index[g]: p for g, p in z.items()})
        back = _apply(d.kernel, y)
        if {d.gens[i]: p for i, p in back.items()} != {g: p for g, p in z.items() if p}:
            raise NotACycleAfterMultiplication("cycle is not in the span of the kernel basis")
        c = _apply(d.u2, y)
        out = []
        for j, o in enumerate(d.orders):
            p = dict(c.get(j, {}))
            if o is not None:
                p = {e: v for e, v in p.items() if e < o}
            out.append(p)
        return out

    def representative(self, h: int, j: int) -> Vec:
        """A cycle of the full complex representing generator ``j`` in degree ``h``."""
        return self.reduction.include(self.degrees[h].generators[j])


def _apply(m: MonomialMatrix, vec: dict[int, Poly]) -> dict[int, Poly]:
    out: dict[int, Poly] = {}
    for j, p in vec.items():
        for i, (c, e) in m.cols[j].items():
            tgt = out.setdefault(i, {})
            for pe, pc in p.items():
                _padd(tgt, pe + e, pc * c)
            if not tgt:
                del out[i]
    return out


def _homogeneous_q(cx: CubeComplex, vec: Vec) -> int:
    qs = {cx.gr_q[g] - 4 * e for g, p in vec.items() for e in p}
    if len(qs) != 1:
        raise InvariantViolation(f"homology generator is not homogeneous (q in {sorted(qs)})")
    return qs.pop()


def compute_homology(cx: CubeComplex) -> tuple[GradedModule, HomologyBasis]:
    red = Reduction(cx)
    basis = HomologyBasis(red)
    if cx.theory == KH:
        if red.residual_entries:
            raise InvariantViolation("Khovanov complex did not reduce completely")
        summ = [Summand(cx.gr_h[g], cx.gr_q[g]) for g in red.generators]
        return GradedModule(KH, sorted(summ)), basis
    summands: list[Summand] = []
    degs = sorted({cx.gr_h[g] for g in red.generators})
    mats = {h: red.degree_matrix(h)[0] for h in degs}
    for h in degs:
        gens = red.generators_in_degree(h)
        dh = mats[h]
        s = graded_snf(dh)
        r = s.rank
        nh = len(gens)
        ker_idx = list(range(r, nh))
        kernel = _sub(s.col_transform, list(range(nh)), ker_idx)
        kinv = _sub(s.col_inverse, ker_idx, list(range(nh)))
        dprev = mats.get(h - 1)
        if dprev is None:
            y = MonomialMatrix(len(ker_idx), 0)
        else:
            y = kinv @ dprev
        s2 = graded_snf(y)
        m = len(ker_idx)
        orders: list[int | None] = [s2.invariant_exponents[j] if j < s2.rank else None for j in range(m)]
        gvecs, qs = [], []
        for j in range(m):
            col = _apply(kernel, {i: {e: c} for i, (c, e) in s2.row_inverse.cols[j].items()})
            vec = {gens[i]: p for i, p in col.items()}
            gvecs.append(vec)
            qs.append(_homogeneous_q(cx, vec))
            if orders[j] != 0:
                summands.append(Summand(h, qs[-1], orders[j]))
        basis.degrees[h] = _DegreeData(h, gens, kernel, kinv, s2.row_transform, orders, gvecs, qs)
    return GradedModule(LEE, sorted(summands)), basis


# X action -------------------------------------------------------------------

def _multiply_vec(cx: CubeComplex, edge: int, vec: Vec, table=None) -> Vec:
    table = table if table is not None else cx.multiplication(edge)
    out: Vec = {}
    for g, p in vec.items():
        for y, c, e in table[g]:
            _vadd_poly(out, y, p, c, e)
    return out


def x_action(basis: HomologyBasis, edge: int, h: int, j: int, t_power: int = 0, table=None) -> list[Poly]:
    """Coordinates of ``X_edge * t^t_power * w_j`` in degree ``h``."""
    red = basis.reduction
    rep = red.include(basis.degrees[h].generators[j])
    if t_power:
        rep = {g: {e + t_power: c for e, c in p.items()} for g, p in rep.items()}
    z = _multiply_vec(red.complex, edge, rep, table)
    if red.complex.apply_differential(z):
        raise NotACycleAfterMultiplication(f"X_{edge} times a cycle is not a cycle")
    return basis.coordinates(h, red.project(z))


@dataclass
class XAction:
    """Multiplication by ``X_edge``: chain level as a sparse table, homology level per degree.

    ``homology[h][i][j]`` is the ``i``-th coordinate (a polynomial in ``t``)
    of ``X w_j``, where ``w_j`` runs over the nontrivial generators listed in
    ``labels[h]`` as ``(j, order)``.
    """

    edge: int
    chain: list[list[tuple[int, int, int]]]
    labels: dict[int, list[tuple[int, int | None]]]
    homology: dict[int, list[list[Poly]]]

    def equals_up_to_sign(self, other: "XAction") -> int | None:
        """``+1`` or ``-1`` if the homology matrices agree up to that sign, else None."""
        for sign in (1, -1):
            if all(
                self.homology[h] == [[{e: sign * c for e, c in p.items()} for p in row] for row in other.homology[h]]
                for h in self.homology
            ):
                return sign
        return None


def x_action_matrix(basis: HomologyBasis, edge: int) -> XAction:
    table = basis.complex.multiplication(edge)
    labels, mats = {}, {}
    for h, d in sorted(basis.degrees.items()):
        live = [j for j, o in enumerate(d.orders) if o != 0]
        labels[h] = [(j, d.orders[j]) for j in live]
        cols = [x_action(basis, edge, h, j, 0, table) for j in live]
        mats[h] = [[cols[c][i] for c in range(len(live))] for i in live]
    return XAction(edge, table, labels, mats)


def x_action_on_torsion(basis: HomologyBasis, edge: int, h: int) -> tuple[list[tuple[int, int]], list[list[Fraction]]]:
    """Matrix of ``X_edge`` on the ``Q``-basis ``t^p w_j`` (``p < k_j``) of the torsion."""
    d = basis.degrees.get(h)
    if d is None:
        return [], []
    labels = [(j, p) for j, o in enumerate(d.orders) if o for p in range(o)]
    index = {lab: i for i, lab in enumerate(labels)}
    table = basis.complex.multiplication(edge)
    mat = [[Fraction(0)] * len(labels) for _ in labels]
    for col, (j, p) in enumerate(labels):
        coords = x_action(basis, edge, h, j, p, table)
        for jj, poly in enumerate(coords):
            o = d.orders[jj]
            if o is None and poly:
                raise InvariantViolation("X maps a torsion class to a non-torsion class")
            if not o:
                continue
            for e, c in poly.items():
                mat[index[(jj, e)]][col] += c
    return labels, mat


def nilpotency_index(mat: list[list[Fraction]]) -> int:
    """Least ``n`` with ``mat^n = 0`` (0 for the empty matrix)."""
    size = len(mat)
    if size == 0:
        return 0
    power = [row[:] for row in mat]
    for n in range(1, size + 1):
        if not any(any(row) for row in power):
            return n
        power = [[sum(power[i][k] * mat[k][j] for k in range(size) if power[i][k]) for j in range(size)] for i in range(size)]
    raise InvariantViolation("X is not nilpotent on the torsion submodule")


def check_x_squared(basis: HomologyBasis, edge: int) -> None:
    """``X_* o X_* = t`` on every homology generator."""
    table = basis.complex.multiplication(edge)
    red = basis.reduction
    for h, d in basis.degrees.items():
        for j, o in enumerate(d.orders):
            if o == 0:
                continue
            rep = red.include(d.generators[j])
            z = _multiply_vec(red.complex, edge, _multiply_vec(red.complex, edge, rep, table), table)
            got = basis.coordinates(h, red.project(z))
            want = [dict() for _ in d.orders]
            want[j] = {1: 1} if (o is None or o > 1) else {}
            if got != want:
                raise InvariantViolation(f"X_{edge}^2 != t on generator {j} in degree {h}")


def torsion_invariants(module: GradedModule, basis: HomologyBasis | None = None, edge: int = 1) -> dict:
    """``u_t`` (largest torsion order) and, given a basis, ``u_X`` (nilpotency of ``X``)."""
    u_t = module.max_torsion_order
    out = {"u_t": u_t}
    if basis is None:
        return out
    u_x = 0
    for h in basis.degrees:
        _, mat = x_action_on_torsion(basis, edge, h)
        u_x = max(u_x, nilpotency_index(mat))
    if -(-u_x // 2) != u_t:
        raise CeilingRelationViolated(f"ceil(u_X/2) = {-(-u_x // 2)} but u_t = {u_t}")
    out["u_X"] = u_x
    return out
