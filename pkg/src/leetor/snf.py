"""Smith normal form for homogeneous matrices over ``Q[t]``.

A homogeneous map between graded free ``Q[t]``-modules has monomial
entries ``c * t^k``.  Pivoting on an entry of least ``t``-degree keeps every
intermediate entry a monomial, so elimination never needs polynomial
division; an entry that stops being a monomial means the input was not
homogeneous and raises :class:`NonMonomialEntry`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import NonMonomialEntry

__all__ = ["MonomialMatrix", "GradedSnf", "graded_snf", "div_coeff"]


def div_coeff(a, b):
    """Exact ``a / b`` that stays an ``int`` whenever possible."""
    if b == 1:
        return a
    if b == -1:
        return -a
    q = Fraction(a) / b
    return q.numerator if q.denominator == 1 else q


class MonomialMatrix:
    """Sparse ``nrows x ncols`` matrix with entries ``(coeff, exponent)``."""

    __slots__ = ("nrows", "ncols", "rows", "cols")

    def __init__(self, nrows: int, ncols: int, entries: Iterable[tuple[int, int, object, int]] = ()):
        self.nrows = nrows
        self.ncols = ncols
        self.rows: list[dict[int, tuple]] = [{} for _ in range(nrows)]
        self.cols: list[dict[int, tuple]] = [{} for _ in range(ncols)]
        for i, j, c, e in entries:
            self.add(i, j, c, e)

    @classmethod
    def identity(cls, n: int) -> "MonomialMatrix":
        return cls(n, n, ((i, i, 1, 0) for i in range(n)))

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[object]]) -> "MonomialMatrix":
        """Dense constructor; an entry is ``0``, a rational, or ``(coeff, exponent)``."""
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        m = cls(nrows, ncols)
        for i, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged matrix")
            for j, val in enumerate(row):
                c, e = val if isinstance(val, tuple) else (val, 0)
                if c:
                    m.add(i, j, c, e)
        return m

    def copy(self) -> "MonomialMatrix":
        m = MonomialMatrix(self.nrows, self.ncols)
        m.rows = [dict(r) for r in self.rows]
        m.cols = [dict(c) for c in self.cols]
        return m

    def get(self, i: int, j: int) -> tuple | None:
        return self.rows[i].get(j)

    def add(self, i: int, j: int, c, e: int) -> None:
        """``self[i, j] += c * t^e``."""
        if not c:
            return
        old = self.rows[i].get(j)
        if old is None:
            self.rows[i][j] = self.cols[j][i] = (c, e)
            return
        if old[1] != e:
            raise NonMonomialEntry(
                f"entry ({i}, {j}) would be {old[0]}*t^{old[1]} + {c}*t^{e}"
            )
        val = old[0] + c
        if val:
            self.rows[i][j] = self.cols[j][i] = (val, e)
        else:
            del self.rows[i][j]
            del self.cols[j][i]

    def remove(self, i: int, j: int) -> None:
        if j in self.rows[i]:
            del self.rows[i][j]
            del self.cols[j][i]

    def add_row_multiple(self, target: int, source: int, c, e: int) -> None:
        """``row[target] += c * t^e * row[source]``."""
        for j, (cj, ej) in list(self.rows[source].items()):
            self.add(target, j, c * cj, e + ej)

    def add_col_multiple(self, target: int, source: int, c, e: int) -> None:
        """``col[target] += c * t^e * col[source]``."""
        for i, (ci, ei) in list(self.cols[source].items()):
            self.add(i, target, c * ci, e + ei)

    def items(self) -> Iterator[tuple[int, int, object, int]]:
        for i, row in enumerate(self.rows):
            for j, (c, e) in row.items():
                yield i, j, c, e

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def __matmul__(self, other: "MonomialMatrix") -> "MonomialMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch")
        out = MonomialMatrix(self.nrows, other.ncols)
        for i, row in enumerate(self.rows):
            for k, (c1, e1) in row.items():
                for j, (c2, e2) in other.rows[k].items():
                    out.add(i, j, c1 * c2, e1 + e2)
        return out

    def is_zero(self) -> bool:
        return not any(self.rows)

    def to_dense(self) -> list[list[tuple]]:
        out = [[(0, 0)] * self.ncols for _ in range(self.nrows)]
        for i, j, c, e in self.items():
            out[i][j] = (c, e)
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonomialMatrix):
            return NotImplemented
        return (self.nrows, self.ncols) == (other.nrows, other.ncols) and self.rows == other.rows

    def __repr__(self) -> str:
        return f"MonomialMatrix({self.nrows}x{self.ncols}, nnz={self.nnz})"


@dataclass
class GradedSnf:
    """``row_transform @ M @ col_transform`` is diagonal with ``t``-exponents ascending."""

    invariant_exponents: list[int]
    diagonal: list[tuple]
    row_transform: MonomialMatrix | None
    col_transform: MonomialMatrix | None
    row_inverse: MonomialMatrix | None
    col_inverse: MonomialMatrix | None

    @property
    def rank(self) -> int:
        return len(self.invariant_exponents)


def _pick_pivot(a: MonomialMatrix, order: str) -> tuple[int, int] | None:
    best = None
    best_key = None
    for i, row in enumerate(a.rows):
        if not row:
            continue
        rlen = len(row) - 1
        for j, (_, e) in row.items():
            if order == "markowitz":
                key = (e, rlen * (len(a.cols[j]) - 1), i, j)
            else:
                key = (e, -i, -j)
            if best_key is None or key < best_key:
                best_key, best = key, (i, j)
    return best


def graded_snf(m: MonomialMatrix, *, transforms: bool = True, pivoting: str = "markowitz") -> GradedSnf:
    """Smith normal form of a homogeneous monomial matrix.

    ``pivoting`` is ``"markowitz"`` (least degree, then least fill-in) or
    ``"last"`` (least degree, then the last row/column); both give the same
    exponents and exist so that this can be tested.
    """
    a = m.copy()
    if transforms:
        u, uinv = MonomialMatrix.identity(m.nrows), MonomialMatrix.identity(m.nrows)
        v, vinv = MonomialMatrix.identity(m.ncols), MonomialMatrix.identity(m.ncols)
    pivots: list[tuple[int, int, object, int]] = []
    while True:
        p = _pick_pivot(a, pivoting)
        if p is None:
            break
        r, c = p
        pc, pe = a.rows[r][c]
        for x, (cx, ex) in list(a.cols[c].items()):
            if x == r:
                continue
            if ex < pe:
                raise NonMonomialEntry("pivot is not of least degree in its column")
            f = div_coeff(cx, pc)
            fe = ex - pe
            a.add_row_multiple(x, r, -f, fe)
            if transforms:
                u.add_row_multiple(x, r, -f, fe)
                uinv.add_col_multiple(r, x, f, fe)
        for y, (cy, ey) in list(a.rows[r].items()):
            if y == c:
                continue
            if ey < pe:
                raise NonMonomialEntry("pivot is not of least degree in its row")
            f = div_coeff(cy, pc)
            fe = ey - pe
            a.remove(r, y)
            if transforms:
                v.add_col_multiple(y, c, -f, fe)
                vinv.add_row_multiple(c, y, f, fe)
        a.remove(r, c)
        pivots.append((r, c, pc, pe))

    pivots.sort(key=lambda p: p[3])
    exps = [p[3] for p in pivots]
    diag = [(p[2], p[3]) for p in pivots]
    if not transforms:
        return GradedSnf(exps, diag, None, None, None, None)

    prow = [p[0] for p in pivots]
    pcol = [p[1] for p in pivots]
    used_r, used_c = set(prow), set(pcol)
    row_perm = prow + [i for i in range(m.nrows) if i not in used_r]
    col_perm = pcol + [j for j in range(m.ncols) if j not in used_c]
    return GradedSnf(
        exps,
        diag,
        _permute_rows(u, row_perm),
        _permute_cols(v, col_perm),
        _permute_cols(uinv, row_perm),
        _permute_rows(vinv, col_perm),
    )


def _permute_rows(a: MonomialMatrix, perm: list[int]) -> MonomialMatrix:
    """New row ``k`` is old row ``perm[k]``."""
    out = MonomialMatrix(a.nrows, a.ncols)
    for k, old in enumerate(perm):
        for j, (c, e) in a.rows[old].items():
            out.add(k, j, c, e)
    return out


def _permute_cols(a: MonomialMatrix, perm: list[int]) -> MonomialMatrix:
    out = MonomialMatrix(a.nrows, a.ncols)
    for k, old in enumerate(perm):
        for i, (c, e) in a.cols[old].items():
            out.add(i, k, c, e)
    return out
