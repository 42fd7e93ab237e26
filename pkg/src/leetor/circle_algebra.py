"""Arithmetic in the vertex rings ``R_v`` over ``Q[t]``.

An element is a finite sum of terms ``c * t^p * X_S @ v`` where ``S`` is a
set of circles of the resolution at vertex ``v`` (stored as a bitmask).
Squares are reduced with ``X^2 = t``; the Khovanov ring is the image under
``t = 0``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Iterator

from .diagram import Resolution, vertex_bits
from .errors import VertexMismatch

__all__ = [
    "LeeElement",
    "inject_edge_variable",
    "multiply",
    "set_t_zero",
    "circles_of",
    "mask_of",
    "mul_masks",
]

Term = tuple[int, int, int]  # (vertex mask, circle mask, t power)


def circles_of(mask: int) -> tuple[int, ...]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def mask_of(circles: Iterable[int]) -> int:
    m = 0
    for c in circles:
        m |= 1 << c
    return m


def mul_masks(a: int, b: int) -> tuple[int, int]:
    """Product of two square-free monomials: ``(mask, extra t power)``."""
    return a ^ b, bin(a & b).count("1")


def _coeff(c) -> Fraction | int:
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        c = Fraction(c)
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class LeeElement:
    """Q[t]-linear combination of ``(vertex, circle subset)`` basis elements."""

    __slots__ = ("terms", "n")

    def __init__(self, terms: dict[Term, object] | None = None, n: int = 0):
        self.n = n
        self.terms: dict[Term, Fraction | int] = {}
        for key, c in (terms or {}).items():
            c = _coeff(c)
            if c:
                self.terms[key] = self.terms.get(key, 0) + c
                if not self.terms[key]:
                    del self.terms[key]

    @classmethod
    def monomial(cls, vertex: int, circles: Iterable[int] | int, t_power: int = 0, coeff=1, n: int = 0):
        mask = circles if isinstance(circles, int) else mask_of(circles)
        return cls({(vertex, mask, t_power): coeff}, n)

    @classmethod
    def one(cls, vertex: int, n: int = 0) -> "LeeElement":
        return cls.monomial(vertex, 0, 0, 1, n)

    def vertices(self) -> set[int]:
        return {v for v, _, _ in self.terms}

    def vertex(self) -> int:
        vs = self.vertices()
        if len(vs) != 1:
            raise VertexMismatch(f"element lives on {len(vs)} vertices, expected one")
        return next(iter(vs))

    def __iter__(self) -> Iterator[tuple[Term, Fraction | int]]:
        return iter(sorted(self.terms.items(), key=_term_key))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, int) and other == 0:
            return not self.terms
        if not isinstance(other, LeeElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _combine(self, other: "LeeElement", sign: int) -> "LeeElement":
        out = dict(self.terms)
        for key, c in other.terms.items():
            val = out.get(key, 0) + sign * c
            if val:
                out[key] = val
            else:
                out.pop(key, None)
        res = LeeElement(n=max(self.n, other.n))
        res.terms = out
        return res

    def __add__(self, other: "LeeElement") -> "LeeElement":
        return self._combine(other, 1)

    def __sub__(self, other: "LeeElement") -> "LeeElement":
        return self._combine(other, -1)

    def __neg__(self) -> "LeeElement":
        return self.scale(-1)

    def scale(self, c, t_power: int = 0) -> "LeeElement":
        c = _coeff(c)
        res = LeeElement(n=self.n)
        if c:
            res.terms = {(v, s, p + t_power): a * c for (v, s, p), a in self.terms.items()}
        return res

    def __rmul__(self, c) -> "LeeElement":
        return self.scale(c)

    def __mul__(self, other):
        if isinstance(other, LeeElement):
            return multiply(self, other)
        return self.scale(other)

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for i, ((v, s, p), c) in enumerate(self):
            neg = c < 0
            body = _render_term(abs(c), s, p) + "@v=" + "".join(map(str, vertex_bits(v, self.n)))
            if i == 0:
                out = ("-" if neg else "") + body
            else:
                out += (" - " if neg else " + ") + body
        return out

    __str__ = render

    def __repr__(self) -> str:
        return f"LeeElement({self.render()!r})"


def _term_key(item):
    (v, s, p), _ = item
    return (v, circles_of(s), p)


def _render_term(c, s: int, p: int) -> str:
    parts = []
    if c != 1:
        parts.append(str(Fraction(c)))
    if p == 1:
        parts.append("t")
    elif p > 1:
        parts.append(f"t^{p}")
    if s:
        parts.append("".join(f"X{i}" for i in circles_of(s)))
    return "*".join(parts) or "1"


def inject_edge_variable(r: Resolution, edge: int) -> LeeElement:
    """The class of ``X_edge`` in ``R_v``: the monomial of its circle."""
    if not 1 <= edge <= len(r.circle_of_edge):
        raise ValueError(f"edge {edge} out of range 1..{len(r.circle_of_edge)}")
    return LeeElement.monomial(r.vertex, 1 << r.circle(edge), 0, 1, r.n)


def multiply(a: LeeElement, b: LeeElement) -> LeeElement:
    if not a.terms or not b.terms:
        return LeeElement(n=max(a.n, b.n))
    va, vb = a.vertex(), b.vertex()
    if va != vb:
        raise VertexMismatch(f"cannot multiply elements of vertices {va} and {vb}")
    out: dict[Term, Fraction | int] = {}
    for (_, s1, p1), c1 in a.terms.items():
        for (_, s2, p2), c2 in b.terms.items():
            s, extra = mul_masks(s1, s2)
            key = (va, s, p1 + p2 + extra)
            val = out.get(key, 0) + c1 * c2
            if val:
                out[key] = val
            else:
                out.pop(key, None)
    res = LeeElement(n=max(a.n, b.n))
    res.terms = out
    return res


def set_t_zero(a: LeeElement) -> LeeElement:
    res = LeeElement(n=a.n)
    res.terms = {k: c for k, c in a.terms.items() if k[2] == 0}
    return res
