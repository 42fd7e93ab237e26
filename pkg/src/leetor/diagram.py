"""PD-coded knot diagrams and their resolutions.

PD convention: ``X[a,b,c,d]`` lists the four edges at a crossing starting
with the incoming under-strand and going counterclockwise, so the under
strand runs ``a -> c`` and the over strand joins ``b`` and ``d``.  Edge
orientations are recovered by walking the components, and a crossing is
positive exactly when the over strand enters at ``d``.

Smoothing conventions (independent of the sign)::

    0-resolution joins (a, b) and (c, d)
    1-resolution joins (a, d) and (b, c)

The 0-resolution of a positive crossing is therefore the oriented one.
In the local ``(i, j, k, l)`` labelling used for the edge maps we take
``i=a, j=b, k=d, l=c``: the 0-resolution pairs ``(i, j), (k, l)``, the
1-resolution pairs ``(i, k), (j, l)``, and ``{j, k}`` / ``{i, l}`` are the
two diagonal pairs.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import EdgeCountViolation, InconsistentOrientation, MalformedPd

__all__ = [
    "Crossing",
    "Diagram",
    "Resolution",
    "parse_pd",
    "from_tuples",
    "unknot",
    "resolve",
    "writhe",
    "mirror",
    "change_crossing",
    "vertex_mask",
    "vertex_bits",
    "braid_closure",
    "random_braid_word",
]

_X_RE = re.compile(r"X[pn]?\s*\[([^\[\]]*)\]")
_LIST_RE = re.compile(r"\[([^\[\]]*)\]")


@dataclass(frozen=True)
class Crossing:
    edges: tuple[int, int, int, int]
    sign: int

    @property
    def local_labels(self) -> tuple[int, int, int, int]:
        """Edges in the ``(e_i, e_j, e_k, e_l)`` positions."""
        a, b, c, d = self.edges
        return (a, b, d, c)

    @property
    def diagonal(self) -> tuple[int, int]:
        """The diagonal pair ``(e_j, e_k)``; this is the over strand."""
        a, b, c, d = self.edges
        return (b, d)

    def smoothing(self, bit: int) -> tuple[tuple[int, int], tuple[int, int]]:
        a, b, c, d = self.edges
        if bit == 0:
            return ((a, b), (c, d))
        return ((a, d), (b, c))

    def reversed(self) -> "Crossing":
        """The same crossing with over and under strands exchanged."""
        a, b, c, d = self.edges
        if self.sign > 0:
            return Crossing((d, a, b, c), -1)
        return Crossing((b, c, d, a), 1)

    def __str__(self) -> str:
        return "X[%d,%d,%d,%d]" % self.edges


@dataclass(frozen=True)
class Diagram:
    crossings: tuple[Crossing, ...]
    edge_count: int
    component_count: int

    @property
    def n(self) -> int:
        return len(self.crossings)

    @property
    def n_plus(self) -> int:
        return sum(1 for x in self.crossings if x.sign > 0)

    @property
    def n_minus(self) -> int:
        return sum(1 for x in self.crossings if x.sign < 0)

    @property
    def is_knot(self) -> bool:
        return self.component_count == 1

    @property
    def multi_component(self) -> bool:
        return self.component_count > 1

    def pd(self) -> str:
        return " ".join(str(x) for x in self.crossings)

    def __str__(self) -> str:
        return self.pd() or "<unknot>"


@dataclass(frozen=True)
class Resolution:
    vertex: int
    n: int
    circle_of_edge: tuple[int, ...]
    k: int

    def circle(self, edge: int) -> int:
        return self.circle_of_edge[edge - 1]

    @property
    def bits(self) -> tuple[int, ...]:
        return vertex_bits(self.vertex, self.n)

    @property
    def height(self) -> int:
        return bin(self.vertex).count("1")


def vertex_mask(v: int | Sequence[int]) -> int:
    """Normalise a vertex given as bits ``(v_1, ..., v_n)`` to a bitmask."""
    if isinstance(v, int):
        return v
    mask = 0
    for i, b in enumerate(v):
        if b not in (0, 1):
            raise ValueError(f"vertex bits must be 0/1, got {b!r}")
        mask |= b << i
    return mask


def vertex_bits(mask: int, n: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(n))


def unknot() -> Diagram:
    """The crossingless unknot, with a single edge."""
    return Diagram((), 1, 1)


def parse_pd(text: str, *, unknot_marker: bool = False) -> Diagram:
    """Parse ``X[a,b,c,d] X[...] ...`` (also ``PD[...]`` and ``[[a,b,c,d],...]``)."""
    s = text.strip()
    if not s:
        if unknot_marker:
            return unknot()
        raise MalformedPd("empty PD code (pass the unknot marker for the 0-crossing unknot)")
    if s.upper().startswith("PD[") and s.endswith("]"):
        s = s[3:-1]
    if "X" in s:
        groups = _X_RE.findall(s)
        leftover = _X_RE.sub("", s)
    else:
        groups = _LIST_RE.findall(s)
        leftover = _LIST_RE.sub("", s)
    if leftover.strip(" ,;\n\t[]()"):
        raise MalformedPd(f"unrecognised text in PD code: {leftover.strip()!r}")
    tuples = []
    for g in groups:
        try:
            vals = [int(tok) for tok in re.split(r"[\s,]+", g.strip()) if tok]
        except ValueError:
            raise MalformedPd(f"non-integer edge label in [{g}]") from None
        if len(vals) != 4:
            raise MalformedPd(f"crossing [{g}] does not have 4 edges")
        tuples.append(tuple(vals))
    if not tuples:
        raise MalformedPd(f"no crossings found in {text!r}")
    return from_tuples(tuples)


def from_tuples(tuples: Iterable[Sequence[int]]) -> Diagram:
    """Validate PD 4-tuples, orient the diagram and compute crossing signs."""
    tuples = [tuple(t) for t in tuples]
    if not tuples:
        return unknot()
    incid: dict[int, list[tuple[int, int]]] = {}
    for x, t in enumerate(tuples):
        for p, e in enumerate(t):
            incid.setdefault(e, []).append((x, p))
    m = len(incid)
    bad = [e for e in range(1, m + 1) if len(incid.get(e, ())) != 2]
    if bad or set(incid) != set(range(1, m + 1)):
        offenders = bad or sorted(set(incid) - set(range(1, m + 1)))
        raise EdgeCountViolation(
            f"edges must be labelled 1..{m} and each appear exactly twice; offending: {offenders}"
        )

    def other(x: int, p: int) -> tuple[int, int]:
        e = tuples[x][p]
        a, b = incid[e]
        return b if a == (x, p) else a

    entering: dict[tuple[int, int], bool] = {}

    def walk(start: tuple[int, int]) -> None:
        x, p = start
        while True:
            if entering.get((x, p)) is False:
                raise InconsistentOrientation(f"edge {tuples[x][p]} is oriented both ways")
            entering[(x, p)] = True
            q = (p + 2) % 4
            if entering.get((x, q)) is True:
                raise InconsistentOrientation(f"strand through crossing {x + 1} runs both ways")
            entering[(x, q)] = False
            x, p = other(x, q)
            if (x, p) == start:
                return
            if (x, p) in entering:
                raise InconsistentOrientation(f"component revisits crossing {x + 1}")

    components = 0
    for x in range(len(tuples)):
        if (x, 0) not in entering:
            walk((x, 0))
            components += 1
    for x in range(len(tuples)):
        if not entering[(x, 0)] or entering[(x, 2)]:
            raise InconsistentOrientation(f"under strand of crossing {x + 1} is not a -> c")
    # components that only ever pass over
    for x in range(len(tuples)):
        for p in (1, 3):
            if (x, p) not in entering:
                walk((x, p))
                components += 1

    crossings = tuple(
        Crossing(t, 1 if entering[(x, 3)] else -1) for x, t in enumerate(tuples)
    )
    return Diagram(crossings, m, components)


def _find(parent: list[int], a: int) -> int:
    while parent[a] != a:
        parent[a] = parent[parent[a]]
        a = parent[a]
    return a


def resolve(d: Diagram, v: int | Sequence[int], order: Sequence[int] | None = None) -> Resolution:
    """Smooth every crossing according to ``v`` and label the circles.

    Circles are numbered by their smallest edge, so the result does not
    depend on ``order`` (the order in which crossings are processed).
    """
    mask = vertex_mask(v)
    if not isinstance(v, int) and len(v) != d.n:
        raise ValueError(f"vertex has {len(v)} bits, diagram has {d.n} crossings")
    if mask >> d.n:
        raise ValueError("vertex has bits beyond the crossing count")
    parent = list(range(d.edge_count + 1))
    for i in order if order is not None else range(d.n):
        for e, f in d.crossings[i].smoothing((mask >> i) & 1):
            ra, rb = _find(parent, e), _find(parent, f)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    ids: dict[int, int] = {}
    circle = []
    for e in range(1, d.edge_count + 1):
        r = _find(parent, e)
        if r not in ids:
            ids[r] = len(ids)
        circle.append(ids[r])
    return Resolution(mask, d.n, tuple(circle), len(ids))


def writhe(d: Diagram) -> int:
    return d.n_plus - d.n_minus


def change_crossing(d: Diagram, index: int) -> Diagram:
    """Swap over/under at crossing ``index`` (0-based); edge orientations are kept."""
    xs = list(d.crossings)
    xs[index] = xs[index].reversed()
    return from_tuples([x.edges for x in xs]) if xs else d


def mirror(d: Diagram) -> Diagram:
    if not d.crossings:
        return d
    return from_tuples([x.reversed().edges for x in d.crossings])


def braid_closure(word: Sequence[int], strands: int) -> Diagram:
    """Closure of a braid word; ``+i`` / ``-i`` is sigma_i to the power +1 / -1.

    Every generator ``1..strands-1`` must occur so that no strand is left
    without crossings.
    """
    used = {abs(g) for g in word}
    if used != set(range(1, strands)):
        raise ValueError("every braid generator must appear at least once")
    current = list(range(1, strands + 1))
    fresh = strands + 1
    tuples = []
    for g in word:
        i = abs(g) - 1
        bl, br = current[i], current[i + 1]
        tl, tr = fresh, fresh + 1
        fresh += 2
        if g > 0:
            tuples.append([br, tr, tl, bl])
        else:
            tuples.append([bl, br, tr, tl])
        current[i], current[i + 1] = tl, tr
    final = {current[p]: p + 1 for p in range(strands)}
    relabel: dict[int, int] = {}
    out = []
    for t in tuples:
        row = []
        for e in t:
            e = final.get(e, e)
            if e not in relabel:
                relabel[e] = len(relabel) + 1
            row.append(relabel[e])
        out.append(row)
    return from_tuples(out)


def random_braid_word(rng: random.Random, length: int, strands: int, *, knot: bool = True) -> list[int]:
    """A random braid word using every generator; with ``knot`` its closure is a knot."""
    if strands < 2 or length < strands - 1:
        raise ValueError("word too short for the number of strands")
    if knot and (length - strands + 1) % 2:
        # a single cycle on `strands` points has parity strands - 1
        raise ValueError("a knot closure needs length congruent to strands - 1 mod 2")
    while True:
        word = [rng.choice((1, -1)) * rng.randint(1, strands - 1) for _ in range(length)]
        if {abs(g) for g in word} != set(range(1, strands)):
            continue
        if not knot:
            return word
        perm = list(range(strands))
        for g in word:
            i = abs(g) - 1
            perm[i], perm[i + 1] = perm[i + 1], perm[i]
        seen, p = 1, perm[0]
        while p != 0:
            p = perm[p]
            seen += 1
        if seen == strands:
            return word
