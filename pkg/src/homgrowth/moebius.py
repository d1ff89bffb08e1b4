"""Exact projective group over the rationals acting on the rational projective line.

Points are ``fractions.Fraction`` values or the singleton ``INF``.  Group
elements are integer 2x2 matrices with positive determinant kept in a
canonical form (content 1, first nonzero entry positive), so equality and
hashing are structural.

Subsets of the line are finite unions of open arcs and isolated points,
stored as a canonical cell decomposition: sorted breakpoints, a membership
flag per breakpoint and a membership flag per open gap between consecutive
breakpoints.  ``ArcSet`` is the open case.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from fractions import Fraction
from math import gcd
from typing import Iterable, NamedTuple, Sequence, Union


class _Infinity:
    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("projective-infinity")


INF = _Infinity()

ProjPoint = Union[Fraction, _Infinity]


def point(value) -> ProjPoint:
    """Coerce ints, Fractions, strings ("p/q", "inf") or INF to a ProjPoint."""
    if value is INF:
        return INF
    if isinstance(value, str):
        return parse_point(value)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a Fraction or a string")
    return Fraction(value)


def parse_point(text: str) -> ProjPoint:
    s = text.strip().lower()
    if s in ("inf", "infinity", "oo"):
        return INF
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"not a projective point: {text!r}") from None


def format_point(p: ProjPoint) -> str:
    if p is INF:
        return "inf"
    return str(p)


def point_key(p: ProjPoint):
    """Total order on the line: rationals ascending, then INF."""
    if p is INF:
        return (1, 0)
    return (0, p)


# ---------------------------------------------------------------------------
# group elements


class GroupElement:
    """Element of PGL(2, Q)^+ as a normalized integer matrix ((a, b), (c, d))."""

    __slots__ = ("a", "b", "c", "d", "_hash")

    def __init__(self, a: int, b: int, c: int, d: int):
        a, b, c, d = int(a), int(b), int(c), int(d)
        if a * d - b * c <= 0:
            raise ValueError(f"determinant must be positive: ({a} {b}; {c} {d})")
        self._set(*_normalize(a, b, c, d))

    def _set(self, a, b, c, d):
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_hash", hash((a, b, c, d)))

    @classmethod
    def _trusted(cls, a, b, c, d):
        # caller guarantees det > 0
        g = object.__new__(cls)
        g._set(*_normalize(a, b, c, d))
        return g

    def __setattr__(self, name, value):
        raise AttributeError("GroupElement is immutable")

    def __eq__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return (self.a == other.a and self.b == other.b
                and self.c == other.c and self.d == other.d)

    def __hash__(self):
        return self._hash

    def __reduce__(self):
        return (GroupElement, self.entries)

    def __repr__(self):
        return f"GroupElement({self.a} {self.b}; {self.c} {self.d})"

    def __mul__(self, other):
        if not isinstance(other, GroupElement):
            return NotImplemented
        return compose(self, other)

    def __call__(self, p: ProjPoint) -> ProjPoint:
        return act(self, p)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> int:
        return self.a + self.d

    def is_identity(self) -> bool:
        return self.b == 0 and self.c == 0 and self.a == self.d

    def inverse(self) -> "GroupElement":
        return invert(self)

    def __pow__(self, n: int) -> "GroupElement":
        if n < 0:
            return invert(self) ** (-n)
        result, base = IDENTITY, self
        while n:
            if n & 1:
                result = compose(result, base)
            base = compose(base, base)
            n >>= 1
        return result

    def to_str(self) -> str:
        return f"{self.a} {self.b} {self.c} {self.d}"


def _normalize(a, b, c, d):
    g = gcd(a, b, c, d)
    if g != 1:
        a, b, c, d = a // g, b // g, c // g, d // g
    lead = a or b or c
    if lead < 0:
        a, b, c, d = -a, -b, -c, -d
    return a, b, c, d


def parse_element(text: str) -> GroupElement:
    parts = text.replace(";", " ").replace(",", " ").split()
    if len(parts) != 4:
        raise ValueError(f"expected four integers 'a b c d', got {text!r}")
    try:
        a, b, c, d = (int(x) for x in parts)
    except ValueError:
        raise ValueError(f"expected four integers 'a b c d', got {text!r}") from None
    return GroupElement(a, b, c, d)


IDENTITY = GroupElement(1, 0, 0, 1)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Normalized matrix product g*h (apply h first)."""
    return GroupElement._trusted(
        g.a * h.a + g.b * h.c,
        g.a * h.b + g.b * h.d,
        g.c * h.a + g.d * h.c,
        g.c * h.b + g.d * h.d,
    )


def invert(g: GroupElement) -> GroupElement:
    return GroupElement._trusted(g.d, -g.b, -g.c, g.a)


def act(g: GroupElement, p: ProjPoint) -> ProjPoint:
    """Slope action t -> (a t + b) / (c t + d)."""
    if p is INF:
        if g.c == 0:
            return INF
        return Fraction(g.a, g.c)
    num, den = p.numerator, p.denominator
    x = g.a * num + g.b * den
    y = g.c * num + g.d * den
    if y == 0:
        return INF
    return Fraction(x, y)


class Orientation(enum.IntEnum):
    NEGATIVE = -1
    DEGENERATE = 0
    POSITIVE = 1


def ccw(p: ProjPoint, q: ProjPoint, r: ProjPoint) -> Orientation:
    """Cyclic orientation of three points of the line (INF above every rational)."""
    if p == q or q == r or p == r:
        return Orientation.DEGENERATE
    kp, kq, kr = point_key(p), point_key(q), point_key(r)
    if (kp < kq < kr) or (kq < kr < kp) or (kr < kp < kq):
        return Orientation.POSITIVE
    return Orientation.NEGATIVE


# ---------------------------------------------------------------------------
# subsets of the line


class Arc(NamedTuple):
    """Open arc swept in the positive direction from ``start`` to ``end``.

    ``start == end`` denotes the whole line minus that point.
    """

    start: ProjPoint
    end: ProjPoint

    def contains(self, p: ProjPoint) -> bool:
        if self.start == self.end:
            return p != self.start
        return ccw(self.start, p, self.end) is Orientation.POSITIVE


def _sample_between(p: ProjPoint, q: ProjPoint) -> ProjPoint:
    """A point strictly inside the open arc from p to q."""
    if p == q:
        return Fraction(0) if p is INF else p + 1
    if p is INF:
        return q - 1
    if q is INF:
        return p + 1
    if p < q:
        return (p + q) / 2
    return INF


class CircleSet:
    """Canonical finite union of open arcs and points of the projective line.

    ``pts`` are distinct breakpoints sorted by ``point_key``; ``pt_in[i]`` says
    whether ``pts[i]`` belongs to the set and ``gap_in[i]`` whether the open
    arc from ``pts[i]`` to ``pts[i+1]`` (cyclically) does.  With no breakpoints
    ``gap_in`` has one entry: the set is FULL or EMPTY.
    """

    __slots__ = ("pts", "pt_in", "gap_in", "_keys")

    def __init__(self, pts: Sequence[ProjPoint], pt_in: Sequence[bool], gap_in: Sequence[bool]):
        pts, pt_in, gap_in = _canonical(list(pts), list(pt_in), list(gap_in))
        object.__setattr__(self, "pts", tuple(pts))
        object.__setattr__(self, "pt_in", tuple(pt_in))
        object.__setattr__(self, "gap_in", tuple(gap_in))
        object.__setattr__(self, "_keys", [point_key(p) for p in pts])

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __eq__(self, other):
        if not isinstance(other, CircleSet):
            return NotImplemented
        return (self.pts == other.pts and self.pt_in == other.pt_in
                and self.gap_in == other.gap_in)

    def __hash__(self):
        return hash((self.pts, self.pt_in, self.gap_in))

    def __reduce__(self):
        return (CircleSet, (self.pts, self.pt_in, self.gap_in))

    def __repr__(self):
        if self.is_full():
            return f"{type(self).__name__}(FULL)"
        if self.is_empty():
            return f"{type(self).__name__}(EMPTY)"
        parts = [f"({format_point(a.start)}, {format_point(a.end)})" for a in self.arcs]
        parts += [format_point(p) for p in self.isolated_points]
        return f"{type(self).__name__}({' '.join(parts)})"

    def __contains__(self, p):
        return self.contains(p)

    def is_empty(self) -> bool:
        return not self.pts and not self.gap_in[0]

    def is_full(self) -> bool:
        return not self.pts and self.gap_in[0]

    def is_open(self) -> bool:
        return not any(self.pt_in)

    def is_closed(self) -> bool:
        return all(self.pt_in)

    def contains(self, p: ProjPoint) -> bool:
        n = len(self.pts)
        if n == 0:
            return self.gap_in[0]
        k = point_key(p)
        i = bisect_left(self._keys, k)
        if i < n and self._keys[i] == k:
            return self.pt_in[i]
        # p lies in the gap that starts at pts[i-1] (wrapping to the last gap)
        return self.gap_in[i - 1]

    @property
    def arcs(self) -> tuple[Arc, ...]:
        """Open arcs contained in the set, one per included gap (empty when FULL)."""
        n = len(self.pts)
        return tuple(Arc(self.pts[i], self.pts[(i + 1) % n])
                     for i in range(n) if self.gap_in[i])

    @property
    def isolated_points(self) -> tuple[ProjPoint, ...]:
        """Members that are endpoints of neither included gap."""
        n = len(self.pts)
        return tuple(self.pts[i] for i in range(n)
                     if self.pt_in[i] and not self.gap_in[i] and not self.gap_in[i - 1])

    @property
    def endpoints(self) -> tuple[ProjPoint, ...]:
        """Breakpoints that belong to the set."""
        return tuple(p for p, inside in zip(self.pts, self.pt_in) if inside)

    def interior(self) -> "ArcSet":
        n = len(self.pts)
        flags = [self.pt_in[i] and self.gap_in[i] and self.gap_in[i - 1] for i in range(n)]
        return ArcSet._from_cells(self.pts, flags, self.gap_in)

    def closure(self) -> "CircleSet":
        n = len(self.pts)
        flags = [self.pt_in[i] or self.gap_in[i] or self.gap_in[i - 1] for i in range(n)]
        return _wrap(self.pts, flags, self.gap_in)

    def samples(self) -> list[ProjPoint]:
        """Breakpoints plus one point inside every gap; decides every cell."""
        n = len(self.pts)
        if n == 0:
            return [Fraction(0)]
        out = []
        for i in range(n):
            out.append(self.pts[i])
            out.append(_sample_between(self.pts[i], self.pts[(i + 1) % n]))
        return out


class ArcSet(CircleSet):
    """Open subset of the line: a finite union of open arcs."""

    __slots__ = ()

    def __init__(self, pts, pt_in, gap_in):
        super().__init__(pts, pt_in, gap_in)
        if any(self.pt_in):
            raise ValueError("ArcSet must be open")

    @classmethod
    def _from_cells(cls, pts, pt_in, gap_in):
        return cls(pts, pt_in, gap_in)

    def __reduce__(self):
        return (ArcSet, (self.pts, self.pt_in, self.gap_in))


def _wrap(pts, pt_in, gap_in) -> CircleSet:
    s = CircleSet(pts, pt_in, gap_in)
    if s.is_open():
        return ArcSet(s.pts, s.pt_in, s.gap_in)
    return s


def _canonical(pts, pt_in, gap_in):
    n = len(pts)
    if n == 0:
        return [], [], [bool(gap_in[0])]
    changed = True
    while changed and pts:
        changed = False
        n = len(pts)
        for i in range(n):
            if pt_in[i] == gap_in[i - 1] == gap_in[i]:
                # point is indistinguishable from both neighbouring gaps
                if n == 1:
                    return [], [], [bool(gap_in[0])]
                del pts[i]
                del pt_in[i]
                prev = gap_in[i - 1]
                del gap_in[i]
                if i == 0:
                    gap_in[-1] = prev
                changed = True
                break
    return pts, [bool(x) for x in pt_in], [bool(x) for x in gap_in]


EMPTY = ArcSet((), (), (False,))
FULL = ArcSet((), (), (True,))


def arc(start, end) -> ArcSet:
    p, q = point(start), point(end)
    if p == q:
        return ArcSet((p,), (False,), (True,))
    lo, hi = sorted((p, q), key=point_key)
    # gaps: lo -> hi is gap 0, hi -> lo is gap 1
    inside_first = p == lo
    return ArcSet((lo, hi), (False, False), (inside_first, not inside_first))


def points_set(points: Iterable) -> CircleSet:
    pts = sorted({point(p) for p in points}, key=point_key)
    if not pts:
        return EMPTY
    return _wrap(pts, [True] * len(pts), [False] * len(pts))


def arcset(*arcs) -> ArcSet:
    """Union of arcs given as Arc tuples or (start, end) pairs."""
    result = EMPTY
    for a in arcs:
        result = union(result, arc(*a))
    return result


def _combine(sets: Sequence[CircleSet], op) -> CircleSet:
    pts = sorted({p for s in sets for p in s.pts}, key=point_key)
    n = len(pts)
    if n == 0:
        probe = Fraction(0)
        return _wrap((), (), (op([s.contains(probe) for s in sets]),))
    pt_in = [op([s.contains(p) for s in sets]) for p in pts]
    gap_in = []
    for i in range(n):
        probe = _sample_between(pts[i], pts[(i + 1) % n])
        gap_in.append(op([s.contains(probe) for s in sets]))
    return _wrap(pts, pt_in, gap_in)


def union(*sets: CircleSet) -> CircleSet:
    if not sets:
        return EMPTY
    return _combine(sets, any)


def intersect(*sets: CircleSet) -> CircleSet:
    if not sets:
        return FULL
    return _combine(sets, all)


def complement(A: CircleSet) -> CircleSet:
    """Exact complement; for an ArcSet this is closed (interior plus endpoints)."""
    return _wrap(A.pts, [not x for x in A.pt_in], [not x for x in A.gap_in])


def complement_interior(A: CircleSet) -> ArcSet:
    return complement(A).interior()


def difference(A: CircleSet, B: CircleSet) -> CircleSet:
    return intersect(A, complement(B))


def closure(A: CircleSet) -> CircleSet:
    return A.closure()


def contains(A: CircleSet, p) -> bool:
    return A.contains(point(p))


def covers(A: CircleSet, B: CircleSet) -> bool:
    """True iff B is a subset of A."""
    return difference(B, A).is_empty()


def covers_closure(A: CircleSet, B: CircleSet) -> bool:
    """True iff the closure of B is a subset of A."""
    return covers(A, B.closure())


def image(g: GroupElement, A: CircleSet) -> CircleSet:
    """Exact image g(A); the action preserves cyclic order so cells map to cells."""
    n = len(A.pts)
    if n == 0:
        return A
    moved = [act(g, p) for p in A.pts]
    start = min(range(n), key=lambda i: point_key(moved[i]))
    order = [(start + i) % n for i in range(n)]
    pts = [moved[i] for i in order]
    pt_in = [A.pt_in[i] for i in order]
    gap_in = [A.gap_in[i] for i in order]
    if isinstance(A, ArcSet):
        return ArcSet(pts, pt_in, gap_in)
    return CircleSet(pts, pt_in, gap_in)


def preimage(g: GroupElement, A: CircleSet) -> CircleSet:
    return image(invert(g), A)


# ---------------------------------------------------------------------------
# serialization


def arcset_to_json(A: CircleSet):
    """ArcSet as "full" or a list of [start, end] endpoint pairs."""
    if not A.is_open():
        raise ValueError("only open sets serialize as arc lists")
    if A.is_full():
        return "full"
    return [[format_point(a.start), format_point(a.end)] for a in A.arcs]


def arcset_from_json(data) -> ArcSet:
    if isinstance(data, str):
        key = data.strip().lower()
        if key == "full":
            return FULL
        if key == "empty":
            return EMPTY
        raise ValueError(f"unknown arc set {data!r}")
    if not isinstance(data, (list, tuple)):
        raise ValueError("arc set must be 'full', 'empty' or a list of endpoint pairs")
    result = EMPTY
    for pair in data:
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ValueError(f"arc must be an endpoint pair, got {pair!r}")
        result = union(result, arc(point(str(pair[0])), point(str(pair[1]))))
    return result
