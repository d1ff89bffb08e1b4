"""Constrained breadth-first search over Gamma_{U,x}.

The ball of radius R around the identity in Gamma_{U,x} with the
constrained word length |.|_{S,U,x}: an element is admitted when its action
keeps x inside U, and it is expanded by left multiplication with every
generator.  Elements (not words) are deduplicated, which is sound because
the action is faithful and quasi-analytic.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterator, Mapping, Optional, Sequence

from .moebius import (
    FULL,
    IDENTITY,
    ArcSet,
    GroupElement,
    ProjPoint,
    act,
    compose,
    covers,
    format_point,
    invert,
    parse_element,
)


class BasePointOutsideU(ValueError):
    pass


class ResourceCapExceeded(RuntimeError):
    pass


UNREACHABLE = None


def _inverse_label(label: str) -> str:
    if label.endswith("^-1"):
        return label[:-3]
    return label + "^-1"


class GeneratingSystem:
    """Symmetric labelled generating set; inverses are added when missing."""

    def __init__(self, generators: Sequence[tuple[str, GroupElement]]):
        labels: list[str] = []
        elements: list[GroupElement] = []
        for label, g in generators:
            if isinstance(g, str):
                g = parse_element(g)
            if g.is_identity():
                raise ValueError(f"generator {label!r} is the identity")
            if g in elements:
                raise ValueError(f"generator {label!r} duplicates an earlier generator")
            if label in labels:
                raise ValueError(f"duplicate label {label!r}")
            labels.append(label)
            elements.append(g)
        for label, g in list(zip(labels, elements)):
            inv = invert(g)
            if inv not in elements:
                new_label = _inverse_label(label)
                while new_label in labels:
                    new_label += "'"
                labels.append(new_label)
                elements.append(inv)
        self.labels = tuple(labels)
        self.elements = tuple(elements)
        self._index = {g: i for i, g in enumerate(elements)}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(zip(self.labels, self.elements))

    def __eq__(self, other):
        if not isinstance(other, GeneratingSystem):
            return NotImplemented
        return self.labels == other.labels and self.elements == other.elements

    def __hash__(self):
        return hash((self.labels, self.elements))

    def __repr__(self):
        return f"GeneratingSystem({list(self.labels)})"

    def __contains__(self, g):
        return g in self._index

    def element(self, label: str) -> GroupElement:
        return self.elements[self.labels.index(label)]

    def label_of(self, g: GroupElement) -> str:
        return self.labels[self._index[g]]

    def inverse_index(self, i: int) -> int:
        return self._index[invert(self.elements[i])]

    def product(self, word: Sequence[str]) -> GroupElement:
        """Product of a word read left to right as applied first to last."""
        result = IDENTITY
        for label in word:
            result = compose(self.element(label), result)
        return result


@dataclass(frozen=True)
class PseudogroupSpec:
    S: GeneratingSystem
    U: ArcSet = FULL
    V: Optional[ArcSet] = None

    def __post_init__(self):
        if self.U.is_empty():
            raise ValueError("U must be nonempty")
        if not self.U.is_open() or (self.V is not None and not self.V.is_open()):
            raise ValueError("U and V must be open arc sets")
        if self.V is not None and not covers(self.U, self.V.closure()):
            raise ValueError("closure of V must lie inside U")

    def with_U(self, U: ArcSet) -> "PseudogroupSpec":
        V = self.V if self.V is not None and covers(U, self.V.closure()) else None
        return PseudogroupSpec(self.S, U, V)


@dataclass(frozen=True)
class GermBall:
    spec: PseudogroupSpec = field(repr=False)
    base: ProjPoint
    radius: int
    members: Mapping[GroupElement, tuple[int, ProjPoint]] = field(repr=False)
    sphere_sizes: tuple[int, ...]
    via: Mapping[GroupElement, int] = field(repr=False, compare=False)

    def __len__(self):
        return len(self.members)

    def __contains__(self, g):
        return g in self.members

    def length(self, g: GroupElement) -> Optional[int]:
        entry = self.members.get(g)
        return None if entry is None else entry[0]

    def point(self, g: GroupElement) -> ProjPoint:
        return self.members[g][1]

    def sphere(self, n: int) -> list[GroupElement]:
        return [g for g, (length, _) in self.members.items() if length == n]

    def cumulative(self) -> list[int]:
        out, total = [], 0
        for s in self.sphere_sizes:
            total += s
            out.append(total)
        return out

    def word(self, g: GroupElement) -> list[str]:
        """One geodesic admissible word for g, first-applied generator first."""
        labels = self.spec.S.labels
        elements = self.spec.S.elements
        word = []
        while not g.is_identity():
            i = self.via[g]
            word.append(labels[i])
            g = compose(invert(elements[i]), g)
        word.reverse()
        return word

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["length", "a", "b", "c", "d", "point"])
        for g, (length, p) in self.members.items():
            w.writerow([length, g.a, g.b, g.c, g.d, format_point(p)])
        return buf.getvalue()

    def sphere_sizes_json(self) -> str:
        return json.dumps(list(self.sphere_sizes))


def _expand(chunk, gens, U_full, U):
    out = []
    for g, p in chunk:
        for i, s in enumerate(gens):
            q = act(s, p)
            if U_full or U.contains(q):
                out.append((compose(s, g), q, i))
    return out


def _bfs_levels(spec: PseudogroupSpec, x: ProjPoint, max_nodes: Optional[int],
                threads: int = 1) -> Iterator[tuple[int, list]]:
    """Yield (n, [(element, point, generator index), ...]) sphere by sphere."""
    gens = spec.S.elements
    U = spec.U
    U_full = U.is_full()
    seen = {IDENTITY}
    frontier = [(IDENTITY, x, -1)]
    n = 0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while frontier:
            yield n, frontier
            pairs = [(g, p) for g, p, _ in frontier]
            if pool is not None and len(pairs) >= 2 * threads:
                size = -(-len(pairs) // threads)
                chunks = [pairs[k:k + size] for k in range(0, len(pairs), size)]
                candidates = []
                # map() keeps chunk order, so the merge below is FIFO order
                for part in pool.map(lambda c: _expand(c, gens, U_full, U), chunks):
                    candidates.extend(part)
            else:
                candidates = _expand(pairs, gens, U_full, U)
            nxt = []
            for h, q, i in candidates:
                if h not in seen:
                    seen.add(h)
                    nxt.append((h, q, i))
            if max_nodes is not None and len(seen) > max_nodes:
                raise ResourceCapExceeded(
                    f"germ ball exceeded {max_nodes} nodes at length {n + 1}")
            frontier = nxt
            n += 1
    finally:
        if pool is not None:
            pool.shutdown()


def _check_base(spec, x):
    if not spec.U.contains(x):
        raise BasePointOutsideU(f"base point {format_point(x)} is not in U")


def germ_ball(spec: PseudogroupSpec, x: ProjPoint, R: int,
              max_nodes: Optional[int] = None, threads: int = 1) -> GermBall:
    """All gamma with |gamma|_{S,U,x} <= R, with exact lengths and points gamma(x)."""
    if R < 0:
        raise ValueError("radius must be non-negative")
    _check_base(spec, x)
    members: dict = {}
    via: dict = {}
    sizes = []
    for n, sphere in _bfs_levels(spec, x, max_nodes, threads):
        for g, p, i in sphere:
            members[g] = (n, p)
            if i >= 0:
                via[g] = i
        sizes.append(len(sphere))
        if n == R:
            break
    sizes += [0] * (R + 1 - len(sizes))
    return GermBall(spec, x, R, MappingProxyType(members), tuple(sizes), MappingProxyType(via))


def orbit_ball(spec: PseudogroupSpec, x: ProjPoint, R: int,
               max_nodes: Optional[int] = None, threads: int = 1,
               ball: Optional[GermBall] = None) -> dict:
    """Orbit points reachable within R steps, each with its orbit distance from x."""
    if ball is None:
        ball = germ_ball(spec, x, R, max_nodes=max_nodes, threads=threads)
    out: dict = {}
    for _, (length, p) in ball.members.items():
        if p not in out:
            out[p] = length
    return out


def constrained_length(spec: PseudogroupSpec, x: ProjPoint, target: GroupElement,
                       max_radius: int = 64, max_nodes: Optional[int] = None) -> Optional[int]:
    """|target|_{S,U,x}, or UNREACHABLE if not found within the caps."""
    _check_base(spec, x)
    if not spec.U.contains(act(target, x)):
        raise ValueError("target does not keep the base point in U")
    try:
        for n, sphere in _bfs_levels(spec, x, max_nodes):
            for g, _, _ in sphere:
                if g == target:
                    return n
            if n >= max_radius:
                break
    except ResourceCapExceeded:
        return UNREACHABLE
    return UNREACHABLE


def germ_distance(spec: PseudogroupSpec, x: ProjPoint, gamma: GroupElement,
                  delta: GroupElement, max_radius: int = 64,
                  max_nodes: Optional[int] = None) -> Optional[int]:
    """d_{S,U,x}(gamma, delta) = |delta gamma^-1|_{S,U,gamma(x)}."""
    _check_base(spec, x)
    y = act(gamma, x)
    if not spec.U.contains(y) or not spec.U.contains(act(delta, x)):
        raise ValueError("gamma and delta must both keep x inside U")
    return constrained_length(spec, y, compose(delta, invert(gamma)),
                              max_radius=max_radius, max_nodes=max_nodes)


def stabilizer_elements(spec: PseudogroupSpec, x: ProjPoint, R: int,
                        max_nodes: Optional[int] = None,
                        ball: Optional[GermBall] = None) -> set:
    """Non-identity members of the radius-R germ ball fixing x."""
    if ball is None:
        ball = germ_ball(spec, x, R, max_nodes=max_nodes)
    return {g for g, (_, p) in ball.members.items() if p == x and not g.is_identity()}


def orbit_to_csv(orbit: Mapping[ProjPoint, int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["distance", "point"])
    for p, dist in orbit.items():
        w.writerow([dist, format_point(p)])
    return buf.getvalue()


def cayley_ball(S: GeneratingSystem, R: int) -> dict:
    """Unconstrained word-length ball {element: length}."""
    lengths = {IDENTITY: 0}
    frontier = [IDENTITY]
    for n in range(1, R + 1):
        nxt = []
        for g in frontier:
            for s in S.elements:
                h = compose(s, g)
                if h not in lengths:
                    lengths[h] = n
                    nxt.append(h)
        frontier = nxt
    return lengths
