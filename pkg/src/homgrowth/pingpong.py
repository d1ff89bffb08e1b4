"""Semigroup ping-pong certificates.

Tables A_1..A_k with pairwise disjoint closures and t_i(A_j) ⊆ A_i for all
i, j certify that t_1..t_k freely generate a free semigroup.  Search is a
floating-point heuristic; only exactly verified certificates are returned.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .moebius import (
    IDENTITY,
    INF,
    ArcSet,
    GroupElement,
    arc,
    arcset_from_json,
    arcset_to_json,
    compose,
    covers,
    image,
    intersect,
    parse_element,
)


@dataclass(frozen=True)
class PingPongCertificate:
    elements: tuple[GroupElement, ...]
    tables: tuple[ArcSet, ...]

    def to_json(self) -> dict:
        return {
            "kind": "pingpong",
            "elements": [g.to_str() for g in self.elements],
            "tables": [arcset_to_json(A) for A in self.tables],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "PingPongCertificate":
        return cls(tuple(parse_element(m) for m in data["elements"]),
                   tuple(arcset_from_json(t) for t in data["tables"]))


@dataclass(frozen=True)
class PingPongVerdict:
    ok: bool
    reason: str = ""
    pair: Optional[tuple[int, int]] = None

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {"verified": self.ok, "reason": self.reason,
                "pair": list(self.pair) if self.pair else None}


def verify_certificate(cert: PingPongCertificate) -> PingPongVerdict:
    k = len(cert.elements)
    if k < 2:
        raise ValueError("ping-pong needs at least two elements")
    if len(cert.tables) != k:
        raise ValueError("one table per element required")
    for i, A in enumerate(cert.tables):
        if A.is_empty():
            return PingPongVerdict(False, "empty table", (i, i))
    closures = [A.closure() for A in cert.tables]
    for i, j in itertools.combinations(range(k), 2):
        if not intersect(closures[i], closures[j]).is_empty():
            return PingPongVerdict(False, "table closures meet", (i, j))
    for i, t in enumerate(cert.elements):
        for j, A in enumerate(cert.tables):
            if not covers(cert.tables[i], image(t, A)):
                return PingPongVerdict(False, "containment fails: t_i(A_j) not in A_i", (i, j))
    return PingPongVerdict(True, "verified")


def fixed_points(g: GroupElement) -> Optional[tuple[float, float]]:
    """(attracting, repelling) fixed points as angles in [0, pi), or None unless hyperbolic.

    A point t of the line corresponds to the angle of the vector (t, 1).
    """
    tr, det = g.trace, g.det
    disc = tr * tr - 4 * det
    if disc <= 0:
        return None
    root = math.sqrt(disc)
    big, small = (tr + root) / 2, (tr - root) / 2
    if abs(big) < abs(small):
        big, small = small, big

    def eigen_angle(lam):
        # (a - lam) x + b y = 0, or c x + (d - lam) y = 0
        if abs(g.b) + abs(g.a - lam) > abs(g.c) + abs(g.d - lam):
            vx, vy = -g.b, g.a - lam
        else:
            vx, vy = g.d - lam, -g.c
        return math.atan2(vx, vy) % math.pi

    return eigen_angle(big), eigen_angle(small)


def _angle_to_point(theta: float, resolution: Fraction) -> object:
    theta %= math.pi
    s, c = math.sin(theta), math.cos(theta)
    if abs(c) * float(resolution) < 1e-300 or abs(s / c) > 1 / float(resolution):
        return INF
    t = s / c
    return Fraction(round(t / float(resolution))) * resolution


def _table_around(theta: float, width: float, resolution: Fraction) -> Optional[ArcSet]:
    lo = _angle_to_point(theta - width, resolution)
    hi = _angle_to_point(theta + width, resolution)
    if lo == hi:
        return None
    return arc(lo, hi)


def search_certificate(elements: Sequence[GroupElement], resolution=Fraction(1, 16),
                       max_power: int = 8, widths: int = 8) -> Optional[PingPongCertificate]:
    """Tables around attracting fixed points of powers t_i^m, verified exactly.

    Candidates are tried in order of m, then shrinking width; the first that
    verifies is returned.  ``None`` means nothing was found, not that none exists.
    """
    elements = list(elements)
    if len(elements) < 2:
        raise ValueError("ping-pong needs at least two elements")
    resolution = Fraction(resolution)
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    fps = [fixed_points(g) for g in elements]
    if any(fp is None for fp in fps):
        return None
    attracting = [fp[0] for fp in fps]
    for m in range(1, max_power + 1):
        powered = tuple(g ** m for g in elements)
        for w in range(widths):
            width = (math.pi / 4) / (2 ** w)
            tables = [_table_around(a, width, resolution) for a in attracting]
            if any(A is None for A in tables):
                continue
            cert = PingPongCertificate(powered, tuple(tables))
            if verify_certificate(cert):
                return cert
    return None


def positive_words(k: int, max_len: int):
    for n in range(max_len + 1):
        yield from itertools.product(range(k), repeat=n)


def free_semigroup_collisions(elements: Sequence[GroupElement], max_len: int = 8) -> list:
    """Pairs of distinct positive words (length <= max_len) with equal products."""
    seen: dict = {}
    clashes = []
    for word in positive_words(len(elements), max_len):
        g = IDENTITY
        for i in word:
            g = compose(elements[i], g)
        if g in seen:
            clashes.append((seen[g], word))
        else:
            seen[g] = word
    return clashes
