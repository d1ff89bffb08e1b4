"""Growth series, domination with explicit constants, windowed
polynomial-vs-exponential classification, sphere doubling, quasi-lattice
comparison and empirical distortion between generating systems."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .engine import GermBall, PseudogroupSpec, germ_ball, orbit_ball
from .moebius import ProjPoint, format_point
from .pingpong import PingPongCertificate, verify_certificate

POLYNOMIAL = "POLYNOMIAL"
EXPONENTIAL = "EXPONENTIAL"
INCONCLUSIVE = "INCONCLUSIVE"


class TooFewPoints(ValueError):
    pass


class PreconditionNotCertified(ValueError):
    pass


class NotACNet(ValueError):
    pass


@dataclass(frozen=True)
class GrowthSeries:
    """Cumulative ball counts r -> v(r)."""

    counts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        radii = [r for r, _ in self.counts]
        values = [v for _, v in self.counts]
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly increasing")
        if any(b < a for a, b in zip(values, values[1:])):
            raise ValueError("counts must be non-decreasing")
        if any(v < 0 for v in values):
            raise ValueError("counts must be non-negative")

    @classmethod
    def from_values(cls, values: Iterable[int], start: int = 0) -> "GrowthSeries":
        return cls(tuple((start + i, int(v)) for i, v in enumerate(values)))

    @classmethod
    def from_function(cls, f: Callable[[int], int], radii: Iterable[int]) -> "GrowthSeries":
        return cls(tuple((r, int(f(r))) for r in radii))

    @classmethod
    def from_ball(cls, ball: GermBall) -> "GrowthSeries":
        return cls.from_values(ball.cumulative())

    @classmethod
    def from_orbit(cls, orbit: Mapping[ProjPoint, int], radius: int) -> "GrowthSeries":
        sizes = [0] * (radius + 1)
        for d in orbit.values():
            sizes[d] += 1
        return cls.from_values(itertools.accumulate(sizes))

    @property
    def radii(self) -> list[int]:
        return [r for r, _ in self.counts]

    @property
    def values(self) -> list[int]:
        return [v for _, v in self.counts]

    def __len__(self):
        return len(self.counts)

    def scaled(self, k: int) -> "GrowthSeries":
        return GrowthSeries(tuple((r, k * v) for r, v in self.counts))

    def at(self, s) -> Optional[int]:
        """Step interpolation: value at the largest radius <= s, None below range."""
        best = None
        for r, v in self.counts:
            if r <= s:
                best = v
            else:
                break
        return best

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["radius", "count"])
        w.writerows(self.counts)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GrowthSeries":
        rows = list(csv.reader(io.StringIO(text)))
        if rows and not rows[0][0].strip().lstrip("-").isdigit():
            rows = rows[1:]
        return cls(tuple((int(r), int(v)) for r, v in rows if r.strip()))


@dataclass(frozen=True)
class GrowthVerdict:
    kind: str
    estimate: Optional[float]
    poly_residual: float
    exp_residual: float
    window: tuple[int, int]
    degree: Optional[float] = None
    rate: Optional[float] = None

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "degree": self.degree,
            "rate": self.rate,
            "residuals": {"polynomial": self.poly_residual, "exponential": self.exp_residual},
            "window": list(self.window),
        }


@dataclass(frozen=True)
class ClassifierParams:
    margin: float = 2.0
    min_points: int = 4
    window: Optional[tuple[int, int]] = None  # default: upper half of radii


def _fit(xs, ys):
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    return float(slope), float(math.sqrt(np.mean(resid ** 2)))


def classify_growth(series: GrowthSeries, params: ClassifierParams = ClassifierParams()) -> GrowthVerdict:
    """Least-squares fits of log v against log r and against r on a tail window.

    The model with the smaller RMS residual wins when it beats the other by
    more than ``params.margin``; otherwise INCONCLUSIVE.
    """
    pts = [(r, v) for r, v in series.counts if r > 0 and v > 0]
    if params.window is not None:
        lo, hi = params.window
    elif pts:
        rmax = pts[-1][0]
        lo, hi = max(1, rmax // 2), rmax
    else:
        lo, hi = 1, 0
    pts = [(r, v) for r, v in pts if lo <= r <= hi]
    if len(pts) < max(params.min_points, 2):
        raise TooFewPoints(f"{len(pts)} points in window [{lo}, {hi}], need {params.min_points}")
    window = (pts[0][0], pts[-1][0])
    r = np.array([p[0] for p in pts], dtype=float)
    logv = np.log(np.array([p[1] for p in pts], dtype=float))
    if pts[0][1] == pts[-1][1]:
        # bounded growth: degree 0
        return GrowthVerdict(POLYNOMIAL, 0.0, 0.0, 0.0, window, degree=0.0)
    degree, res_poly = _fit(np.log(r), logv)
    rate, res_exp = _fit(r, logv)
    floor = 1e-12
    if max(res_poly, res_exp) <= floor:
        return GrowthVerdict(INCONCLUSIVE, None, res_poly, res_exp, window)
    if res_exp * params.margin < res_poly:
        return GrowthVerdict(EXPONENTIAL, rate, res_poly, res_exp, window, rate=rate)
    if res_poly * params.margin < res_exp:
        return GrowthVerdict(POLYNOMIAL, degree, res_poly, res_exp, window, degree=degree)
    return GrowthVerdict(INCONCLUSIVE, None, res_poly, res_exp, window)


def check_domination(u: GrowthSeries, v: GrowthSeries, a, b, c, d) -> bool:
    """u(r) <= a v(b r + c) + d at every radius of u whose b r + c lies in v's range.

    Radii outside v's range are skipped; if none remain the check is not
    applicable and returns False.
    """
    a, b, c, d = (Fraction(x) for x in (a, b, c, d))
    lo, hi = v.radii[0], v.radii[-1]
    checked = 0
    for r, ur in u.counts:
        s = b * r + c
        if s < lo or s > hi:
            continue
        checked += 1
        if ur > a * v.at(s) + d:
            return False
    return checked > 0


DEFAULT_GRID = ((1, 2, 3, 4, 8), (1, 2, 3, 4, 8), (0, 1, 2, 4, 8), (0, 1, 2, 4, 8))


def search_domination(u: GrowthSeries, v: GrowthSeries, grid=DEFAULT_GRID):
    """First (a, b, c, d) in lexicographic grid order passing check_domination, else None."""
    for consts in itertools.product(*grid):
        if check_domination(u, v, *consts):
            return consts
    return None


def sphere_doubling_holds(sphere_sizes: Sequence[int]) -> tuple[bool, Optional[int]]:
    """card S(n+1) >= 2 card S(n) and card S(n) >= 2^n; returns (ok, first failing n)."""
    for n in range(len(sphere_sizes)):
        if sphere_sizes[n] < 2 ** n:
            return False, n
        if n + 1 < len(sphere_sizes) and sphere_sizes[n + 1] < 2 * sphere_sizes[n]:
            return False, n
    return True, None


def sphere_doubling_check(ball: GermBall, pair_coverage_ok: bool,
                          certificate: Optional[PingPongCertificate]) -> bool:
    """Sphere doubling on a ball whose generators carry a verified ping-pong certificate.

    Raises PreconditionNotCertified unless pair coverage was verified and the
    certificate both verifies and consists of generators of the ball.
    """
    if not pair_coverage_ok:
        raise PreconditionNotCertified("pair coverage not verified")
    if certificate is None or not verify_certificate(certificate):
        raise PreconditionNotCertified("no verified ping-pong certificate")
    if any(t not in ball.spec.S for t in certificate.elements):
        raise PreconditionNotCertified("certificate elements are not generators of the ball")
    return sphere_doubling_holds(ball.sphere_sizes)[0]


@dataclass(frozen=True)
class QuasiLatticeReport:
    K_C: int
    delta: int
    C: int
    base1: ProjPoint
    base2: ProjPoint
    verified: bool
    checked_radii: tuple[int, ...]
    excluded_radii: tuple[int, ...]
    lhs: tuple[int, ...] = field(repr=False)
    rhs: tuple[int, ...] = field(repr=False)

    def to_json(self) -> dict:
        return {
            "K_C": self.K_C,
            "delta": self.delta,
            "C": self.C,
            "base1": format_point(self.base1),
            "base2": format_point(self.base2),
            "verified": self.verified,
            "checked_radii": list(self.checked_radii),
            "excluded_radii": list(self.excluded_radii),
            "lhs": list(self.lhs),
            "rhs": list(self.rhs),
        }


def compare_quasi_lattices(orbit: Mapping[ProjPoint, int], net1, net2, C: int,
                           distance: Callable[[ProjPoint, ProjPoint], int]) -> QuasiLatticeReport:
    """Check v_1(x1, r) <= K_C v_2(x2, (1 + delta + C) r) on the computed orbit piece.

    ``orbit`` maps points to their distance from the base point (radius R =
    max distance); ``distance`` is the orbit metric.  Radii whose balls could
    reach past the piece are excluded and reported.
    """
    pts = list(orbit)
    R = max(orbit.values())
    net1, net2 = set(net1), set(net2)
    if not net1 <= set(pts) or not net2 <= set(pts):
        raise NotACNet("nets must be subsets of the orbit piece")
    for name, net in (("net1", net1), ("net2", net2)):
        for y in pts:
            if orbit[y] + C > R:
                continue  # its C-neighbourhood may leave the piece
            if not any(distance(y, z) <= C for z in net):
                raise NotACNet(f"{name} is not a {C}-net: nothing within {C} of {y}")
    K = 0
    for y in pts:
        if orbit[y] + C > R:
            continue
        for net in (net1, net2):
            K = max(K, sum(1 for z in net if distance(y, z) <= C))
    base = min(pts, key=lambda p: orbit[p])
    x1 = base if base in net1 else min(net1, key=lambda p: (orbit[p], pts.index(p)))
    x2 = min(net2, key=lambda p: (distance(x1, p), pts.index(p)))
    delta = distance(x1, x2)
    factor = 1 + delta + C
    checked, excluded, lhs, rhs = [], [], [], []
    ok = True
    for r in range(1, R + 1):
        if orbit[x1] + r > R or orbit[x2] + factor * r > R:
            excluded.append(r)
            continue
        left = sum(1 for z in net1 if distance(x1, z) <= r)
        right = K * sum(1 for z in net2 if distance(x2, z) <= factor * r)
        checked.append(r)
        lhs.append(left)
        rhs.append(right)
        if left > right:
            ok = False
    return QuasiLatticeReport(K, delta, C, x1, x2, ok and bool(checked), tuple(checked),
                              tuple(excluded), tuple(lhs), tuple(rhs))


def orbit_metric(spec: PseudogroupSpec, radius: int, max_nodes: Optional[int] = None):
    """Orbit distance d_E(y, z) computed by constrained BFS from y, cached per y."""
    cache: dict = {}

    def distance(y, z):
        if y not in cache:
            cache[y] = orbit_ball(spec, y, radius, max_nodes=max_nodes)
        return cache[y].get(z, math.inf)

    return distance


@dataclass(frozen=True)
class Distortion:
    lam: Fraction
    additive: int
    common: int

    def to_json(self) -> dict:
        return {"lambda": str(self.lam), "lambda_float": float(self.lam),
                "C": self.additive, "common_elements": self.common}


def compare_generating_systems(specA: PseudogroupSpec, specB: PseudogroupSpec,
                               x: ProjPoint, R: int, max_nodes: Optional[int] = None) -> Distortion:
    """Length ratios and gaps over elements present in both radius-R germ balls."""
    if specA.U != specB.U:
        raise ValueError("generating systems must share U")
    ballA = germ_ball(specA, x, R, max_nodes=max_nodes)
    ballB = germ_ball(specB, x, R, max_nodes=max_nodes)
    lam = Fraction(1)
    gap = 0
    common = 0
    for g, (la, _) in ballA.members.items():
        lb = ballB.length(g)
        if lb is None:
            continue
        common += 1
        if la == 0 or lb == 0:
            continue
        lam = max(lam, Fraction(la, lb), Fraction(lb, la))
        gap = max(gap, abs(la - lb))
    return Distortion(lam, gap, common)


def verdict_json(v: GrowthVerdict) -> str:
    return json.dumps(v.to_json(), indent=2) + "\n"
