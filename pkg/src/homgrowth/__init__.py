"""Exact simulation of homogeneous pseudogroups on the rational projective line."""

from .moebius import (
    EMPTY,
    FULL,
    IDENTITY,
    INF,
    Arc,
    ArcSet,
    CircleSet,
    GroupElement,
    Orientation,
    act,
    arc,
    arcset,
    ccw,
    closure,
    complement,
    compose,
    contains,
    covers,
    covers_closure,
    image,
    intersect,
    invert,
    point,
    preimage,
    union,
)
from .engine import (
    GeneratingSystem,
    GermBall,
    PseudogroupSpec,
    germ_ball,
    germ_distance,
    orbit_ball,
    stabilizer_elements,
)

__version__ = "0.1.0"
