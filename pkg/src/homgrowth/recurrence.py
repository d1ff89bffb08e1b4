"""Exact coverage checks: recurrence of a generating system, coverage by
translates of V away from a finite set, and pair coverage of a closure.

Every positive answer comes with a ``CoverageCertificate`` that can be
re-checked using arc algebra only (``verify_certificate``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .engine import GeneratingSystem, PseudogroupSpec
from .moebius import (
    EMPTY,
    IDENTITY,
    ArcSet,
    CircleSet,
    GroupElement,
    arcset_from_json,
    arcset_to_json,
    compose,
    covers,
    difference,
    format_point,
    image,
    intersect,
    invert,
    parse_element,
    preimage,
    union,
)


class MissingV(ValueError):
    pass


@dataclass(frozen=True)
class WordDomain:
    """Composite of generators along ``word`` and the set where all prefixes stay in U."""

    word: tuple[str, ...]
    product: GroupElement
    domain: ArcSet


@dataclass(frozen=True)
class Piece:
    word: Optional[tuple[str, ...]]
    element: GroupElement
    arcs: ArcSet


@dataclass(frozen=True)
class CoverageCertificate:
    kind: str
    pieces: tuple[Piece, ...]
    target: ArcSet
    verified: bool
    closure: bool = False
    N: Optional[int] = None
    generators: Optional[GeneratingSystem] = field(default=None, compare=False)
    U: Optional[ArcSet] = None
    V: Optional[ArcSet] = None

    def covered(self) -> CircleSet:
        return union(*(p.arcs for p in self.pieces)) if self.pieces else EMPTY

    def to_json(self) -> dict:
        out = {
            "kind": self.kind,
            "closure": self.closure,
            "target": arcset_to_json(self.target),
            "pieces": [
                {
                    "word": list(p.word) if p.word is not None else None,
                    "element": p.element.to_str(),
                    "arcs": arcset_to_json(p.arcs),
                }
                for p in self.pieces
            ],
            "verified": self.verified,
        }
        if self.N is not None:
            out["N"] = self.N
        if self.generators is not None:
            out["generators"] = [[lab, g.to_str()] for lab, g in self.generators]
        if self.U is not None:
            out["U"] = arcset_to_json(self.U)
        if self.V is not None:
            out["V"] = arcset_to_json(self.V)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "CoverageCertificate":
        pieces = tuple(
            Piece(tuple(p["word"]) if p.get("word") is not None else None,
                  parse_element(p["element"]), arcset_from_json(p["arcs"]))
            for p in data["pieces"]
        )
        gens = None
        if data.get("generators") is not None:
            gens = GeneratingSystem([(lab, parse_element(m)) for lab, m in data["generators"]])
        return cls(
            kind=data["kind"],
            pieces=pieces,
            target=arcset_from_json(data["target"]),
            verified=bool(data["verified"]),
            closure=bool(data.get("closure", False)),
            N=data.get("N"),
            generators=gens,
            U=arcset_from_json(data["U"]) if "U" in data else None,
            V=arcset_from_json(data["V"]) if "V" in data else None,
        )


def _word_domain_of(S: GeneratingSystem, U: ArcSet, word: Sequence[str]) -> WordDomain:
    product, domain = IDENTITY, U
    for label in word:
        product = compose(S.element(label), product)
        domain = intersect(domain, preimage(product, U))
    return WordDomain(tuple(word), product, domain)


def word_domain(spec: PseudogroupSpec, word: Sequence[str]) -> WordDomain:
    """Domain of the composite along ``word``: points of U whose prefix images all stay in U."""
    return _word_domain_of(spec.S, spec.U, word)


def verify_certificate(cert: CoverageCertificate) -> bool:
    """Re-check a certificate with arc algebra.

    The union of the pieces must cover the target (or its closure).  When the
    certificate records generators, U and V, each piece of a recurrence
    certificate is recomputed from its word, and each claim-B piece must be
    the image of V under its element.
    """
    covered = cert.covered()
    target = cert.target.closure() if cert.closure else cert.target
    if not covers(covered, target):
        return False
    if cert.generators is None or cert.V is None:
        return True
    for p in cert.pieces:
        if cert.kind == "recurrence":
            if p.word is None or cert.U is None:
                return False
            wd = _word_domain_of(cert.generators, cert.U, p.word)
            if wd.product != p.element:
                return False
            if p.arcs != intersect(wd.domain, preimage(wd.product, cert.V)):
                return False
        elif cert.kind == "claim-B":
            if p.word is not None and cert.generators.product(p.word) != p.element:
                return False
            if p.arcs != image(p.element, cert.V):
                return False
    return True


@dataclass(frozen=True)
class NotFound:
    """Inconclusive outcome of a semi-decision (never a refutation)."""

    reason: str
    explored: int = 0
    uncovered: Optional[CircleSet] = None

    def __bool__(self):
        return False


def find_recurrence_N(spec: PseudogroupSpec, Ncap: int, max_words: Optional[int] = None):
    """Smallest N <= Ncap with U = union over words w, |w| <= N, of dom(w) ∩ w^-1(V).

    Returns ``(N, certificate)`` or a ``NotFound``.
    """
    if spec.V is None:
        raise MissingV("recurrence needs V")
    S, U, V = spec.S, spec.U, spec.V
    level = [WordDomain((), IDENTITY, U)]
    seen = {(IDENTITY, U)}
    pieces: list[Piece] = []
    covered: CircleSet = EMPTY
    explored = 0
    for N in range(Ncap + 1):
        for wd in level:
            contrib = intersect(wd.domain, preimage(wd.product, V))
            if contrib.is_empty():
                continue
            new = union(covered, contrib)
            if new != covered:
                # keep only pieces that add something; certificate stays small
                pieces.append(Piece(wd.word, wd.product, contrib))
                covered = new
        explored += len(level)
        if covers(covered, U):
            cert = CoverageCertificate("recurrence", tuple(pieces), U, True, N=N,
                                       generators=S, U=U, V=V)
            return N, cert
        if N == Ncap:
            break
        nxt = []
        for wd in level:
            for label, s in S:
                product = compose(s, wd.product)
                domain = intersect(wd.domain, preimage(product, U))
                if domain.is_empty():
                    continue
                key = (product, domain)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(WordDomain(wd.word + (label,), product, domain))
        if max_words is not None and len(seen) > max_words:
            return NotFound(f"word cap {max_words} exceeded at N={N + 1}", explored,
                            difference(U, covered))
        if not nxt:
            return NotFound(f"word tree exhausted at N={N}", explored, difference(U, covered))
        level = nxt
    return NotFound(f"no coverage up to N={Ncap}", explored, difference(U, covered))


def check_claim_B(spec: PseudogroupSpec, F: Iterable[GroupElement], depth_cap: int,
                  closure: bool = False, target: Optional[ArcSet] = None):
    """Cover U (or its closure) by translates gamma(V), gamma outside F.

    Elements are enumerated by unconstrained word length up to ``depth_cap``.
    Returns a certificate or a ``NotFound``.
    """
    if spec.V is None:
        raise MissingV("claim B needs V")
    S, V = spec.S, spec.V
    target = spec.U if target is None else target
    goal = target.closure() if closure else target
    excluded = set(F)
    words = {IDENTITY: ()}
    frontier = [IDENTITY]
    pieces: list[Piece] = []
    covered: CircleSet = EMPTY
    for n in range(depth_cap + 1):
        for g in frontier:
            if g in excluded:
                continue
            img = image(g, V)
            new = union(covered, img)
            if new != covered:
                pieces.append(Piece(words[g], g, img))
                covered = new
            if covers(covered, goal):
                return CoverageCertificate("claim-B", tuple(pieces), target, True,
                                           closure=closure, N=n, generators=S,
                                           U=spec.U, V=V)
        nxt = []
        for g in frontier:
            for label, s in S:
                h = compose(s, g)
                if h not in words:
                    words[h] = words[g] + (label,)
                    nxt.append(h)
        frontier = nxt
    return NotFound(f"no coverage up to depth {depth_cap}", len(words),
                    difference(goal, covered))


@dataclass(frozen=True)
class PairCoverage:
    ok: bool
    witness: dict  # (i, j) -> part of the target first covered by that pair
    uncovered: CircleSet

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        return {
            "covered": self.ok,
            "witness": [
                {"pair": [i, j], "arcs": _cells_json(part)}
                for (i, j), part in self.witness.items()
            ],
            "uncovered": _cells_json(self.uncovered),
        }


def _cells_json(A: CircleSet):
    return {
        "interior": arcset_to_json(A.interior()),
        "points": [format_point(p) for p in A.endpoints],
    }


def check_pair_coverage(elements: Sequence[GroupElement], V: ArcSet,
                        target: CircleSet) -> PairCoverage:
    """Decide closure(target) ⊆ ⋃_{i<j} t_i^-1(V) ∩ t_j^-1(V) exactly."""
    goal = target.closure()
    pulled = [image(invert(t), V) for t in elements]
    remaining: CircleSet = goal
    witness = {}
    for i in range(len(pulled)):
        for j in range(i + 1, len(pulled)):
            if remaining.is_empty():
                break
            both = intersect(pulled[i], pulled[j])
            part = intersect(remaining, both)
            if not part.is_empty():
                witness[(i, j)] = part
                remaining = difference(remaining, both)
    return PairCoverage(remaining.is_empty(), witness, remaining)
