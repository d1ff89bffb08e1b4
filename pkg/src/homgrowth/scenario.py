"""Scenario files: YAML documents binding generators, U, V, base points and caps.

Example::

    name: rotation
    generators:
      r: "3 -4 4 3"
    U: full
    V: [["-1", "1"]]
    base_points: ["0"]
    caps: {max_radius: 64, max_nodes: 1000000, Ncap: 20, depth_cap: 30}

Semantic errors carry the line and column of the offending node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .engine import GeneratingSystem, PseudogroupSpec
from .growth import ClassifierParams
from .moebius import (
    ArcSet,
    GroupElement,
    ProjPoint,
    arcset_from_json,
    covers,
    parse_element,
    parse_point,
)


class ScenarioError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None,
                 source: str = "<scenario>"):
        self.line, self.column, self.source = line, column, source
        where = f"{source}:{line}:{column}: " if line is not None else f"{source}: "
        super().__init__(where + message)


class _Node:
    """YAML node with its source position, for located error messages."""

    def __init__(self, node, source):
        self.node, self.source = node, source

    def fail(self, message):
        mark = self.node.start_mark
        raise ScenarioError(message, mark.line + 1, mark.column + 1, self.source)

    @property
    def is_map(self):
        return isinstance(self.node, yaml.MappingNode)

    @property
    def is_seq(self):
        return isinstance(self.node, yaml.SequenceNode)

    @property
    def is_scalar(self):
        return isinstance(self.node, yaml.ScalarNode)

    def items(self):
        if not self.is_map:
            self.fail("expected a mapping")
        return [(_Node(k, self.source), _Node(v, self.source)) for k, v in self.node.value]

    def keys(self):
        return [k.scalar() for k, _ in self.items()]

    def get(self, key):
        for k, v in self.items():
            if k.scalar() == key:
                return v
        return None

    def seq(self):
        if not self.is_seq:
            self.fail("expected a list")
        return [_Node(v, self.source) for v in self.node.value]

    def scalar(self) -> str:
        if not self.is_scalar:
            self.fail("expected a scalar value")
        return self.node.value

    def plain(self) -> Any:
        return yaml.safe_load(yaml.serialize(self.node))

    def integer(self, positive=True) -> int:
        try:
            value = int(self.scalar())
        except ValueError:
            self.fail(f"expected an integer, got {self.scalar()!r}")
        if positive and value <= 0:
            self.fail("expected a positive integer")
        return value

    def number(self) -> float:
        try:
            return float(self.scalar())
        except ValueError:
            self.fail(f"expected a number, got {self.scalar()!r}")

    def point(self) -> ProjPoint:
        try:
            return parse_point(self.scalar())
        except ValueError as e:
            self.fail(str(e))

    def element(self) -> GroupElement:
        try:
            if self.is_seq:
                return parse_element(" ".join(v.scalar() for v in self.seq()))
            return parse_element(self.scalar())
        except ValueError as e:
            self.fail(str(e))

    def arcset(self) -> ArcSet:
        try:
            if self.is_scalar:
                return arcset_from_json(self.scalar())
            return arcset_from_json([[v.scalar() for v in pair.seq()] for pair in self.seq()])
        except ValueError as e:
            self.fail(str(e))


@dataclass(frozen=True)
class Caps:
    max_radius: int = 10
    max_nodes: int = 2_000_000
    Ncap: int = 20
    depth_cap: int = 30


@dataclass(frozen=True)
class Scenario:
    name: str
    generators: tuple[tuple[str, GroupElement], ...]
    U: ArcSet
    V: Optional[ArcSet]
    base_points: tuple[ProjPoint, ...]
    caps: Caps = Caps()
    classifier: ClassifierParams = ClassifierParams()
    metadata: dict = field(default_factory=dict)
    sections: dict = field(default_factory=dict, repr=False, compare=False)
    source: str = "<scenario>"

    @property
    def spec(self) -> PseudogroupSpec:
        return PseudogroupSpec(GeneratingSystem(list(self.generators)), self.U, self.V)

    def section(self, name: str) -> Optional[_Node]:
        return self.sections.get(name)

    def element_ref(self, node: _Node) -> GroupElement:
        """A generator label or an explicit matrix."""
        if node.is_scalar:
            labels = dict(self.generators)
            key = node.scalar()
            if key in labels:
                return labels[key]
            spec = self.spec
            if key in spec.S.labels:
                return spec.S.element(key)
        return node.element()


_KNOWN = {"name", "generators", "U", "V", "base_points", "caps", "classifier", "metadata",
          "pingpong", "coverage", "compare"}


def loads(text: str, source: str = "<scenario>") -> Scenario:
    try:
        root_node = yaml.compose(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        raise ScenarioError(str(e.problem), mark.line + 1 if mark else None,
                            mark.column + 1 if mark else None, source) from None
    if root_node is None:
        raise ScenarioError("empty scenario file", source=source)
    root = _Node(root_node, source)
    if not root.is_map:
        root.fail("scenario must be a mapping")
    for k, _ in root.items():
        if k.scalar() not in _KNOWN:
            k.fail(f"unknown key {k.scalar()!r}")

    def required(key):
        node = root.get(key)
        if node is None:
            root.fail(f"missing required key {key!r}")
        return node

    name = required("name").scalar()
    gens_node = required("generators")
    generators = []
    for k, v in gens_node.items():
        g = v.element()
        if g.is_identity():
            v.fail("generator is the identity")
        generators.append((k.scalar(), g))
    if not generators:
        gens_node.fail("at least one generator required")
    try:
        GeneratingSystem(generators)
    except ValueError as e:
        gens_node.fail(str(e))

    U_node = required("U")
    U = U_node.arcset()
    if U.is_empty():
        U_node.fail("U must be nonempty")
    V = None
    V_node = root.get("V")
    if V_node is not None:
        V = V_node.arcset()
        if not covers(U, V.closure()):
            V_node.fail("closure of V must lie inside U")

    bp_node = required("base_points")
    base_points = []
    for node in bp_node.seq():
        p = node.point()
        if not U.contains(p):
            node.fail(f"base point {node.scalar()} is not in U")
        base_points.append(p)
    if not base_points:
        bp_node.fail("at least one base point required")

    caps = Caps()
    caps_node = root.get("caps")
    if caps_node is not None:
        values = {}
        for k, v in caps_node.items():
            key = k.scalar()
            if key not in Caps.__dataclass_fields__:
                k.fail(f"unknown cap {key!r}")
            values[key] = v.integer()
        caps = Caps(**values)

    classifier = ClassifierParams()
    cl_node = root.get("classifier")
    if cl_node is not None:
        values = {}
        for k, v in cl_node.items():
            key = k.scalar()
            if key == "margin":
                values[key] = v.number()
                if values[key] <= 1:
                    v.fail("margin must exceed 1")
            elif key == "min_points":
                values[key] = v.integer()
            elif key == "window":
                if v.is_scalar and v.scalar() in ("", "null", "~"):
                    continue
                lo, hi = (n.integer(positive=False) for n in v.seq())
                values[key] = (lo, hi)
            else:
                k.fail(f"unknown classifier parameter {key!r}")
        classifier = ClassifierParams(**values)

    metadata = {}
    md_node = root.get("metadata")
    if md_node is not None:
        metadata = md_node.plain() or {}
        if not isinstance(metadata, dict):
            md_node.fail("metadata must be a mapping")

    sections = {key: root.get(key) for key in ("pingpong", "coverage", "compare")
                if root.get(key) is not None}
    return Scenario(name, tuple(generators), U, V, tuple(base_points), caps, classifier,
                    metadata, sections, source)


def load(path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror}", source=str(path)) from None
    return loads(text, str(path))
