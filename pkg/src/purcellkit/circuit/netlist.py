"""Netlist data model: lumped elements, coupled inductor pairs, lossless
transmission lines, probe sources and terminated ports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..errors import InvalidNetlist

GROUND = "0"

# kind -> (required params, allowed terminal counts)
ELEMENT_KINDS: dict[str, tuple[tuple[str, ...], tuple[int, ...]]] = {
    "R": (("R",), (2,)),
    "C": (("C",), (2,)),
    "L": (("L",), (2,)),
    "K": (("L1", "L2", "k"), (4,)),
    "TL": (("z0", "theta_ref", "omega_ref"), (2, 4)),
    "V": (("value",), (2,)),
    "I": (("value",), (2,)),
}

# elements that carry an explicit branch-current unknown
BRANCH_KINDS = ("L", "K", "V")


@dataclass(frozen=True)
class Element:
    """One circuit element.

    ``terminals`` is ``(plus, minus)`` for two-terminal kinds,
    ``(p1, m1, p2, m2)`` for a coupled pair (dots on ``p1`` and ``p2``),
    and ``(a, b)`` or ``(a1, b1, a2, b2)`` for a transmission line. A
    two-terminal line is referenced to ground on both sides.
    """

    name: str
    kind: str
    terminals: tuple[str, ...]
    params: Mapping[str, complex | float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ELEMENT_KINDS:
            raise InvalidNetlist(f"{self.name}: unknown element kind {self.kind!r}")
        required, counts = ELEMENT_KINDS[self.kind]
        object.__setattr__(self, "terminals", tuple(str(t) for t in self.terminals))
        if len(self.terminals) not in counts:
            raise InvalidNetlist(
                f"{self.name}: kind {self.kind} takes {counts} terminals, got {len(self.terminals)}"
            )
        missing = [p for p in required if p not in self.params]
        if missing:
            raise InvalidNetlist(f"{self.name}: missing params {missing}")
        object.__setattr__(self, "params", dict(self.params))
        t = self.terminals
        pairs = [(t[0], t[1])] if len(t) == 2 else [(t[0], t[1]), (t[2], t[3])]
        if any(a == b for a, b in pairs):
            raise InvalidNetlist(f"{self.name}: terminals of one branch coincide")
        self._validate_values()

    def _validate_values(self):
        p = self.params
        if self.kind in ("V", "I"):
            if not np.isfinite(complex(p["value"])):
                raise InvalidNetlist(f"{self.name}: source value must be finite")
            return
        positive = {
            "R": ("R",), "C": ("C",), "L": ("L",), "K": ("L1", "L2"),
            "TL": ("z0", "theta_ref", "omega_ref"),
        }[self.kind]
        for key in positive:
            v = p[key]
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise InvalidNetlist(f"{self.name}: {key} must be positive and finite, got {v!r}")
        if self.kind == "K" and not 0.0 <= p["k"] <= 1.0:
            raise InvalidNetlist(f"{self.name}: coupling k must lie in [0, 1], got {p['k']!r}")

    @property
    def mutual(self) -> float:
        """Mutual inductance of a coupled pair."""
        p = self.params
        return p["k"] * math.sqrt(p["L1"] * p["L2"])

    def electrical_length(self, omega):
        """Electrical length of a line at angular frequency ``omega``."""
        p = self.params
        return p["theta_ref"] * np.asarray(omega) / p["omega_ref"]

    def with_params(self, **params) -> Element:
        return replace(self, params={**self.params, **params})


@dataclass(frozen=True)
class Port:
    plus: str
    minus: str = GROUND
    z0: float = 50.0
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "plus", str(self.plus))
        object.__setattr__(self, "minus", str(self.minus))
        if not (math.isfinite(self.z0) and self.z0 > 0):
            raise InvalidNetlist(f"port {self.name or self.plus}: reference impedance must be positive, got {self.z0}")
        if self.plus == self.minus:
            raise InvalidNetlist(f"port {self.name or self.plus}: terminals coincide")


@dataclass(frozen=True)
class Netlist:
    """Immutable circuit description.

    Nodes are string identifiers; ``ground`` is the reference node and is
    always part of ``nodes``.
    """

    nodes: tuple[str, ...]
    elements: tuple[Element, ...]
    ports: tuple[Port, ...] = ()
    ground: str = GROUND

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(str(n) for n in self.nodes))
        object.__setattr__(self, "elements", tuple(self.elements))
        object.__setattr__(self, "ports", tuple(self.ports))
        self.validate()

    def validate(self):
        declared = set(self.nodes)
        if len(declared) != len(self.nodes):
            raise InvalidNetlist("duplicate node identifiers")
        if self.ground not in declared:
            raise InvalidNetlist(f"ground node {self.ground!r} is not declared")
        names = [e.name for e in self.elements]
        if len(set(names)) != len(names):
            raise InvalidNetlist("duplicate element names")
        for e in self.elements:
            for t in e.terminals:
                if t not in declared:
                    raise InvalidNetlist(f"{e.name}: terminal {t!r} is not a declared node")
        for i, port in enumerate(self.ports):
            for t in (port.plus, port.minus):
                if t not in declared:
                    raise InvalidNetlist(f"port {i}: terminal {t!r} is not a declared node")
        floating = self._nodes_without_ground_path()
        if floating:
            raise InvalidNetlist(f"nodes without a path to ground: {sorted(floating)}")

    def _nodes_without_ground_path(self) -> set[str]:
        adj: dict[str, set[str]] = {n: set() for n in self.nodes}

        def link(a, b):
            adj[a].add(b)
            adj[b].add(a)

        for e in self.elements:
            t = e.terminals
            if e.kind == "K" or (e.kind == "TL" and len(t) == 4):
                link(t[0], t[1])
                link(t[2], t[3])
            elif e.kind == "TL":
                link(t[0], self.ground)
                link(t[1], self.ground)
            else:
                link(t[0], t[1])
        for p in self.ports:
            link(p.plus, p.minus)
        seen = {self.ground}
        stack = [self.ground]
        while stack:
            for m in adj[stack.pop()]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return set(self.nodes) - seen

    # lookups
    def element(self, name: str) -> Element:
        for e in self.elements:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def unknown_nodes(self) -> tuple[str, ...]:
        return tuple(n for n in self.nodes if n != self.ground)

    # derivation helpers; each returns a new netlist
    def replace_element(self, name: str, **params) -> Netlist:
        elements = tuple(e.with_params(**params) if e.name == name else e for e in self.elements)
        if elements == self.elements and name not in {e.name for e in self.elements}:
            raise KeyError(name)
        return replace(self, elements=elements)

    def with_elements(self, elements: Iterable[Element]) -> Netlist:
        return replace(self, elements=tuple(self.elements) + tuple(elements))

    def with_ports(self, ports: Sequence[Port]) -> Netlist:
        return replace(self, ports=tuple(ports))

    def select_ports(self, indices: Sequence[int]) -> Netlist:
        """Keep only the listed ports; the others become open circuits."""
        return replace(self, ports=tuple(self.ports[i] for i in indices))


class NetlistBuilder:
    """Incremental construction of a :class:`Netlist`."""

    def __init__(self, ground: str = GROUND):
        self.ground = ground
        self._nodes: list[str] = [ground]
        self._elements: list[Element] = []
        self._ports: list[Port] = []
        self._counts: dict[str, int] = {}

    def node(self, *names: str) -> None:
        for n in names:
            if n not in self._nodes:
                self._nodes.append(n)

    def _add(self, kind, terminals, params, name):
        if name is None:
            self._counts[kind] = self._counts.get(kind, 0) + 1
            name = f"{kind}{self._counts[kind]}"
        self.node(*terminals)
        self._elements.append(Element(name, kind, tuple(terminals), params))
        return name

    def resistor(self, a, b, R, name=None):
        return self._add("R", (a, b), {"R": R}, name)

    def capacitor(self, a, b, C, name=None):
        return self._add("C", (a, b), {"C": C}, name)

    def inductor(self, a, b, L, name=None):
        return self._add("L", (a, b), {"L": L}, name)

    def coupled_pair(self, p1, m1, p2, m2, L1, L2, k=1.0, name=None):
        return self._add("K", (p1, m1, p2, m2), {"L1": L1, "L2": L2, "k": k}, name)

    def line(self, a, b, z0, theta_ref, omega_ref, name=None):
        return self._add("TL", (a, b), {"z0": z0, "theta_ref": theta_ref, "omega_ref": omega_ref}, name)

    def voltage_source(self, a, b, value=1.0, name=None):
        return self._add("V", (a, b), {"value": value}, name)

    def current_source(self, a, b, value=1.0, name=None):
        return self._add("I", (a, b), {"value": value}, name)

    def port(self, plus, minus=None, z0=50.0, name=""):
        minus = self.ground if minus is None else minus
        self.node(plus, minus)
        self._ports.append(Port(plus, minus, z0, name))
        return len(self._ports) - 1

    def build(self) -> Netlist:
        return Netlist(tuple(self._nodes), tuple(self._elements), tuple(self._ports), self.ground)
