"""Several readout units in series on one feedline."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from ..circuit import Netlist, NetlistBuilder
from ..errors import DuplicateFrequency, InputError
from .params import DesignTargets, FilterParams, add_unit
from .tuning import design_filter

# relative spacing below which two frequencies count as shared
DUPLICATE_REL = 1e-6


@dataclass(frozen=True)
class ReadoutUnitSpec:
    targets: DesignTargets
    params: FilterParams | None = None  # realised values; designed on demand

    def realized(self) -> FilterParams:
        return self.params if self.params is not None else design_filter(self.targets).params


def _check_distinct(values, label):
    vals = sorted(values)
    for a, b in zip(vals, vals[1:]):
        if b - a <= DUPLICATE_REL * b:
            raise DuplicateFrequency(f"two units share {label} = {a / (2 * math.pi):.6g} Hz")


def multiplex_netlist(units: Sequence[ReadoutUnitSpec | FilterParams]) -> Netlist:
    """Chain readout units along one feedline.

    Each unit has its own quarter-wave separation at its target qubit
    frequency. Ports: 0 feedline input, 1 feedline output, ``2 + i`` the
    junction probe of unit ``i``. Node names carry the prefix ``u{i}_``.
    """
    if not units:
        raise InputError("need at least one readout unit")
    params = [u.realized() if isinstance(u, ReadoutUnitSpec) else u for u in units]
    _check_distinct([p.omega_r for p in params], "a resonator frequency")
    _check_distinct([p.omega_qt for p in params], "a target qubit frequency")
    z0 = params[0].z0
    if any(p.z0 != z0 for p in params):
        raise InputError("all units must share the feedline impedance")

    b = NetlistBuilder()
    taps = ["in"] + [f"f{i}" for i in range(1, len(params))] + ["out"]
    b.node(*taps)
    qubits = [add_unit(b, p, taps[i], taps[i + 1], prefix=f"u{i}_") for i, p in enumerate(params)]
    b.port("in", z0=z0, name="in")
    b.port("out", z0=z0, name="out")
    for i, q in enumerate(qubits):
        b.port(q, z0=z0, name=f"junction{i}")
    return b.build()
