"""Feedline voltages produced by a driven qubit, split by coupling path."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from ..circuit import probe, solve_ac
from .params import PORT_QUBIT, FilterParams, filter_netlist


def _deg(z: complex) -> float:
    return math.degrees(cmath.phase(z))


@dataclass(frozen=True)
class FeedlineVoltages:
    """Node voltages with the qubit island driven at 1 V.

    V1 is the resonator open end, V2 the capacitive tap, VA the far end of
    the separation line and V3 the feedline output after the coupled winding.
    """

    V1: complex
    V2: complex
    VA: complex
    V3: complex

    @property
    def phase_21(self) -> float:
        return _deg(self.V2 / self.V1)

    @property
    def phase_31(self) -> float:
        return _deg(self.V3 / self.V1)

    @property
    def phase_32(self) -> float:
        return _deg(self.V3 / self.V2)

    @property
    def phase_a1(self) -> float:
        return _deg(self.VA / self.V1)

    def to_dict(self) -> dict:
        return {
            "arg_V2_V1_deg": self.phase_21,
            "arg_V3_V1_deg": self.phase_31,
            "arg_V3_V2_deg": self.phase_32,
            "arg_VA_V1_deg": self.phase_a1,
            "abs_V1": abs(self.V1),
            "abs_V2": abs(self.V2),
            "abs_V3": abs(self.V3),
        }


@dataclass(frozen=True)
class InterferenceReport:
    omega: float
    capacitive: FeedlineVoltages
    inductive: FeedlineVoltages
    full: FeedlineVoltages

    @property
    def residual_v2(self) -> float:
        """|V2| of the full circuit relative to the larger single path."""
        return abs(self.full.V2) / max(abs(self.capacitive.V2), abs(self.inductive.V2))

    @property
    def residual_v3(self) -> float:
        return abs(self.full.V3) / max(abs(self.capacitive.V3), abs(self.inductive.V3))

    def to_dict(self) -> dict:
        return {
            "f_hz": self.omega / (2 * math.pi),
            "capacitive": self.capacitive.to_dict(),
            "inductive": self.inductive.to_dict(),
            "full": self.full.to_dict(),
            "residual_v2": self.residual_v2,
            "residual_v3": self.residual_v3,
        }


def feedline_voltages(params: FilterParams, omega: float, couplings="both") -> FeedlineVoltages:
    n = probe(filter_netlist(params, couplings), PORT_QUBIT)
    sol = solve_ac(n, omega)
    a = "a" if couplings != "capacitive" else "out"
    return FeedlineVoltages(sol.v("r"), sol.v("in"), sol.v(a), sol.v("out"))


def interference_phases(params: FilterParams, omega: float) -> InterferenceReport:
    """Drive the qubit port and compare capacitive-only, inductive-only and
    full coupling with identical element values."""
    return InterferenceReport(
        omega,
        feedline_voltages(params, omega, "capacitive"),
        feedline_voltages(params, omega, "inductive"),
        feedline_voltages(params, omega, "both"),
    )
