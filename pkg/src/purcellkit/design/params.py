"""Design targets, realised filter element values and netlist synthesis."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Literal

from ..circuit import Netlist, NetlistBuilder
from ..errors import InputError
from ..purcell import ReadoutParams, csigma_from_ec, lambda4_capacitance

TWO_PI = 2 * math.pi

Mode = Literal["lumped", "line"]
Couplings = Literal["both", "capacitive", "inductive"]

# port layout of a single-unit filtered netlist
PORT_IN, PORT_OUT, PORT_QUBIT = 0, 1, 2


@dataclass(frozen=True)
class DesignTargets:
    """Readout targets, all angular (rad/s) except ``z0``."""

    omega_qt: float
    omega_r: float
    kappa: float
    g0: float
    ec: float = TWO_PI * 200e6
    z0: float = 50.0
    alpha: float = -TWO_PI * 200e6

    def __post_init__(self):
        for name in ("omega_qt", "omega_r", "g0", "ec", "z0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be positive, got {v}")
        if not (math.isfinite(self.kappa) and self.kappa >= 0):
            raise InputError(f"kappa must be non-negative, got {self.kappa}")

    @classmethod
    def from_hz(cls, f_q_target_hz, f_r_hz, kappa_hz, g0_hz, ec_hz=200e6, z0_ohm=50.0, alpha_hz=-200e6):
        return cls(
            TWO_PI * f_q_target_hz, TWO_PI * f_r_hz, TWO_PI * kappa_hz, TWO_PI * g0_hz,
            TWO_PI * ec_hz, z0_ohm, TWO_PI * alpha_hz,
        )

    @property
    def readout(self) -> ReadoutParams:
        return ReadoutParams(self.omega_r, self.kappa, self.g0, self.alpha, self.ec, self.z0)

    @property
    def c_sigma(self) -> float:
        return csigma_from_ec(self.ec)


def r_optimal(omega_qt, omega_r, z0):
    """Mutual-inductance to mutual-capacitance ratio L_m/C_m (ohm^2) that
    balances the two emission paths at the target qubit frequency."""
    if not 0 < omega_qt < 2 * omega_r:
        raise InputError("target qubit frequency must lie in (0, 2 omega_r)")
    return z0**2 * math.sin(TWO_PI / omega_r * omega_qt / 4)


@dataclass(frozen=True)
class FilterParams:
    """Element values of one interferometric readout unit.

    ``L_r``/``C_r`` describe the lumped resonator; in line mode the
    resonator is a shorted quarter-wave line of impedance ``z0`` whose
    quarter-wave frequency is ``omega_line``, and its short runs through the
    primary ``L_p`` of the coupled pair.
    """

    omega_qt: float
    omega_r: float
    z0: float
    C_m: float
    L_m: float
    C_g: float
    C_q: float
    L_r: float
    C_r: float
    k: float = 1.0
    mode: Mode = "lumped"
    omega_line: float = 0.0
    L_p: float = 0.0

    def __post_init__(self):
        if self.mode not in ("lumped", "line"):
            raise InputError(f"unknown resonator mode {self.mode!r}")
        if not 0 < self.k <= 1:
            raise InputError(f"coupling coefficient must lie in (0, 1], got {self.k}")
        for name in ("omega_qt", "omega_r", "z0", "C_g", "C_q"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if self.C_m < 0 or self.L_m < 0:
            raise InputError("coupling elements must be non-negative")
        if self.mode == "lumped" and not (self.L_r > 0 and self.C_r > 0):
            raise InputError("lumped resonator needs positive L_r and C_r")
        if self.mode == "line" and not self.omega_line > 0:
            raise InputError("line resonator needs omega_line")

    @property
    def ratio(self) -> float:
        return self.L_m / self.C_m if self.C_m > 0 else math.inf

    @property
    def c_sigma(self) -> float:
        return self.C_q + self.C_g

    @property
    def primary(self) -> float:
        """Self inductance of the resonator-side winding."""
        if self.mode == "lumped":
            return self.L_r
        return self.L_p if self.L_p > 0 else self.L_m

    @property
    def L_f(self) -> float:
        """Feedline-side winding, fixed by ``M = L_m = k sqrt(L1 L2)``."""
        return self.L_m**2 / (self.k**2 * self.primary)

    def separation(self, omega):
        """Feedline electrical length between the coupling points."""
        return math.pi / 2 * omega / self.omega_qt

    def coupling_ceiling(self) -> float:
        """Small-coupling figure Z0 * omega_qt * C_m."""
        return self.z0 * self.omega_qt * self.C_m

    def g0_estimate(self) -> float:
        c_res = self.C_r + self.C_g + self.C_m if self.mode == "lumped" else lambda4_capacitance(self.omega_line, self.z0)
        return 0.5 * self.C_g * self.omega_r / math.sqrt(self.c_sigma * c_res)

    def with_ratio(self, r) -> FilterParams:
        return replace(self, L_m=r * self.C_m)

    def to_dict(self) -> dict:
        return asdict(self)


def initial_params(targets: DesignTargets, C_m: float, r: float | None = None, mode: Mode = "lumped", k=1.0) -> FilterParams:
    """Element values before resonator retuning.

    The resonator's total capacitance is the quarter-wave equivalent for
    ``z0``. The qubit island capacitance is fixed by E_C and split between
    ``C_q`` and the coupling capacitance that gives ``g0``.
    """
    if r is None:
        r = r_optimal(targets.omega_qt, targets.omega_r, targets.z0)
    c_sigma = targets.c_sigma
    c_res = lambda4_capacitance(targets.omega_r, targets.z0)
    C_g = 2 * targets.g0 * math.sqrt(c_sigma * c_res) / targets.omega_r
    C_q = c_sigma - C_g
    if C_q <= 0:
        raise InputError("g0 too large for the qubit capacitance set by E_C")
    C_r = c_res - C_g - C_m
    if mode == "lumped" and C_r <= 0:
        raise InputError("coupling capacitances exceed the resonator capacitance")
    loaded = C_r + C_m + C_g * C_q / (C_g + C_q)
    L_r = 1.0 / (targets.omega_r**2 * loaded)
    return FilterParams(
        omega_qt=targets.omega_qt, omega_r=targets.omega_r, z0=targets.z0, C_m=C_m, L_m=r * C_m,
        C_g=C_g, C_q=C_q, L_r=L_r, C_r=max(C_r, 1e-18), k=k, mode=mode,
        omega_line=targets.omega_r if mode == "line" else 0.0,
    )


def add_unit(b: NetlistBuilder, p: FilterParams, tap: str, out: str, prefix: str = "", couplings: Couplings = "both"):
    """Stamp one readout unit between feedline nodes ``tap`` and ``out``.

    Returns the qubit island node. Node names: ``{prefix}r`` resonator open
    end, ``{prefix}q`` qubit island, ``{prefix}a`` far end of the separation
    line, ``{prefix}s`` shorted end of a line resonator.
    """
    r, q, a, s = (prefix + n for n in "rqas")
    use_c = couplings in ("both", "capacitive") and p.C_m > 0
    use_l = couplings in ("both", "inductive") and p.L_m > 0
    b.line(tap, a if use_l else out, p.z0, math.pi / 2, p.omega_qt, name=prefix + "sep")
    if use_c:
        b.capacitor(r, tap, p.C_m, name=prefix + "C_m")
    if p.mode == "lumped":
        if use_l:
            # dots on the resonator top and the feedline input side
            b.coupled_pair(r, b.ground, a, out, p.L_r, p.L_f, p.k, name=prefix + "K")
        else:
            b.inductor(r, b.ground, p.L_r, name=prefix + "L_r")
        b.capacitor(r, b.ground, p.C_r, name=prefix + "C_r")
    else:
        end = s if use_l else b.ground
        b.line(r, end, p.z0, math.pi / 2, p.omega_line, name=prefix + "res")
        if use_l:
            b.coupled_pair(s, b.ground, a, out, p.primary, p.L_f, p.k, name=prefix + "K")
    b.capacitor(r, q, p.C_g, name=prefix + "C_g")
    b.capacitor(q, b.ground, p.C_q, name=prefix + "C_q")
    return q


def filter_netlist(p: FilterParams, couplings: Couplings = "both") -> Netlist:
    """Single-unit netlist: ports 0/1 are the feedline ends (at ``z0``) and
    port 2 is the junction probe on the qubit island."""
    b = NetlistBuilder()
    b.node("in", "out")
    q = add_unit(b, p, "in", "out", couplings=couplings)
    b.port("in", z0=p.z0, name="in")
    b.port("out", z0=p.z0, name="out")
    b.port(q, z0=p.z0, name="junction")
    return b.build()


def feedline_view(netlist: Netlist) -> Netlist:
    """Two-port feedline network; qubit probe ports are left open."""
    return netlist.select_ports([PORT_IN, PORT_OUT])
