"""Analytic and admittance-based Purcell decay, and conversions between the
coupling, dispersive-shift and charging-energy parameterisations.

All rates are angular (rad/s); divide by 2*pi for Hz.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import constants

from .circuit import Netlist, NetlistBuilder
from .errors import (
    DivisionByZero,
    InputError,
    NegativeRealAdmittance,
    NonConvergence,
    PoleDetuning,
    StraddlePole,
    UnsolvableSign,
    ZeroDetuning,
)

TWO_PI = 2 * math.pi
HBAR = constants.hbar
E_CHARGE = constants.e
# solver noise floor on Re[Y] (S)
ADMITTANCE_NOISE = 1e-12


@dataclass(frozen=True)
class ReadoutParams:
    omega_r: float
    kappa: float
    g0: float
    alpha: float = -TWO_PI * 200e6
    ec: float = TWO_PI * 200e6
    z0: float = 50.0

    def __post_init__(self):
        for name in ("omega_r", "kappa", "g0", "ec", "z0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InputError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class DecayRate:
    gamma: float  # rad/s

    def __post_init__(self):
        if self.gamma < 0:
            raise InputError(f"decay rate must be non-negative, got {self.gamma}")

    @property
    def t1(self) -> float:
        return math.inf if self.gamma == 0 else 1.0 / self.gamma

    @property
    def hz(self) -> float:
        return self.gamma / TWO_PI


def coupling_at(g0, omega_q, omega_r):
    """Capacitive coupling at qubit frequency: g0 * sqrt(omega_q / omega_r)."""
    return g0 * np.sqrt(np.asarray(omega_q) / omega_r)


def _check_detuning(omega_q, omega_r):
    if np.any(np.asarray(omega_q) == omega_r):
        raise ZeroDetuning("qubit and resonator frequencies coincide")


def unfiltered_gamma_array(
    params: ReadoutParams, omega_q, variant: Literal["exact", "approx", "standard"] = "exact"
) -> np.ndarray:
    """Vectorised unfiltered Purcell rate over qubit frequencies."""
    wq = np.asarray(omega_q, dtype=float)
    wr = params.omega_r
    _check_detuning(wq, wr)
    g = coupling_at(params.g0, wq, wr)
    base = params.kappa * (g / (wq - wr)) ** 2
    if variant == "standard":
        return base
    if variant == "approx":
        return base * (wq / wr) ** 4
    if variant == "exact":
        return base * (wq / wr) ** 3 * (2 * wq / (wq + wr)) ** 2
    raise InputError(f"unknown variant {variant!r}")


def unfiltered_gamma(params: ReadoutParams, omega_q: float, variant="exact") -> DecayRate:
    """Purcell rate of a qubit capacitively coupled to a detuned lossy
    single-mode resonator with no filter.

    ``exact`` keeps the full circuit-derived frequency dependence,
    ``approx`` replaces it by ``(omega_q/omega_r)**4`` and ``standard`` is
    the textbook ``kappa (g/Delta)**2``. In all three ``g`` follows
    ``g0 * sqrt(omega_q/omega_r)``.
    """
    return DecayRate(float(unfiltered_gamma_array(params, omega_q, variant)))


def overestimation_factor(omega_q, omega_r):
    """Ratio of the standard to the exact unfiltered rate."""
    _check_detuning(omega_q, omega_r)
    x = np.asarray(omega_q, dtype=float) / omega_r
    out = 1.0 / (x**3 * (2 * x / (x + 1)) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def gamma_from_admittance(y_in, c_sigma: float) -> DecayRate:
    """Classical decay rate Re[Y_in] / C_sigma of a weakly anharmonic qubit.

    Slightly negative conductances within solver noise are clamped to zero;
    anything more negative means the environment is not passive.
    """
    if not c_sigma > 0:
        raise InputError("C_sigma must be positive")
    g = float(np.real(y_in))
    if g < -ADMITTANCE_NOISE:
        raise NegativeRealAdmittance(f"Re[Y_in] = {g:.3e} S is negative beyond solver noise")
    return DecayRate(max(g, 0.0) / c_sigma)


def gamma_from_admittance_array(y_in, c_sigma: float) -> np.ndarray:
    g = np.real(np.asarray(y_in))
    if np.any(g < -ADMITTANCE_NOISE):
        raise NegativeRealAdmittance(f"Re[Y_in] reaches {g.min():.3e} S")
    return np.maximum(g, 0.0) / c_sigma


def chi_from_g(g, alpha, delta):
    """Transmon dispersive shift g^2 alpha / (Delta (Delta + alpha))."""
    if delta == 0 or delta + alpha == 0:
        raise PoleDetuning(f"dispersive shift has a pole at Delta={delta}, alpha={alpha}")
    return g**2 * alpha / (delta * (delta + alpha))


def g_from_chi(chi, alpha, omega_q, omega_r):
    """Invert the transmon dispersive shift for ``(g, g0)``."""
    delta = omega_q - omega_r
    if delta == 0 or delta + alpha == 0:
        raise PoleDetuning(f"dispersive shift has a pole at Delta={delta}, alpha={alpha}")
    if delta * (delta + alpha) < 0:
        raise StraddlePole("qubit sits between the two dispersive poles; chi has no transmon sign rule")
    if chi == 0:
        return 0.0, 0.0
    if chi * alpha < 0:
        raise UnsolvableSign(f"chi={chi} and alpha={alpha} cannot come from a real coupling here")
    g = math.sqrt(chi * delta * (delta + alpha) / alpha)
    return g, g / math.sqrt(omega_q / omega_r)


def csigma_from_ec(ec: float) -> float:
    """Total island capacitance e^2 / (2 hbar E_C), with E_C in rad/s."""
    if not ec > 0:
        raise InputError("E_C must be positive")
    return E_CHARGE**2 / (2 * HBAR * ec)


def suppression_factor(unfiltered: DecayRate, filtered: DecayRate) -> float:
    if filtered.gamma <= 0:
        raise DivisionByZero("filtered decay rate is zero")
    return unfiltered.gamma / filtered.gamma


def lambda4_capacitance(omega_r: float, z0: float) -> float:
    """Shunt capacitance of the parallel-LC equivalent of a shorted
    quarter-wave resonator of impedance ``z0``."""
    return math.pi / (4 * omega_r * z0)


@dataclass(frozen=True)
class UnfilteredCircuit:
    netlist: Netlist
    L_r: float
    C_r: float
    C_kappa: float
    C_g: float
    C_q: float
    R_e: float

    @property
    def c_res(self):
        return self.C_r + self.C_kappa + self.C_g

    @property
    def c_sigma(self):
        return self.C_q + self.C_g

    def realized(self):
        """(omega_r, g0, kappa) implied by the element values."""
        w = 1.0 / math.sqrt(self.L_r * self.c_res)
        g0 = 0.5 * self.C_g / math.sqrt(self.c_sigma * self.c_res) * w
        kappa = self.R_e / self.L_r * (self.C_kappa / self.c_res) ** 2
        return w, g0, kappa


def build_unfiltered_netlist(
    omega_r, g0, kappa, C_q, R_e=50.0, c_res=None, z_res=50.0, damping=0.5, max_iter=1000, tol=1e-10
) -> UnfilteredCircuit:
    """Qubit capacitively coupled to a lumped resonator that is loaded by a
    series C_kappa - R_e branch.

    The total resonator capacitance defaults to the quarter-wave equivalent
    for impedance ``z_res``. ``C_g`` depends on itself through the qubit
    capacitance, so it is found by damped fixed-point iteration.

    Port 0 is the junction probe (qubit island to ground).
    """
    if omega_r <= 0 or g0 <= 0 or kappa < 0 or C_q <= 0 or R_e <= 0:
        raise InputError("targets must be positive")
    c_res = lambda4_capacitance(omega_r, z_res) if c_res is None else c_res
    L_r = 1.0 / (omega_r**2 * c_res)
    C_kappa = c_res * math.sqrt(kappa * L_r / R_e)
    C_g = 2 * g0 * math.sqrt(C_q * c_res) / omega_r
    for _ in range(max_iter):
        target = 2 * g0 * math.sqrt((C_q + C_g) * c_res) / omega_r
        step = target - C_g
        C_g += damping * step
        if abs(step) <= tol * C_g:
            break
    else:
        raise NonConvergence("coupling capacitance iteration did not converge", abs(step) / C_g)
    C_r = c_res - C_kappa - C_g
    if C_r <= 0:
        raise NonConvergence("targets leave no room for the resonator capacitance", C_r)

    b = NetlistBuilder()
    b.capacitor("q", "0", C_q, name="C_q")
    b.capacitor("q", "r", C_g, name="C_g")
    b.inductor("r", "0", L_r, name="L_r")
    b.capacitor("r", "0", C_r, name="C_r")
    if C_kappa > 0:
        b.capacitor("r", "e", C_kappa, name="C_kappa")
        b.resistor("e", "0", R_e, name="R_e")
    b.port("q", name="junction")
    return UnfilteredCircuit(b.build(), L_r, C_r, C_kappa, C_g, C_q, R_e)
