"""Qubit-resonator coupling read off the circuit's normal modes."""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..circuit import Netlist, input_admittance
from ..errors import NonConvergence
from .params import PORT_QUBIT


def _modes(susceptance, grid, b_grid, L_j):
    """Normal modes with a linear inductor ``L_j`` across the junction port.

    Lossless susceptances rise with frequency between poles, so modes are
    the upward zero crossings of B(w) - 1/(w L_j).
    """
    y = b_grid - 1 / (grid * L_j)
    idx = np.where((y[:-1] < 0) & (y[1:] > 0))[0]
    return np.array(
        [brentq(lambda x: susceptance(x) - 1 / (x * L_j), grid[i], grid[i + 1], xtol=1e-6 * grid[i]) for i in idx]
    )


def anticrossing_g0(netlist: Netlist, omega_r: float, c_sigma: float, port=PORT_QUBIT, window=0.25) -> float:
    """Half the minimum normal-mode splitting near ``omega_r`` (rad/s).

    The junction is replaced by a linear inductor whose value is swept
    through the resonance; at the anticrossing the two modes are split by
    2 g0.
    """

    def susceptance(w):
        return float(np.imag(input_admittance(netlist, port, np.array([w]))[0]))

    grid = np.linspace((1 - window) * omega_r, (1 + window) * omega_r, 4001)
    b_grid = np.imag(input_admittance(netlist, port, grid))

    def splitting(L_j):
        m = _modes(susceptance, grid, b_grid, L_j)
        if m.size < 2:
            return math.inf
        m = m[np.argsort(np.abs(m - omega_r))][:2]
        return abs(m[1] - m[0])

    L0 = 1 / (omega_r**2 * c_sigma)
    res = minimize_scalar(splitting, bounds=(0.7 * L0, 1.3 * L0), method="bounded", options={"xatol": 1e-7 * L0})
    if not math.isfinite(res.fun) or res.x in (0.7 * L0, 1.3 * L0):
        raise NonConvergence("no resonator-qubit anticrossing found near omega_r")
    return res.fun / 2
