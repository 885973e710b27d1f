"""Modified nodal analysis in the frequency domain.

Unknowns are the non-ground node voltages plus one branch current per
inductor and voltage source and two per coupled pair. Inductive elements
enter through their branch equations ``V = jw L I`` rather than through an
inverted inductance matrix, so perfectly coupled pairs (k = 1) stay
solvable.

All solves are vectorised over an array of angular frequencies; a single
frequency is just a length-one batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Mapping

import numpy as np

from ..errors import InvalidNetlist, PortCountMismatch, SingularSystem
from .netlist import Element, Netlist

RESIDUAL_TOL = 1e-9
# stamps within this distance of a multiple of pi are evaluated slightly off it
LINE_SINGULAR_GUARD = 1e-6

PROBE = "__probe__"


@dataclass(frozen=True)
class ACSolution:
    omega: float
    voltages: Mapping[str, complex]
    currents: Mapping[str, complex]
    residual: float

    def v(self, node: str) -> complex:
        return self.voltages[node]

    def vdiff(self, plus: str, minus: str) -> complex:
        return self.voltages[plus] - self.voltages[minus]


class _Index:
    def __init__(self, netlist: Netlist):
        self.node = {n: i for i, n in enumerate(netlist.unknown_nodes)}
        self.branch: dict[str, int] = {}
        k = len(self.node)
        for e in netlist.elements:
            if e.kind in ("L", "V"):
                self.branch[e.name] = k
                k += 1
            elif e.kind == "K":
                self.branch[e.name + ".1"] = k
                self.branch[e.name + ".2"] = k + 1
                k += 2
        self.size = k

    def __call__(self, node):
        return self.node.get(node)


def _add(A, r, c, val):
    if r is not None and c is not None:
        A[:, r, c] += val


def _stamp_admittance(A, a, b, y):
    _add(A, a, a, y)
    _add(A, b, b, y)
    _add(A, a, b, -y)
    _add(A, b, a, -y)


def _stamp_kcl(A, row, a, b):
    """Branch current at column ``row`` leaves node ``a`` and enters ``b``."""
    _add(A, a, row, 1.0)
    _add(A, b, row, -1.0)
    _add(A, row, a, 1.0)
    _add(A, row, b, -1.0)


def line_electrical_length(e: Element, omegas) -> np.ndarray:
    theta = e.electrical_length(omegas)
    m = np.round(theta / math.pi)
    near = (m >= 1) & (np.abs(theta - m * math.pi) < LINE_SINGULAR_GUARD)
    return np.where(near, m * math.pi + LINE_SINGULAR_GUARD, theta)


def line_admittance(e: Element, omegas):
    """Self and transfer admittances of a lossless line section."""
    theta = line_electrical_length(e, omegas)
    z0 = e.params["z0"]
    y11 = -1j / (z0 * np.tan(theta))
    y12 = 1j / (z0 * np.sin(theta))
    return y11, y12


def assemble(netlist: Netlist, omegas, terminate=None):
    """Build the MNA system for every frequency in ``omegas``.

    ``terminate`` lists the port indices loaded by their reference
    resistance; by default every declared port is terminated.

    Returns ``(A, b, index)`` with ``A`` of shape ``(F, N, N)`` and ``b`` of
    shape ``(F, N)``.
    """
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    if np.any(~np.isfinite(omegas)) or np.any(omegas <= 0):
        raise InvalidNetlist("angular frequencies must be positive and finite")
    idx = _Index(netlist)
    F, N = omegas.size, idx.size
    A = np.zeros((F, N, N), dtype=complex)
    b = np.zeros((F, N), dtype=complex)
    jw = 1j * omegas

    for e in netlist.elements:
        t = [idx(n) for n in e.terminals]
        p = e.params
        if e.kind == "R":
            _stamp_admittance(A, t[0], t[1], 1.0 / p["R"])
        elif e.kind == "C":
            _stamp_admittance(A, t[0], t[1], jw * p["C"])
        elif e.kind == "L":
            row = idx.branch[e.name]
            _stamp_kcl(A, row, t[0], t[1])
            A[:, row, row] -= jw * p["L"]
        elif e.kind == "K":
            r1, r2 = idx.branch[e.name + ".1"], idx.branch[e.name + ".2"]
            _stamp_kcl(A, r1, t[0], t[1])
            _stamp_kcl(A, r2, t[2], t[3])
            m = e.mutual
            A[:, r1, r1] -= jw * p["L1"]
            A[:, r1, r2] -= jw * m
            A[:, r2, r1] -= jw * m
            A[:, r2, r2] -= jw * p["L2"]
        elif e.kind == "TL":
            if len(t) == 2:
                a1, b1, a2, b2 = t[0], None, t[1], None
            else:
                a1, b1, a2, b2 = t
            y11, y12 = line_admittance(e, omegas)
            _stamp_admittance(A, a1, b1, y11)
            _stamp_admittance(A, a2, b2, y11)
            _add(A, a1, a2, y12)
            _add(A, a1, b2, -y12)
            _add(A, b1, a2, -y12)
            _add(A, b1, b2, y12)
            _add(A, a2, a1, y12)
            _add(A, a2, b1, -y12)
            _add(A, b2, a1, -y12)
            _add(A, b2, b1, y12)
        elif e.kind == "V":
            row = idx.branch[e.name]
            _stamp_kcl(A, row, t[0], t[1])
            b[:, row] = complex(p["value"])
        elif e.kind == "I":
            # source drives current into its plus terminal
            if t[0] is not None:
                b[:, t[0]] += complex(p["value"])
            if t[1] is not None:
                b[:, t[1]] -= complex(p["value"])

    ports = range(len(netlist.ports)) if terminate is None else terminate
    for i in ports:
        port = netlist.ports[i]
        _stamp_admittance(A, idx(port.plus), idx(port.minus), 1.0 / port.z0)
    return A, b, idx


def _solve(A, b, omegas):
    vector = b.ndim == A.ndim - 1
    rhs = b[..., None] if vector else b
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError:
        # locate the offending frequency for the message
        w = float(np.atleast_1d(omegas)[0])
        for f, wf in enumerate(np.atleast_1d(omegas)):
            try:
                np.linalg.solve(A[f], rhs[f])
            except np.linalg.LinAlgError:
                w = float(wf)
                break
        raise SingularSystem(f"nodal system is singular at {w / (2 * math.pi):.9g} Hz", omega=w) from None
    res = np.linalg.norm(A @ sol - rhs, axis=-2)
    scale = np.linalg.norm(rhs, axis=-2)
    rel = np.where(scale > 0, res / np.where(scale > 0, scale, 1.0), res)
    bad = ~np.isfinite(rel) | (rel > RESIDUAL_TOL) | ~np.all(np.isfinite(sol), axis=-2)
    bad = bad.any(axis=-1)
    if np.any(bad):
        w = float(np.atleast_1d(omegas)[int(np.argmax(bad))])
        raise SingularSystem(f"nodal system is singular at {w / (2 * math.pi):.9g} Hz", omega=w)
    return (sol[..., 0] if vector else sol), rel.max(axis=-1)


def solve_ac_sweep(netlist: Netlist, omegas) -> list[ACSolution]:
    """Solve the network, with its own sources active, at every frequency."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    A, b, idx = assemble(netlist, omegas)
    x, res = _solve(A, b, omegas)
    out = []
    for f, w in enumerate(omegas):
        volts = {n: complex(x[f, i]) for n, i in idx.node.items()}
        volts[netlist.ground] = 0j
        currents = {name: complex(x[f, i]) for name, i in idx.branch.items()}
        out.append(ACSolution(float(w), volts, currents, float(res[f])))
    return out


def solve_ac(netlist: Netlist, omega: float) -> ACSolution:
    """Solve at a single angular frequency. Declared ports are terminated
    in their reference resistances; declared sources are the excitation."""
    if not omega > 0:
        raise InvalidNetlist("angular frequency must be positive")
    return solve_ac_sweep(netlist, [omega])[0]


def node_voltages(netlist: Netlist, omegas, nodes) -> np.ndarray:
    """Voltages of ``nodes`` over a sweep, shape ``(F, len(nodes))``."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    A, b, idx = assemble(netlist, omegas)
    x, _ = _solve(A, b, omegas)
    cols = []
    for n in nodes:
        cols.append(np.zeros(omegas.size, complex) if n == netlist.ground else x[:, idx.node[n]])
    return np.stack(cols, axis=1)


def probe(netlist: Netlist, port: int, value: complex = 1.0) -> Netlist:
    """Replace the termination of ``port`` by an ideal voltage source.

    The remaining ports stay terminated, so solving the result gives the
    response of the network to a drive at that port (e.g. a junction
    replaced by a source).
    """
    if not 0 <= port < len(netlist.ports):
        raise PortCountMismatch(f"port {port} not declared")
    p = netlist.ports[port]
    others = tuple(q for i, q in enumerate(netlist.ports) if i != port)
    src = Element(PROBE, "V", (p.plus, p.minus), {"value": value})
    return replace(netlist, elements=netlist.elements + (src,), ports=others)


def input_admittance(netlist: Netlist, port: int, omega):
    """Admittance seen looking into ``port`` with every other port matched.

    Accepts a scalar or an array of angular frequencies.
    """
    scalar = np.ndim(omega) == 0
    omegas = np.atleast_1d(np.asarray(omega, dtype=float))
    probed = probe(netlist, port)
    A, b, idx = assemble(probed, omegas)
    x, _ = _solve(A, b, omegas)
    # source branch current flows from plus through the source, so the
    # current delivered into the network is its negative
    y = -x[:, idx.branch[PROBE]]
    return complex(y[0]) if scalar else y


def s_matrix(netlist: Netlist, omegas) -> np.ndarray:
    """Scattering matrix over a sweep, shape ``(F, P, P)``, referenced to
    each port's own real reference impedance."""
    omegas = np.atleast_1d(np.asarray(omegas, dtype=float))
    P = len(netlist.ports)
    if P == 0:
        raise PortCountMismatch("netlist declares no ports")
    A, b, idx = assemble(netlist, omegas)
    N = idx.size
    B = np.zeros((omegas.size, N, P), dtype=complex)
    for j, port in enumerate(netlist.ports):
        # unit Norton current == Thevenin source of z0 volts behind z0
        if idx(port.plus) is not None:
            B[:, idx(port.plus), j] += 1.0
        if idx(port.minus) is not None:
            B[:, idx(port.minus), j] -= 1.0
    B = B + b[..., None]
    x, _ = _solve(A, B, omegas)
    V = np.zeros((omegas.size, P, P), dtype=complex)
    for i, port in enumerate(netlist.ports):
        vp = x[:, idx(port.plus), :] if idx(port.plus) is not None else 0.0
        vm = x[:, idx(port.minus), :] if idx(port.minus) is not None else 0.0
        V[:, i, :] = vp - vm
    rz = np.sqrt(np.array([p.z0 for p in netlist.ports]))
    S = 2.0 * V / (rz[None, :, None] * rz[None, None, :])
    S -= np.eye(P)[None]
    return S


def s_to_y(S, z0) -> np.ndarray:
    """Convert S to Y for real, positive per-port reference impedances."""
    S = np.asarray(S, dtype=complex)
    P = S.shape[-1]
    g = 1.0 / np.sqrt(np.broadcast_to(np.asarray(z0, dtype=float), (P,)))
    eye = np.eye(P)
    ynorm = np.linalg.solve(np.swapaxes(eye + S, -1, -2), np.swapaxes(eye - S, -1, -2))
    ynorm = np.swapaxes(ynorm, -1, -2)
    return g[:, None] * ynorm * g[None, :]


def y_to_s(Y, z0) -> np.ndarray:
    Y = np.asarray(Y, dtype=complex)
    P = Y.shape[-1]
    r = np.sqrt(np.broadcast_to(np.asarray(z0, dtype=float), (P,)))
    ynorm = r[:, None] * Y * r[None, :]
    eye = np.eye(P)
    s = np.linalg.solve(np.swapaxes(eye + ynorm, -1, -2), np.swapaxes(eye - ynorm, -1, -2))
    return np.swapaxes(s, -1, -2)


@dataclass(frozen=True)
class TwoPortParams:
    omega: np.ndarray
    S: np.ndarray
    Y: np.ndarray

    @property
    def s21(self):
        return self.S[..., 1, 0]


def two_port_params(netlist: Netlist, omega) -> TwoPortParams:
    """S- and Y-matrices of a network with exactly two ports.

    ``omega`` may be a scalar (matrices of shape ``(2, 2)``) or an array.
    """
    if len(netlist.ports) != 2:
        raise PortCountMismatch(f"two_port_params needs 2 ports, netlist declares {len(netlist.ports)}")
    scalar = np.ndim(omega) == 0
    omegas = np.atleast_1d(np.asarray(omega, dtype=float))
    S = s_matrix(netlist, omegas)
    z0 = [p.z0 for p in netlist.ports]
    with np.errstate(all="ignore"):
        try:
            Y = s_to_y(S, z0)
        except np.linalg.LinAlgError:
            Y = np.full_like(S, np.nan)
    if scalar:
        return TwoPortParams(omegas[0], S[0], Y[0])
    return TwoPortParams(omegas, S, Y)
