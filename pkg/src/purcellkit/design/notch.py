"""Purcell spectra of a filtered netlist and bandstop-notch characterisation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ..circuit import FrequencyGrid, Netlist, input_admittance
from ..errors import InputError, NoInteriorMinimum
from ..purcell import ReadoutParams, gamma_from_admittance_array, unfiltered_gamma_array

TWO_PI = 2 * math.pi
BRACKET_REL = 1e-4
LEVEL_100 = 100.0


@dataclass(frozen=True)
class PurcellSpectrum:
    """Gamma_P (rad/s) sampled on ``omega``; ``evaluate`` recomputes it at
    arbitrary frequencies when the spectrum came from a circuit."""

    omega: np.ndarray
    gamma: np.ndarray
    evaluate: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        w = np.asarray(self.omega, float)
        g = np.asarray(self.gamma, float)
        if w.shape != g.shape or w.ndim != 1:
            raise InputError("omega and gamma must be 1-D arrays of equal length")
        if w.size < 3 or np.any(np.diff(w) <= 0):
            raise InputError("spectrum needs at least three increasing frequencies")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "gamma", g)

    def at(self, omega) -> np.ndarray:
        w = np.atleast_1d(np.asarray(omega, float))
        if self.evaluate is not None:
            return self.evaluate(w)
        return np.exp(np.interp(w, self.omega, np.log(np.maximum(self.gamma, 1e-300))))


def purcell_spectrum(
    netlist: Netlist, grid: FrequencyGrid, c_sigma: float, port: int = 2, refine: bool = True
) -> PurcellSpectrum:
    """Re[Y_in] / C_sigma at the qubit probe port over ``grid``.

    With ``refine`` the grid is densified around its interior minimum until
    the neighbours of the minimum lie within 0.01% of it.
    """
    if not 0 <= port < len(netlist.ports):
        raise InputError(f"netlist has no port {port}")

    def evaluate(w):
        return gamma_from_admittance_array(input_admittance(netlist, port, np.asarray(w, float)), c_sigma)

    w = np.asarray(grid.points, float)
    g = evaluate(w)
    if refine:
        for _ in range(40):
            wide = [i for i in local_minima(g) if (w[i + 1] - w[i - 1]) > BRACKET_REL * w[i]]
            if not wide:
                break
            extra = np.concatenate([np.linspace(w[i - 1], w[i + 1], 11)[1:-1] for i in wide])
            extra = np.setdiff1d(extra, w)
            w = np.concatenate([w, extra])
            g = np.concatenate([g, evaluate(extra)])
            order = np.argsort(w)
            w, g = w[order], g[order]
    return PurcellSpectrum(w, g, evaluate)


def local_minima(g) -> list[int]:
    """Indices of strict interior local minima (plateaus count once)."""
    g = np.asarray(g)
    out = []
    for i in range(1, g.size - 1):
        if g[i] < g[i - 1] and g[i] <= g[i + 1]:
            j = i
            while j + 1 < g.size and g[j + 1] == g[i]:
                j += 1
            if j + 1 < g.size:
                out.append(i)
    return out


@dataclass(frozen=True)
class NotchCharacterization:
    """Bandstop metrics; frequencies and rates in rad/s."""

    omega_notch: float
    Q: float  # zero when the stopband width is unbounded
    delta_omega: float
    bw100: float
    gamma_min: float
    peak_suppression: float
    omega_peak: float

    def __post_init__(self):
        if not self.delta_omega > 0:
            raise InputError("notch width must be positive")
        if self.bw100 < 0:
            raise InputError("BW_100 must be non-negative")

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(
            f_notch_hz=self.omega_notch / TWO_PI,
            delta_f_hz=self.delta_omega / TWO_PI,
            bw100_hz=self.bw100 / TWO_PI,
            gamma_min_hz=self.gamma_min / TWO_PI,
            f_peak_hz=self.omega_peak / TWO_PI,
        )
        return d


def _reference_fn(reference) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(reference, ReadoutParams):
        return lambda w: unfiltered_gamma_array(reference, w, "exact")
    if callable(reference):
        return reference
    raise InputError("reference must be ReadoutParams or a callable of omega")


def _crossing(s_fn, level, w_in, w_out, s_grid_in, s_grid_out, exact):
    """Frequency between w_in (above level) and w_out (below) where the
    suppression equals ``level``."""
    if exact:
        return brentq(lambda x: math.log(s_fn(x)) - math.log(level), w_in, w_out, xtol=1e-9 * w_in, rtol=1e-12)
    t = (math.log(s_grid_in) - math.log(level)) / (math.log(s_grid_in) - math.log(s_grid_out))
    return w_in + t * (w_out - w_in)


def _walk(s, start, step, level):
    j = start
    while 0 <= j + step < s.size and s[j + step] >= level:
        j += step
    if not 0 <= j + step < s.size:
        return None
    return j


def extract_notch(spectrum: PurcellSpectrum, reference, locate: str = "gamma") -> NotchCharacterization:
    """Characterise the bandstop notch against an unfiltered reference rate.

    ``reference`` is ``ReadoutParams`` (exact unfiltered form) or any
    callable returning the unfiltered rate. The notch sits at the minimum of
    Gamma_P; its width is taken where the suppression ratio has fallen to
    half of its peak value, and BW_100 is the contiguous band around the
    peak with suppression of at least 100.

    With ``locate="suppression"`` the notch is placed at the suppression
    peak instead, which also characterises shallow bumps where Gamma_P
    itself has no interior minimum.
    """
    if locate not in ("gamma", "suppression"):
        raise InputError(f"unknown locate mode {locate!r}")
    ref = _reference_fn(reference)
    w, g = spectrum.omega, spectrum.gamma
    exact = spectrum.evaluate is not None
    if not g.max() > 0:
        raise NoInteriorMinimum("Purcell spectrum is identically zero")

    def gamma_at(x):
        return float(spectrum.at(x)[0])

    def supp_at(x):
        gx = gamma_at(x)
        return float(ref(np.array([x]))[0]) / gx if gx > 0 else math.inf

    with np.errstate(divide="ignore"):
        s = np.where(g > 0, ref(w) / np.where(g > 0, g, 1.0), np.inf)
    if locate == "gamma":
        minima = local_minima(g)
        if not minima:
            raise NoInteriorMinimum("Purcell spectrum has no interior minimum")
        # the notch is the local minimum of Gamma_P with the deepest suppression
        i = max(minima, key=lambda m: (s[m - 1 : m + 2].max(), -m))
    else:
        i = int(np.argmax(s))
        if i in (0, w.size - 1):
            raise NoInteriorMinimum("suppression peak lies at the spectrum edge")
    if exact:
        res = minimize_scalar(gamma_at, bounds=(w[i - 1], w[i + 1]), method="bounded", options={"xatol": 1e-9 * w[i]})
        w_notch, g_min = (float(res.x), float(res.fun)) if res.fun <= g[i] else (float(w[i]), float(g[i]))
    else:
        w_notch, g_min = float(w[i]), float(g[i])

    # suppression peak next to the notch
    k = i - 1 + int(np.argmax(s[i - 1 : i + 2]))
    while 0 < k < s.size - 1 and s[k] < max(s[k - 1], s[k + 1]):
        k += 1 if s[k + 1] > s[k - 1] else -1
    if k in (0, w.size - 1):
        raise NoInteriorMinimum("suppression peak lies at the spectrum edge")
    w_peak, s_peak = float(w[k]), float(s[k])
    if exact and math.isfinite(s_peak):
        res = minimize_scalar(
            lambda x: -math.log(supp_at(x)), bounds=(w[k - 1], w[k + 1]), method="bounded", options={"xatol": 1e-9 * w[k]}
        )
        if math.exp(-res.fun) > s_peak:
            w_peak, s_peak = float(res.x), math.exp(-res.fun)
    if not math.isfinite(s_peak):
        raise NoInteriorMinimum("filtered rate vanishes; suppression is unbounded")
    # put the refined peak on the sample arrays so every crossing is bracketed
    if w_peak != w[k]:
        pos = int(np.searchsorted(w, w_peak))
        w, s = np.insert(w, pos, w_peak), np.insert(s, pos, s_peak)
        k = pos

    def edge(level, step):
        j = _walk(s, k, step, level)
        if j is None:
            return None
        return _crossing(supp_at, level, w[j], w[j + step], s[j], s[j + step], exact)

    if locate == "suppression":
        w_notch, g_min = w_peak, gamma_at(w_peak)

    half = s_peak / 2
    lo, hi = edge(half, -1), edge(half, +1)
    # a side that never falls to half the peak leaves the stopband unbounded
    width = math.inf if lo is None or hi is None else hi - lo

    bw = 0.0
    if s_peak >= LEVEL_100:
        left, right = edge(LEVEL_100, -1), edge(LEVEL_100, +1)
        bw = (w[-1] if right is None else right) - (w[0] if left is None else left)
    return NotchCharacterization(w_notch, w_notch / width, width, bw, g_min, s_peak, w_peak)
