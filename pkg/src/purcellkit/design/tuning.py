"""Resonator retuning and linewidth targeting by simulated S21 circle fits."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..circuit import Netlist, s_matrix
from ..errors import BracketFailure, FitError, RetuneFailure, ValidityCeiling
from ..spectro import ComplexTrace, ResonatorFitResult, fit_resonator
from .params import Couplings, DesignTargets, FilterParams, Mode, feedline_view, filter_netlist, initial_params

TWO_PI = 2 * math.pi
RETUNE_TOL = 1e-3  # acceptance on |f_fit - f_target| / f_target
RETUNE_GOAL = 1e-6  # what the iteration aims for
KAPPA_TOL = 5e-3
COUPLING_CEILING = 0.1  # Z0 * omega_qt * C_m
G0_TOL = 1e-3


def _s(netlist: Netlist, omegas):
    S = s_matrix(netlist, omegas)
    return S[:, 1, 0], S[:, 0, 0]


def measure_resonance(netlist: Netlist, omega_guess: float, window=0.15, points_per_width=12) -> ResonatorFitResult:
    """Locate the feedline resonance nearest ``omega_guess`` and circle-fit it.

    ``netlist`` must expose exactly the two feedline ports. The coarse locate
    uses the reflection peak, which zooms in until the half-power width spans
    several grid points; the final trace covers +-8 linewidths.
    """
    lo, hi = omega_guess * (1 - window), omega_guess * (1 + window)
    for _ in range(12):
        w = np.linspace(lo, hi, 2001)
        _, s11 = _s(netlist, w)
        p = np.abs(s11) ** 2
        i = int(np.argmax(p))
        above = p >= 0.5 * (p[i] + np.median(p))
        j0 = i
        while j0 > 0 and above[j0 - 1]:
            j0 -= 1
        j1 = i
        while j1 < w.size - 1 and above[j1 + 1]:
            j1 += 1
        step = w[1] - w[0]
        if j1 - j0 + 1 >= points_per_width and 0 < j0 and j1 < w.size - 1:
            width = w[j1] - w[j0]
            break
        half = max(10, 3 * (j1 - j0 + 1)) * step
        lo, hi = max(w[i] - half, w[0] * 0.5), w[i] + half
    else:
        raise RetuneFailure("could not resolve the feedline resonance")
    f = np.linspace(w[i] - 8 * width, w[i] + 8 * width, 801)
    s21, _ = _s(netlist, f)
    try:
        return fit_resonator(ComplexTrace(f / TWO_PI, s21))
    except FitError as exc:
        raise RetuneFailure(f"resonance fit failed: {exc}") from exc


def _scale(p: FilterParams, x: float) -> FilterParams:
    if p.mode == "lumped":
        return replace(p, L_r=x)
    return replace(p, omega_line=x)


def _knob(p: FilterParams) -> float:
    return p.L_r if p.mode == "lumped" else p.omega_line


def _fitted(p: FilterParams, couplings) -> tuple[ResonatorFitResult, float]:
    fit = measure_resonance(feedline_view(filter_netlist(p, couplings)), p.omega_r)
    return fit, TWO_PI * fit.f_r / p.omega_r - 1


def retune_resonator(p: FilterParams, couplings: Couplings = "both", max_iter=30) -> tuple[FilterParams, ResonatorFitResult]:
    """Adjust the resonator so the fitted feedline resonance sits at omega_r.

    Secant iteration on the fitted resonance; the first step uses the
    natural scaling (1/sqrt(L) or linear in the line frequency).
    """
    x0 = _knob(p)
    fit0, e0 = _fitted(p, couplings)
    if abs(e0) < RETUNE_GOAL:
        return p, fit0
    x1 = x0 * (1 + e0) ** 2 if p.mode == "lumped" else x0 / (1 + e0)
    best = (abs(e0), p, fit0)
    for _ in range(max_iter):
        p1 = _scale(p, x1)
        fit1, e1 = _fitted(p1, couplings)
        if abs(e1) < best[0]:
            best = (abs(e1), p1, fit1)
        if abs(e1) < RETUNE_GOAL or e1 == e0:
            break
        x0, e0, x1 = x1, e1, x1 - e1 * (x1 - x0) / (e1 - e0)
        if not x1 > 0:
            break
    err, p_best, fit_best = best
    if err >= RETUNE_TOL:
        raise RetuneFailure(f"resonance off target by {err:.2e} after retuning", err)
    return p_best, fit_best


def build_filtered_netlist(params: FilterParams, mode: Mode | None = None, couplings: Couplings = "both") -> Netlist:
    """Filtered readout netlist with the resonator retuned onto omega_r."""
    if mode is not None and mode != params.mode:
        params = _convert_mode(params, mode)
    tuned, _ = retune_resonator(params, couplings)
    return filter_netlist(tuned, couplings)


def _convert_mode(p: FilterParams, mode: Mode) -> FilterParams:
    if mode == "line":
        return replace(p, mode="line", omega_line=p.omega_r)
    c_res = math.pi / (4 * p.omega_r * p.z0)
    C_r = c_res - p.C_g - p.C_m
    return replace(p, mode="lumped", C_r=C_r, L_r=1 / (p.omega_r**2 * c_res))


@dataclass(frozen=True)
class TunedDesign:
    params: FilterParams
    fit: ResonatorFitResult
    iterations: int
    g0: float | None = None  # from the normal-mode anticrossing, when measured

    @property
    def kappa(self) -> float:
        return self.fit.kappa

    def netlist(self, couplings: Couplings = "both") -> Netlist:
        return filter_netlist(self.params, couplings)


def tune_coupling_for_kappa(
    kappa: float, r: float, base: FilterParams, tol=KAPPA_TOL / 50, max_iter=40
) -> TunedDesign:
    """Scale C_m (with L_m = r * C_m) until the fitted linewidth equals
    ``kappa``; the resonator is retuned at every step.

    The linewidth grows roughly as C_m**2, so a secant in log-log space is
    used inside a maintained bracket.
    """
    if not kappa > 0:
        raise BracketFailure("zero linewidth only has the degenerate C_m = 0 solution")
    c_max = COUPLING_CEILING / (base.z0 * base.omega_qt)
    def evaluate(c):
        return retune_resonator(replace(base, C_m=c, L_m=r * c, C_r=_resized_cr(base, c)))

    p_hi, fit_hi = evaluate(c_max)
    if fit_hi.kappa < kappa * (1 - tol):
        raise ValidityCeiling(
            f"linewidth {fit_hi.kappa / TWO_PI / 1e6:.3f} MHz at the coupling ceiling is below the target",
            abs(math.log(fit_hi.kappa / kappa)),
        )
    lo = None
    hi = (math.log(c_max), math.log(fit_hi.kappa / kappa))
    c = c_max * math.sqrt(kappa / fit_hi.kappa)
    best = (abs(hi[1]), p_hi, fit_hi)
    for it in range(max_iter):
        p, fit = evaluate(c)
        e = math.log(fit.kappa / kappa)
        if abs(e) < best[0]:
            best = (abs(e), p, fit)
        if abs(e) < tol:
            return TunedDesign(p, fit, it + 2)
        point = (math.log(c), e)
        if e > 0:
            hi = point
        else:
            lo = point
        if lo is None:
            # linewidth ~ C_m^2
            c = math.exp(point[0] - e / 2)
        else:
            x = lo[0] - lo[1] * (hi[0] - lo[0]) / (hi[1] - lo[1])
            c = math.exp(min(max(x, lo[0]), hi[0]))
    raise BracketFailure("linewidth root-find did not converge", best[0])


def _resized_cr(p: FilterParams, C_m: float) -> float:
    """Keep the total resonator capacitance fixed when C_m changes."""
    if p.mode != "lumped":
        return p.C_r
    return max(p.C_r + p.C_m - C_m, 1e-18)


def design_filter(
    targets: DesignTargets,
    r: float | None = None,
    mode: Mode = "lumped",
    k=1.0,
    C_m: float | None = None,
    tol: float | None = None,
    refine_g0: bool = True,
) -> TunedDesign:
    """Complete single-unit design.

    Starts from the lumped coupling formula for C_g, scales C_m at fixed
    ``r`` to meet the linewidth (or keeps a given ``C_m`` and only retunes),
    then with ``refine_g0`` rescales C_g at fixed C_sigma until the
    anticrossing coupling matches ``targets.g0`` within 0.1%.
    """
    from .coupling import anticrossing_g0

    kw = {} if tol is None else {"tol": tol}

    def run(base):
        if C_m is not None:
            p, fit = retune_resonator(base)
            return TunedDesign(p, fit, 0)
        return tune_coupling_for_kappa(targets.kappa, base.ratio, base, **kw)

    c0 = C_m if C_m is not None else 0.5 * COUPLING_CEILING / (targets.z0 * targets.omega_qt)
    d = run(initial_params(targets, c0, r, mode, k))
    if not refine_g0:
        return d
    for _ in range(6):
        g0 = anticrossing_g0(d.netlist(), targets.omega_r, d.params.c_sigma)
        d = replace(d, g0=g0)
        if abs(g0 / targets.g0 - 1) < G0_TOL:
            return d
        p = d.params
        C_g = p.C_g * targets.g0 / g0
        C_r = p.C_r - (C_g - p.C_g) if p.mode == "lumped" else p.C_r
        d = run(replace(p, C_g=C_g, C_q=p.c_sigma - C_g, C_r=C_r))
    raise RetuneFailure("coupling refinement did not reach the g0 target", abs(g0 / targets.g0 - 1))
