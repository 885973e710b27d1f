"""Coupling-ratio sweeps of the bandstop quality factor."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from ..circuit import FrequencyGrid
from ..errors import InputError, NoInteriorMinimum
from ..purcell import ReadoutParams
from .notch import NotchCharacterization, extract_notch, purcell_spectrum
from .params import FilterParams, filter_netlist
from .tuning import retune_resonator


@dataclass(frozen=True)
class RatioPoint:
    r: float
    params: FilterParams
    notch: NotchCharacterization | None  # None when no notch is resolved

    @property
    def Q(self) -> float:
        """Bandstop Q; zero when no notch or no bounded width is found."""
        return self.notch.Q if self.notch else 0.0

    @property
    def bw100(self) -> float:
        return self.notch.bw100 if self.notch else 0.0


def default_grid(p: FilterParams, n=2001) -> FrequencyGrid:
    """Qubit-frequency window below the resonator used for notch searches."""
    return FrequencyGrid(np.linspace(0.05 * p.omega_r, 0.97 * p.omega_r, n))


def notch_at_ratio(base: FilterParams, r: float, reference: ReadoutParams, grid: FrequencyGrid | None = None) -> RatioPoint:
    """Set L_m = r * C_m, retune the resonator and characterise the notch."""
    if not r > 0:
        raise InputError(f"ratio must be positive, got {r}")
    p, _ = retune_resonator(replace(base, L_m=r * base.C_m))
    spec = purcell_spectrum(filter_netlist(p), grid or default_grid(p), p.c_sigma)
    try:
        notch = extract_notch(spec, reference)
    except NoInteriorMinimum:
        # far from balance Gamma_P can be monotone with only a suppression bump
        try:
            notch = extract_notch(spec, reference, locate="suppression")
        except NoInteriorMinimum:
            notch = None
    return RatioPoint(r, p, notch)


def q_vs_ratio(
    base: FilterParams, ratios, reference: ReadoutParams, grid: FrequencyGrid | None = None, workers: int = 1
) -> list[RatioPoint]:
    """Bandstop Q over coupling ratios at fixed C_m, holding omega_r fixed.

    Where Gamma_P has no interior minimum the suppression peak is used
    instead. Points without a suppression peak carry ``notch=None``; both
    they and unbounded stopbands report ``Q == 0``. Evaluations are
    independent, so ``workers > 1`` runs them on a thread pool; results are
    identical either way.
    """
    ratios = [float(r) for r in ratios]
    if any(not r > 0 for r in ratios):
        raise InputError("ratios must be positive")
    run = lambda r: notch_at_ratio(base, r, reference, grid)  # noqa: E731
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run, ratios))
    return [run(r) for r in ratios]


def best_ratio(base: FilterParams, reference: ReadoutParams, r_lo: float, r_hi: float, tol=1e-4) -> RatioPoint:
    """Maximise Q(r) on [r_lo, r_hi] by golden-section search in log r."""
    phi = (math.sqrt(5) - 1) / 2
    a, b = math.log(r_lo), math.log(r_hi)
    cache: dict[float, RatioPoint] = {}

    def negq(x):
        if x not in cache:
            cache[x] = notch_at_ratio(base, math.exp(x), reference)
        return -cache[x].Q

    c, d = b - phi * (b - a), a + phi * (b - a)
    while b - a > tol:
        if negq(c) < negq(d):
            b, d = d, c
            c = b - phi * (b - a)
        else:
            a, c = c, d
            d = a + phi * (b - a)
    return cache[min(cache, key=negq)]
