import math
from dataclasses import replace

import numpy as np
import pytest

from purcellkit.circuit import FrequencyGrid, input_admittance, s_matrix
from purcellkit.design import (
    PORT_QUBIT,
    DesignTargets,
    PurcellSpectrum,
    ReadoutUnitSpec,
    design_filter,
    extract_notch,
    feedline_view,
    filter_netlist,
    initial_params,
    interference_phases,
    measure_resonance,
    multiplex_netlist,
    notch_at_ratio,
    purcell_spectrum,
    q_vs_ratio,
    r_optimal,
    retune_resonator,
    tune_coupling_for_kappa,
)
from purcellkit.errors import BracketFailure, DuplicateFrequency, InputError, NoInteriorMinimum, ValidityCeiling
from purcellkit.purcell import unfiltered_gamma_array

TWO_PI = 2 * math.pi
GHZ = TWO_PI * 1e9
MHZ = TWO_PI * 1e6
TARGETS = DesignTargets.from_hz(5e9, 7e9, 12.3e6, 200e6)
R_OPT = r_optimal(TARGETS.omega_qt, TARGETS.omega_r, TARGETS.z0)


@pytest.fixture(scope="module")
def design():
    return design_filter(TARGETS)


@pytest.fixture(scope="module")
def notch(design):
    p = design.params
    spec = purcell_spectrum(filter_netlist(p), FrequencyGrid(np.linspace(3 * GHZ, 6.5 * GHZ, 2001)), p.c_sigma)
    return extract_notch(spec, TARGETS.readout)


def test_optimal_ratio_examples():
    assert R_OPT / (1e-12 / 1e-15) == pytest.approx(2.25, rel=0.01)
    assert r_optimal(GHZ * 1e-9, 7 * GHZ, 50.0) == pytest.approx(0.0, abs=1e-3)
    assert r_optimal(7 * GHZ, 7 * GHZ, 50.0) == pytest.approx(2500.0, rel=1e-15)
    with pytest.raises(InputError):
        r_optimal(15 * GHZ, 7 * GHZ, 50.0)


def test_design_meets_targets(design):
    assert design.kappa == pytest.approx(TARGETS.kappa, rel=5e-3)
    assert design.fit.f_r * TWO_PI == pytest.approx(TARGETS.omega_r, rel=1e-3)
    assert design.params.ratio == pytest.approx(R_OPT, rel=1e-9)
    assert design.g0 == pytest.approx(TARGETS.g0, rel=1e-3)
    assert design.params.coupling_ceiling() <= 0.1


def test_independent_fit_confirms_linewidth(design):
    fit = measure_resonance(feedline_view(design.netlist()), TARGETS.omega_r * 1.01)
    assert fit.kappa == pytest.approx(TARGETS.kappa, rel=0.05)


def test_isolated_resonator_is_lossless(design):
    p = replace(design.params, C_m=0.0, L_m=0.0)
    w = GHZ * np.linspace(3, 9, 301)
    y = input_admittance(filter_netlist(p), PORT_QUBIT, w)
    assert np.all(np.abs(y.real) <= 1e-12)
    spec = purcell_spectrum(filter_netlist(p), FrequencyGrid(w), p.c_sigma, refine=False)
    assert np.all(spec.gamma <= 1e-12 / p.c_sigma)


def test_notch_at_target(notch):
    assert notch.omega_notch == pytest.approx(TARGETS.omega_qt, rel=5e-3)
    assert notch.peak_suppression >= 2000
    assert notch.Q == pytest.approx(notch.omega_notch / notch.delta_omega, rel=1e-12)


@pytest.mark.xfail(strict=True, reason="simulated BW_100 is about 321 MHz at the optimal ratio; see ledger")
def test_notch_bandwidth_400mhz(notch):
    assert notch.bw100 / TWO_PI >= 400e6


def test_notch_is_grid_invariant(design, notch):
    p = design.params
    fine = purcell_spectrum(filter_netlist(p), FrequencyGrid(np.linspace(3 * GHZ, 6.5 * GHZ, 8001)), p.c_sigma)
    n2 = extract_notch(fine, TARGETS.readout)
    assert n2.omega_notch == pytest.approx(notch.omega_notch, rel=1e-3)
    assert n2.Q == pytest.approx(notch.Q, rel=1e-3)
    assert n2.bw100 == pytest.approx(notch.bw100, rel=1e-3)


def test_high_frequency_spectrum_follows_unfiltered_trend(design):
    p = design.params
    w = GHZ * np.linspace(8.5, 9.5, 11)
    spec = purcell_spectrum(filter_netlist(p), FrequencyGrid(w), p.c_sigma, refine=False)
    ratio = spec.gamma / unfiltered_gamma_array(TARGETS.readout, w)
    assert np.all((ratio > 0.1) & (ratio < 10))


def test_synthetic_notch_width():
    w0, q = 5 * GHZ, 40.0
    w = np.linspace(3 * GHZ, 7 * GHZ, 4001)
    ref = lambda x: np.full_like(np.asarray(x, dtype=float), 1.0)  # noqa: E731
    fn = lambda x: (1 + q**2 * (x / w0 - w0 / x) ** 2) / 1e6  # noqa: E731
    n = extract_notch(PurcellSpectrum(w, fn(w), fn), ref)
    assert n.omega_notch == pytest.approx(w0, rel=1e-6)
    # suppression halves where the Lorentzian factor reaches 2
    assert n.Q == pytest.approx(q, rel=0.02)


def test_flat_spectrum_has_no_notch():
    w = np.linspace(3 * GHZ, 7 * GHZ, 101)
    flat = lambda x: np.ones_like(np.asarray(x, dtype=float))  # noqa: E731
    with pytest.raises(NoInteriorMinimum):
        extract_notch(PurcellSpectrum(w, flat(w), flat), flat)


@pytest.fixture(scope="module")
def ratio_sweep(design):
    ratios = R_OPT * np.array([0.2, 0.5, 0.9, 1.0, 1.1, 2.0, 5.0])
    return q_vs_ratio(design.params, ratios, TARGETS.readout, workers=4)


def test_q_has_interior_maximum(ratio_sweep):
    q = [pt.Q for pt in ratio_sweep]
    i = int(np.argmax(q))
    assert 0 < i < len(q) - 1
    assert ratio_sweep[i].r == pytest.approx(R_OPT)
    assert q[1] < q[3] and q[5] < q[3]
    # single interior maximum: non-decreasing up to the peak, non-increasing after
    assert all(a <= b for a, b in zip(q[: i + 1], q[1 : i + 1]))
    assert all(a >= b for a, b in zip(q[i:], q[i + 1 :]))


def test_bw100_stable_near_optimum(design):
    pts = q_vs_ratio(design.params, R_OPT * np.array([0.95, 1.0, 1.05]), TARGETS.readout, workers=3)
    bw = np.array([pt.bw100 for pt in pts])
    # variation measured against the value at the optimal ratio
    assert np.all(np.abs(bw / bw[1] - 1) < 0.5)


@pytest.mark.xfail(strict=True, reason="BW_100 collapses to zero at 0.5 and 2 times the optimal ratio; see ledger")
def test_bw100_stable_over_wide_ratio_range(ratio_sweep):
    bw = np.array([pt.bw100 for pt in ratio_sweep[1:-1]])
    assert np.all(np.abs(bw / ratio_sweep[3].bw100 - 1) < 0.5)


def test_notch_suppression_deep_above_optimum(design):
    pt = notch_at_ratio(design.params, 1.02 * R_OPT, TARGETS.readout)
    assert pt.notch.peak_suppression > 1e3


@pytest.mark.xfail(strict=True, reason="peak suppression is about 640 at 0.98 times the optimal ratio; see ledger")
def test_notch_suppression_deep_below_optimum(design):
    pt = notch_at_ratio(design.params, 0.98 * R_OPT, TARGETS.readout)
    assert pt.notch.peak_suppression > 1e3


def test_scaling_couplings_raises_linewidth(design, notch):
    p = design.params
    bigger, fit = retune_resonator(replace(p, C_m=1.2 * p.C_m, L_m=1.2 * p.L_m, C_r=p.C_r - 0.2 * p.C_m))
    assert fit.kappa > design.kappa
    spec = purcell_spectrum(filter_netlist(bigger), FrequencyGrid(np.linspace(3 * GHZ, 6.5 * GHZ, 2001)), p.c_sigma)
    moved = extract_notch(spec, TARGETS.readout)
    assert moved.omega_notch == pytest.approx(notch.omega_notch, rel=0.01)


def test_kappa_edge_cases(design):
    with pytest.raises(BracketFailure):
        tune_coupling_for_kappa(0.0, R_OPT, design.params)
    with pytest.raises(ValidityCeiling):
        tune_coupling_for_kappa(10 * TARGETS.kappa, R_OPT, design.params)


def test_larger_linewidth_keeps_ratio(design):
    wide = design_filter(replace(TARGETS, kappa=2 * TARGETS.kappa), refine_g0=False)
    assert wide.kappa == pytest.approx(2 * TARGETS.kappa, rel=5e-3)
    assert wide.params.C_m > design.params.C_m
    assert wide.params.L_m > design.params.L_m
    assert wide.params.ratio == pytest.approx(design.params.ratio, rel=0.01)


def test_line_mode_design():
    d = design_filter(TARGETS, mode="line", refine_g0=False)
    assert d.params.mode == "line"
    assert d.kappa == pytest.approx(TARGETS.kappa, rel=5e-3)


def test_interference_sub_circuits(design):
    rep = interference_phases(design.params, TARGETS.omega_qt)
    assert rep.capacitive.phase_32 == pytest.approx(-90, abs=1)
    assert rep.inductive.phase_21 == pytest.approx(-90, abs=1)
    assert abs(rep.inductive.phase_31) == pytest.approx(180, abs=1)
    assert rep.residual_v2 <= 0.01
    assert rep.residual_v3 <= 0.01


@pytest.mark.xfail(strict=True, reason="capacitive-only V2/V1 phase is about 88.2 degrees; see ledger")
def test_capacitive_phase_is_ninety_degrees(design):
    rep = interference_phases(design.params, TARGETS.omega_qt)
    assert rep.capacitive.phase_21 == pytest.approx(90, abs=1)


def test_feedline_is_reciprocal_and_passive(design):
    w = GHZ * np.linspace(3, 9, 601)
    S = s_matrix(feedline_view(design.netlist()), w)
    assert np.max(np.abs(S[:, 0, 1] - S[:, 1, 0])) <= 1e-10
    assert np.all(np.abs(S[:, 1, 0]) <= 1 + 1e-12)


def test_single_unit_multiplex_parity(design):
    w = GHZ * np.linspace(4, 6, 101)
    a = input_admittance(multiplex_netlist([design.params]), 2, w)
    b = input_admittance(filter_netlist(design.params), PORT_QUBIT, w)
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_three_unit_multiplex():
    units = [ReadoutUnitSpec(DesignTargets.from_hz(fq, fq + 2e9, 12.3e6, 200e6)) for fq in (4.6e9, 5.0e9, 5.4e9)]
    params = [u.realized() for u in units]
    net = multiplex_netlist(params)
    for i, p in enumerate(params):
        grid = FrequencyGrid(np.linspace(0.7 * p.omega_qt, 1.25 * p.omega_qt, 1201))
        spec = purcell_spectrum(net, grid, p.c_sigma, port=2 + i)
        n = extract_notch(spec, DesignTargets.from_hz(p.omega_qt / TWO_PI, p.omega_r / TWO_PI, 12.3e6, 200e6).readout)
        assert n.omega_notch == pytest.approx(p.omega_qt, rel=0.01)


def test_duplicate_frequencies_rejected(design):
    p = design.params
    with pytest.raises(DuplicateFrequency):
        multiplex_netlist([p, replace(p, omega_qt=4.5 * GHZ)])
    with pytest.raises(DuplicateFrequency):
        multiplex_netlist([p, replace(p, omega_r=7.5 * GHZ)])
    with pytest.raises(InputError):
        multiplex_netlist([])


def test_initial_params_split_island_capacitance():
    p = initial_params(TARGETS, 30e-15)
    assert p.c_sigma == pytest.approx(TARGETS.c_sigma, rel=1e-12)
    assert p.ratio == pytest.approx(R_OPT, rel=1e-12)
    assert p.separation(TARGETS.omega_qt) == math.pi / 2
