"""Command-line interface.

Subcommands ``ac``, ``purcell``, ``design``, ``fit``, ``multiplex`` and
``synth`` read JSON/CSV, write CSV/JSON into ``--out`` and exit with 0 (ok),
2 (input error), 3 (solver error), 4 (optimizer non-convergence) or
5 (fit failure). ``--plot`` adds SVG figures next to the data files.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import io
from .circuit import FrequencyGrid, s_matrix, s_to_y
from .design import (
    DesignTargets,
    TunedDesign,
    design_filter,
    extract_notch,
    multiplex_netlist,
    purcell_spectrum,
    r_optimal,
)
from .errors import InputError, NonConvergence, PurcellKitError
from .purcell import ReadoutParams, unfiltered_gamma_array
from .spectro import ResonatorFitResult, fit_resonator, notch_model, synthesize_trace

TWO_PI = 2 * math.pi


def _grid(args, default_lo=None, default_hi=None) -> FrequencyGrid:
    lo = args.fmin if args.fmin is not None else default_lo
    hi = args.fmax if args.fmax is not None else default_hi
    if lo is None or hi is None:
        raise InputError("sweep bounds --fmin and --fmax are required")
    return FrequencyGrid.linear_hz(lo, hi, args.grid)


def _outdir(args) -> Path:
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out}: {exc.strerror}") from None
    return out


def targets_from_doc(doc: dict) -> tuple[DesignTargets, dict]:
    t = doc["targets"]
    ov = doc.get("overrides", {})
    targets = DesignTargets.from_hz(
        t["f_q_target_hz"], t["f_r_hz"], t["kappa_hz"], t["g0_hz"],
        t.get("ec_hz", 200e6), t.get("z0_ohm", 50.0), ov.get("alpha_hz", -200e6),
    )
    return targets, ov


def realize(targets: DesignTargets, ov: dict, tol=None) -> TunedDesign:
    """Run the design loop with optional overrides of r, C_m, k and mode."""
    r = ov.get("r_ohm2")
    if r is None:
        r = r_optimal(targets.omega_qt, targets.omega_r, targets.z0) * ov.get("r_scale", 1.0)
    return design_filter(targets, r, ov.get("mode", "lumped"), ov.get("k", 1.0), ov.get("c_m_f"), tol)


def design_report(targets: DesignTargets, d: TunedDesign) -> dict:
    p = d.params
    q = io.quantity
    elements = {
        "C_m": q(p.C_m, "F"), "L_m": q(p.L_m, "H"), "L_f": q(p.L_f, "H"), "C_g": q(p.C_g, "F"),
        "C_q": q(p.C_q, "F"), "C_sigma": q(p.c_sigma, "F"), "k": q(p.k, "1"), "z0": q(p.z0, "ohm"),
        "mode": p.mode,
    }
    if p.mode == "lumped":
        elements.update(L_r=q(p.L_r, "H"), C_r=q(p.C_r, "F"))
    else:
        elements.update(f_line=q(p.omega_line / TWO_PI, "Hz"), L_p=q(p.primary, "H"))
    g0 = d.g0 if d.g0 is not None else p.g0_estimate()
    r_opt = r_optimal(targets.omega_qt, targets.omega_r, targets.z0)
    return {
        "targets": {
            "f_q_target_hz": targets.omega_qt / TWO_PI, "f_r_hz": targets.omega_r / TWO_PI,
            "kappa_hz": targets.kappa / TWO_PI, "g0_hz": targets.g0 / TWO_PI,
            "ec_hz": targets.ec / TWO_PI, "z0_ohm": targets.z0,
        },
        "elements": elements,
        "realized": {
            "f_r_hz": d.fit.f_r, "kappa_rad_s": d.kappa, "kappa_hz": d.kappa / TWO_PI,
            "g0_rad_s": g0, "g0_hz": g0 / TWO_PI, "r_ohm2": p.ratio,
        },
        "verification": {
            "resonance_error_rel": d.fit.f_r * TWO_PI / targets.omega_r - 1,
            "kappa_error_rel": d.kappa / targets.kappa - 1 if targets.kappa > 0 else 0.0,
            "r_opt_ohm2": r_opt,
            "r_over_r_opt": p.ratio / r_opt,
            "coupling_figure": p.coupling_ceiling(),
            "iterations": d.iterations,
        },
    }


def _spectrum_columns(spec, reference: ReadoutParams):
    g = spec.gamma
    u = unfiltered_gamma_array(reference, spec.omega)
    with np.errstate(divide="ignore"):
        t1 = np.where(g > 0, 1 / np.where(g > 0, g, 1), np.inf)
        supp = np.where(g > 0, u / np.where(g > 0, g, 1), np.inf)
    header = [
        "freq_hz", "gamma_rad_s", "gamma_hz", "t1p_s",
        "gamma_unfiltered_rad_s", "gamma_unfiltered_hz", "suppression",
    ]
    return header, [spec.omega / TWO_PI, g, g / TWO_PI, t1, u, u / TWO_PI, supp]


def _notch_doc(spec, reference):
    try:
        n = extract_notch(spec, reference)
        locate = "gamma"
    except PurcellKitError:
        n = extract_notch(spec, reference, locate="suppression")
        locate = "suppression"
    doc = io.finite(n.to_dict())
    doc["locate"] = locate
    io.validate(doc, "notch")
    return n, doc


def cmd_ac(args) -> None:
    netlist = io.read_netlist(args.netlist)
    grid = _grid(args)
    out = _outdir(args)
    S = s_matrix(netlist, grid.points)
    P = S.shape[1]
    mats = {"S": S}
    if "Y" in args.quantity:
        mats["Y"] = s_to_y(S, np.array([p.z0 for p in netlist.ports]))
    for qname in args.quantity:
        M = mats[qname]
        for i in range(P):
            for j in range(P):
                io.write_complex_csv(out / f"{qname}{i + 1}{j + 1}.csv", grid.hz, M[:, i, j])


def cmd_design(args) -> None:
    doc = io.read_json(args.design)
    io.validate(doc, "design")
    targets, ov = targets_from_doc(doc)
    out = _outdir(args)
    d = realize(targets, ov, args.tol)
    report = design_report(targets, d)
    io.validate(report, "design_report")
    io.write_json(out / "design.json", report)
    io.write_netlist(out / "netlist.json", d.netlist())


def cmd_purcell(args) -> None:
    doc = io.read_json(args.design)
    io.validate(doc, "design")
    targets, ov = targets_from_doc(doc)
    fq, fr = targets.omega_qt / TWO_PI, targets.omega_r / TWO_PI
    grid = _grid(args, 0.5 * fq, fq + 0.9 * (fr - fq))
    out = _outdir(args)
    d = realize(targets, ov, args.tol)
    reference = ReadoutParams(targets.omega_r, d.kappa, targets.g0, targets.alpha, targets.ec, targets.z0)
    spec = purcell_spectrum(d.netlist(), grid, d.params.c_sigma)
    header, cols = _spectrum_columns(spec, reference)
    io.write_csv(out / "spectrum.csv", header, cols)
    notch, ndoc = _notch_doc(spec, reference)
    io.write_json(out / "notch.json", ndoc)
    io.write_json(out / "design.json", design_report(targets, d))
    io.write_netlist(out / "netlist.json", d.netlist())
    if args.plot:
        from .plotting import plot_purcell

        plot_purcell(out / "purcell.svg", cols[0], cols[1], cols[4], notch)


def cmd_fit(args) -> None:
    trace = io.read_trace(args.trace)
    out = _outdir(args)
    fit = fit_resonator(trace)
    doc = fit.to_dict()
    doc["n_points"] = len(trace)
    io.validate(io.finite(doc), "fit")
    io.write_json(out / "fit.json", doc)
    if args.plot:
        from .plotting import plot_fit

        plot_fit(out / "fit.svg", trace, fit, notch_model(fit, trace.freq))


def cmd_synth(args) -> None:
    out = _outdir(args)
    q_l = args.f_r / args.kappa_hz
    inv_qc = (1 / q_l - 1 / args.q_i) / math.cos(args.phi)
    if not inv_qc > 0:
        raise InputError("Q_i must exceed the loaded Q")
    fit = ResonatorFitResult(
        args.f_r, q_l, 1 / inv_qc, args.phi, args.tau, args.amplitude, args.alpha, args.q_i,
    )
    half = args.span_linewidths * args.kappa_hz
    f = np.linspace(args.f_r - half, args.f_r + half, args.grid)
    trace = synthesize_trace(fit, f, args.noise, np.random.default_rng(args.seed))
    io.write_complex_csv(out / "trace.csv", trace.freq, trace.s21)


def cmd_multiplex(args) -> None:
    doc = io.read_json(args.units)
    io.validate(doc, "units")
    pairs = [targets_from_doc(u) for u in doc["units"]]
    fq = [t.omega_qt / TWO_PI for t, _ in pairs]
    fr = [t.omega_r / TWO_PI for t, _ in pairs]
    grid = _grid(args, 0.5 * min(fq), 0.97 * min(fr))
    out = _outdir(args)
    # distinctness is checked before any design work
    from .design.multiplex import _check_distinct

    _check_distinct([t.omega_r for t, _ in pairs], "a resonator frequency")
    _check_distinct([t.omega_qt for t, _ in pairs], "a target qubit frequency")
    designs = [realize(t, ov, args.tol) for t, ov in pairs]
    netlist = multiplex_netlist([d.params for d in designs])
    io.write_netlist(out / "netlist.json", netlist)
    for i, ((t, _), d) in enumerate(zip(pairs, designs)):
        reference = ReadoutParams(t.omega_r, d.kappa, t.g0, t.alpha, t.ec, t.z0)
        spec = purcell_spectrum(netlist, grid, d.params.c_sigma, port=2 + i)
        header, cols = _spectrum_columns(spec, reference)
        io.write_csv(out / f"spectrum_{i}.csv", header, cols)
        notch, ndoc = _notch_doc(spec, reference)
        ndoc["unit"] = i
        io.write_json(out / f"notch_{i}.json", ndoc)
        io.write_json(out / f"design_{i}.json", design_report(t, d))
        if args.plot:
            from .plotting import plot_purcell

            plot_purcell(out / f"purcell_{i}.svg", cols[0], cols[1], cols[4], notch)


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    """Flags accepted both before and after the subcommand. The copy on the
    subcommands has no defaults so it cannot overwrite earlier values."""

    def d(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=d("."), help="output directory")
    common.add_argument("--grid", type=int, default=d(None), help="sweep points (default 2001, synth 1001)")
    common.add_argument("--fmin", type=float, default=d(None), help="sweep start (Hz)")
    common.add_argument("--fmax", type=float, default=d(None), help="sweep stop (Hz)")
    common.add_argument("--seed", type=int, default=d(0), help="seed for synthetic noise")
    common.add_argument("--tol", type=float, default=d(None), help="relative linewidth tolerance of the design loop")
    common.add_argument("--plot", action="store_true", default=d(False), help="also write SVG figures")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(
        prog="purcellkit", description=__doc__.splitlines()[0], parents=[_global_flags(suppress=False)]
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ac", parents=[common], help="S/Y parameters of a netlist")
    p.add_argument("netlist")
    p.add_argument("--quantity", nargs="+", choices=["S", "Y"], default=["S"])
    p.set_defaults(func=cmd_ac)

    p = sub.add_parser("purcell", parents=[common], help="filtered Purcell spectrum and notch report")
    p.add_argument("design")
    p.set_defaults(func=cmd_purcell)

    p = sub.add_parser("design", parents=[common], help="realise a filter from readout targets")
    p.add_argument("design")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("fit", parents=[common], help="circle-fit a notch resonator trace")
    p.add_argument("trace")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("multiplex", parents=[common], help="several readout units on one feedline")
    p.add_argument("units")
    p.set_defaults(func=cmd_multiplex)

    p = sub.add_parser("synth", parents=[common], help="synthetic notch trace with seeded noise")
    p.add_argument("--f-r", type=float, required=True, help="resonance (Hz)")
    p.add_argument("--kappa-hz", type=float, required=True, help="loaded linewidth (Hz)")
    p.add_argument("--q-i", type=float, default=math.inf, help="internal Q")
    p.add_argument("--phi", type=float, default=0.0, help="impedance-mismatch angle (rad)")
    p.add_argument("--tau", type=float, default=0.0, help="cable delay (s)")
    p.add_argument("--amplitude", type=float, default=1.0, help="baseline amplitude")
    p.add_argument("--alpha", type=float, default=0.0, help="baseline phase (rad)")
    p.add_argument("--noise", type=float, default=0.0, help="complex noise, fraction of baseline")
    p.add_argument("--span-linewidths", type=float, default=10.0, help="half span in linewidths")
    p.set_defaults(func=cmd_synth, default_grid=1001)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.grid is None:
        args.grid = getattr(args, "default_grid", 2001)
    try:
        args.func(args)
    except NonConvergence as exc:
        msg = f"error: {exc}"
        if exc.best_residual is not None:
            msg += f" (best residual {exc.best_residual:.3e})"
        print(msg, file=sys.stderr)
        return exc.exit_code
    except PurcellKitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
