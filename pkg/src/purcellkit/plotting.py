"""SVG figures for command-line reports.

Figures are written as text SVG with a fixed hash salt and no date stamp,
so repeated runs give byte-identical files.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "svg.hashsalt": "purcellkit",
    "svg.fonttype": "path",
    "font.size": 8,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "lines.linewidth": 1.0,
    "figure.figsize": (4.5, 3.2),
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_purcell(path, f_hz, gamma, gamma_unfiltered, notch=None):
    """Filtered and unfiltered Purcell rates (Hz) against qubit frequency."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.semilogy(np.asarray(f_hz) / 1e9, np.asarray(gamma_unfiltered) / (2 * math.pi), "--", color="0.5", label="unfiltered")
        ax.semilogy(np.asarray(f_hz) / 1e9, np.asarray(gamma) / (2 * math.pi), color="C0", label="filtered")
        if notch is not None:
            ax.axvline(notch.omega_notch / (2 * math.pi) / 1e9, color="C3", lw=0.6, ls=":")
        ax.set_xlabel("qubit frequency (GHz)")
        ax.set_ylabel(r"$\Gamma_P / 2\pi$ (Hz)")
        ax.legend(frameon=False)
        _save(fig, path)


def plot_fit(path, trace, fit, model):
    """Measured trace and fitted notch model in the complex plane and in
    magnitude."""
    with plt.rc_context({**STYLE, "figure.figsize": (7.0, 3.2)}):
        fig, (ax0, ax1) = plt.subplots(1, 2)
        ax0.plot(trace.s21.real, trace.s21.imag, ".", ms=1.5, color="0.5", label="data")
        ax0.plot(model.real, model.imag, color="C0", label="fit")
        ax0.set_aspect("equal", adjustable="datalim")
        ax0.set_xlabel("Re S21")
        ax0.set_ylabel("Im S21")
        ax0.legend(frameon=False)
        ax1.plot(trace.freq / 1e9, 20 * np.log10(np.abs(trace.s21)), ".", ms=1.5, color="0.5")
        ax1.plot(trace.freq / 1e9, 20 * np.log10(np.abs(model)), color="C0")
        ax1.set_xlabel("frequency (GHz)")
        ax1.set_ylabel("|S21| (dB)")
        ax1.set_title(f"f_r = {fit.f_r / 1e9:.6f} GHz, Q_l = {fit.Q_l:.4g}", fontsize=7)
        _save(fig, path)
