"""Notch-type resonator fitting and Rabi-rate based Purcell estimates.

The transmission model is the usual side-coupled (notch) resonator with an
impedance-mismatch rotation and a cable environment::

    S21(f) = a e^{i alpha} e^{-2 pi i f tau}
             [1 - (Q_l/|Q_c|) e^{i phi} / (1 + 2 i Q_l (f/f_r - 1))]

Fitting follows the circle-fit route: remove the cable delay, fit a circle
in the complex plane, fit the phase around the circle centre for
``(f_r, Q_l)``, read ``|Q_c|`` and ``phi`` off the normalised circle and
finish with a least-squares refinement of the full complex model.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal

import numpy as np
from scipy import constants, linalg, optimize

from .errors import DivisionByZero, FitDiverged, InputError, InsufficientSpan

TWO_PI = 2 * math.pi
HBAR = constants.hbar

MIN_SAMPLES = 20
MIN_LINEWIDTHS = 3.0
WING_FRACTION = 0.2
# 1/Q_i below -LOSSLESS_SLACK/Q_l is unphysical; between that and 0 it is
# a lossless resonator within fit noise
LOSSLESS_SLACK = 1e-3


@dataclass(frozen=True)
class ComplexTrace:
    freq: np.ndarray  # Hz
    s21: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.freq, dtype=float).ravel()
        s = np.asarray(self.s21, dtype=complex).ravel()
        if f.shape != s.shape:
            raise InputError("frequency and S21 arrays differ in length")
        if f.size and np.any(np.diff(f) <= 0):
            raise InputError("trace frequencies must be strictly increasing")
        if np.any(~np.isfinite(f)) or np.any(~np.isfinite(s)):
            raise InputError("trace contains non-finite samples")
        object.__setattr__(self, "freq", f)
        object.__setattr__(self, "s21", s)

    def __len__(self):
        return self.freq.size

    @property
    def span(self) -> float:
        return float(self.freq[-1] - self.freq[0]) if len(self) else 0.0


@dataclass(frozen=True)
class ResonatorFitResult:
    f_r: float
    Q_l: float
    Q_c: float  # magnitude
    phi: float
    tau: float = 0.0
    a: float = 1.0
    alpha: float = 0.0
    Q_i: float = math.inf
    stderr: dict = field(default_factory=dict)
    residual_rms: float = 0.0

    @property
    def kappa(self) -> float:
        """Loaded linewidth in rad/s."""
        return TWO_PI * self.f_r / self.Q_l

    @property
    def kappa_hz(self) -> float:
        return self.f_r / self.Q_l

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kappa_rad_s"] = self.kappa
        d["kappa_hz"] = self.kappa_hz
        d["Q_i"] = None if math.isinf(self.Q_i) else self.Q_i
        return d


def internal_q(Q_l, Q_c, phi) -> float:
    inv = 1.0 / Q_l - math.cos(phi) / Q_c
    if inv < -LOSSLESS_SLACK / Q_l:
        raise FitDiverged(f"unphysical fit: 1/Q_i = {inv:.3e} < 0")
    return math.inf if inv <= 0 else 1.0 / inv


def notch_model(fit: ResonatorFitResult, f):
    """Complex S21 of the notch model at frequencies ``f`` (Hz)."""
    f = np.asarray(f, dtype=float)
    env = fit.a * np.exp(1j * fit.alpha) * np.exp(-2j * math.pi * f * fit.tau)
    res = 1.0 - (fit.Q_l / fit.Q_c) * np.exp(1j * fit.phi) / (1.0 + 2j * fit.Q_l * (f / fit.f_r - 1.0))
    return env * res


def _model_vec(p, f, f0):
    fr = f0 * (1.0 + p[0])
    Ql, Qc, phi, tau, a, alpha = p[1:]
    env = a * np.exp(1j * alpha) * np.exp(-2j * math.pi * (f - f0) * tau)
    return env * (1.0 - (Ql / Qc) * np.exp(1j * phi) / (1.0 + 2j * Ql * (f / fr - 1.0)))


def fit_circle(z):
    """Algebraic least-squares circle through complex points.

    Pratt-normalised eigenvalue formulation. Returns ``(center, radius)``.
    """
    x, y = z.real, z.imag
    w = x * x + y * y
    X = np.column_stack([w, x, y, np.ones_like(x)])
    M = X.T @ X / len(x)
    B = np.array([[0, 0, 0, -2.0], [0, 1.0, 0, 0], [0, 0, 1.0, 0], [-2.0, 0, 0, 0]])
    vals, vecs = linalg.eig(M, B)
    vals = np.real(vals)
    ok = np.isfinite(vals) & (vals > -1e-12 * np.abs(M).max())
    if not np.any(ok):
        raise FitDiverged("circle fit found no admissible eigenvector")
    k = np.flatnonzero(ok)[np.argmin(vals[ok])]
    A, Bx, By, D = np.real(vecs[:, k])
    if A == 0:
        raise FitDiverged("circle fit degenerated to a line")
    center = complex(-Bx / (2 * A), -By / (2 * A))
    radius = math.sqrt(max(Bx * Bx + By * By - 4 * A * D, 0.0)) / (2 * abs(A))
    return center, radius


def _circle_residual(z, tau_rel, f):
    zc = z * np.exp(2j * math.pi * f * tau_rel)
    c, r = fit_circle(zc)
    return float(np.mean((np.abs(zc - c) - r) ** 2)) / max(r * r, 1e-300)


def _estimate_delay(f, z):
    n = len(f)
    m = max(int(WING_FRACTION * n), 3)
    ph = np.unwrap(np.angle(z))
    wings = np.r_[0:m, n - m : n]
    slope, _ = np.polyfit(f[wings] - f[0], ph[wings], 1)
    tau0 = -slope / TWO_PI
    span = f[-1] - f[0]
    fr = f - f[0]
    res = optimize.minimize_scalar(
        lambda t: _circle_residual(z, t, fr),
        bounds=(tau0 - 0.25 / span, tau0 + 0.25 / span),
        method="bounded",
        options={"xatol": 1e-6 / span},
    )
    return float(res.x)


def _phase_fit(f, theta, f0, Q0):
    def resid(p):
        th0, Ql, dfr = p
        model = th0 + 2 * np.arctan(2 * Ql * (1 - f / (f0 * (1 + dfr))))
        return np.angle(np.exp(1j * (theta - model)))

    th_guess = theta[np.argmin(np.abs(f - f0))]
    best = None
    for Q in (Q0, 3 * Q0, Q0 / 3):
        sol = optimize.least_squares(resid, [th_guess, Q, 0.0], method="lm", max_nfev=2000)
        if best is None or sol.cost < best.cost:
            best = sol
    th0, Ql, dfr = best.x
    return th0, abs(Ql), f0 * (1 + dfr)


def fit_resonator(trace: ComplexTrace) -> ResonatorFitResult:
    """Fit a notch-type resonance.

    Raises :class:`InsufficientSpan` for traces with fewer than 20 samples or
    covering less than three linewidths, :class:`FitDiverged` when the
    pipeline fails or lands on a non-physical solution.
    """
    if not isinstance(trace, ComplexTrace):
        trace = ComplexTrace(*trace)
    f, z = trace.freq, trace.s21
    if len(f) < MIN_SAMPLES:
        raise InsufficientSpan(f"need at least {MIN_SAMPLES} samples, got {len(f)}")
    span = trace.span
    fmid = 0.5 * (f[0] + f[-1])
    try:
        tau = _estimate_delay(f, z)
        zd = z * np.exp(2j * math.pi * (f - f[0]) * tau)
        center, radius = fit_circle(zd)
        theta = np.unwrap(np.angle(zd - center))
        # resonance: fastest phase change around the centre
        dtheta = np.abs(np.gradient(theta, f))
        f0 = f[int(np.argmax(dtheta))]
        Q0 = max(f0 * dtheta.max() / 4.0, 1.0)
        th0, Ql, fr = _phase_fit(f, theta, f0, Q0)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise FitDiverged(f"initial estimate failed: {exc}") from exc

    if not (np.isfinite(Ql) and Ql > 0 and np.isfinite(fr) and fr > 0):
        raise FitDiverged("phase fit returned non-finite parameters")
    if span < MIN_LINEWIDTHS * fr / Ql:
        raise InsufficientSpan(
            f"trace spans {span / (fr / Ql):.2f} linewidths, need {MIN_LINEWIDTHS:g}"
        )

    off = center - radius * np.exp(1j * th0)
    if abs(off) == 0:
        raise FitDiverged("off-resonant point at the origin")
    zc_n = center / off
    r_n = radius / abs(off)
    phi = float(np.angle(1 - zc_n))
    Qc = Ql / (2 * r_n)
    # env phase referenced to f[0]; shift reference to fmid for the refinement
    alpha = float(np.angle(off)) - TWO_PI * (fmid - f[0]) * tau

    p0 = np.array([fr / fmid - 1.0, Ql, Qc, phi, tau, abs(off), alpha])

    def resid(p):
        d = _model_vec(p, f, fmid) - z
        return np.concatenate([d.real, d.imag])

    try:
        sol = optimize.least_squares(resid, p0, method="lm", x_scale="jac", max_nfev=5000)
    except ValueError as exc:
        raise FitDiverged(str(exc)) from exc
    if not sol.success or not np.all(np.isfinite(sol.x)):
        raise FitDiverged(f"least squares did not converge: {sol.message}")
    p = sol.x
    fr, Ql, Qc, phi, tau, a, alpha = fmid * (1 + p[0]), p[1], p[2], p[3], p[4], p[5], p[6]
    if Ql <= 0 or Qc == 0 or a == 0:
        raise FitDiverged("refinement produced non-physical Q values")
    if Qc < 0:
        Qc, phi = -Qc, phi + math.pi
    if a < 0:
        a, alpha = -a, alpha + math.pi
    phi = math.remainder(phi, TWO_PI)
    # report the environment phase at f = 0
    alpha = math.remainder(alpha + TWO_PI * fmid * tau, TWO_PI)
    Qi = internal_q(Ql, Qc, phi)

    dof = max(2 * len(f) - len(p), 1)
    s2 = 2 * sol.cost / dof
    try:
        cov = np.linalg.inv(sol.jac.T @ sol.jac) * s2
        se = np.sqrt(np.clip(np.diag(cov), 0, None))
    except np.linalg.LinAlgError:
        se = np.full(len(p), np.nan)
    stderr = {
        "f_r": float(se[0] * fmid), "Q_l": float(se[1]), "Q_c": float(se[2]), "phi": float(se[3]),
        "tau": float(se[4]), "a": float(se[5]), "alpha": float(se[6]),
    }
    return ResonatorFitResult(
        f_r=float(fr), Q_l=float(Ql), Q_c=float(Qc), phi=float(phi), tau=float(tau), a=float(a),
        alpha=float(alpha), Q_i=Qi, stderr=stderr, residual_rms=float(math.sqrt(2 * sol.cost / len(f))),
    )


def synthesize_trace(fit: ResonatorFitResult, f, noise=0.0, rng=None) -> ComplexTrace:
    """Model trace plus additive complex Gaussian noise of std ``noise * a``
    per quadrature."""
    s = notch_model(fit, f)
    if noise:
        rng = np.random.default_rng(rng)
        s = s + noise * fit.a * (rng.standard_normal(len(s)) + 1j * rng.standard_normal(len(s)))
    return ComplexTrace(np.asarray(f, dtype=float), s)


# Rabi-rate and power calibration

@dataclass(frozen=True)
class RabiObservation:
    omega_rabi: float  # rad/s
    power: float  # W at the device
    omega_d: float  # rad/s
    topology: Literal["one-sided", "two-sided"] = "two-sided"

    def __post_init__(self):
        for name in ("omega_rabi", "power", "omega_d"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if self.topology not in ("one-sided", "two-sided"):
            raise InputError(f"unknown topology {self.topology!r}")


def gamma_from_rabi(obs: RabiObservation) -> float:
    """Decay rate into the waveguide (rad/s) from an on-resonance Rabi
    drive through it. A two-sided waveguide only couples half the emitted
    rate back to one input, hence the factor of two between topologies."""
    share = 2.0 if obs.topology == "two-sided" else 4.0
    return obs.omega_rabi**2 / share * HBAR * obs.omega_d / obs.power


def calibrate_power(omega_rabi, omega_q, t1):
    """Drive power at the device assuming the qubit is Purcell limited,
    two-sided feedline."""
    return omega_rabi**2 * HBAR * omega_q * t1 / 2.0


def t1p_lower_bound(gamma_upper):
    """Conservative lifetime bound from an upper bound on the decay rate."""
    if gamma_upper <= 0:
        raise DivisionByZero("decay-rate bound must be positive")
    return 1.0 / gamma_upper
