"""Measurement-interrupted evolution and Zeno / anti-Zeno classification.

A measurement resets the state onto the initial bare state without
renormalising it.  By linearity, after k resets spaced by tau the amplitude of
the initial state is Amp(tau)^k, and between resets it continues as
Amp(tau)^k Amp(s).
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import brentq

from . import evolution
from .errors import DomainError

ZENO = "Zeno"
ANTI_ZENO = "anti-Zeno"
NEUTRAL = "neutral"

#: Default probability margin separating Zeno / anti-Zeno from neutral.
MARGIN_THRESHOLD = 1e-3


@dataclass(frozen=True)
class MeasurementSchedule:
    tau: float
    n: int

    def __post_init__(self):
        if not (self.tau > 0 and math.isfinite(self.tau)):
            raise DomainError(f"tau must be > 0, got {self.tau}")
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be a positive integer, got {self.n}")

    @property
    def total(self):
        return self.n * self.tau


@dataclass(frozen=True)
class ZenoVerdict:
    tau: float
    n: int
    P_measured: float
    P_unmeasured: float
    classification: str
    margin: float

    @property
    def gamma_eff(self):
        return -math.log(self.P_measured) / (self.n * self.tau)


def classify(p_measured, p_unmeasured, threshold=MARGIN_THRESHOLD):
    diff = p_measured - p_unmeasured
    if diff > threshold:
        return ZENO
    if diff < -threshold:
        return ANTI_ZENO
    return NEUTRAL


def interrupted_curve(params, initial, schedule, samples_per_interval=0):
    """Effective survival curve with instantaneous resets every tau.

    The reset is applied literally: the carried amplitude is multiplied by
    Amp(tau) once per interval.  Sampled points are k tau for k = 0..n, plus
    ``samples_per_interval`` evenly spaced interior points per interval.
    """
    tau, n = schedule.tau, schedule.n
    s = np.linspace(0.0, tau, samples_per_interval + 2)[1:-1]
    amps = evolution.survival_amplitude(params, initial, np.append(s, tau))
    inner, a_tau = amps[:-1], amps[-1]

    times = [0.0]
    values = [1.0 + 0j]
    carried = 1.0 + 0j
    for k in range(n):
        times.extend(k * tau + s)
        values.extend(carried * inner)
        carried = carried * a_tau
        times.append((k + 1) * tau)
        values.append(carried)
    return evolution.SurvivalCurve.from_amplitudes(initial, times, values)


def interrupted_probability(params, initial, tau, times):
    """P_eff(t) = P(tau)^k P(t - k tau) with k = floor(t / tau), for plotting grids."""
    times = np.asarray(times, dtype=float)
    k = np.floor(times / tau + 1e-12)
    rest = np.clip(times - k * tau, 0.0, None)
    p = evolution.survival_probability(params, initial, np.append(rest, tau))
    return p[-1] ** k * p[:-1]


def effective_rate(params, initial, tau):
    """Gamma_eff(tau) = -ln P(tau) / tau, so that P_measured(n tau) = exp(-Gamma_eff n tau)."""
    if not tau > 0:
        raise DomainError(f"tau must be > 0, got {tau}")
    p = evolution.survival_probability(params, initial, tau)
    if not p > 0:
        raise ArithmeticError(f"P(tau={tau}) = {p} is not positive")
    return -math.log(min(p, 1.0)) / tau


def decay_time(params, initial, level=math.exp(-1), t_start=1.0, t_limit=1e4):
    """First time the unmeasured survival probability falls to ``level``."""
    f = lambda t: evolution.survival_probability(params, initial, t) - level
    lo, hi = 0.0, t_start
    while f(hi) > 0:
        lo, hi = hi, 2 * hi
        if hi > t_limit:
            raise ArithmeticError(f"P stays above {level} up to t={t_limit}")
    ts = np.linspace(lo, hi, 65)
    ps = evolution.survival_probability(params, initial, ts) - level
    i = int(np.argmax(ps <= 0))
    return brentq(f, ts[i - 1], ts[i], xtol=1e-12)


def default_horizon(params, initial):
    return 3.0 * decay_time(params, initial)


def tau_scan(params, initial, tau_grid=None, T=None, threshold=MARGIN_THRESHOLD):
    """Compare P(tau)^n with the unmeasured P(T) for each tau.

    Each tau is snapped to T / n with n = round(T / tau) >= 1, so that both
    curves are compared at exactly the same elapsed time T.  The default grid is
    50 log-spaced points on [1e-2, T/2] and T defaults to three 1/e times.
    """
    if T is None:
        T = default_horizon(params, initial)
    if tau_grid is None:
        tau_grid = np.geomspace(1e-2, T / 2, 50)
    tau_grid = np.asarray(tau_grid, dtype=float)
    if np.any(tau_grid <= 0) or np.any(np.diff(tau_grid) <= 0):
        raise DomainError("tau_grid must be positive and strictly ascending")
    ns = np.maximum(1, np.rint(T / tau_grid)).astype(int)
    taus = T / ns
    p = evolution.survival_probability(params, initial, np.append(taus, T))
    p_tau, p_T = p[:-1], float(p[-1])
    out = []
    for tau, n, pt in zip(taus, ns, p_tau):
        pm = float(pt) ** int(n)
        out.append(ZenoVerdict(float(tau), int(n), pm, p_T, classify(pm, p_T, threshold), pm - p_T))
    return out


def find_inflection(params, initial, t_window, n=4001):
    """First sign change of the second difference of P(t) inside ``t_window``.

    Returns the linearly interpolated crossing time, or None when the curve has
    no inflection in the window.
    """
    t0, t1 = t_window
    if not 0 <= t0 < t1:
        raise DomainError(f"bad window {t_window}")
    t = np.linspace(t0, t1, n)
    p = evolution.survival_probability(params, initial, t)
    d2 = p[2:] - 2 * p[1:-1] + p[:-2]
    s = np.sign(d2)
    idx = np.nonzero(s[1:] * s[:-1] < 0)[0]
    if not len(idx):
        return None
    i = idx[0]
    frac = d2[i] / (d2[i] - d2[i + 1])
    return float(t[i + 1] + frac * (t[1] - t[0]))
