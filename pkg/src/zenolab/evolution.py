"""Survival amplitudes of the bare states |A> and |B>.

    Amp_X(t) = int e^{-i lam t} rho_X(lam) d lam + sum_j e^{-i Lambda_j t} |mu_X(Lambda_j)|^2

The density is tabulated once on a composite Gauss-Legendre grid whose panels
are short enough to resolve e^{-i lam t} at the largest requested time, and the
same table is reused for every t.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import kernels, spectral
from .errors import ClosureError, DomainError, ResolutionBudgetExceeded

#: Default cap on the number of quadrature panels for one curve.
MAX_PANELS = 200_000
#: Largest tolerated miss of the total spectral weight (P(0) = 1).
CLOSURE_TOL = 1e-6


@dataclass(frozen=True)
class SurvivalCurve:
    initial: str
    times: np.ndarray
    amplitudes: np.ndarray
    probabilities: np.ndarray

    @classmethod
    def from_amplitudes(cls, initial, times, amplitudes):
        amplitudes = np.asarray(amplitudes, dtype=complex)
        return cls(initial, np.asarray(times, dtype=float), amplitudes, np.abs(amplitudes) ** 2)

    def __len__(self):
        return len(self.times)


def _grid_for(params, t_max, max_panels):
    if t_max <= 0:
        return spectral.density_grid(params)
    # bucket t_max to a power of two so nearby requests share one cached grid
    t_cap = 2.0 ** math.ceil(math.log2(t_max))
    max_len = 2 * math.pi / t_cap
    needed = params.omega_max / max_len
    if needed > max_panels:
        raise ResolutionBudgetExceeded(
            f"t={t_max:g} needs ~{needed:.0f} panels to resolve e^(-i lam t); budget is {max_panels}"
        )
    return spectral.density_grid(params, max_len=max_len, max_panels=max_panels)


def spectral_weights(params, initial, t_max=0.0, max_panels=MAX_PANELS):
    """Energies and non-negative weights whose Fourier sum is the survival amplitude."""
    spectral._check_state(initial)
    grid = _grid_for(params, t_max, max_panels)
    bound = spectral.bound_states(params)
    energies = np.concatenate([grid.nodes, [b.Lambda for b in bound]])
    weights = np.concatenate([grid.weights * grid.density(initial),
                              [b.weight(initial) for b in bound]])
    miss = weights.sum() - 1.0
    if abs(miss) > CLOSURE_TOL:
        # e.g. sigma = 0 with a level above threshold: an embedded eigenstate
        # that neither the continuum nor the bound-state sum can carry
        raise ClosureError(
            f"spectral weights of |{initial}> sum to {1 + miss:.9g}, not 1", miss
        )
    return energies, weights


def _phase_sums(params, initial, times, max_panels):
    times = np.asarray(times, dtype=float)
    t_max = float(np.max(np.abs(times))) if times.size else 0.0
    energies, weights = spectral_weights(params, initial, t_max, max_panels)
    total = weights.sum()
    center = np.dot(weights, energies) / total
    re, im, gap = kernels.phase_sums(np.ascontiguousarray(times.ravel()), energies - center, weights)
    return times, center, total, re, im, gap


def _amplitudes(params, initial, times, max_panels=MAX_PANELS):
    times, center, _, re, im, _ = _phase_sums(params, initial, times, max_panels)
    amp = np.exp(-1j * center * times.ravel()) * (re + 1j * im)
    return amp.reshape(times.shape)


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if np.any(~np.isfinite(times)) or np.any(times < 0):
        raise DomainError("times must be finite and >= 0")
    return times


def survival_amplitude(params, initial, t, max_panels=MAX_PANELS):
    """<X| e^{-iHt} |X> for X in {'A', 'B'}."""
    t = _check_times(t)
    out = _amplitudes(params, initial, t, max_panels)
    return out if out.ndim else complex(out)


def survival_curve(params, initial, times, max_panels=MAX_PANELS):
    times = _check_times(times)
    if times.ndim != 1 or np.any(np.diff(times) < 0):
        raise DomainError("times must be a 1-d ascending sequence")
    amp = _amplitudes(params, initial, times, max_panels)
    return SurvivalCurve.from_amplitudes(initial, times, amp)


def survival_probability(params, initial, times, max_panels=MAX_PANELS):
    out = np.abs(survival_amplitude(params, initial, times, max_panels)) ** 2
    return out if np.ndim(out) else float(out)


def survival_deficit(params, initial, times, max_panels=MAX_PANELS):
    """P(0) - P(t), free of the cancellation in 1 - |Amp|^2 at short times.

    Uses |S|^2 - |a|^2 = (S - Re a)(S + Re a) - (Im a)^2 with the phase centred on
    the mean energy, where S - Re a = sum_k c_k 2 sin^2(d_k t / 2) has no
    cancellation.  P(0) is the quadrature's own closure sum squared.
    """
    times = _check_times(times)
    times, _, total, re, im, gap = _phase_sums(params, initial, times, max_panels)
    out = (gap * (total + re) - im * im).reshape(times.shape)
    return out if out.ndim else float(out)


def short_time_exponent(params, initial, window=(1e-3, 1e-2), n=25):
    """Exponent p of 1 - P(t) ~ c t^p from a log-log least-squares fit."""
    lo, hi = window
    for _ in range(6):
        t = np.geomspace(lo, hi, n)
        d = survival_deficit(params, initial, t)
        if np.all(d > 0):
            return float(np.polyfit(np.log(t), np.log(d), 1)[0])
        hi = math.sqrt(lo * hi)
    raise ArithmeticError(f"1 - P(t) is not positive on the short-time window {window}")


def fit_decay_rate(params, initial, window=(5.0, 30.0), n=101):
    """Rate Gamma of a least-squares fit log P(t) = log Z - Gamma t on ``window``."""
    t = np.linspace(window[0], window[1], n)
    p = survival_probability(params, initial, t)
    if np.any(p <= 0):
        raise ArithmeticError("survival probability vanished inside the fit window")
    return float(-np.polyfit(t, np.log(p), 1)[0])
