"""Brute-force check path: a discretised continuum and dense diagonalisation.

The continuum is replaced by N midpoint levels w_k = (k - 1/2) dw with couplings
f(w_k) sqrt(dw), giving a real symmetric (N+2)x(N+2) matrix ordered
[A, B, w_1..w_N].  Nothing here shares code with the spectral route apart from
the form factor itself.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import model
from .errors import DomainError
from .evolution import SurvivalCurve


@dataclass(frozen=True)
class DiscretizedModel:
    params: model.ModelParams
    N: int
    omega_max: float
    grid: np.ndarray
    H: np.ndarray

    @property
    def d_omega(self):
        return self.omega_max / self.N

    @property
    def revival_time(self):
        """Times beyond ~pi/dw are polluted by the finite level spacing."""
        return math.pi / self.d_omega


@dataclass(frozen=True)
class EigenSolution:
    eigenvalues: np.ndarray
    weights_A: np.ndarray
    weights_B: np.ndarray
    vectors: np.ndarray = None

    def weights(self, which):
        if which not in ("A", "B"):
            raise DomainError(f"which must be 'A' or 'B', got {which!r}")
        return self.weights_A if which == "A" else self.weights_B


@dataclass(frozen=True)
class LimitValue:
    """A closed-form limit value plus whether the limit applies to the inputs."""
    value: object
    valid: bool


def build(params, N=4000, omega_max=None):
    if N < 2:
        raise DomainError(f"N must be >= 2, got {N}")
    omega_max = params.omega_max if omega_max is None else float(omega_max)
    if omega_max <= 0:
        raise DomainError("omega_max must be > 0")
    dw = omega_max / N
    w = (np.arange(1, N + 1) - 0.5) * dw
    H = np.zeros((N + 2, N + 2))
    H[0, 0] = params.E_A
    H[1, 1] = params.E_B
    H[0, 1] = H[1, 0] = params.Omega
    c = model.form_factor(params, w) * math.sqrt(dw)
    H[1, 2:] = c
    H[2:, 1] = c
    H[np.arange(2, N + 2), np.arange(2, N + 2)] = w
    return DiscretizedModel(params, N, omega_max, w, H)


def solve(dm, keep_vectors=False):
    """Dense symmetric eigendecomposition, sorted by energy (ties: larger A weight first)."""
    vals, vecs = np.linalg.eigh(dm.H)
    wa = vecs[0] ** 2
    wb = vecs[1] ** 2
    order = np.lexsort((-wa, vals))
    vecs = vecs[:, order] if keep_vectors else None
    return EigenSolution(vals[order], wa[order], wb[order], vecs)


def orthonormality_defect(solution):
    """max |V^T V - I|, the finite analogue of continuum-state orthonormality."""
    if solution.vectors is None:
        raise ValueError("solve(..., keep_vectors=True) is required")
    v = solution.vectors
    gram = v.T @ v
    gram[np.diag_indices_from(gram)] -= 1.0
    return float(np.abs(gram).max())


def matrix_survival(solution, initial, times):
    """P(t) = |sum_j e^{-i E_j t} w_j|^2 for the finite model."""
    times = np.asarray(times, dtype=float)
    w = solution.weights(initial)
    amp = np.exp(-1j * np.outer(times, solution.eigenvalues)) @ w
    return SurvivalCurve.from_amplitudes(initial, times, amp)


def bound_weights(solution, which):
    """(eigenvalue, weight) pairs for eigenvalues below threshold."""
    below = solution.eigenvalues < 0
    return solution.eigenvalues[below], solution.weights(which)[below]


def rabi_closed_form(params, t):
    """Two-level survival 1 - Omega^2/(Omega^2+D^2) sin^2(sqrt(Omega^2+D^2) t), D=(E_B-E_A)/2.

    Exact only when the continuum is decoupled (sigma = 0).
    """
    t = np.asarray(t, dtype=float)
    delta = 0.5 * (params.E_B - params.E_A)
    rabi = math.hypot(params.Omega, delta)
    if rabi == 0:
        p = np.ones_like(t)
    else:
        p = 1.0 - (params.Omega / rabi) ** 2 * np.sin(rabi * t) ** 2
    return LimitValue(p if p.ndim else float(p), params.sigma == 0)


def golden_rule_rate(params):
    """Fermi golden-rule decay rate 2 pi |f(E_B)|^2 of |B>.

    Flagged invalid unless the coupling is weak against the form-factor width
    (pi sigma^2 <= mu / 10) and E_B lies inside the continuum.
    """
    inside = 0 < params.E_B < params.omega_max
    rate = 2 * math.pi * model.coupling_density(params, params.E_B) if inside else 0.0
    valid = inside and math.pi * params.sigma ** 2 <= 0.1 * params.mu
    return LimitValue(float(rate), valid)
