"""Model parameters, form factor and the resolvent function beta.

    beta(z) = z - E_B - Omega^2 / (z - E_A) - int_0^wmax g(w) / (z - w) dw,   g = f^2

On the continuum (0 < lam < wmax) the +i0 boundary value is assembled from the
Sokhotski-Plemelj split, so no small imaginary shift is ever used numerically:

    beta+(lam) = lam - E_B - Omega^2 / (lam - E_A) - PV(lam) + i pi g(lam)
"""
from dataclasses import dataclass, fields
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DomainError, PoleError

#: Smallest continuum energy accepted by public functions (avoids 0 * log 0).
LAMBDA_MIN = 1e-8


@dataclass(frozen=True)
class ModelParams:
    E_A: float
    E_B: float
    Omega: float
    sigma: float
    mu: float
    omega_0: float
    omega_max: float = 10.0
    eps_tol: float = 1e-9

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not np.isfinite(v):
                raise DomainError(f"{f.name} must be finite, got {v!r}")
        if self.mu <= 0:
            raise DomainError(f"mu must be > 0, got {self.mu}")
        if self.sigma < 0:
            raise DomainError(f"sigma must be >= 0, got {self.sigma}")
        if self.omega_0 <= 0:
            raise DomainError(f"omega_0 must be > 0, got {self.omega_0}")
        if self.Omega < 0:
            raise DomainError(f"Omega must be >= 0 (phase is unobservable), got {self.Omega}")
        if self.omega_max <= self.omega_0 + 20 * self.mu:
            raise DomainError(
                f"omega_max must exceed omega_0 + 20 mu = {self.omega_0 + 20 * self.mu}, "
                f"got {self.omega_max}"
            )
        if self.eps_tol <= 0:
            raise DomainError(f"eps_tol must be > 0, got {self.eps_tol}")

    @classmethod
    def reference(cls, **overrides):
        """The unstable two-level parameter set (E_A=2.00, E_B=2.10, ...)."""
        base = dict(E_A=2.00, E_B=2.10, Omega=0.04, sigma=0.11, mu=0.30, omega_0=2.10)
        base.update(overrides)
        return cls(**base)

    def replace(self, **changes):
        kw = {f.name: getattr(self, f.name) for f in fields(self)}
        kw.update(changes)
        return type(self)(**kw)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _g(params, w):
    return kernels.g_numpy(w, params.sigma, params.mu, params.omega_0)


def form_factor(params, omega):
    """f(w) = sigma mu^2 sqrt(w) / ((w - w0)^2 + mu^2)."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise DomainError("form factor is defined for finite omega >= 0")
    out = params.sigma * params.mu ** 2 * np.sqrt(w) / ((w - params.omega_0) ** 2 + params.mu ** 2)
    return out if out.ndim else float(out)


def coupling_density(params, omega):
    """|f(w)|^2, the spectral weight of the B-continuum coupling."""
    return form_factor(params, omega) ** 2


def truncation_tail(params):
    """Upper bound on int_{wmax}^inf |f|^2 dw from the Lorentzian envelope."""
    x = params.omega_max - params.omega_0
    s = params.sigma ** 2 * params.mu ** 4
    return s * (0.5 / x ** 2 + params.omega_0 / (3 * x ** 3))


def _gl_panel(fun, a, b):
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * kernels.GL_NODES
    return half * np.dot(kernels.GL_WEIGHTS, fun(x))


@lru_cache(maxsize=64)
def omega_edges(params):
    """Adaptive panel edges on [0, wmax] for integrals against |f|^2.

    Starts from breaks at 0, omega_0 +- mu, omega_0 and wmax and bisects any panel
    whose Gauss-Legendre value disagrees with the sum over its halves.
    """
    g = lambda x: _g(params, x)
    w0, mu, wmax = params.omega_0, params.mu, params.omega_max
    start = sorted({0.0, max(w0 - mu, 0.5 * w0), w0, w0 + mu, wmax})
    tol = 0.01 * params.eps_tol / wmax
    max_len = 0.5 * mu
    todo = list(zip(start[:-1], start[1:]))
    done = []
    while todo:
        a, b = todo.pop()
        m = 0.5 * (a + b)
        whole = _gl_panel(g, a, b)
        split = _gl_panel(g, a, m) + _gl_panel(g, m, b)
        if (b - a > max_len or abs(whole - split) > tol * (b - a)) and b - a > 1e-6:
            todo += [(a, m), (m, b)]
        else:
            done.append(a)
    return np.array(sorted(done) + [wmax])


def _kernel_args(params):
    return (
        omega_edges(params), kernels.GL_NODES, kernels.GL_WEIGHTS,
        params.sigma, params.mu, params.omega_0, params.omega_max,
    )


def self_energy(params, lam):
    """PV int_0^wmax |f(w)|^2 / (lam - w) dw for any real lam not in {0, wmax}.

    Inside the continuum this is the singularity-subtracted principal value
    (g(w) - g(lam)) / (lam - w) plus g(lam) ln(lam / (wmax - lam)); outside it is
    an ordinary integral.
    """
    lam = np.asarray(lam, dtype=float)
    out = kernels.hilbert(np.atleast_1d(lam).ravel(), *_kernel_args(params))
    return out.reshape(lam.shape) if lam.ndim else float(out[0])


def _check_continuum(params, lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(~np.isfinite(lam)) or np.any(lam < LAMBDA_MIN) or np.any(lam >= params.omega_max):
        raise DomainError(
            f"continuum energy must lie in [{LAMBDA_MIN}, {params.omega_max}), got {lam}"
        )
    return lam


def pv_integral(params, lam):
    """Principal value P int_0^wmax |f(w)|^2 / (lam - w) dw on the continuum."""
    return self_energy(params, _check_continuum(params, lam))


def beta_plus(params, lam):
    """Boundary value beta(lam + i0) on the continuum (complex)."""
    lam = _check_continuum(params, lam)
    if np.any(lam == params.E_A):
        raise PoleError("beta+ has a pole at E_A; use the pole-safe densities")
    pv = self_energy(params, lam)
    re = lam - params.E_B - params.Omega ** 2 / (lam - params.E_A) - pv
    return re + 1j * np.pi * _g(params, lam)


def beta_minus(params, lam):
    return np.conj(beta_plus(params, lam))


def _check_below(params, lam):
    lam = np.asarray(lam, dtype=float)
    if np.any(~np.isfinite(lam)) or np.any(lam >= 0):
        raise DomainError(f"beta_real is defined below threshold (lam < 0), got {lam}")
    if np.any(lam == params.E_A):
        raise PoleError("beta has a pole at E_A")
    return lam


def beta_real(params, lam):
    """Real beta(lam) below threshold, where the integral is regular."""
    lam = _check_below(params, lam)
    return lam - params.E_B - params.Omega ** 2 / (lam - params.E_A) - self_energy(params, lam)


def beta_prime(params, lam):
    """d beta / d lam below threshold: 1 + Omega^2/(lam-E_A)^2 + int g/(lam-w)^2."""
    lam = _check_below(params, lam)
    sq = kernels.resolvent_sq(np.atleast_1d(lam).ravel(), *_kernel_args(params))
    out = 1.0 + params.Omega ** 2 / (lam - params.E_A) ** 2 + sq.reshape(lam.shape)
    return out if lam.ndim else float(out)


def pole_product(params, lam):
    """(lam - E_A) beta+(lam), finite at lam = E_A where it equals -Omega^2."""
    lam = _check_continuum(params, lam)
    pv = self_energy(params, lam)
    inner = lam - params.E_B - pv + 1j * np.pi * _g(params, lam)
    return (lam - params.E_A) * inner - params.Omega ** 2
