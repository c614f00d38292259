"""Continuum spectral densities, bound states, resonance estimates and closure sums.

Densities are written in pole-safe form with D(lam) = (lam - E_A) beta+(lam):

    |mu_A|^2 = g Omega^2 / |D|^2
    |mu_B|^2 = g (lam - E_A)^2 / |D|^2
    conj(mu_A) mu_B = g Omega (lam - E_A) / |D|^2

so nothing is ever divided by (lam - E_A).
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels, model
from .errors import BoundStateSearchError, ClosureError, DomainError, ResolutionBudgetExceeded

STATES = ("A", "B")


def _check_state(which):
    if which not in STATES:
        raise DomainError(f"initial/which must be 'A' or 'B', got {which!r}")


@dataclass(frozen=True)
class ContinuumAmplitudes:
    lam: float
    mu_A: complex
    mu_B: complex


@dataclass(frozen=True)
class BoundState:
    Lambda: float
    norm: float
    mu_A: float
    mu_B: float
    residual: float

    def weight(self, which):
        _check_state(which)
        return (self.mu_A if which == "A" else self.mu_B) ** 2


@dataclass(frozen=True)
class PoleEstimate:
    center: float
    width: float
    approximate: bool = True

    @property
    def value(self):
        # decaying branch: negative imaginary part
        return complex(self.center, -self.width)


def _densities(params, lam):
    """Return (rho_A, rho_B, cross) on an array of continuum energies."""
    lam = np.asarray(lam, dtype=float)
    g = model.coupling_density(params, lam)
    s = model.self_energy(params, lam)
    inner = lam - params.E_B - s + 1j * np.pi * g
    if params.Omega == 0.0:
        rho_b = g / np.abs(inner) ** 2
        zero = np.zeros_like(lam)
        return zero, rho_b, zero
    d = lam - params.E_A
    den = np.abs(d * inner - params.Omega ** 2) ** 2
    return g * params.Omega ** 2 / den, g * d * d / den, g * params.Omega * d / den


def density_A(params, lam):
    """|<A|psi_lam>|^2, finite through lam = E_A."""
    lam = model._check_continuum(params, lam)
    out = _densities(params, lam)[0]
    return out if np.ndim(out) else float(out)


def density_B(params, lam):
    lam = model._check_continuum(params, lam)
    out = _densities(params, lam)[1]
    return out if np.ndim(out) else float(out)


def continuum_amplitudes(params, lam):
    """Bare components (mu_A, mu_B) of the 'in' continuum state at energy lam."""
    lam = float(model._check_continuum(params, lam))
    f = model.form_factor(params, lam)
    if params.Omega == 0.0:
        inner = lam - params.E_B - model.self_energy(params, lam) + 1j * np.pi * f * f
        return ContinuumAmplitudes(lam, 0j, complex(f / inner))
    d = lam - params.E_A
    prod = model.pole_product(params, lam)
    return ContinuumAmplitudes(lam, complex(f * params.Omega / prod), complex(f * d / prod))


# -- bound states -----------------------------------------------------------

def _polish(params, a, b, fa, tol):
    """Safeguarded Newton on an increasing bracket [a, b] with beta(a) < 0 < beta(b)."""
    x = 0.5 * (a + b)
    for _ in range(200):
        fx = model.beta_real(params, x)
        if fx == 0.0:
            return x
        if fx < 0:
            a = x
        else:
            b = x
        step = fx / model.beta_prime(params, x)
        xn = x - step
        if not a < xn < b:
            xn = 0.5 * (a + b)
        if abs(xn - x) <= tol * max(1.0, abs(x)) or b - a <= 4e-16 * max(1.0, abs(x)):
            return xn
        x = xn
    raise BoundStateSearchError(f"root polish did not converge in [{a}, {b}]")


def find_bound_states(params, lam_min=-50.0, n_grid=400, lam_max=-1e-6):
    """All real roots of beta below threshold, with their normalisation.

    beta is strictly increasing on each side of the A pole, so sign changes on
    a log-spaced grid (with E_A +- delta inserted and never bracketed) catch
    every root.  ``lam_min`` is first pushed below
    min(E_A, E_B) - Omega - int g/w - 1, where beta is provably negative; an
    unexpected positive beta(lam_min) still widens the search.
    """
    s0 = -model.self_energy(params, 0.0)
    lam_min = min(lam_min, min(params.E_A, params.E_B) - params.Omega - s0 - 1.0)
    for _ in range(8):
        b_min = model.beta_real(params, lam_min)
        if b_min < 0:
            break
        lam_min *= 2.0
    else:
        raise BoundStateSearchError(f"beta(lam_min={lam_min}) is still positive after widening")

    grid = -np.geomspace(-lam_min, -lam_max, n_grid)
    ea = params.E_A
    pole = lam_min < ea < lam_max
    if pole:
        delta = 1e-9 * max(1.0, abs(ea))
        grid = np.sort(np.concatenate([grid[np.abs(grid - ea) > 2 * delta], [ea - delta, ea + delta]]))
    vals = model.beta_real(params, grid)

    tol = min(params.eps_tol, 1e-12)
    roots = []
    for i in range(len(grid) - 1):
        a, b = grid[i], grid[i + 1]
        if pole and a < ea < b:
            continue
        if vals[i] < 0 < vals[i + 1] or vals[i] == 0:
            if vals[i] == 0:
                lam = a
            else:
                lam = _polish(params, a, b, vals[i], tol)
            bp = model.beta_prime(params, lam)
            norm = 1.0 / np.sqrt(bp)
            mu_a = norm * params.Omega / (lam - ea)
            roots.append(BoundState(float(lam), float(norm), float(mu_a), float(norm),
                                    float(abs(model.beta_real(params, lam)))))
    if vals[-1] < 0 and not lam_max < ea <= 0:
        b0 = -params.E_B + params.Omega ** 2 / ea - model.self_energy(params, 0.0)
        if b0 > 0:
            raise BoundStateSearchError(
                f"bound state lies within {-lam_max:g} of threshold; refine lam_max"
            )
    return roots


def pole_estimates(params):
    """Weak-coupling resonance estimates E - i pi |f(E)|^2 at E_A and E_B."""
    if params.E_A <= 0 or params.E_B <= 0:
        raise DomainError("pole estimates need E_A, E_B > 0 (embedded levels)")
    return tuple(
        PoleEstimate(e, float(np.pi * model.coupling_density(params, e)))
        for e in (params.E_A, params.E_B)
    )


# -- adaptive density grid ----------------------------------------------------

@dataclass(frozen=True)
class DensityGrid:
    """Composite Gauss-Legendre grid on the continuum with stored densities."""
    edges: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    rho_A: np.ndarray
    rho_B: np.ndarray
    cross: np.ndarray

    def density(self, which):
        _check_state(which)
        return self.rho_A if which == "A" else self.rho_B

    @property
    def n_panels(self):
        return len(self.edges) - 1


def _panel_nodes(a, b):
    a = np.asarray(a)[:, None]
    b = np.asarray(b)[:, None]
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * kernels.GL_NODES, half * kernels.GL_WEIGHTS


def _seed_edges(params):
    lo, hi = model.LAMBDA_MIN, params.omega_max
    pts = {lo, hi, params.omega_0}
    for e in (params.E_A, params.E_B):
        if lo < e < hi:
            pts.add(e)
            w = max(np.pi * model.coupling_density(params, e), 1e-4)
            for k in range(-3, 6):
                for s in (-1, 1):
                    x = e + s * w * 2.0 ** k
                    if lo < x < hi:
                        pts.add(x)
    return np.array(sorted(pts))


def _evaluate_panels(params, a, b):
    x, w = _panel_nodes(a, b)
    rho = _densities(params, x.ravel())
    return x, w, [r.reshape(x.shape) for r in rho]


def build_density_grid(params, max_panels=200_000, max_len=None):
    """Adaptively refine panels until each of the three density integrals converges.

    A panel is accepted once its 16-point value agrees with the sum over its two
    halves to within eps_tol times its share of the continuum.  ``max_len`` caps
    panel length (used to resolve oscillatory factors later).
    """
    span = params.omega_max - model.LAMBDA_MIN
    tol = params.eps_tol
    seed = _seed_edges(params)
    if max_len is not None:
        pieces = []
        for a, b in zip(seed[:-1], seed[1:]):
            k = max(1, int(np.ceil((b - a) / max_len)))
            pieces.append(np.linspace(a, b, k + 1)[:-1])
        seed = np.append(np.concatenate(pieces), seed[-1])
    if len(seed) - 1 > max_panels:
        raise ResolutionBudgetExceeded(
            f"{len(seed) - 1} panels needed, budget is {max_panels}"
        )

    a, b = seed[:-1], seed[1:]
    x, w, rho = _evaluate_panels(params, a, b)
    acc = {"a": [], "b": [], "x": [], "w": [], "rho": [[], [], []]}
    depth = 0
    while len(a):
        whole = np.stack([(r * w).sum(axis=1) for r in rho])
        m = 0.5 * (a + b)
        lx, lw, lrho = _evaluate_panels(params, a, m)
        rx, rw, rrho = _evaluate_panels(params, m, b)
        halves = np.stack([(lr * lw).sum(axis=1) + (rr * rw).sum(axis=1)
                           for lr, rr in zip(lrho, rrho)])
        err = np.abs(whole - halves).max(axis=0)
        ok = (err <= tol * (b - a) / span) | (b - a < 1e-12) | (depth > 40)
        acc["a"].append(a[ok])
        acc["b"].append(b[ok])
        acc["x"].append(x[ok])
        acc["w"].append(w[ok])
        for k in range(3):
            acc["rho"][k].append(rho[k][ok])
        bad = ~ok
        a = np.concatenate([a[bad], m[bad]])
        b = np.concatenate([m[bad], b[bad]])
        x = np.concatenate([lx[bad], rx[bad]])
        w = np.concatenate([lw[bad], rw[bad]])
        rho = [np.concatenate([lr[bad], rr[bad]]) for lr, rr in zip(lrho, rrho)]
        depth += 1
        total = sum(len(v) for v in acc["a"]) + len(a)
        if total > max_panels:
            raise ResolutionBudgetExceeded(f"density grid exceeds {max_panels} panels")

    left = np.concatenate(acc["a"])
    order = np.argsort(left)
    cat = lambda parts: np.concatenate(parts)[order].ravel()
    edges = np.append(left[order], np.concatenate(acc["b"])[order][-1])
    return DensityGrid(
        edges=edges,
        nodes=cat(acc["x"]),
        weights=cat(acc["w"]),
        rho_A=cat(acc["rho"][0]),
        rho_B=cat(acc["rho"][1]),
        cross=cat(acc["rho"][2]),
    )


@lru_cache(maxsize=32)
def density_grid(params, max_len=None, max_panels=200_000):
    return build_density_grid(params, max_panels=max_panels, max_len=max_len)


@lru_cache(maxsize=32)
def bound_states(params):
    return tuple(find_bound_states(params))


# -- completeness checks ------------------------------------------------------

def closure_sum(params, which, include_bound=True, check=True):
    """<X|X> expanded over the physical basis; should be 1.

    With ``check`` (and bound terms included) a miss larger than 100 eps_tol
    raises :class:`ClosureError` carrying the residual.
    """
    _check_state(which)
    grid = density_grid(params)
    total = float(np.dot(grid.weights, grid.density(which)))
    if include_bound:
        total += sum(bs.weight(which) for bs in bound_states(params))
        if check and abs(total - 1.0) > 100 * params.eps_tol:
            raise ClosureError(f"closure sum for {which} is {total!r}", total - 1.0)
    return total


def cross_sum(params, check=True):
    """<A|B> expanded over the physical basis; should be 0."""
    grid = density_grid(params)
    total = complex(np.dot(grid.weights, grid.cross))
    total += sum(bs.mu_A * bs.mu_B for bs in bound_states(params))
    if check and abs(total) > 100 * params.eps_tol:
        raise ClosureError(f"cross sum is {total!r}", total)
    return total
