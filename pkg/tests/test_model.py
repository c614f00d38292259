import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from zenolab import (
    DomainError,
    ModelParams,
    PoleError,
    beta_minus,
    beta_plus,
    beta_real,
    form_factor,
    pv_integral,
)
from zenolab.model import coupling_density, truncation_tail

# Frozen reference values.  Each was produced once by a route that shares no
# code with the package:
#   F_AT_1         mpmath, 40 digits, straight from the closed form
#   PV_AT_2_1      scipy QUADPACK Cauchy-weight rule (epsrel 1e-13); an mpmath
#                  subtraction at 40 digits agrees to 1e-17
#   BETA_PLUS_AT_1 mpmath beta(1 + i d), d = 1e-3, 1e-4, 1e-5, two Richardson
#                  steps to d -> 0
#   BETA_STABLE_M3 scipy quad of the regular integral, E_A = E_B = -1, lam = -3
F_AT_1 = 0.0076153846153846137538
PV_AT_2_1 = -0.0057010435754079312704
BETA_PLUS_AT_1 = complex(-1.087206569339426, 0.0001821937845905466)
BETA_STABLE_M3 = -1.9968626435311179


def g_ref(p, w):
    return (p.sigma * p.mu ** 2 * math.sqrt(w) / ((w - p.omega_0) ** 2 + p.mu ** 2)) ** 2


class TestParams:
    def test_defaults(self, unstable):
        assert unstable.omega_max == 10.0
        assert unstable.eps_tol == 1e-9

    @pytest.mark.parametrize("bad", [
        dict(mu=0.0), dict(mu=-0.3), dict(sigma=-0.1), dict(omega_0=0.0),
        dict(Omega=-0.04), dict(omega_max=8.0), dict(E_A=float("nan")),
        dict(eps_tol=0.0), dict(sigma=float("inf")),
    ])
    def test_invalid(self, bad):
        with pytest.raises(DomainError):
            ModelParams.reference(**bad)

    def test_replace_revalidates(self, unstable):
        with pytest.raises(DomainError):
            unstable.replace(mu=0.5)  # omega_0 + 20 mu = 12.1 > omega_max
        assert unstable.replace(E_A=1.0).E_A == 1.0

    def test_hashable(self, unstable):
        assert hash(unstable) == hash(ModelParams.reference())


class TestFormFactor:
    def test_zero_at_threshold(self, unstable):
        assert form_factor(unstable, 0.0) == 0.0

    def test_peak_value(self, unstable):
        assert form_factor(unstable, 2.10) == pytest.approx(0.11 * math.sqrt(2.10), rel=1e-15)

    def test_reference_value(self, unstable):
        assert form_factor(unstable, 1.0) == pytest.approx(F_AT_1, rel=1e-14)

    def test_negative_omega(self, unstable):
        with pytest.raises(DomainError):
            form_factor(unstable, -1e-12)
        with pytest.raises(DomainError):
            form_factor(unstable, [1.0, -1.0])

    def test_vectorised(self, unstable):
        w = np.linspace(0, 10, 7)
        assert np.allclose(form_factor(unstable, w), [form_factor(unstable, x) for x in w])

    def test_decays(self, unstable):
        assert form_factor(unstable, 1e4) < 1e-6 * form_factor(unstable, unstable.omega_0)

    @settings(max_examples=60, deadline=None)
    @given(
        sigma=st.floats(0.0, 2.0),
        mu=st.floats(0.01, 0.4),
        w0=st.floats(0.2, 1.5),
    )
    def test_peak_and_envelope(self, sigma, mu, w0):
        p = ModelParams(1.0, 1.0, 0.0, sigma, mu, w0)
        w = np.linspace(0.0, 10.0, 200001)
        f = form_factor(p, w)
        assert np.all(f >= 0)
        assert np.all(f <= sigma * np.sqrt(w) * (1 + 1e-12))
        if sigma > 1e-200:  # subnormal sigma underflows f to 0
            peak = w[np.argmax(f)]
            assert w0 - mu < peak < w0 + mu

    def test_truncation_tail_is_a_bound(self, unstable):
        tail = quad(lambda w: g_ref(unstable, w), unstable.omega_max, np.inf, epsabs=1e-16)[0]
        assert tail <= truncation_tail(unstable) < 2 * tail


class TestPrincipalValue:
    def test_far_below_support(self, unstable):
        v = pv_integral(unstable, 1e-6)
        direct = -quad(lambda w: g_ref(unstable, w) / w, 0, unstable.omega_max, points=[2.1], limit=200)[0]
        assert v < 0
        assert v == pytest.approx(direct, rel=1e-6)

    def test_reference_value(self, unstable):
        assert abs(pv_integral(unstable, 2.10) - PV_AT_2_1) <= unstable.eps_tol

    def test_against_cauchy_rule(self, unstable):
        for lam in (0.05, 0.7, 1.9, 2.0, 2.37, 5.0, 9.5):
            ref = -quad(lambda w: g_ref(unstable, w), 0, unstable.omega_max, weight="cauchy",
                        wvar=lam, epsabs=1e-14, epsrel=1e-12, limit=500)[0]
            assert abs(pv_integral(unstable, lam) - ref) <= unstable.eps_tol

    @pytest.mark.parametrize("lam", [0.0, 5e-9, -1.0, 10.0, 11.0, float("nan")])
    def test_domain(self, unstable, lam):
        with pytest.raises(DomainError):
            pv_integral(unstable, lam)

    def test_smooth(self, unstable):
        # d/dlam PV int g/(lam-w) = g(W)/(W-lam) + PV int g'(w)/(lam-w)
        s2m4 = (unstable.sigma * unstable.mu ** 2) ** 2
        w0, mu, W = unstable.omega_0, unstable.mu, unstable.omega_max

        def dg(w):
            d = (w - w0) ** 2 + mu ** 2
            return s2m4 * (1 / d ** 2 - 4 * w * (w - w0) / d ** 3)

        h = 1e-4
        for lam in np.linspace(0.3, 6.0, 12):
            fd = (pv_integral(unstable, lam + h) - pv_integral(unstable, lam - h)) / (2 * h)
            ref = g_ref(unstable, W) / (W - lam) - quad(
                dg, 0, W, weight="cauchy", wvar=lam, epsabs=1e-13, limit=500)[0]
            assert fd == pytest.approx(ref, abs=1e-6)


class TestBetaPlus:
    def test_plemelj_imaginary_part(self, unstable):
        lam = np.linspace(0.01, 9.99, 100)
        lam = lam[lam != unstable.E_A]
        im = np.imag(beta_plus(unstable, lam))
        assert np.allclose(im, np.pi * form_factor(unstable, lam) ** 2, rtol=1e-14, atol=0)

    def test_conjugate_pair(self, unstable):
        lam = np.linspace(0.1, 9.0, 31)
        assert np.array_equal(np.conj(beta_plus(unstable, lam)), beta_minus(unstable, lam))

    def test_against_off_axis_limit(self, unstable):
        assert abs(beta_plus(unstable, 1.0) - BETA_PLUS_AT_1) <= 10 * unstable.eps_tol

    def test_pole(self, unstable):
        with pytest.raises(PoleError):
            beta_plus(unstable, unstable.E_A)
        assert np.isfinite(beta_plus(unstable, unstable.E_A + 1e-9))

    @settings(max_examples=40, deadline=None)
    @given(lam=st.floats(1e-8, 9.999))
    def test_finite(self, unstable, lam):
        if lam != unstable.E_A:
            assert np.isfinite(beta_plus(unstable, lam))


class TestBetaReal:
    def test_asymptote(self, unstable):
        for lam in (-1e3, -1e5, -1e7):
            assert beta_real(unstable, lam) / lam == pytest.approx(1.0, abs=10 / abs(lam))

    def test_reference_value(self, stable):
        assert beta_real(stable, -3.0) == pytest.approx(BETA_STABLE_M3, abs=stable.eps_tol)

    def test_no_coupling_term_when_omega_zero(self, single):
        for lam in (-0.01, -2.0, -20.0):
            integral = quad(lambda w: g_ref(single, w) / (lam - w), 0, single.omega_max,
                            points=[2.1], epsabs=1e-14, limit=200)[0]
            assert beta_real(single, lam) == pytest.approx(lam - single.E_B - integral, abs=1e-12)

    @pytest.mark.parametrize("lam", [0.0, 0.5, float("inf")])
    def test_domain(self, unstable, lam):
        with pytest.raises(DomainError):
            beta_real(unstable, lam)

    def test_pole(self, stable):
        with pytest.raises(PoleError):
            beta_real(stable, -1.0)

    def test_increasing_between_poles(self, stable):
        left = np.linspace(-10, -1.001, 200)
        right = np.linspace(-0.999, -1e-6, 200)
        assert np.all(np.diff(beta_real(stable, left)) > 0)
        assert np.all(np.diff(beta_real(stable, right)) > 0)


def test_coupling_density_is_square(unstable):
    w = np.linspace(0, 10, 11)
    assert np.array_equal(coupling_density(unstable, w), form_factor(unstable, w) ** 2)
