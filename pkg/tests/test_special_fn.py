import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from apoint_lab.errors import CapacityError, DomainError, PoleError, PrecisionWarning
from apoint_lab.special_fn import (bessel_j0, hardy_z, lambert_w0, primes_up_to,
                                   riemann_siegel_theta, theta_derivative, zeta)

mp.mp.dps = 30


def mp_theta_raw(t):
    t = mp.mpf(t)
    return mp.im(mp.loggamma(mp.mpf(1) / 4 + 1j * t / 2)) - t / 2 * mp.log(mp.pi)


def mp_theta(t):
    return float(mp_theta_raw(t))


class TestTheta:
    def test_zero(self):
        assert riemann_siegel_theta(0.0) == 0.0

    def test_odd_at_25(self):
        assert riemann_siegel_theta(-25.0) == -riemann_siegel_theta(25.0)

    @pytest.mark.parametrize("t", [0.5, 3.0, 9.99, 10.0, 50.0, 100.0, 1e4, 1e6])
    def test_against_loggamma_oracle(self, t):
        assert abs(riemann_siegel_theta(t) - mp_theta(t)) <= 1e-9 * max(1.0, abs(mp_theta(t)) / 1e6)

    def test_odd_on_grid(self):
        t = np.linspace(10, 1e4, 2001)
        assert np.max(np.abs(riemann_siegel_theta(-t) + riemann_siegel_theta(t))) <= 1e-10

    def test_array_shape_preserved(self):
        t = np.array([[10.0, 20.0], [30.0, 40.0]])
        assert riemann_siegel_theta(t).shape == (2, 2)


class TestThetaDerivative:
    def test_half_at_two_pi_e(self):
        t = 2 * math.pi * math.e
        # asymptotic correction term is -1/(48 t^2), next one is O(t^-4)
        assert abs(theta_derivative(t) - 0.5 + 1.0 / (48 * t * t)) <= 1e-6
        assert abs(theta_derivative(t) - float(mp.diff(mp_theta_raw, t))) <= 1e-9

    def test_central_difference(self):
        h = 1e-3
        fd = (riemann_siegel_theta(1000 + h) - riemann_siegel_theta(1000 - h)) / (2 * h)
        assert abs(theta_derivative(1000.0) - fd) <= 1e-6

    def test_monotone(self):
        t = np.linspace(1e2, 1e6, 1000)
        assert np.all(np.diff(theta_derivative(t)) > 0)

    def test_longdouble_preserved(self):
        v = theta_derivative(np.array([100.0], dtype=np.longdouble))
        assert v.dtype == np.longdouble


class TestHardyZ:
    def test_first_zero(self):
        # bisection oracle on mpmath's Z between 14 and 14.2
        lo, hi = mp.mpf(14), mp.mpf("14.2")
        for _ in range(60):
            mid = (lo + hi) / 2
            if mp.sign(mp.siegelz(mid)) == mp.sign(mp.siegelz(lo)):
                lo = mid
            else:
                hi = mid
        assert abs(hardy_z(float(lo))) <= 1e-6

    def test_modulus_matches_zeta(self):
        assert abs(abs(hardy_z(100.0)) - abs(zeta(0.5 + 100j))) <= 1e-6

    @pytest.mark.parametrize("t", [10.0, 17.3, 150.0, 199.9, 200.1, 1234.5, 98765.4, 1.2e6])
    def test_against_mpmath(self, t):
        assert abs(hardy_z(t) - float(mp.siegelz(t))) <= 1e-6

    def test_real_part_identity(self):
        rng = np.random.default_rng(1)
        t = rng.uniform(1e2, 1e6, 1000)
        v = np.exp(1j * riemann_siegel_theta(t)) * zeta(0.5 + 1j * t)
        assert np.max(np.abs(v.imag)) <= 1e-6
        assert np.max(np.abs(v.real - hardy_z(t))) <= 1e-6

    def test_domain(self):
        with pytest.raises(DomainError):
            hardy_z(9.0)


class TestZeta:
    def test_definitional_identity(self):
        z = zeta(0.5 + 100j)
        assert abs(z - np.exp(-1j * riemann_siegel_theta(100.0)) * hardy_z(100.0)) <= 1e-6

    def test_direct_series_region(self):
        s = 2 + 0.5j
        N = 10**6
        n = np.arange(1, N + 1, dtype=float)
        partial = np.sum(np.exp(-s * np.log(n)))
        # Euler-Maclaurin tail of the series beyond N, error O(|s| N^{-3})
        tail = N ** (1 - s) / (s - 1) - N ** (-s) / 2 + s * N ** (-s - 1) / 12
        assert abs(zeta(s) - (partial + tail)) <= 1e-10

    def test_conjugate_symmetry(self):
        s = 0.7 + 50j
        assert abs(zeta(np.conj(s)) - np.conj(zeta(s))) <= 1e-10

    @pytest.mark.parametrize("s", [0.5 + 14.1j, 0.25 + 1000j, 3 + 5e4j, -0.5 + 300j, 0.9 + 2e5j])
    def test_against_mpmath(self, s):
        assert abs(zeta(s) - complex(mp.zeta(s))) <= 1e-8

    @pytest.mark.parametrize("s", [0.5 + 1e3j, 0.3 + 3e4j, 5 + 20j])
    def test_truncation_orders_agree(self, s):
        base = zeta(s)
        more = zeta(s, terms=2 * int(abs(s.imag) / math.pi + 60), corrections=12)
        assert abs(base - more) <= 1e-8

    def test_pole(self):
        with pytest.raises(PoleError):
            zeta(1.0 + 0j)

    def test_precision_warning(self):
        with pytest.warns(PrecisionWarning):
            zeta(2.0 + 1.1e7j)


class TestLambertW:
    def test_zero(self):
        assert lambert_w0(0.0) == 0.0

    def test_e(self):
        assert abs(lambert_w0(math.e) - 1.0) <= 1e-15

    def test_ten_bisection(self):
        lo, hi = 1.0, 2.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if mid * math.exp(mid) < 10:
                lo = mid
            else:
                hi = mid
        assert abs(lambert_w0(10.0) - lo) <= 1e-10

    def test_inversion_grid(self):
        x = np.concatenate(([0.0], np.logspace(-8, 6, 999)))
        w = lambert_w0(x)
        assert np.all(np.abs(w * np.exp(w) - x) <= 1e-10 * (1 + x))

    @given(st.floats(min_value=0.0, max_value=1e12, allow_nan=False))
    def test_inversion_property(self, x):
        w = lambert_w0(x)
        assert abs(w * math.exp(w) - x) <= 1e-12 * max(1.0, x)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            lambert_w0(-0.1)


class TestBesselJ0:
    def test_zero(self):
        assert bessel_j0(0.0) == 1.0

    def test_gaussian_shape(self):
        z = 0.1
        assert abs(bessel_j0(2 * z) - math.exp(-z * z)) <= 2e-4

    def test_defining_integral(self):
        val, _ = integrate.quad(lambda th: math.cos(math.cos(2 * math.pi * th)), 0, 1, epsabs=1e-13)
        assert abs(bessel_j0(1.0) - val) <= 1e-8

    @pytest.mark.parametrize("z", [0.3, 2.0, 5.5, 9.9, 10.0, 17.0, 33.3, 50.0])
    def test_against_mpmath(self, z):
        assert abs(bessel_j0(z) - float(mp.besselj(0, z))) <= 1e-12

    @pytest.mark.parametrize("z", [0.5, 1.5, 3.0])
    def test_alternating_truncation_bound(self, z):
        exact = float(mp.besselj(0, z))
        terms = [(-1) ** n * (z / 2) ** (2 * n) / math.factorial(n) ** 2 for n in range(30)]
        for k in range(2, 12):
            assert abs(math.fsum(terms[:k]) - exact) <= abs(terms[k]) + 4e-16


def trial_division(limit):
    return [n for n in range(2, limit + 1) if all(n % d for d in range(2, math.isqrt(n) + 1))]


class TestPrimes:
    def test_ten(self):
        assert primes_up_to(10).primes.tolist() == [2, 3, 5, 7]

    def test_two(self):
        assert primes_up_to(2).primes.tolist() == [2]

    def test_count_1e4(self):
        tab = primes_up_to(10**4)
        assert len(tab) == len(trial_division(10**4)) == 1229

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=2, max_value=3000))
    def test_matches_trial_division(self, n):
        assert primes_up_to(n).primes.tolist() == trial_division(n)

    def test_logs_and_half_powers(self):
        tab = primes_up_to(1000)
        p = tab.primes.astype(float)
        assert np.all(np.diff(tab.primes) > 0)
        assert np.max(np.abs(tab.logs - np.log(p))) == 0.0
        assert np.max(np.abs(tab.half_powers - p ** -0.5)) <= 2.3e-16

    def test_read_only(self):
        tab = primes_up_to(100)
        with pytest.raises(ValueError):
            tab.primes[0] = 4

    def test_bounds(self):
        with pytest.raises(DomainError):
            primes_up_to(1)
        with pytest.raises(CapacityError):
            primes_up_to(10**9 + 1)

    def test_upto(self):
        tab = primes_up_to(100)
        assert tab.primes[tab.upto(30)].tolist()[-1] == 29
        assert tab.covers(100) and not tab.covers(101)
