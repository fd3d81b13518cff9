import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from apoint_lab.errors import CoverageError, DomainError, PrecisionWarning
from apoint_lab.gram import (GramClass, ShiftedGramPoint, classify_gram, gram_batch,
                             grams_in_range, phase_of, shifted_gram, shifted_gram_seed,
                             spacing_check, star_threshold)
from apoint_lab.special_fn import lambert_w0, riemann_siegel_theta


class TestPhase:
    def test_positive_real(self):
        assert phase_of(2.0) == 0.0

    def test_negative_real_is_pi(self):
        assert phase_of(-1.0) == math.pi
        assert phase_of(complex(-1.0, -0.0)) == math.pi

    def test_zero_rejected(self):
        with pytest.raises(DomainError):
            phase_of(0)

    @given(st.complex_numbers(min_magnitude=1e-6, max_magnitude=1e6, allow_nan=False,
                              allow_infinity=False))
    def test_conjugation(self, a):
        phi = phase_of(a)
        assert -math.pi < phi <= math.pi
        if a.imag != 0:
            d = (phase_of(a.conjugate()) + phi) % (2 * math.pi)
            assert min(d, 2 * math.pi - d) <= 1e-15


class TestSeed:
    def test_closed_form(self):
        n, phi = 100, 0.3
        w = float(lambert_w0((n + 0.125 - phi / math.pi) / math.e))
        assert shifted_gram_seed(n, phi) == pytest.approx(2 * math.pi * math.exp(1 + w), rel=1e-15)

    def test_array_input(self):
        s = shifted_gram_seed(np.array([10, 20]), 0.0)
        assert s.shape == (2,) and s.dtype == np.longdouble

    def test_bad_phase(self):
        with pytest.raises(DomainError):
            shifted_gram_seed(5, 4.0)
        with pytest.raises(DomainError):
            shifted_gram_seed(5, -math.pi)

    def test_negative_argument(self):
        with pytest.raises(DomainError):
            shifted_gram_seed(-3, 0.0)


class TestRefinement:
    def test_classical_g0_by_bisection(self):
        lo, hi = 15.0, 20.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if riemann_siegel_theta(mid) < 0:
                lo = mid
            else:
                hi = mid
        g = shifted_gram(0, 0.0)
        assert abs(g.t - lo) <= 1e-9
        assert abs(g.t - 17.8455995405) <= 1e-8

    @pytest.mark.parametrize("phi", [0.0, math.pi / 4, math.pi, -2.0])
    @pytest.mark.parametrize("n", [50, 3000, 40000, 200000])
    def test_residual(self, n, phi):
        g = shifted_gram(n, phi)
        assert g.residual <= 1e-9
        assert abs(riemann_siegel_theta(g.t) + phi - math.pi * n) <= 1e-8

    def test_seed_gap_order(self):
        b = gram_batch(np.arange(1000, 200000, 997), 0.5)
        T = b.t
        assert np.all(b.seed_gap * T * np.log(T) <= 1.0)

    def test_too_small_index(self):
        with pytest.raises(DomainError):
            gram_batch([-1], 0.0)

    def test_precision_warning_above_2_21(self):
        # first index whose ordinate exceeds 2**21
        n = int(riemann_siegel_theta(2.0**21 + 10) / math.pi) + 1
        with pytest.warns(PrecisionWarning):
            gram_batch([n], 0.0)

    def test_batch_is_read_only(self):
        b = gram_batch([100, 101], 0.0)
        with pytest.raises(ValueError):
            b.t[0] = 1.0

    def test_batch_indexing(self):
        b = gram_batch([100, 101, 102], 0.0)
        assert isinstance(b[1], ShiftedGramPoint) and b[1].n == 101
        assert len(b[1:]) == 2


class TestRange:
    @pytest.mark.parametrize("phi", [0.0, math.pi / 4, math.pi])
    def test_count_and_bounds(self, phi):
        T1, T2 = 1e4, 1.1e4
        b = grams_in_range(T1, T2, phi)
        assert np.all(b.t > T1) and np.all(b.t <= T2)
        assert np.all(np.diff(b.n) == 1) and np.all(np.diff(b.t) > 0)
        expected = math.floor((riemann_siegel_theta(T2) + phi) / math.pi) \
            - math.floor((riemann_siegel_theta(T1) + phi) / math.pi)
        assert len(b) == expected
        # neighbours just outside are outside
        assert shifted_gram(int(b.n[0]) - 1, phi).t <= T1
        assert shifted_gram(int(b.n[-1]) + 1, phi).t > T2

    def test_tiny_empty_range(self):
        g = shifted_gram(5000, 0.0)
        assert len(grams_in_range(g.t + 1e-6, g.t + 2e-6, 0.0)) == 0

    def test_endpoint_inclusion(self):
        g = shifted_gram(5000, 0.0)
        b = grams_in_range(g.t - 0.01, g.t, 0.0)
        assert len(b) == 1 and b[0].n == 5000
        assert len(grams_in_range(g.t, g.t + 0.01, 0.0)) == 0

    def test_domain(self):
        with pytest.raises(DomainError):
            grams_in_range(500, 600, 0.0)
        with pytest.raises(DomainError):
            grams_in_range(2e3, 1e3, 0.0)

    @settings(max_examples=25, deadline=None)
    @given(st.floats(1e3, 1e6), st.floats(0.5, 30.0), st.floats(-3.14, 3.14))
    def test_contiguous_property(self, T1, width, phi):
        b = grams_in_range(T1, T1 + width, phi)
        assert np.all(np.diff(b.n) == 1)
        assert np.all(b.residual <= 1e-9)


class TestSpacing:
    def test_within_bound_at_1e5(self):
        b = grams_in_range(1e5, 2e5, 0.0)
        assert spacing_check(b, 1e5) <= 5 / math.log(1e5)

    def test_list_input_matches_batch(self):
        b = grams_in_range(1e4, 2e4, 0.0)
        assert spacing_check(list(b), 1e4) == spacing_check(b, 1e4)

    def test_adjacent_realises_max(self):
        b = grams_in_range(1e3, 2e3, 0.0)
        assert spacing_check(b, 1e3, lags=(1, 2, 5, 17)) == spacing_check(b, 1e3)

    def test_mixed_phases_rejected(self):
        pts = [shifted_gram(2000, 0.0), shifted_gram(2001, 0.5)]
        with pytest.raises(DomainError):
            spacing_check(pts, 1e3)

    def test_outside_window_rejected(self):
        b = grams_in_range(1e3, 3e3, 0.0)
        with pytest.raises(DomainError):
            spacing_check(b, 1e3)


class TestClassify:
    def test_threshold_formula(self):
        t = 1e5
        assert star_threshold(t) == pytest.approx(1 / (math.log(t + 2) * math.log(math.log(t + 3))))

    def test_synthetic_zeros(self):
        g = shifted_gram(20000, 0.0)
        thr = float(star_threshold(g.t))
        far = [g.t - 1.5, g.t + 2 * thr, g.t + 1.5]
        near = [g.t - 1.5, g.t + 0.5 * thr, g.t + 1.5]
        assert classify_gram(g, far) is GramClass.STAR
        assert classify_gram(g, near) is GramClass.SUBSTAR

    def test_coverage_required(self):
        g = shifted_gram(20000, 0.0)
        with pytest.raises(CoverageError):
            classify_gram(g, [g.t + 0.1, g.t + 0.5])
