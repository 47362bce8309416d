import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import exp1, hyp1f1, k1

from fdrlos.specfun import (AccuracyError, DomainError, QuadratureConfig,
                            adaptive_quad, adaptive_quad_vec, gamma_tricomi_u,
                            gen_incomplete_gamma, kummer_1f1, log_kummer_1f1,
                            tricomi_u)

# 50-digit references frozen from scripts/make_goldens.py
GIG_NEG2_02_15 = 0.17218473217639856
HYP1F1_3_1_07 = 5.3263759112594104
U_2_1_05 = 0.38436594872559570
E1 = {0.1: 1.8229239584193907, 1.0: 0.21938393439552027, 10.0: 4.1569689296853243e-6}
UPPER_GAMMA = {
    (-2.0, 0.1): 41.629145790827876,
    (-2.0, 1.0): 0.10969196719776014,
    (-2.0, 5.0): 3.5112035710825531e-05,
    (-0.5, 0.1): 3.4017693366916154,
    (-0.5, 1.0): 0.17814771178156069,
    (-0.5, 5.0): 4.7739648667270846e-04,
    (1.0, 0.1): 0.90483741803595957,
    (1.0, 1.0): 0.36787944117144232,
    (1.0, 5.0): 6.7379469990854671e-03,
    (3.5, 0.1): 3.3232673673972308,
    (3.5, 1.0): 3.1898864208941980,
    (3.5, 5.0): 0.62669581626153900,
}
HYP1F1_LARGE = {
    (2.5, 1.0, 80.0): 3.0663507777251485e+37,
    (2.5, 1.0, 300.0): 7.6495635256289791e+133,
    (0.5, 1.0, 120.0): 6.7310795536494629e+50,
    (3.0, 1.0, 600.0): 6.8367505154880603e+265,
    (5.0, 1.0, 100.0): 1.3074287634673007e+50,
    (2.5, 1.7, 30.0): 1.1542285563662598e+14,
}


class TestAdaptiveQuad:
    def test_unit_exponential(self):
        val, err = adaptive_quad(lambda t: math.exp(-t), 0.0, math.inf)
        assert val == pytest.approx(1.0, abs=1e-12)
        assert err < 1e-10

    def test_gamma_two(self):
        val, _ = adaptive_quad(lambda t: t * math.exp(-t), 0.0, math.inf)
        assert val == pytest.approx(1.0, abs=1e-12)

    def test_split_consistency_with_gig(self):
        # same integrand through two independent partitions
        f = lambda t: math.exp(-t) * math.exp(-1.0 / t)
        a, _ = adaptive_quad(f, 1.0, 3.0)
        b, _ = adaptive_quad(f, 3.0, math.inf)
        assert a + b == pytest.approx(gen_incomplete_gamma(1.0, 1.0, 1.0), rel=1e-11)

    def test_finite_interval(self):
        val, _ = adaptive_quad(math.sin, 0.0, math.pi)
        assert val == pytest.approx(2.0, rel=1e-12)

    def test_nan_integrand_is_domain_error(self):
        with pytest.raises(DomainError):
            adaptive_quad(lambda t: math.nan, 0.0, 1.0)

    def test_subdivision_exhaustion_carries_estimate(self):
        cfg = QuadratureConfig(rel_tol=1e-13, abs_tol=1e-15, max_subdivisions=2)
        with pytest.raises(AccuracyError) as info:
            adaptive_quad(lambda t: math.sin(50.0 * t) ** 2, 0.0, 20.0, cfg)
        assert info.value.value is not None

    def test_vector_components_controlled_independently(self):
        # second component is 1e12 times smaller; both must be accurate
        def f(x):
            return np.stack([np.exp(-x), 1e-12 * x * np.exp(-x)], axis=1)

        vals, _ = adaptive_quad_vec(f, 0.0, np.inf,
                                    QuadratureConfig(abs_tol=1e-300))
        assert vals[0] == pytest.approx(1.0, rel=1e-11)
        assert vals[1] == pytest.approx(1e-12, rel=1e-11)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            QuadratureConfig(rel_tol=0.0)
        with pytest.raises(DomainError):
            QuadratureConfig(max_subdivisions=0)
        with pytest.raises(DomainError):
            QuadratureConfig(infinite_tail_cutoff_policy="chebyshev")


class TestGenIncompleteGamma:
    def test_reduces_to_exp_integral(self):
        assert gen_incomplete_gamma(1.0, 1.0, 0.0) == pytest.approx(
            math.exp(-1.0), rel=1e-12)

    def test_bessel_identity_near_zero_cutoff(self):
        # Gamma(1, 0+, b) = 2 sqrt(b) K1(2 sqrt(b))
        got = gen_incomplete_gamma(1.0, 1e-12, 1.0)
        assert got == pytest.approx(2.0 * k1(2.0), rel=1e-9)

    def test_frozen_golden(self):
        assert gen_incomplete_gamma(-2.0, 0.2, 1.5) == pytest.approx(
            GIG_NEG2_02_15, rel=1e-10)

    @pytest.mark.parametrize("a", [-2.0, -0.5, 1.0, 3.5])
    @pytest.mark.parametrize("z", [0.1, 1.0, 5.0])
    def test_b_zero_matches_classical_upper_gamma(self, a, z):
        assert gen_incomplete_gamma(a, z, 0.0) == pytest.approx(
            UPPER_GAMMA[(a, z)], rel=1e-9)

    @given(st.floats(-2.5, 3.0), st.floats(0.05, 4.0), st.floats(0.0, 4.0),
           st.floats(0.05, 2.0))
    def test_monotone_decreasing_in_z(self, a, z, b, dz):
        assert gen_incomplete_gamma(a, z + dz, b) < gen_incomplete_gamma(a, z, b)

    @given(st.floats(-2.5, 3.0), st.floats(0.05, 4.0), st.floats(0.0, 4.0),
           st.floats(0.05, 2.0))
    def test_monotone_decreasing_in_b(self, a, z, b, db):
        assert gen_incomplete_gamma(a, z, b + db) < gen_incomplete_gamma(a, z, b)

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            gen_incomplete_gamma(-1.0, -0.5, 1.0)
        with pytest.raises(DomainError):
            gen_incomplete_gamma(-1.0, 0.0, 0.0)
        with pytest.raises(DomainError):
            gen_incomplete_gamma(1.0, 1.0, -0.1)

    def test_positive(self):
        assert gen_incomplete_gamma(-5.0, 0.3, 2.0) > 0.0


class TestKummer1F1:
    def test_at_zero(self):
        for a, b in [(0.3, 0.9), (3.0, 1.0), (-1.2, 2.5)]:
            assert kummer_1f1(a, b, 0.0) == 1.0

    def test_equal_parameters_give_exp(self):
        assert kummer_1f1(1.0, 1.0, 2.0) == pytest.approx(math.exp(2.0), rel=1e-12)

    def test_frozen_golden(self):
        assert kummer_1f1(3.0, 1.0, 0.7) == pytest.approx(HYP1F1_3_1_07, rel=1e-12)

    @pytest.mark.parametrize("args,want", sorted(HYP1F1_LARGE.items()))
    def test_large_argument_paths(self, args, want):
        assert kummer_1f1(*args) == pytest.approx(want, rel=1e-10)

    @pytest.mark.parametrize("a", [0.5, 2.5, 5.0])
    @pytest.mark.parametrize("x", [0.5, 5.0, 30.0, 49.0])
    def test_against_scipy(self, a, x):
        assert kummer_1f1(a, 1.0, x) == pytest.approx(hyp1f1(a, 1.0, x), rel=1e-9)

    def test_negative_argument(self):
        assert kummer_1f1(0.8, 2.0, -3.0) == pytest.approx(
            hyp1f1(0.8, 2.0, -3.0), rel=1e-10)

    @given(st.floats(0.5, 5.0), st.floats(0.6, 4.0), st.floats(0.1, 10.0))
    def test_derivative_contiguous_relation(self, a, b, x):
        # d/dx 1F1(a;b;x) = (a/b) 1F1(a+1;b+1;x)
        h = 1e-5 * max(1.0, abs(x))
        der = (kummer_1f1(a, b, x + h) - kummer_1f1(a, b, x - h)) / (2 * h)
        assert der == pytest.approx(a / b * kummer_1f1(a + 1, b + 1, x), rel=1e-6)

    def test_nonpositive_integer_b_rejected(self):
        for b in (0.0, -1.0, -4.0):
            with pytest.raises(DomainError):
                kummer_1f1(1.5, b, 1.0)

    def test_overflow_is_signalled(self):
        with pytest.raises(AccuracyError):
            kummer_1f1(1.0, 1.0, 800.0)

    def test_log_form_matches_frozen(self):
        # extended-precision references for the log-domain evaluations
        assert log_kummer_1f1(500.0, 1.0, 50.0) == pytest.approx(
            338.58030390333216, rel=1e-12)
        assert log_kummer_1f1(2.5, 1.0, 5000.0) == pytest.approx(
            5012.4915568266769, rel=1e-12)

    def test_log_form_vectorized(self):
        x = np.array([0.0, 0.4, 7.0, 90.0])
        got = log_kummer_1f1(3.0, 1.0, x)
        want = np.log(hyp1f1(3.0, 1.0, x))
        np.testing.assert_allclose(got, want, rtol=1e-10)


class TestTricomiU:
    def test_exponential_integral_identity(self):
        assert tricomi_u(1, 1.0) == pytest.approx(math.e * exp1(1.0), rel=1e-10)

    @pytest.mark.parametrize("x", [0.1, 1.0, 10.0])
    def test_u1_times_exp_is_e1(self, x):
        assert tricomi_u(1, x) * math.exp(-x) == pytest.approx(E1[x], rel=1e-9)

    @pytest.mark.parametrize("m", [1, 2])
    def test_large_x_asymptote(self, m):
        x = 1e6
        assert tricomi_u(m, x) == pytest.approx(x ** (-m), rel=1e-2)

    def test_frozen_golden(self):
        assert tricomi_u(2, 0.5) == pytest.approx(U_2_1_05, rel=1e-10)

    def test_strictly_decreasing_in_x(self):
        xs = [0.2, 0.5, 1.0, 3.0, 9.0]
        vals = [tricomi_u(3, x) for x in xs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_domain_errors(self):
        with pytest.raises(DomainError):
            tricomi_u(2, 0.0)
        with pytest.raises(DomainError):
            tricomi_u(2, -1.0)
        with pytest.raises(DomainError):
            tricomi_u(0, 1.0)
        with pytest.raises(DomainError):
            tricomi_u(1.5, 1.0)

    def test_gamma_scaled_product_survives_large_order(self):
        # Gamma(m) U(m,1,x) stays O(1) where Gamma(m) alone overflows
        val = gamma_tricomi_u(1000, 1e-3)
        assert 0.0 < val < 1e3
