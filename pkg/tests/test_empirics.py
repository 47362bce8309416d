import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fdrlos.empirics import (CdfContractError, default_ks_threshold, ecdf,
                             histogram_density, ks_distance, tabulated_cdf)
from fdrlos.models import _chunk_rng
from fdrlos.specfun import DomainError


def exp_cdf(x):
    return 1.0 - np.exp(-np.asarray(x, dtype=float))


class TestEcdf:
    def test_step_values(self):
        f = ecdf(np.array([1.0, 2.0, 3.0]))
        assert f(2.0) == pytest.approx(2.0 / 3.0)
        assert f(0.5) == 0.0
        assert f(3.0) == 1.0

    def test_right_continuity(self):
        f = ecdf(np.array([1.0, 2.0, 3.0]))
        assert f(1.999) == pytest.approx(1.0 / 3.0)
        assert f(2.0) == pytest.approx(2.0 / 3.0)

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            ecdf(np.array([]))

    @given(st.lists(st.floats(-50, 50), min_size=1, max_size=40))
    def test_bounded_and_nondecreasing(self, xs):
        f = ecdf(np.array(xs))
        grid = np.linspace(min(xs) - 1, max(xs) + 1, 50)
        vals = f(grid)
        assert np.all(vals >= 0) and np.all(vals <= 1)
        assert np.all(np.diff(vals) >= 0)

    def test_large_exponential_sample_close_to_truth(self):
        x = _chunk_rng(5, 0).exponential(1.0, 10 ** 6)
        rep = ks_distance(x, exp_cdf, threshold=0.002)
        assert rep.passed, rep


class TestKsDistance:
    def test_same_law_passes_default_threshold(self):
        x = _chunk_rng(8, 0).exponential(1.0, 10 ** 6)
        rep = ks_distance(x, exp_cdf)
        assert rep.passed
        assert rep.threshold == pytest.approx(default_ks_threshold(10 ** 6))

    def test_degenerate_sample_fails_badly(self):
        x = np.full(1000, 2.0)
        rep = ks_distance(x, exp_cdf)
        assert rep.statistic > 0.5
        assert not rep.passed

    def test_non_monotone_cdf_rejected(self):
        x = np.linspace(0.1, 6.0, 100)
        with pytest.raises(CdfContractError):
            ks_distance(x, np.sin)

    def test_statistic_shrinks_like_root_n(self):
        stats = {}
        for n in (10 ** 4, 10 ** 6):
            x = _chunk_rng(9, 0).exponential(1.0, n)
            stats[n] = ks_distance(x, exp_cdf).statistic
        ratio = stats[10 ** 4] / stats[10 ** 6]
        assert 3.0 < ratio < 30.0

    def test_report_invariants(self):
        x = _chunk_rng(10, 0).exponential(1.0, 10 ** 4)
        rep = ks_distance(x, exp_cdf)
        assert 0.0 <= rep.statistic <= 1.0
        assert rep.n == 10 ** 4
        assert rep.passed == (rep.statistic < rep.threshold)


class TestHistogram:
    def test_uniform_heights(self):
        x = _chunk_rng(11, 0).uniform(0.0, 1.0, 10 ** 5)
        curve = histogram_density(x, 0.1, (0.0, 1.0))
        assert np.all(np.abs(curve.ordinate - 1.0) < 0.05)

    def test_mass_equals_fraction_in_range(self):
        x = _chunk_rng(12, 0).uniform(0.0, 2.0, 10 ** 4)
        curve = histogram_density(x, 0.1, (0.0, 1.0))
        frac = np.mean((x >= 0.0) & (x < 1.0))
        assert float(np.sum(curve.ordinate) * 0.1) == pytest.approx(frac, abs=1e-9)

    def test_bin_centers(self):
        x = np.array([0.05, 0.15])
        curve = histogram_density(x, 0.1, (0.0, 0.2))
        np.testing.assert_allclose(curve.abscissa, [0.05, 0.15])

    def test_invalid_inputs(self):
        x = np.array([1.0])
        with pytest.raises(DomainError):
            histogram_density(x, 0.0, (0.0, 1.0))
        with pytest.raises(DomainError):
            histogram_density(x, 0.1, (1.0, 0.0))
        with pytest.raises(DomainError):
            histogram_density(x, 0.3, (0.0, 1.0))


class TestTabulatedCdf:
    def test_matches_exact_cdf(self):
        f = tabulated_cdf(exp_cdf, 1e-4, 30.0)
        x = np.geomspace(2e-4, 25.0, 500) * 1.0137
        assert float(np.max(np.abs(f(x) - exp_cdf(x)))) < 1e-6

    def test_clamps_to_unit_interval(self):
        f = tabulated_cdf(exp_cdf, 0.01, 5.0)
        assert f(0.0) == 0.0
        assert f(1e9) <= 1.0
