import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steingof.errors import DomainError, SampleTooSmall
from steingof.sample import standardize
from steingof.simulation import DistributionSpec, SimulationConfig, draw, estimate_rejection_rate, replicate_stream
from steingof.special import std_normal_quantile
from steingof.stein import (
    _g,
    asymptotic_test,
    delta_hat,
    delta_hat_naive,
    kernel_h,
    leave_one_out_deltas,
    null_sigma0_squared,
)


def brute_delta(values):
    """Pair-by-pair average of the kernel, in plain Python."""
    pairs = list(itertools.combinations(values, 2))
    return math.fsum(0.5 * (min(a, b) ** 2 - a * b) for a, b in pairs) / len(pairs) - 0.5


class TestKernel:
    def test_diagonal(self):
        for x in (-3.0, 0.0, 0.7, 12.5):
            assert kernel_h(x, x) == 0.0

    def test_values(self):
        assert kernel_h(1.0, 2.0) == -0.5
        assert kernel_h(-1.0, 1.0) == 1.0

    @given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
    def test_symmetric(self, x, y):
        assert kernel_h(x, y) == kernel_h(y, x)


class TestDeltaHat:
    def test_two_points(self):
        d = delta_hat_naive([-1.0, 1.0])
        assert (d.delta1, d.value) == (1.0, 0.5)
        assert delta_hat([-1.0, 1.0]).value == 0.5

    def test_three_points(self):
        d = delta_hat_naive([-1.0, 0.0, 1.0])
        assert d.delta1 == pytest.approx(0.5, abs=1e-15)
        assert delta_hat([-1.0, 0.0, 1.0]).value == pytest.approx(0.0, abs=1e-15)

    def test_value_is_delta1_minus_half(self, normal_std):
        d = delta_hat(normal_std)
        assert d.value == d.delta1 - 0.5
        assert d.n == normal_std.n

    def test_standardized_and_array_agree(self, normal_std):
        assert delta_hat(normal_std).value == delta_hat(np.asarray(normal_std.y)).value

    def test_too_small(self):
        with pytest.raises(SampleTooSmall):
            delta_hat([1.0])
        with pytest.raises(SampleTooSmall):
            delta_hat_naive([1.0])

    @pytest.mark.parametrize("seed", range(5))
    def test_naive_matches_brute_force(self, seed):
        x = np.random.default_rng(seed).standard_normal(12)
        assert delta_hat_naive(x).value == pytest.approx(brute_delta(x.tolist()), abs=1e-13)

    def test_ties(self):
        x = [1.0, 1.0, -2.0, 0.5, 0.5, 0.5, 3.0]
        assert delta_hat(x).value == pytest.approx(brute_delta(x), abs=1e-13)


@settings(max_examples=300, deadline=None)
@given(st.integers(5, 200), st.integers(0, 2**32 - 1))
def test_fast_matches_naive(n, seed):
    y = standardize(np.random.default_rng(seed).standard_normal(n))
    assert abs(delta_hat(y).value - delta_hat_naive(y).value) <= 1e-10


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-50, 50, allow_subnormal=False), min_size=2, max_size=60))
def test_fast_matches_naive_raw(values):
    assert delta_hat(values).value == pytest.approx(delta_hat_naive(values).value, abs=1e-9, rel=1e-12)


class TestLeaveOneOut:
    def test_three_points_middle(self):
        loo = leave_one_out_deltas(standardize([-1.0, 0.0, 1.0]))
        assert loo[1] == pytest.approx(0.5, abs=1e-12)

    def test_unstandardized_three_points(self):
        np.testing.assert_allclose(leave_one_out_deltas([-1.0, 0.0, 1.0]), [-0.5, 0.5, 0.0], atol=1e-15)

    def test_too_small(self):
        with pytest.raises(SampleTooSmall):
            leave_one_out_deltas([1.0, 2.0])

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_deletion(self, seed):
        rng = np.random.default_rng(seed)
        y = standardize(rng.gamma(2.0, size=int(rng.integers(3, 40))))
        loo = leave_one_out_deltas(y)
        for i in range(y.n):
            assert abs(loo[i] - delta_hat_naive(np.delete(y.y, i)).value) <= 1e-10

    @pytest.mark.parametrize("seed", range(10))
    def test_restandardized_matches_deletion(self, seed):
        rng = np.random.default_rng(100 + seed)
        x = 3.0 + 2.0 * rng.standard_normal(int(rng.integers(4, 40)))
        loo = leave_one_out_deltas(standardize(x), restandardize=True)
        for i in range(x.size):
            assert abs(loo[i] - delta_hat_naive(standardize(np.delete(x, i))).value) <= 1e-10

    def test_ties_match_deletion(self):
        x = np.array([0.5, 0.5, -1.0, 2.0, 2.0, 2.0, -1.0])
        loo = leave_one_out_deltas(x)
        for i in range(x.size):
            assert loo[i] == pytest.approx(brute_delta(np.delete(x, i).tolist()), abs=1e-13)

    def test_exchangeable(self, rng):
        x = rng.standard_normal(30)
        perm = rng.permutation(30)
        np.testing.assert_allclose(leave_one_out_deltas(x[perm]), leave_one_out_deltas(x)[perm], atol=1e-13)

    def test_jackknife_identity(self, normal_std):
        n = normal_std.n
        d = delta_hat(normal_std).value
        loo = leave_one_out_deltas(normal_std)
        nu = n * d - (n - 1) * loo
        assert abs((n * d - (n - 1) * loo.mean()) - nu.mean()) <= 1e-10


class TestNullVariance:
    def test_positive(self):
        assert null_sigma0_squared() > 0

    def test_cached(self):
        assert null_sigma0_squared() is null_sigma0_squared()

    def test_mean_of_conditional_kernel(self):
        # E[g(Z)] = 2 E[h(Z1, Z2)] = E[min(Z1, Z2)^2] = 1 for standard normal data
        from scipy import integrate

        from steingof.special import std_normal_pdf

        mean_g, _ = integrate.quad(lambda x: _g(x) * std_normal_pdf(x), -np.inf, np.inf, epsabs=1e-13)
        assert mean_g == pytest.approx(1.0, abs=1e-8)

    def test_against_monte_carlo(self):
        rng = np.random.default_rng(2024)
        total = 10_000_000
        sums = np.zeros(4)
        for _ in range(10):
            g = _g(rng.standard_normal(total // 10))
            sums += [g.sum(), (g**2).sum(), (g**3).sum(), (g**4).sum()]
        m1, m2, m3, m4 = sums / total
        var = m2 - m1**2
        central4 = m4 - 4 * m1 * m3 + 6 * m1**2 * m2 - 3 * m1**4
        se = math.sqrt((central4 - var**2) / total)
        assert abs(null_sigma0_squared() - var) <= 3 * se


class TestAsymptoticTest:
    def test_zero_statistic(self):
        y = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        y = y * math.sqrt(0.5 / delta_hat(y).delta1)
        res = asymptotic_test(y, 0.05)
        assert abs(res.statistic_z) < 1e-12
        assert res.p_value == pytest.approx(1.0, abs=1e-12)
        assert not res.reject
        assert not asymptotic_test(y, 0.999).reject

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.5, 2.0])
    def test_bad_alpha(self, normal_std, alpha):
        with pytest.raises(DomainError):
            asymptotic_test(normal_std, alpha)

    def test_too_small(self):
        with pytest.raises(SampleTooSmall):
            asymptotic_test([1.0, 2.0, 4.0, 8.0], 0.05)

    @pytest.mark.parametrize("seed", range(20))
    def test_decision_consistent(self, seed):
        x = np.random.default_rng(seed).standard_t(5, size=40)
        for alpha in (0.01, 0.05, 0.2):
            res = asymptotic_test(x, alpha)
            assert res.reject == (abs(res.statistic_z) > std_normal_quantile(1 - alpha / 2))
            assert res.reject == (res.p_value < alpha)
            assert res.sigma0 == pytest.approx(math.sqrt(null_sigma0_squared()))

    def test_gumbel_rejects(self):
        x = draw(DistributionSpec("gumbel", (2.0, 1.0)), 100, replicate_stream(7, 0))
        assert asymptotic_test(x, 0.05).reject


@settings(max_examples=150, deadline=None)
@given(st.integers(5, 120), st.integers(0, 2**32 - 1), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_affine_invariance_pipeline(n, seed, a, b):
    x = np.random.default_rng(seed).exponential(size=n)
    lhs = delta_hat(standardize(a + b * x)).value
    rhs = delta_hat(standardize(x)).value
    assert abs(lhs - rhs) <= 1e-9


def test_consistency_under_gumbel():
    dist = DistributionSpec("gumbel", (0.0, 1.0))
    rates, ses = [], []
    for n in (25, 50, 100, 200):
        table = estimate_rejection_rate(
            SimulationConfig(dist=dist, n=n, reps=2000, alphas=(0.05,), tests=("asymptotic",), seed=3))
        row = table.rows[0]
        rates.append(row.rate)
        ses.append(row.se)
    for i in range(3):
        assert rates[i + 1] >= rates[i] - 2 * math.hypot(ses[i], ses[i + 1])
    # Delta(F) of the raw standard Gumbel law: (E[min(X1, X2)^2] - mu^2) / 2 - 1/2
    from scipy import integrate
    cdf = lambda x: math.exp(-math.exp(-x))
    pdf = lambda x: math.exp(-x - math.exp(-x))
    e_min_sq, _ = integrate.quad(lambda x: x * x * 2 * pdf(x) * (1 - cdf(x)), -10, 60)
    target = 0.5 * (e_min_sq - np.euler_gamma**2) - 0.5
    vals = [delta_hat(draw(dist, 1600, replicate_stream(11, r))).value for r in range(400)]
    assert abs(np.mean(vals) - target) <= 3 * np.std(vals) / math.sqrt(len(vals))
