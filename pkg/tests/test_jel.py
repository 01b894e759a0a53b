import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from steingof import jel as jel_mod
from steingof.errors import ConvergenceFailure, DomainError, InfeasibleConstraint, SampleTooSmall, ShapeError
from steingof.jel import jel_statistic, jel_test, pseudo_values, solve_lambda
from steingof.sample import standardize
from steingof.simulation import DistributionSpec, SimulationConfig, estimate_rejection_rate
from steingof.special import chi2_isf
from steingof.stein import DeltaHat, delta_hat, leave_one_out_deltas


def bisection_root(nu, steps=400):
    """Independent root finder: plain bisection of the decreasing estimating function."""
    nu = np.asarray(nu)
    lo, hi = -1 / nu.max(), -1 / nu.min()
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if np.mean(nu / (1 + mid * nu)) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def feasible_nu(seed, n=50):
    rng = np.random.default_rng(seed)
    nu = rng.standard_normal(n) + rng.uniform(-1.5, 1.5)
    nu[0], nu[1] = -abs(nu[0]) - 0.1, abs(nu[1]) + 0.1
    return nu


class TestPseudoValues:
    def test_constant_loo(self):
        d = DeltaHat(value=0.3, delta1=0.8, n=4)
        np.testing.assert_allclose(pseudo_values(d, [0.3] * 4), [0.3] * 4, atol=1e-15)

    def test_three_points(self):
        d = delta_hat(standardize([-1.0, 0.0, 1.0]))
        nu = pseudo_values(DeltaHat(0.0, 0.5, 3), [0.5, 0.5, 0.5])
        assert nu.tolist() == [-1.0, -1.0, -1.0]
        assert d.value == pytest.approx(0.0, abs=1e-15)

    def test_mean_linearity(self, normal_std):
        d = delta_hat(normal_std)
        loo = leave_one_out_deltas(normal_std)
        nu = pseudo_values(d, loo)
        n = d.n
        assert abs(nu.mean() - (n * d.value - (n - 1) * loo.mean())) <= 1e-12

    def test_shape_error(self):
        with pytest.raises(ShapeError):
            pseudo_values(DeltaHat(0.0, 0.5, 4), [0.1, 0.2, 0.3])


class TestSolveLambda:
    def test_symmetric(self):
        lam, _ = solve_lambda([-2.0, 2.0, -0.5, 0.5, -1.0, 1.0])
        assert abs(lam) <= 1e-12

    @pytest.mark.parametrize("nu", [[-1.0, -1.0, -1.0], [0.0, 0.0, 0.0], [0.0, 1.0, 2.0], [1.0, 2.0, 3.0]])
    def test_infeasible(self, nu):
        with pytest.raises(InfeasibleConstraint):
            solve_lambda(nu)

    def test_too_short(self):
        with pytest.raises(SampleTooSmall):
            solve_lambda([-1.0, 1.0])

    @pytest.mark.parametrize("seed", range(25))
    def test_against_bisection(self, seed):
        nu = feasible_nu(seed)
        lam, _ = solve_lambda(nu)
        assert -1 / nu.max() < lam < -1 / nu.min()
        assert np.all(1 + lam * nu > 0)
        assert abs(np.mean(nu / (1 + lam * nu))) <= 1e-10
        assert lam == pytest.approx(bisection_root(nu), rel=1e-8, abs=1e-12)

    def test_extreme_skew(self):
        # root sits very close to the bracket edge
        nu = np.array([-1e-3] * 99 + [50.0])
        lam, _ = solve_lambda(nu)
        assert np.all(1 + lam * nu > 0)
        assert abs(np.mean(nu / (1 + lam * nu))) <= 1e-10 * 50

    def test_convergence_failure(self, monkeypatch):
        monkeypatch.setattr(jel_mod, "MAX_ITER", 1)
        with pytest.raises(ConvergenceFailure) as exc:
            solve_lambda(feasible_nu(3))
        assert exc.value.residual is not None


# pseudo-values live on the scale of the data; magnitudes near the float
# underflow limit would push lambda towards overflow
magnitudes = st.one_of(st.just(0.0), st.floats(1e-6, 100), st.floats(-100, -1e-6))


@settings(max_examples=300, deadline=None)
@given(st.lists(magnitudes, min_size=3, max_size=80))
def test_statistic_properties(values):
    nu = np.asarray(values)
    diag = jel_statistic(nu)
    assert diag.feasible == (nu.min() < 0 < nu.max())
    if diag.feasible:
        assert np.all(1 + diag.lam * nu > 0)
        assert diag.minus2logR >= -1e-9
        assert abs(np.mean(nu / (1 + diag.lam * nu))) <= 1e-10 * max(1.0, np.abs(nu).max())
        assert diag.weights.sum() == pytest.approx(1.0, abs=1e-8)
    else:
        assert diag.minus2logR == math.inf


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3))
def test_scale_behaviour(seed, c):
    nu = feasible_nu(seed, 30)
    base, scaled = jel_statistic(nu), jel_statistic(c * nu)
    assert scaled.lam == pytest.approx(base.lam / c, rel=1e-7, abs=1e-12)
    assert abs(scaled.minus2logR - base.minus2logR) <= 1e-9 * max(1.0, base.minus2logR)


def test_zero_iff_mean_zero():
    nu = np.array([-3.0, -1.0, 0.5, 1.5, 2.0])
    assert nu.mean() == 0.0
    diag = jel_statistic(nu)
    assert diag.lam == 0.0 and diag.minus2logR == 0.0
    assert jel_statistic(nu + 1e-3).minus2logR > 0


class TestJelTest:
    @pytest.mark.parametrize("seed", range(20))
    def test_decision_consistent(self, seed):
        x = standardize(np.random.default_rng(seed).lognormal(0, 0.4, size=30))
        for alpha in (0.01, 0.05, 0.1):
            res = jel_test(x, alpha)
            assert res.reject == (res.statistic > chi2_isf(alpha, 1))
            assert res.reject == (res.p_value < alpha)

    def test_bad_alpha(self, normal_std):
        with pytest.raises(DomainError):
            jel_test(normal_std, 1.5)

    def test_too_small(self):
        with pytest.raises(SampleTooSmall):
            jel_test(standardize([1.0, 2.0, 4.0, 8.0]))

    def test_infeasible_rejects(self):
        # strongly shifted raw data: every pseudo-value positive
        x = np.array([5.0, 5.5, 6.0, 6.2, 7.0, 7.7])
        res = jel_test(x, 0.05)
        assert not res.diagnostics.feasible
        assert res.statistic == math.inf and res.p_value == 0.0 and res.reject

    def test_restandardized_invariance(self, rng):
        x = rng.gamma(3.0, size=40)
        a = jel_test(standardize(x), restandardize=True).statistic
        b = jel_test(standardize(10 + 4 * x), restandardize=True).statistic
        assert a == pytest.approx(b, abs=1e-9)

    def test_gumbel_power(self):
        cfg = SimulationConfig(dist=DistributionSpec("gumbel", (1.0, 1.0)), n=50, reps=2000,
                               alphas=(0.05,), tests=("jel",), seed=5)
        assert estimate_rejection_rate(cfg).rows[0].rate >= 0.99
