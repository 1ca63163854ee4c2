import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from expcopula import BrdParams, ConvergenceError, DataError, DomainError, ObservationSet
from expcopula import brd
from expcopula import copula as cop
from expcopula import inference as inf

TRUTH = BrdParams(33.4, 28.1, 0.287, 10.398)


def synthetic(p, n, seed):
    return ObservationSet.from_pairs(brd.sample_brd(p, n, seed))


class TestObservationSet:
    def test_validation(self):
        with pytest.raises(DataError):
            ObservationSet([1, 2, 3, 4], [1, 2, 3, 4])
        with pytest.raises(DataError):
            ObservationSet([1, 2, 3, 4, -5], [1, 2, 3, 4, 5])
        with pytest.raises(DataError):
            ObservationSet([1, 2, 3, 4, 5], [1, 2, 3, 4])
        with pytest.raises(DataError):
            ObservationSet.from_pairs(np.ones((6, 3)))

    def test_read_only(self):
        data = ObservationSet(np.arange(1.0, 7.0), np.arange(2.0, 8.0))
        assert data.n == 6
        with pytest.raises(ValueError):
            data.x[0] = 3.0


class TestMarginal:
    def test_constant_sample(self):
        assert inf.fit_rayleigh_marginal([3.0] * 7) == pytest.approx(3.0 / math.sqrt(2), rel=1e-15)

    def test_consistency(self):
        x = brd.rayleigh_quantile(np.random.default_rng(1).random(100000), 10.0)
        assert abs(inf.fit_rayleigh_marginal(x) - 10.0) < 0.1

    def test_domain(self):
        with pytest.raises(DomainError):
            inf.fit_rayleigh_marginal([1.0, 0.0, 2.0])
        with pytest.raises(DomainError):
            inf.fit_rayleigh_marginal([1.0])


class TestKs:
    @pytest.mark.parametrize("n", [5, 37, 400])
    def test_probability_plot_sample(self, n):
        lam = 2.5
        x = brd.rayleigh_quantile((np.arange(1, n + 1) - 0.5) / n, lam)
        r = inf.ks_test_rayleigh(x, lam)
        assert r.statistic == pytest.approx(0.5 / n, abs=1e-14)
        assert r.n == n and r.lambda_hat == lam

    def test_matches_scipy(self):
        from scipy import stats

        x = brd.rayleigh_quantile(np.random.default_rng(3).random(50), 4.0)
        ours = inf.ks_test_rayleigh(x, 4.0).statistic
        assert ours == pytest.approx(stats.kstest(x, "rayleigh", args=(0, 4.0)).statistic, abs=1e-15)

    @given(st.floats(1e-3, 1e3))
    @settings(max_examples=30)
    def test_scale_invariance(self, c):
        x = brd.rayleigh_quantile(np.random.default_rng(9).random(40), 1.3)
        a = inf.ks_test_rayleigh(x, 1.3)
        b = inf.ks_test_rayleigh(c * x, c * 1.3)
        assert b.statistic == pytest.approx(a.statistic, abs=1e-12)

    def test_bounds(self):
        r = inf.ks_test_rayleigh([100.0, 200.0, 300.0, 400.0, 500.0], 1.0)
        assert r.statistic == 1.0 and 0.0 <= r.p_value <= 1.0

    def test_default_scale_is_mle(self):
        x = [1.0, 2.0, 3.0, 4.0, 5.0]
        assert inf.ks_test_rayleigh(x).lambda_hat == inf.fit_rayleigh_marginal(x)


class TestLikelihood:
    def test_independence_factorises(self):
        data = synthetic(TRUTH, 200, 4)
        p = BrdParams(30.0, 25.0, 1.0, 0.0)
        direct = np.sum(brd.rayleigh_logpdf(data.x, 30.0)) + np.sum(brd.rayleigh_logpdf(data.y, 25.0))
        assert inf.log_likelihood(p, data) == pytest.approx(direct, rel=1e-14)

    def test_mode_spot_value(self):
        # at x = lambda the Rayleigh log density is -log(lambda) - 1/2
        data = ObservationSet([2.0] * 5, [7.0] * 5)
        expect = 5 * ((-math.log(2.0) - 0.5) + (-math.log(7.0) - 0.5))
        assert inf.log_likelihood(BrdParams(2.0, 7.0, 0.0), data) == pytest.approx(expect, rel=1e-14)

    def test_zero_density_sentinel(self):
        # alpha = 1, delta = -1 gives c(0, 0) = 1 - g(0)^2 = 0
        p = BrdParams(1.0, 1.0, 1.0, -1.0)
        data = ObservationSet([1e-200, 1.0, 1.0, 1.0, 1.0], [1e-200, 1.0, 2.0, 1.0, 1.0])
        assert inf.log_likelihood(p, data) == -math.inf


class TestCriteria:
    def test_trivial(self):
        aic, bic = inf.information_criteria(0.0, 1, math.e)
        assert aic == 2.0 and bic == pytest.approx(1.0, abs=1e-15)

    def test_brd_row(self):
        aic, bic = inf.information_criteria(-327.256, 4, 37)
        assert aic == pytest.approx(662.512, abs=1e-9)
        assert bic == pytest.approx(668.9557, abs=1e-4)

    def test_domain(self):
        with pytest.raises(DomainError):
            inf.information_criteria(0.0, 0, 10)

    def test_comparison_block(self):
        block = inf.model_comparison(37)
        brd_row = block["models"]["BRD"]
        assert brd_row["source"] == "published"
        assert brd_row["aic_discrepancy"] == pytest.approx(2.0, abs=1e-9)
        assert abs(brd_row["bic_discrepancy"]) < 1e-4
        assert set(block["models"]) == {"BGED", "BMOED", "BGRD", "BRD"}


class TestUnpack:
    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-500, 500), st.floats(-30, 30))
    def test_always_feasible(self, t1, t2, a, psi):
        p = inf.unpack([t1, t2, a, psi])
        assert abs(p.alpha) <= 100
        assert p.alpha == 0.0 or cop.is_feasible(p.alpha, p.delta)

    def test_zero_branch(self):
        p = inf.unpack([0.0, 0.0, 1e-9, 2.0])
        assert p.alpha == 0.0 and p.delta == 0.0


class TestFit:
    def test_recovery(self):
        data = synthetic(TRUTH, 2000, 101)
        fit = inf.fit_brd(data, restarts=6, rng_seed=0)
        assert fit.converged and fit.simplex_diameter < 1e-8
        assert abs(fit.params.lambda1 / TRUTH.lambda1 - 1) < 0.05
        assert abs(fit.params.lambda2 / TRUTH.lambda2 - 1) < 0.05
        from expcopula.dependence import spearman_rho_closed

        assert abs(fit.rho - spearman_rho_closed(TRUTH.copula)) < 0.05
        assert fit.aic - fit.bic == pytest.approx(2 * 4 - 4 * math.log(2000), abs=1e-9)
        assert cop.is_feasible(fit.params.alpha, fit.params.delta)

    def test_never_worse_than_independence(self):
        for seed in range(3):
            data = synthetic(BrdParams(1.0, 2.0, -2.0, -0.2), 150, seed)
            fit = inf.fit_brd(data, restarts=2, rng_seed=seed)
            assert fit.log_lik >= inf.independence_log_likelihood(data) - 1e-9

    def test_independent_data(self):
        data = synthetic(BrdParams(5.0, 5.0, 0.0), 2000, 7)
        fit = inf.fit_brd(data, restarts=4)
        assert abs(fit.rho) < 0.05

    def test_deterministic(self):
        data = synthetic(TRUTH, 300, 2)
        a = inf.fit_brd(data, restarts=3, rng_seed=5)
        b = inf.fit_brd(data, restarts=3, rng_seed=5)
        assert a == b

    def test_restart_log(self):
        data = synthetic(TRUTH, 200, 6)
        fit = inf.fit_brd(data, restarts=13, rng_seed=1)
        assert fit.n_restarts_used == 13 and len(fit.restart_log_liks) == 13
        assert fit.log_lik == max(fit.restart_log_liks)

    def test_bad_restarts(self):
        with pytest.raises(DomainError):
            inf.fit_brd(synthetic(TRUTH, 50, 0), restarts=0)

    def test_nonconvergence(self, monkeypatch):
        monkeypatch.setattr(inf, "MAX_EVALUATIONS", 30)
        with pytest.raises(ConvergenceError):
            inf.fit_brd(synthetic(TRUTH, 100, 0), restarts=2)
