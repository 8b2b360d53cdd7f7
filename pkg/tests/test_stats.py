# -*- coding: utf-8 -*-
##
# @file tests/test_stats.py
# @brief Summaries, intervals and goodness-of-fit helpers.
#

from __future__ import annotations

import math

import numpy as np
import pytest

from hammerlab.stats import (
    TestResult,
    independence_test,
    ks_test,
    loglog_fit,
    mean_ci,
    poisson_chi2_test,
    sign_test,
    summarize,
)


def test_summarize_moments():
    s = summarize([1.0, 2.0, 3.0, 4.0])
    assert s.n == 4
    assert s.mean == 2.5
    assert s.variance == pytest.approx(5.0 / 3.0)
    assert s.mean_ci == pytest.approx(1.959963984540054 * math.sqrt(5.0 / 12.0))
    assert s.covariance is None


def test_summarize_paired_covariance():
    x = [1.0, 2.0, 3.0, 4.0]
    s = summarize(x, paired=[2.0, 4.0, 6.0, 8.0])
    assert s.covariance == pytest.approx(10.0 / 3.0)
    with pytest.raises(ValueError):
        summarize(x, paired=[1.0])
    with pytest.raises(ValueError):
        summarize([1.0])


def test_mean_ci():
    mean, half = mean_ci([2.0, 2.0, 2.0])
    assert mean == 2.0 and half == 0.0
    with pytest.raises(ValueError):
        mean_ci([1.0])


def test_means_do_not_depend_on_sample_order():
    values = [1e16, 1.0, -1e16, 1.0]
    assert summarize(values).mean == 0.5
    assert summarize(values[::-1]).mean == 0.5
    assert mean_ci(values)[0] == 0.5


def test_ks_accepts_its_own_law_and_rejects_another():
    rng = np.random.default_rng(1)
    draws = rng.exponential(0.5, 2000)
    assert ks_test(draws, "exponential", rate=2.0, alpha=0.001).passed
    assert not ks_test(draws, "exponential", rate=1.0).passed
    assert not ks_test(rng.normal(size=500), "exponential").passed
    assert ks_test(rng.normal(size=500), rng.normal(size=500), alpha=0.001).passed
    with pytest.raises(ValueError):
        ks_test(draws[:10], "exponential")
    with pytest.raises(ValueError):
        ks_test(draws, "cauchy")


def test_independence():
    rng = np.random.default_rng(2)
    a = rng.normal(size=500)
    assert independence_test(a, rng.normal(size=500), alpha=0.001).passed
    assert not independence_test(a, a + 0.1 * rng.normal(size=500)).passed
    with pytest.raises(ValueError):
        independence_test(np.ones(50), a[:50])
    with pytest.raises(ValueError):
        independence_test(a[:10], a[:10])


def test_independence_catches_monotone_nonlinear_dependence():
    # [JP] 外れ値1個でPearsonは弱いが順位は完全一致 / [EN] one outlier weakens Pearson, ranks agree exactly
    a = np.arange(1.0, 41.0)
    b = a.copy()
    b[-1] = 1e6
    res = independence_test(a, b)
    assert abs(res.statistic) < 0.3
    assert not res.passed


def test_poisson_chi_square():
    rng = np.random.default_rng(3)
    assert poisson_chi2_test(rng.poisson(3.0, 500), 3.0, alpha=0.001).passed
    assert not poisson_chi2_test(rng.poisson(6.0, 500), 3.0).passed
    with pytest.raises(ValueError):
        poisson_chi2_test([1, 2, 3], 2.0)
    with pytest.raises(ValueError):
        poisson_chi2_test([1] * 30, 0.0)


def test_sign_test():
    assert not sign_test(np.arange(1.0, 31.0)).passed
    assert sign_test([0.0, 0.0]).p_value == 1.0
    assert sign_test([-1.0, 1.0, -2.0, 2.0]).passed


def test_loglog_fit_recovers_exponent():
    fit = loglog_fit([(t, 2.0 * t**0.5) for t in (1.0, 4.0, 16.0, 64.0)])
    assert fit.slope == pytest.approx(0.5)
    assert fit.intercept == pytest.approx(math.log(2.0))
    assert fit.r_squared == pytest.approx(1.0)
    with pytest.raises(ValueError):
        loglog_fit([(1.0, 1.0), (2.0, 2.0)])
    with pytest.raises(ValueError):
        loglog_fit([(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)])


def test_result_rejects_bad_p_value():
    with pytest.raises(ValueError):
        TestResult(0.0, 1.5, 10)
    assert TestResult(0.0, 0.5, 10).as_record()["passed"]
