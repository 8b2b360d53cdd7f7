# -*- coding: utf-8 -*-
##
# @file src/hammerlab/stats.py
# @brief Statistical test primitives shared by the acceptance experiments.
#
# @if japanese
# KS検定、Fisher-z と Spearman を併用した独立性検定、Poisson適合度のカイ二乗検定、符号検定、両対数回帰、
# 平均・分散・共分散の95%信頼区間を提供します。いずれも入力標本の決定的な関数です。
# p値は漸近分布によるもので、標本数の下限を設けています。
# @endif
#
# @if english
# KS tests, independence tests combining Fisher-z and Spearman, Poisson chi-square goodness of fit, sign tests, log-log regression and
# 95% intervals for means, variances and covariances. All are deterministic functions of their input samples.
# p-values are asymptotic, with a floor on the sample size.
# @endif
#

from __future__ import annotations

import math  # [JP] 標準: 数学関数 / [EN] Standard: math functions
from dataclasses import asdict, dataclass  # [JP] 標準: 結果レコード / [EN] Standard: result records
from typing import Any, Dict, Optional, Sequence, Tuple, Union  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: 配列 / [EN] External: arrays
from scipy import stats as sps  # [JP] 外部: 検定と分布 / [EN] External: tests and distributions

from .replicas import ordered_sum

KS_MIN_N = 20
INDEPENDENCE_MIN_N = 30
DEFAULT_ALPHA = 0.01
Z95 = 1.959963984540054

REF_EXPONENTIAL = "exponential"
REF_NORMAL = "normal"


@dataclass(frozen=True)
class TestResult:
    __test__ = False

    statistic: float
    p_value: float
    n: int
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self) -> None:
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value outside [0,1]: {self.p_value}")

    @property
    def passed(self) -> bool:
        return self.p_value > self.alpha

    def as_record(self) -> Dict[str, Any]:
        return {**asdict(self), "passed": self.passed}


@dataclass(frozen=True)
class MomentSummary:
    """
    レプリカ標本の平均・分散(不偏)と95%区間の半幅。共分散は対になった標本があるときだけ。
    """

    n: int
    mean: float
    variance: float
    mean_ci: float
    variance_ci: float
    covariance: Optional[float] = None
    covariance_ci: Optional[float] = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need at least 2 replicas, got {self.n}")
        if self.variance < 0:
            raise ValueError(f"negative variance {self.variance}")

    def as_record(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class ExponentFit:
    slope: float
    intercept: float
    stderr: float
    r_squared: float
    design: Tuple[Tuple[float, float], ...]

    def __post_init__(self) -> None:
        if len(self.design) < 3:
            raise ValueError("an exponent fit needs at least 3 design points")
        if self.stderr < 0:
            raise ValueError(f"negative stderr {self.stderr}")

    def as_record(self) -> Dict[str, Any]:
        return asdict(self)


# ------------------------------------------------------------
# 要約統計 / Summaries
# ------------------------------------------------------------

##
# @brief Mean, unbiased variance and their 95% halfwidths / 平均・不偏分散と95%区間の半幅
#
# @if japanese
# 分散の区間は4次中心モーメントを使う漸近近似 Var(s²) ≈ (m4 − s⁴)/n です。
# paired を渡すと共分散とその区間(影響関数の標準誤差)も求めます。
# @endif
#
# @if english
# The variance interval uses the asymptotic Var(s²) ≈ (m4 − s⁴)/n with the fourth central moment.
# With paired, the covariance and its interval (standard error of the influence values) are added.
# @endif
#
# @param sample [in]  標本 / Sample
# @param paired [in]  対になる標本 / Paired sample for the covariance
# @param z [in]  区間のz値 / z value of the interval
# @return MomentSummary  要約 / Summary
def summarize(sample: Sequence[float], paired: Optional[Sequence[float]] = None, z: float = Z95) -> MomentSummary:
    x = np.asarray(sample, dtype=np.float64)
    n = len(x)
    if n < 2:
        raise ValueError(f"need at least 2 replicas, got {n}")
    mean = ordered_sum(x) / n
    dev = x - mean
    var = float(dev @ dev / (n - 1))
    m4 = float(np.mean(dev**4))
    var_ci = z * math.sqrt(max(m4 - var * var, 0.0) / n)
    mean_ci = z * math.sqrt(var / n)
    cov = cov_ci = None
    if paired is not None:
        y = np.asarray(paired, dtype=np.float64)
        if len(y) != n:
            raise ValueError("paired samples must have equal length")
        ydev = y - y.mean()
        cov = float(dev @ ydev / (n - 1))
        infl = dev * ydev
        cov_ci = z * float(infl.std(ddof=1)) / math.sqrt(n)
    return MomentSummary(n, mean, var, mean_ci, var_ci, cov, cov_ci)


##
# @brief Mean of per-replica influence values with 95% halfwidth / 影響値の平均と95%半幅
#
# @if japanese
# 2つの推定量の差を、レプリカごとの影響値の平均として表し、その標準誤差で同時区間を作ります。
# @endif
#
# @if english
# Expresses a difference of two estimators as the mean of per-replica influence values and builds the joint
# interval from their standard error.
# @endif
def mean_ci(values: Sequence[float], z: float = Z95) -> Tuple[float, float]:
    v = np.asarray(values, dtype=np.float64)
    if len(v) < 2:
        raise ValueError("need at least 2 values")
    return ordered_sum(v) / len(v), z * float(v.std(ddof=1)) / math.sqrt(len(v))


# ------------------------------------------------------------
# 検定 / Tests
# ------------------------------------------------------------

##
# @brief Two-sided Kolmogorov-Smirnov test / 両側KS検定
#
# @param sample [in]  標本 / Sample
# @param reference [in]  "exponential" / "normal" / 比較用の経験標本 / Reference law or empirical sample
# @param rate [in]  指数分布のレート / Exponential rate
# @param alpha [in]  有意水準 / Significance level
# @return TestResult  検定結果 / Test result
# @throws ValueError n<20 の場合 / When n < 20
def ks_test(
    sample: Sequence[float],
    reference: Union[str, Sequence[float]],
    *,
    rate: float = 1.0,
    alpha: float = DEFAULT_ALPHA,
) -> TestResult:
    x = np.asarray(sample, dtype=np.float64)
    if len(x) < KS_MIN_N:
        raise ValueError(f"KS test needs n >= {KS_MIN_N}, got {len(x)}")
    if isinstance(reference, str):
        if reference == REF_EXPONENTIAL:
            res = sps.kstest(x, "expon", args=(0.0, 1.0 / rate))
        elif reference == REF_NORMAL:
            res = sps.kstest(x, "norm")
        else:
            raise ValueError(f"unknown reference law '{reference}'")
    else:
        ref = np.asarray(reference, dtype=np.float64)
        if len(ref) < KS_MIN_N:
            raise ValueError(f"KS reference needs n >= {KS_MIN_N}, got {len(ref)}")
        res = sps.ks_2samp(x, ref, method="asymp")
    return TestResult(float(res.statistic), float(min(max(res.pvalue, 0.0), 1.0)), len(x), alpha)


##
# @brief Pearson and Spearman correlation test / Pearson相関とSpearman順位相関による検定
#
# @if japanese
# Pearson相関の Fisher-z 検定と Spearman 順位相関の検定を行い、小さい方のp値を2倍(Bonferroni)して返します。
# 統計量は Pearson の r です。単調だが非線形な依存は順位相関側で検出されます。
# @endif
#
# @if english
# Runs the Fisher-z test on the Pearson correlation and the Spearman rank test, and returns twice the smaller
# p-value (Bonferroni). The statistic is Pearson r. Monotone but non-linear dependence is caught by the rank test.
# @endif
#
# @throws ValueError n<30 または分散0の場合 / When n < 30 or an input is constant
def independence_test(
    sample_a: Sequence[float], sample_b: Sequence[float], *, alpha: float = DEFAULT_ALPHA
) -> TestResult:
    a = np.asarray(sample_a, dtype=np.float64)
    b = np.asarray(sample_b, dtype=np.float64)
    if len(a) != len(b):
        raise ValueError("independence test needs paired samples of equal length")
    n = len(a)
    if n < INDEPENDENCE_MIN_N:
        raise ValueError(f"independence test needs n >= {INDEPENDENCE_MIN_N}, got {n}")
    if a.std() == 0 or b.std() == 0:
        raise ValueError("independence test input has zero variance")
    r = float(np.corrcoef(a, b)[0, 1])
    if abs(r) >= 1.0:
        return TestResult(r, 0.0, n, alpha)
    p_pearson = float(2.0 * sps.norm.sf(abs(math.atanh(r) * math.sqrt(n - 3))))
    p_rank = float(sps.spearmanr(a, b).pvalue)
    if not math.isfinite(p_rank):
        p_rank = 1.0
    return TestResult(r, min(1.0, 2.0 * min(p_pearson, p_rank)), n, alpha)


##
# @brief Chi-square goodness of fit against Poisson counts / Poisson個数へのカイ二乗適合度検定
#
# @if japanese
# 期待度数が5未満になる裾のビンは最後のビン(k以上)にまとめます。
# @endif
#
# @if english
# Tail bins with expected count below 5 are merged into a final "k or more" bin.
# @endif
#
# @param counts [in]  セルごとの点の個数 / Point counts per cell
# @param mean [in]  Poisson平均 / Poisson mean
# @return TestResult  検定結果 / Test result
def poisson_chi2_test(counts: Sequence[int], mean: float, *, alpha: float = DEFAULT_ALPHA) -> TestResult:
    c = np.asarray(counts, dtype=np.int64)
    n = len(c)
    if n < KS_MIN_N:
        raise ValueError(f"chi-square test needs n >= {KS_MIN_N} cells, got {n}")
    if not mean > 0:
        raise ValueError(f"Poisson mean must be positive, got {mean}")
    k_max = 0
    while n * sps.poisson.sf(k_max, mean) >= 5.0:
        k_max += 1
    edges = np.arange(k_max + 1)
    expected = n * sps.poisson.pmf(edges, mean)
    expected[-1] = n * sps.poisson.sf(k_max - 1, mean) if k_max > 0 else float(n)
    observed = np.array([np.sum(c == k) for k in edges[:-1]] + [np.sum(c >= k_max)], dtype=np.float64)
    if len(observed) < 2:
        return TestResult(0.0, 1.0, n, alpha)
    res = sps.chisquare(observed, expected * observed.sum() / expected.sum())
    return TestResult(float(res.statistic), float(res.pvalue), n, alpha)


##
# @brief Two-sided sign test for zero median / 中央値0の両側符号検定
def sign_test(values: Sequence[float], *, alpha: float = DEFAULT_ALPHA) -> TestResult:
    v = np.asarray(values, dtype=np.float64)
    pos = int(np.sum(v > 0))
    nz = int(np.sum(v != 0))
    if nz == 0:
        return TestResult(0.0, 1.0, len(v), alpha)
    res = sps.binomtest(pos, nz, 0.5)
    return TestResult(pos / nz, float(res.pvalue), len(v), alpha)


##
# @brief Least squares on (log t, log y) / 両対数の最小二乗
#
# @param points [in]  (t, y) の列 / (t, y) pairs
# @return ExponentFit  傾きと標準誤差 / Slope and standard error
# @throws ValueError 点が3未満、または正でない値 / When fewer than 3 points or nonpositive values
def loglog_fit(points: Sequence[Tuple[float, float]]) -> ExponentFit:
    arr = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(arr) < 3:
        raise ValueError(f"log-log fit needs at least 3 points, got {len(arr)}")
    if np.any(arr <= 0):
        raise ValueError("log-log fit needs positive t and y")
    lt, ly = np.log(arr[:, 0]), np.log(arr[:, 1])
    res = sps.linregress(lt, ly)
    stderr = float(res.stderr) if math.isfinite(res.stderr) else 0.0
    design = tuple((float(a), float(b)) for a, b in zip(lt, ly))
    return ExponentFit(float(res.slope), float(res.intercept), stderr, float(res.rvalue**2), design)
