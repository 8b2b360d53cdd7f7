# -*- coding: utf-8 -*-
##
# @file src/hammerlab/fluctuations.py
# @brief Equilibrium boxes, exit-point variance identities, CLTs and the cube-root exponent.
#
# @if japanese
# 古典モデルの平衡は、箱 [0,x]×[0,t] の下辺に強度 λ のPoissonソース、左辺に強度 1/λ のPoissonシンクを置くことで
# 有限のデータから分布の意味で正確に作れます。このモジュールはその標本を使って、出口点による分散・共分散の恒等式、
# 特性方向以外での中心極限定理、E Z⁺ と Var L の t^{2/3} スケーリング、形状定数 γ(F) の推定を検証します。
# 各レプリカは独立な乱数系列を持ち、集計はレプリカ番号順の配列で行います。
# @endif
#
# @if english
# The classical equilibrium is exact in law on a finite box [0,x]×[0,t] with Poisson(λ) sources on the bottom edge
# and Poisson(1/λ) sinks on the left edge. This module uses such samples to check the exit-point variance and
# covariance identities, the CLT off the characteristic direction, the t^{2/3} scaling of E Z⁺ and Var L, and the
# shape constant γ(F). Every replica has its own stream and reductions run over arrays in replica order.
# @endif
#

from __future__ import annotations

import logging  # [JP] 標準: 進捗ログ / [EN] Standard: progress logging
import math  # [JP] 標準: 平方根・三角関数 / [EN] Standard: roots and trigonometry
from dataclasses import dataclass  # [JP] 標準: 結果レコード / [EN] Standard: result records
from typing import Any, Dict, List, Optional, Sequence, Tuple  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: 配列 / [EN] External: arrays

from .lpp import EMPTY_PATH, PassageResult, SourcesSinks, last_passage, sources_sinks_passage
from .points import (
    AtomicMeasure,
    Rect,
    WeightDistribution,
    WeightedPointSet,
    derive_seed,
    sample_atomic_poisson,
    sample_point_set,
    sqrt_tail_integral,
    thin,
)
from .replicas import run_replicas
from .stats import (
    REF_NORMAL,
    ExponentFit,
    MomentSummary,
    TestResult,
    ks_test,
    loglog_fit,
    mean_ci,
    sign_test,
    summarize,
)

logger = logging.getLogger(__name__)

# [JP] 指数の受理帯(2/3 ± 0.10) / [EN] Exponent acceptance band, 2/3 +- 0.10
EXPONENT_BAND = (0.57, 0.77)
TAIL_RS = (1.0, 2.0, 4.0)
COMPARE_RS = (2.0, 4.0, 8.0)


# ------------------------------------------------------------
# 平衡の箱 / Equilibrium boxes
# ------------------------------------------------------------


def _require_classical(dist: WeightDistribution) -> None:
    if not dist.is_classical:
        raise NotImplementedError(f"equilibrium boxes need unit weights, got {dist.label}")


##
# @brief Sample the boundary data and interior of one equilibrium box / 平衡の箱を1つ生成する
#
# @return (SourcesSinks, WeightedPointSet)  境界データと内部の点 / Boundary data and interior points
def equilibrium_box(lam: float, x: float, t: float, seed: int) -> Tuple[SourcesSinks, WeightedPointSet]:
    if not lam > 0 or x < 0 or t < 0:
        raise ValueError(f"need lambda > 0 and x, t >= 0, got {lam}, {x}, {t}")
    unit = WeightDistribution.dirac()
    src = sample_atomic_poisson((0.0, x), lam, unit, derive_seed(seed, 1)) if x > 0 else AtomicMeasure()
    snk = sample_atomic_poisson((0.0, t), 1.0 / lam, unit, derive_seed(seed, 2)) if t > 0 else AtomicMeasure()
    if x > 0 and t > 0:
        points = sample_point_set(Rect(0.0, x, 0.0, t), 1.0, unit, derive_seed(seed, 0))
    else:
        points = WeightedPointSet.empty(Rect(0.0, max(x, 1.0), 0.0, max(t, 1.0)))
    return SourcesSinks(src, snk), points


##
# @brief Equilibrium passage value L_λ(x,t) / 平衡の通過時間 L_λ(x,t)
#
# @param lam [in]  ソースの強度 / Source intensity
# @param x [in]  箱の幅 / Box width
# @param t [in]  箱の高さ / Box height
# @param seed [in]  シード / Seed
# @param dist [in]  重み分布(古典のみ) / Weight law, classical only
# @return PassageResult  値と出口点 Z̄, Z̄′, Z⁺ / Value with exits
# @throws NotImplementedError 重みが1でない場合 / For non-unit weights
def equilibrium_passage(
    lam: float, x: float, t: float, seed: int, dist: Optional[WeightDistribution] = None
) -> PassageResult:
    _require_classical(dist or WeightDistribution.dirac())
    if x == 0 and t == 0:
        return PassageResult(0.0, EMPTY_PATH, 0.0, 0.0, 0.0)
    ss, points = equilibrium_box(lam, x, t, seed)
    return sources_sinks_passage(ss, points, x, t)


def _exit_replica(index: int, seed: int, *, lam: float, x: float, t: float) -> Tuple[float, float, float]:
    ss, points = equilibrium_box(lam, x, t, seed)
    res = sources_sinks_passage(ss, points, x, t)
    return res.value, ss.sources.total, res.exit_plus


def _exit_samples(lam: float, x: float, t: float, replicas: int, seed: int, threads: int) -> np.ndarray:
    rows = run_replicas(_exit_replica, replicas, seed, threads, lam=lam, x=x, t=t)
    return np.asarray(rows, dtype=np.float64).reshape(-1, 3)


# ------------------------------------------------------------
# 出口点の恒等式 / Exit-point identities
# ------------------------------------------------------------


@dataclass(frozen=True)
class ExitIdentityReport:
    lam: float
    x: float
    t: float
    value: MomentSummary
    mean_exit: float
    mean_exit_ci: float
    variance_target: float
    variance_residual: float
    variance_residual_ci: float
    covariance: float
    covariance_target: float
    covariance_residual: float
    covariance_residual_ci: float

    @property
    def variance_passed(self) -> bool:
        return abs(self.variance_residual) <= self.variance_residual_ci

    @property
    def covariance_passed(self) -> bool:
        return abs(self.covariance_residual) <= self.covariance_residual_ci

    @property
    def passed(self) -> bool:
        return self.variance_passed and self.covariance_passed

    def as_record(self) -> Dict[str, Any]:
        return {
            "lambda": self.lam,
            "x": self.x,
            "t": self.t,
            "value": self.value.as_record(),
            "mean_exit": self.mean_exit,
            "mean_exit_ci": self.mean_exit_ci,
            "variance_target": self.variance_target,
            "variance_residual": self.variance_residual,
            "variance_residual_ci": self.variance_residual_ci,
            "covariance": self.covariance,
            "covariance_target": self.covariance_target,
            "covariance_residual": self.covariance_residual,
            "covariance_residual_ci": self.covariance_residual_ci,
            "variance_passed": self.variance_passed,
            "covariance_passed": self.covariance_passed,
        }


##
# @brief Residuals of the exit-point identities from paired samples / 対になった標本からの恒等式の残差
#
# @if japanese
# 分散: (L−L̄)²·n/(n−1) − 2λZ⁺ − (t/λ − λx)、共分散: (ν−ν̄)(L−L̄)·n/(n−1) − λZ⁺ をレプリカごとに作り、
# その平均と標準誤差で2つの推定量の差の同時区間とします。
# @endif
#
# @if english
# Builds per-replica values (L−L̄)²·n/(n−1) − 2λZ⁺ − (t/λ − λx) and (ν−ν̄)(L−L̄)·n/(n−1) − λZ⁺; their mean and
# standard error give the joint interval of the difference between the two estimators.
# @endif
def _identity_report(lam: float, x: float, t: float, rows: np.ndarray) -> ExitIdentityReport:
    L, nu, zp = rows[:, 0], rows[:, 1], rows[:, 2]
    n = len(L)
    k = n / (n - 1)
    dl, dn = L - L.mean(), nu - nu.mean()
    offset = t / lam - lam * x
    v_res, v_ci = mean_ci(k * dl * dl - 2.0 * lam * zp - offset)
    c_res, c_ci = mean_ci(k * dn * dl - lam * zp)
    mz, mz_ci = mean_ci(zp)
    summary = summarize(L, paired=nu)
    return ExitIdentityReport(
        lam=lam,
        x=x,
        t=t,
        value=summary,
        mean_exit=mz,
        mean_exit_ci=mz_ci,
        variance_target=offset + 2.0 * lam * mz,
        variance_residual=v_res,
        variance_residual_ci=v_ci,
        covariance=float(summary.covariance or 0.0),
        covariance_target=lam * mz,
        covariance_residual=c_res,
        covariance_residual_ci=c_ci,
    )


##
# @brief Verify Var L = t/λ − λx + 2λ E Z⁺ and Cov(ν(x), L) = λ E Z⁺ / 出口点の分散・共分散公式を検証
#
# @param lam [in]  強度 / Intensity
# @param x [in]  箱の幅 / Box width
# @param t [in]  箱の高さ / Box height
# @param replicas [in]  レプリカ数 / Replica count
# @return ExitIdentityReport  結果 / Report
def exit_identity_report(
    lam: float, x: float, t: float, replicas: int, *, seed: int = 0, threads: int = 1
) -> ExitIdentityReport:
    if replicas < 2:
        raise ValueError(f"need at least 2 replicas, got {replicas}")
    return _identity_report(lam, x, t, _exit_samples(lam, x, t, replicas, seed, threads))


##
# @brief Sign test of the variance residual over meta-replications / メタ反復での分散残差の符号検定
#
# @param meta [in]  メタ反復数 / Number of meta-replications
# @return TestResult  符号検定の結果 / Sign test result
def exit_identity_meta(
    lam: float, x: float, t: float, replicas: int, meta: int, *, seed: int = 0, threads: int = 1
) -> TestResult:
    if meta < 1:
        raise ValueError(f"meta must be >= 1, got {meta}")
    residuals = []
    for m in range(meta):
        rep = exit_identity_report(lam, x, t, replicas, seed=derive_seed(seed, m), threads=threads)
        residuals.append(rep.variance_residual)
    return sign_test(residuals)


# ------------------------------------------------------------
# 定常性と中心極限定理 / Stationarity and CLTs
# ------------------------------------------------------------


def _stationarity_replica(
    index: int, seed: int, *, lam: float, a: float, t: float
) -> Tuple[float, float]:
    phi, psi = 1.0 / (lam * lam), 2.0 / lam
    x = a * t
    b = x - phi * t
    # [JP] 箱の原点を min(0,b) に移す / [EN] shift the box origin to min(0, b)
    o = min(0.0, b)
    width = x - o
    ss, points = equilibrium_box(lam, width, t, derive_seed(seed, 0))
    res = sources_sinks_passage(ss, points, width, t)
    residual = res.value - ss.sources.mass_in(0.0, b - o) - psi * t
    ss2, points2 = equilibrium_box(lam, phi * t, t, derive_seed(seed, 1))
    char = sources_sinks_passage(ss2, points2, phi * t, t).value
    return residual, char


##
# @brief Mean-square residual L_λ(at,t) − ν_λ(b) − ψt / 残差 L_λ(at,t) − ν_λ(b) − ψt の平均二乗
#
# @if japanese
# b = at − φt がソース軸の負側に来るときは箱の原点を b に移します(ν_λ(b) の符号付き値をそのまま使えるように)。
# 比較対象の Var L_λ(φt,t) は独立なレプリカから推定します。
# @endif
#
# @if english
# When b = at − φt falls on the negative source axis the box origin moves to b so ν_λ(b) keeps its signed value.
# The reference Var L_λ(φt,t) comes from independent replicas.
# @endif
#
# @param lam [in]  強度 / Intensity
# @param a [in]  経路の傾き x/t / Path speed x/t
# @param t [in]  時刻 / Time
# @param replicas [in]  レプリカ数 / Replica count
# @param bound [in]  平均二乗/t の上限 / Upper bound for mean-square / t
# @return dict  推定値・区間・判定 / Estimates, intervals and verdicts
def stationarity_residual(
    lam: float,
    a: float,
    t: float,
    replicas: int,
    *,
    seed: int = 0,
    threads: int = 1,
    bound: float = 0.15,
) -> Dict[str, Any]:
    if not (lam > 0 and a > 0 and t > 0):
        raise ValueError(f"lambda, a and t must be positive, got {lam}, {a}, {t}")
    rows = np.asarray(
        run_replicas(_stationarity_replica, replicas, seed, threads, lam=lam, a=a, t=float(t)), dtype=np.float64
    ).reshape(-1, 2)
    ms, ms_ci = mean_ci(rows[:, 0] ** 2)
    char = summarize(rows[:, 1])
    gap = ms - char.variance
    gap_ci = math.hypot(ms_ci, char.variance_ci)
    ratio = ms / t
    return {
        "lambda": lam,
        "a": a,
        "t": t,
        "mean_square": ms,
        "mean_square_ci": ms_ci,
        "char_variance": char.variance,
        "char_variance_ci": char.variance_ci,
        "ratio": ratio,
        "bound": bound,
        "identity_passed": abs(gap) <= gap_ci,
        "ratio_passed": ratio <= bound,
    }


def _clt_replica(index: int, seed: int, *, lam: float, a: float, t: float) -> float:
    return equilibrium_passage(lam, a * t, t, seed).value


##
# @brief Normal limit off the characteristic direction / 特性方向以外での正規極限
#
# @param lam [in]  強度 / Intensity
# @param a [in]  経路の傾き(1/λ² 以外) / Path speed, not 1/lambda^2
# @param t [in]  時刻 / Time
# @param replicas [in]  レプリカ数 / Replica count
# @return dict  分散比とKS検定 / Variance ratio and KS result
# @throws ValueError a = 1/λ² の場合 / On the characteristic direction
def clt_check(
    lam: float, a: float, t: float, replicas: int, *, seed: int = 0, threads: int = 1, tol: float = 0.10
) -> Dict[str, Any]:
    if not (lam > 0 and a > 0 and t > 0):
        raise ValueError(f"lambda, a and t must be positive, got {lam}, {a}, {t}")
    if math.isclose(a * lam * lam, 1.0, rel_tol=1e-12):
        raise ValueError(f"a = 1/lambda^2 = {a} is the characteristic direction; the CLT needs a != 1/lambda^2")
    sigma2 = abs(a * lam - 1.0 / lam)
    L = np.asarray(run_replicas(_clt_replica, replicas, seed, threads, lam=lam, a=a, t=float(t)))
    s = summarize(L)
    centred = (L - (lam * a * t + t / lam)) / math.sqrt(sigma2 * t)
    ks = ks_test(centred, REF_NORMAL)
    ratio = s.variance / t / sigma2
    return {
        "lambda": lam,
        "a": a,
        "t": t,
        "sigma2": sigma2,
        "value": s.as_record(),
        "variance_ratio": ratio,
        "ks": ks.as_record(),
        "passed": abs(ratio - 1.0) <= tol and ks.passed,
    }


def _busemann_clt_replica(index: int, seed: int, *, beta: float, t: float) -> float:
    x, s = t * math.cos(beta), t * math.sin(beta)
    x = 0.0 if abs(x) < 1e-12 * t else x
    s = 0.0 if abs(s) < 1e-12 * t else s
    if x >= 0:
        return equilibrium_passage(1.0, x, s, seed).value
    # [JP] 原点を (x,0) に移した箱の境界データ: シンクの総数 − (x,0] のソース数
    # [EN] boundary data of the box moved to (x,0): total sinks minus sources in (x,0]
    rng = np.random.default_rng(seed)
    return float(rng.poisson(s) - rng.poisson(-x))


##
# @brief Busemann CLT Var B(β,t)/t = |cos β − sin β| / Busemann関数の中心極限定理
#
# @param beta [in]  方向角 [0, π] / Direction in [0, pi]
# @param t [in]  距離 / Distance
# @param replicas [in]  レプリカ数 / Replica count
# @return dict  傾きの推定と判定 / Slope estimate and verdict
def busemann_clt_check(
    beta: float, t: float, replicas: int, *, seed: int = 0, threads: int = 1, tol: float = 0.10
) -> Dict[str, Any]:
    if not 0.0 <= beta <= math.pi:
        raise ValueError(f"beta must lie in [0, pi], got {beta}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    B = np.asarray(run_replicas(_busemann_clt_replica, replicas, seed, threads, beta=beta, t=float(t)))
    s = summarize(B)
    target = abs(math.cos(beta) - math.sin(beta))
    slope = s.variance / t
    slope_ci = s.variance_ci / t
    return {
        "beta": beta,
        "t": t,
        "slope": slope,
        "slope_ci": slope_ci,
        "target": target,
        "passed": abs(slope - target) <= max(slope_ci, tol * max(target, 1e-12)),
    }


def _reflection_replica(index: int, seed: int, *, lam: float, x: float, t: float) -> Tuple[float, float, float, float]:
    a = equilibrium_passage(lam, x, t, derive_seed(seed, 0))
    b = equilibrium_passage(1.0 / lam, t, x, derive_seed(seed, 1))
    return a.value, b.value, float(a.exit_sup), float(b.exit_inf)


##
# @brief Reflection symmetry in law / 反転対称性(分布の意味)
#
# @if japanese
# (x,t),λ と (t,x),1/λ の通過時間の分布、および Z̄ と −Z̄′ の分布をKS検定で比べます。
# @endif
#
# @if english
# Compares in law the passage values at (x,t) with λ and at (t,x) with 1/λ, and Z̄ against −Z̄′, by KS tests.
# @endif
def reflection_check(
    lam: float, x: float, t: float, replicas: int, *, seed: int = 0, threads: int = 1
) -> Dict[str, Any]:
    rows = np.asarray(
        run_replicas(_reflection_replica, replicas, seed, threads, lam=lam, x=x, t=t), dtype=np.float64
    ).reshape(-1, 4)
    values = ks_test(rows[:, 0], rows[:, 1])
    exits = ks_test(rows[:, 2], -rows[:, 3])
    return {
        "values": values.as_record(),
        "exits": exits.as_record(),
        "passed": values.passed and exits.passed,
    }


# ------------------------------------------------------------
# 立方根スケーリング / Cube-root scaling
# ------------------------------------------------------------

##
# @brief Tail table P(|sample − centre| > r·scale) / 裾の表
#
# @param sample [in]  標本 / Sample
# @param scale [in]  尺度 / Scale
# @param rs [in]  倍率 / Multipliers
# @param centre [in]  中心(Noneなら0からの片側 sample > r·scale) / Centre, one-sided from 0 when None
# @return list[(r, prob)]  倍率と確率 / Multipliers and probabilities
def tail_profile(
    sample: Sequence[float], scale: float, rs: Sequence[float] = TAIL_RS, centre: Optional[float] = None
) -> List[Tuple[float, float]]:
    v = np.asarray(sample, dtype=np.float64)
    if not len(v):
        raise ValueError("tail profile of an empty sample")
    dev = v if centre is None else np.abs(v - centre)
    return [(float(r), float(np.mean(dev > r * scale))) for r in rs]


def _tail_decreasing(table: Sequence[Tuple[float, float]]) -> bool:
    return all(b[1] <= a[1] for a, b in zip(table, table[1:]))


##
# @brief Tail decays faster than r^-power / 裾が r^-power より速く減衰するか
#
# @param table [in]  tail_profile の表 / Table from tail_profile
# @param power [in]  比較する冪 / Power to compare against
# @return bool  確率が減少し、かつ r^power·確率 も増えない / Probabilities decrease and r^power times them never grows
def tail_decays_faster(table: Sequence[Tuple[float, float]], power: float = 2.0) -> bool:
    scaled = [r**power * p for r, p in table]
    return _tail_decreasing(table) and all(b <= a for a, b in zip(scaled, scaled[1:]))


##
# @brief Whole interval lies under a bound / 区間全体が上限以下か
#
# @param estimate [in]  推定値 / Estimate
# @param halfwidth [in]  区間の半幅 / Interval halfwidth
# @param bound [in]  上限 / Upper bound
# @return bool  estimate + halfwidth <= bound
def interval_below(estimate: float, halfwidth: float, bound: float) -> bool:
    return estimate + abs(halfwidth) <= bound


@dataclass(frozen=True)
class CubeRootReport:
    exit_fit: ExponentFit
    variance_fit: ExponentFit
    per_t: Tuple[ExitIdentityReport, ...]
    tails: Tuple[Tuple[float, Tuple[Tuple[float, float], ...]], ...]
    band: Tuple[float, float]

    @property
    def slopes_passed(self) -> bool:
        lo, hi = self.band
        return lo <= self.exit_fit.slope <= hi and lo <= self.variance_fit.slope <= hi

    @property
    def identity_passed(self) -> bool:
        return all(r.variance_passed for r in self.per_t)

    @property
    def tails_passed(self) -> bool:
        return all(tail_decays_faster(tab) for _, tab in self.tails)

    @property
    def passed(self) -> bool:
        return self.slopes_passed and self.identity_passed and self.tails_passed

    def as_record(self) -> Dict[str, Any]:
        return {
            "exit_fit": self.exit_fit.as_record(),
            "variance_fit": self.variance_fit.as_record(),
            "per_t": [r.as_record() for r in self.per_t],
            "tails": [{"t": t, "table": [list(p) for p in tab]} for t, tab in self.tails],
            "band": list(self.band),
            "slopes_passed": self.slopes_passed,
            "identity_passed": self.identity_passed,
            "tails_passed": self.tails_passed,
        }


##
# @brief Log-log slopes of E Z⁺₁(t,t) and Var L₁(t,t) / E Z⁺₁(t,t) と Var L₁(t,t) の両対数の傾き
#
# @param t_grid [in]  等比の時刻列(4点以上) / Geometric time grid, at least 4 points
# @param replicas_per_t [in]  各時刻のレプリカ数 / Replicas per grid point
# @return CubeRootReport  2つの当てはめと各時刻の恒等式 / Both fits and per-t identities
# @throws ValueError 格子点が4未満 / With fewer than 4 grid points
def cube_root_fit(
    t_grid: Sequence[float],
    replicas_per_t: int,
    *,
    seed: int = 0,
    threads: int = 1,
    band: Tuple[float, float] = EXPONENT_BAND,
) -> CubeRootReport:
    grid = [float(t) for t in t_grid]
    if len(grid) < 4:
        raise ValueError(f"cube-root fit needs at least 4 grid points, got {len(grid)}")
    if any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] <= 0:
        raise ValueError(f"t grid must be positive and increasing: {grid}")
    per_t: List[ExitIdentityReport] = []
    tails = []
    for k, t in enumerate(grid):
        rows = _exit_samples(1.0, t, t, replicas_per_t, derive_seed(seed, k), threads)
        rep = _identity_report(1.0, t, t, rows)
        per_t.append(rep)
        tails.append((t, tuple(tail_profile(rows[:, 2], t ** (2.0 / 3.0)))))
        logger.info("cube-root t=%g: E Z+=%.4f Var L=%.4f", t, rep.mean_exit, rep.value.variance)
    exit_fit = loglog_fit([(r.t, r.mean_exit) for r in per_t])
    var_fit = loglog_fit([(r.t, r.value.variance) for r in per_t])
    return CubeRootReport(exit_fit, var_fit, tuple(per_t), tuple(tails), band)


def _compare_replica(index: int, seed: int, *, t: float) -> Tuple[float, float]:
    ss, points = equilibrium_box(1.0, t, t, seed)
    stat = sources_sinks_passage(ss, points, t, t).value
    p2p = last_passage(points, (0.0, 0.0), (t, t))
    return p2p, stat


##
# @brief Point-to-point versus stationary passage on shared points / 共有点での点対点と定常の比較
#
# @param t_list [in]  時刻列 / Times
# @param replicas [in]  レプリカ数 / Replica count
# @return dict  時刻ごとの比と裾の表、判定 / Ratios, tail tables and verdicts
def compare_L_stationary(
    t_list: Sequence[float], replicas: int, *, seed: int = 0, threads: int = 1, rs: Sequence[float] = COMPARE_RS
) -> Dict[str, Any]:
    rows_out = []
    dominated = True
    for k, t in enumerate(float(s) for s in t_list):
        arr = np.asarray(
            run_replicas(_compare_replica, replicas, derive_seed(seed, k), threads, t=t), dtype=np.float64
        ).reshape(-1, 2)
        p2p, stat = arr[:, 0], arr[:, 1]
        dominated = dominated and bool(np.all(stat >= p2p - 1e-9))
        ratio, ratio_ci = mean_ci(np.abs(p2p - 2.0 * t) / t ** (1.0 / 3.0))
        table = tail_profile(stat - p2p, t ** (1.0 / 3.0), rs)
        rows_out.append({"t": t, "ratio": ratio, "ratio_ci": ratio_ci, "tail": [list(p) for p in table]})
    ratios = [r["ratio"] for r in rows_out]
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    tails_ok = all(_tail_decreasing([tuple(p) for p in r["tail"]]) for r in rows_out)
    return {
        "rows": rows_out,
        "spread": spread,
        "dominated": dominated,
        "tails_decreasing": tails_ok,
        "passed": spread <= 2.0 and tails_ok and dominated,
    }


# ------------------------------------------------------------
# 形状定数 / Shape constant
# ------------------------------------------------------------


def _shape_replica(
    index: int, seed: int, *, dist: WeightDistribution, t: float, keep: Optional[float]
) -> Tuple[float, float]:
    points = sample_point_set(Rect(0.0, t, 0.0, t), 1.0, dist, derive_seed(seed, 0))
    full = last_passage(points, (0.0, 0.0), (t, t))
    if keep is None:
        return full, math.nan
    return full, last_passage(thin(points, keep, derive_seed(seed, 1)), (0.0, 0.0), (t, t))


##
# @brief Estimate γ(F) from E L(0,(t,t))/t / E L(0,(t,t))/t による γ(F) の推定
#
# @if japanese
# 格子の最大の t での値を γ̂ とし、t について(区間込みで)非減少であること、区間の上端 γ̂+半幅 が 2∫√(1−F) 以下であることを確かめます。
# keep を渡すと間引いた点集合でも同じ量を求め、γ̂_thin/γ̂ ≈ √keep を報告します(古典モデルで正確)。
# @endif
#
# @if english
# Reports γ̂ at the largest t of the grid and checks that the ratio is nondecreasing in t within intervals and that
# the upper end γ̂ + halfwidth is at most 2∫√(1−F). With keep the same quantity is computed on the thinned
# points and γ̂_thin/γ̂ is compared with √keep, which is exact for the classical model.
# @endif
#
# @param dist [in]  重み分布 / Weight law
# @param t_grid [in]  昇順の時刻列 / Increasing times
# @param replicas [in]  レプリカ数 / Replica count
# @param keep [in]  間引きで残す確率 / Thinning retention probability
# @return dict  推定値・区間・判定 / Estimates, intervals and verdicts
def shape_estimate(
    dist: WeightDistribution,
    t_grid: Sequence[float],
    replicas: int,
    *,
    seed: int = 0,
    threads: int = 1,
    keep: Optional[float] = None,
    window: Optional[Tuple[float, float]] = None,
) -> Dict[str, Any]:
    grid = [float(t) for t in t_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] <= 0:
        raise ValueError(f"t grid must be positive and increasing: {grid}")
    rows = []
    for k, t in enumerate(grid):
        arr = np.asarray(
            run_replicas(_shape_replica, replicas, derive_seed(seed, k), threads, dist=dist, t=t, keep=keep),
            dtype=np.float64,
        ).reshape(-1, 2)
        ratio, ci = mean_ci(arr[:, 0] / t)
        row: Dict[str, Any] = {
            "t": t,
            "ratio": ratio,
            "ci": ci,
            "tail": [list(p) for p in tail_profile(arr[:, 0], t ** (1.0 / 3.0), centre=float(arr[:, 0].mean()))],
        }
        if keep is not None:
            row["thinned_ratio"], row["thinned_ci"] = mean_ci(arr[:, 1] / t)
        rows.append(row)
        logger.info("shape t=%g: E L/t = %.5f +- %.5f", t, ratio, ci)
    gamma_hat, gamma_ci = rows[-1]["ratio"], rows[-1]["ci"]
    bound = 2.0 * sqrt_tail_integral(dist)
    monotone = all(b["ratio"] >= a["ratio"] - math.hypot(a["ci"], b["ci"]) for a, b in zip(rows, rows[1:]))
    checks: Dict[str, bool] = {
        "monotone": monotone,
        "bound": interval_below(gamma_hat, gamma_ci, bound),
    }
    if window is not None:
        checks["window"] = window[0] <= gamma_hat <= window[1]
    out: Dict[str, Any] = {
        "dist": dist.label,
        "rows": rows,
        "gamma_hat": gamma_hat,
        "gamma_ci": gamma_ci,
        "bound": bound,
    }
    if keep is not None:
        thin_ratio = rows[-1]["thinned_ratio"] / gamma_hat
        out["thinning"] = {"keep": keep, "ratio": thin_ratio, "target": math.sqrt(keep)}
        if dist.is_classical:
            checks["thinning"] = abs(thin_ratio - math.sqrt(keep)) <= 0.05 * math.sqrt(keep)
    out["checks"] = checks
    out["passed"] = all(checks.values())
    return out
