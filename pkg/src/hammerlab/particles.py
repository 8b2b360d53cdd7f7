# -*- coding: utf-8 -*-
##
# @file src/hammerlab/particles.py
# @brief Second-class particles and rarefaction-fan speed distributions.
#
# @if japanese
# 第二クラス粒子の位置 X_ν(t) は「出口点 Z_ν(x,t) が 0 以上になる最小の x ≥ 0」です。
# 原点の右から入る値 L_{ν⁺}(x,t) と左から入る値 L_{ν⁻}(x,t) を、x軸上の仮想点(値 ν(z) で固定)から始まる
# 鎖の掃引1回ずつで全ての候補 x について求め、指示関数 {L_{ν⁺} ≥ L_{ν⁻}} の切り替わりを二分探索で探します。
# 希薄化ファン(右が密度 λ、左が密度 μ > λ)では X(T)/T の分布を、閉形式(Poisson・周期)と
# 上限 S⁺, S⁻ のモンテカルロで検証します。
# @endif
#
# @if english
# The second-class particle sits at X_ν(t) = the smallest x >= 0 with exit Z_ν(x,t) >= 0. Entry from the right of
# the origin, L_{ν⁺}(x,t), and from the left, L_{ν⁻}(x,t), are computed for every candidate x with one chain sweep
# each, started from virtual points on the x-axis pinned to ν(z); the switch of the indicator {L_{ν⁺} >= L_{ν⁻}}
# is found by bisection. For the rarefaction fan (density λ on the right, μ > λ on the left) the law of X(T)/T is
# checked against closed forms (Poisson and periodic data) and a Monte Carlo of the suprema S⁺, S⁻.
# @endif
#

from __future__ import annotations

import logging  # [JP] 標準: 警告出力 / [EN] Standard: warnings
import math  # [JP] 標準: 初等関数 / [EN] Standard: elementary functions
from dataclasses import dataclass, field  # [JP] 標準: 結果レコード / [EN] Standard: result records
from decimal import Decimal, localcontext  # [JP] 標準: 交代級数の多倍長計算 / [EN] Standard: alternating series in high precision
from pathlib import Path  # [JP] 標準: パス操作 / [EN] Standard: path utilities
from typing import Any, Dict, List, Optional, Sequence, Tuple  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: 配列 / [EN] External: arrays
import pandas as pd  # [JP] 外部: CSV出力 / [EN] External: CSV export

from ._kernels import chain_sweep
from .fluid import evolve
from .lpp import VALUE_TOL, boundary_last_passage
from .points import (
    AtomicMeasure,
    Rect,
    WeightDistribution,
    WeightedPointSet,
    derive_seed,
    periodic_measure,
    sample_atomic_poisson,
    sample_point_set,
)
from . import setting_key as sk
from .replicas import run_replicas
from .settings import fallback
from .stats import mean_ci

logger = logging.getLogger(__name__)

LAW_POISSON = "poisson"
LAW_PERIODIC = "periodic"
LAWS = (LAW_POISSON, LAW_PERIODIC)

KIND_CLOSED = "closed_form"
KIND_EMPIRICAL = "empirical"

# [JP] setting.csv が無い場合の既定値 / [EN] fallbacks used when no setting.csv value is passed
SERIES_PRECISION = int(fallback(sk.KEY_SERIES_PRECISION))
SERIES_TAIL = float(fallback(sk.KEY_SERIES_TAIL))
BISECT_TOL = 1e-12


# ------------------------------------------------------------
# 型 / Types
# ------------------------------------------------------------


@dataclass(frozen=True)
class SecondClassResult:
    position: float
    saturated: bool = False


@dataclass(frozen=True)
class RarefactionConfig:
    """
    右側(z ≥ 0)の法則と密度 λ、左側(z < 0)の法則と密度 μ。μ > λ > 0。
    """

    right_law: str
    lam: float
    left_law: str
    mu: float

    def __post_init__(self) -> None:
        for law in (self.right_law, self.left_law):
            if law not in LAWS:
                raise ValueError(f"unknown law '{law}', expected one of {LAWS}")
        if not (self.mu > self.lam > 0):
            raise ValueError(f"need mu > lambda > 0, got lambda={self.lam}, mu={self.mu}")

    @property
    def support(self) -> Tuple[float, float]:
        return 1.0 / (self.mu * self.mu), 1.0 / (self.lam * self.lam)

    def as_record(self) -> Dict[str, Any]:
        return {"right_law": self.right_law, "lambda": self.lam, "left_law": self.left_law, "mu": self.mu}


@dataclass(frozen=True, eq=False)
class SpeedCdf:
    """
    v格子上のCDF。closed_form は閉形式、empirical は X(T)/T の経験分布。
    """

    v: np.ndarray
    cdf: np.ndarray
    kind: str
    samples: np.ndarray = field(default_factory=lambda: np.empty(0))
    saturated: int = 0

    def __post_init__(self) -> None:
        v = np.asarray(self.v, dtype=np.float64)
        c = np.asarray(self.cdf, dtype=np.float64)
        if v.shape != c.shape:
            raise ValueError("v grid and cdf values differ in length")
        if len(v) > 1 and np.any(np.diff(v) <= 0):
            raise ValueError("v grid must be strictly increasing")
        if np.any(c < -1e-12) or np.any(c > 1 + 1e-12) or np.any(np.diff(c) < -1e-12):
            raise ValueError("cdf values must be nondecreasing in [0,1]")
        if self.kind not in (KIND_CLOSED, KIND_EMPIRICAL):
            raise ValueError(f"unknown cdf kind '{self.kind}'")
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "cdf", np.clip(c, 0.0, 1.0))

    def sup_distance(self, other: "SpeedCdf") -> float:
        if not np.array_equal(self.v, other.v):
            raise ValueError("cdfs live on different v grids")
        return float(np.max(np.abs(self.cdf - other.cdf))) if len(self.v) else 0.0

    def mass_outside(self, lo: float, hi: float) -> float:
        """Fraction of the empirical samples outside [lo, hi]."""
        if not len(self.samples):
            raise ValueError("mass_outside needs empirical samples")
        return float(np.mean((self.samples < lo) | (self.samples > hi)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"v": self.v, "cdf": self.cdf})

    def to_csv(self, path: Path | str) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(p, index=False, float_format="%.17g")
        return p


# ------------------------------------------------------------
# 第二クラス粒子 / Second-class particle
# ------------------------------------------------------------

##
# @brief Entry values from virtual starts for every candidate end / 仮想始点からの値を全候補で評価
#
# @if japanese
# starts の各位置 z に t=0 の仮想点(値 ν(z) で固定)を置き、そこから始まる鎖だけを数える掃引を行います。
# 候補 x での値は「x座標が x 以下の仮想点・実点の最大値」です。
# @endif
#
# @if english
# Places a virtual point at t=0 on each start z, pinned to ν(z), and sweeps counting only chains that begin at one
# of them. The value at a candidate x is the largest value over virtual and real points with x-coordinate <= x.
# @endif
def _entry_values(
    nu: AtomicMeasure, sub: WeightedPointSet, starts: np.ndarray, cand: np.ndarray
) -> np.ndarray:
    uniq = np.unique(sub.ts)
    # [JP] 順位1は仮想点(t=0)用 / [EN] rank 1 is reserved for the virtual points at t=0
    tr_sub = np.searchsorted(uniq, sub.ts).astype(np.int64) + 2
    k = len(starts)
    xs = np.concatenate((starts, sub.xs))
    tr = np.concatenate((np.ones(k, dtype=np.int64), tr_sub))
    ws = np.concatenate((np.zeros(k), sub.ws))
    base = np.concatenate((np.asarray(nu.cumulative(starts), dtype=np.float64), np.zeros(len(sub))))
    fixed = np.concatenate((np.ones(k, dtype=np.bool_), np.zeros(len(sub), dtype=np.bool_)))
    order = np.lexsort((tr, xs))
    F, _ = chain_sweep(xs[order], tr[order], ws[order], base[order], fixed[order], len(uniq) + 1, False)
    best = np.maximum.accumulate(F)
    idx = np.searchsorted(xs[order], cand, side="right") - 1
    return np.where(idx >= 0, best[np.maximum(idx, 0)], -np.inf)


##
# @brief Locate the second-class particle / 第二クラス粒子の位置を求める
#
# @param nu [in]  初期測度 / Initial measure
# @param points [in]  点集合 / Point set
# @param t [in]  時刻 / Time
# @param window [in]  (z_min, x_max) または None(点集合の矩形のx範囲) / Window, default the rectangle's x-range
# @return SecondClassResult  位置と飽和フラグ / Position and saturation flag
# @throws ValueError t<0 の場合 / When t is negative
def locate_second_class(
    nu: AtomicMeasure,
    points: WeightedPointSet,
    t: float,
    window: Optional[Tuple[float, float]] = None,
) -> SecondClassResult:
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    z_min, x_max = (float(window[0]), float(window[1])) if window is not None else (points.rect.x0, points.rect.x1)
    if not z_min < x_max or x_max < 0:
        raise ValueError(f"window must satisfy z_min < x_max and x_max >= 0, got ({z_min}, {x_max})")
    if t == 0 or z_min >= 0:
        return SecondClassResult(0.0)
    # [JP] 0より左に質量が無ければ出口点は常に0以上 / [EN] without mass left of 0 the exit point never goes negative
    if not np.any(nu.positions < 0):
        return SecondClassResult(0.0)

    sub = points.window(z_min, x_max, 0.0, t)
    atoms = nu.positions
    cand = np.unique(np.concatenate(([0.0], atoms[(atoms > 0) & (atoms <= x_max)], sub.xs[sub.xs > 0])))
    plus = np.unique(np.concatenate(([0.0], atoms[(atoms > 0) & (atoms <= x_max)])))
    minus = np.unique(np.concatenate(([z_min], atoms[(atoms > z_min) & (atoms < 0)])))

    lp = _entry_values(nu, sub, plus, cand)
    lm = _entry_values(nu, sub, minus, cand)
    ok = lp >= lm - VALUE_TOL * np.maximum(1.0, np.abs(lm))
    # [JP] 指示関数は x について単調 / [EN] the indicator is monotone in x
    i = int(np.searchsorted(ok.astype(np.int8), 1))
    if i == len(cand):
        logger.warning("second-class particle beyond the window at t=%g (x_max=%g)", t, x_max)
        return SecondClassResult(float(x_max), True)
    return SecondClassResult(float(cand[i]))


def second_class_position(
    nu: AtomicMeasure, points: WeightedPointSet, t: float, window: Optional[Tuple[float, float]] = None
) -> float:
    """X_ν(t); the window's right end when the particle has left the window."""
    return locate_second_class(nu, points, t, window).position


##
# @brief Trajectory of the second-class particle / 第二クラス粒子の軌道
#
# @param times [in]  昇順の時刻列 / Increasing times
# @return list[(t, X)]  時刻と位置 / Times and positions
def trajectory(
    nu: AtomicMeasure,
    points: WeightedPointSet,
    times: Sequence[float],
    window: Optional[Tuple[float, float]] = None,
) -> List[Tuple[float, float]]:
    ts = [float(s) for s in times]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise ValueError(f"times must be strictly increasing: {list(times)}")
    return [(s, second_class_position(nu, points, s, window)) for s in ts]


##
# @brief Second-class particle from an ε-mass defect / ε質量の欠陥による第二クラス粒子
#
# @if japanese
# ν と ν + εδ₀ を同じ点集合で発展させ、最終測度が異なる最も右の位置を返します。両者の差は X の左側にしか現れません。
# @endif
#
# @if english
# Evolves ν and ν + εδ₀ on the same points and returns the rightmost position where the final measures differ.
# The two never differ to the right of X.
# @endif
def second_class_by_defect(
    nu: AtomicMeasure, points: WeightedPointSet, t: float, eps: float = 1.0, tol: float = 1e-9
) -> float:
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    if t == 0:
        return 0.0
    low = evolve(nu, points, t).measure
    high = evolve(nu.plus(AtomicMeasure(np.asarray([0.0]), np.asarray([eps]))), points, t).measure
    grid = np.unique(np.concatenate((low.positions, high.positions)))
    diff = np.zeros(len(grid))
    diff[np.searchsorted(grid, high.positions)] += high.masses
    diff[np.searchsorted(grid, low.positions)] -= low.masses
    hit = np.flatnonzero(np.abs(diff) > tol)
    return float(grid[hit[-1]]) if len(hit) else float(points.rect.x1)


# ------------------------------------------------------------
# 閉形式 / Closed forms
# ------------------------------------------------------------

##
# @brief P(V <= v) for Poisson data on both sides / 両側Poissonの P(V ≤ v)
#
# @param lam [in]  右側の密度 / Right density
# @param mu [in]  左側の密度 / Left density
# @param v [in]  速度 / Speed
# @return float  確率 / Probability
# @throws ValueError μ ≤ λ または v ≤ 0 / When mu <= lambda or v <= 0
def rarefaction_cdf_poisson(lam: float, mu: float, v: float) -> float:
    if not (mu > lam > 0):
        raise ValueError(f"need mu > lambda > 0, got lambda={lam}, mu={mu}")
    if not v > 0:
        raise ValueError(f"v must be positive, got {v}")
    if v >= 1.0 / (lam * lam):
        return 1.0
    if v <= 1.0 / (mu * mu):
        return 0.0
    tail = (1.0 / math.sqrt(v) - lam) / (mu - lam)
    return 1.0 - tail


##
# @brief Positive root of p = 1 − exp(−pρ/λ) / p = 1 − exp(−pρ/λ) の正の解
#
# @param lam [in]  周期側の密度 / Periodic density
# @param rho [in]  比較するPoisson過程の強度 / Intensity of the Poisson comparison process
# @return float  p₊
# @throws ValueError ρ ≤ λ(正の解が無い) / When rho <= lambda, no positive root
def solve_p_plus(lam: float, rho: float, tol: float = BISECT_TOL) -> float:
    if not (lam > 0 and rho > lam):
        raise ValueError(f"need rho > lambda > 0 for a positive root, got lambda={lam}, rho={rho}")
    r = rho / lam
    lo, hi = 0.0, 1.0
    # [JP] g>0 は (0,p₊)、g<0 は (p₊,1) / [EN] g > 0 on (0, p+) and g < 0 on (p+, 1)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if -math.expm1(-mid * r) - mid > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


##
# @brief p₊ by fixed-point iteration / 不動点反復による p₊
#
# @if japanese
# p ← 1 − exp(−pρ/λ) を p=1 から反復します。写像は凹で p₊ は吸引的なので単調に減少して収束します。
# @endif
#
# @if english
# Iterates p ← 1 − exp(−pρ/λ) from p = 1. The map is concave with p₊ attracting, so the iterates decrease to it.
# @endif
#
# @throws ValueError ρ ≤ λ、または max_iter 回で収束しない場合 / When rho <= lambda or no convergence in max_iter steps
def p_plus_fixed_point(lam: float, rho: float, tol: float = 1e-15, max_iter: int = 1_000_000) -> float:
    if not (lam > 0 and rho > lam):
        raise ValueError(f"need rho > lambda > 0 for a positive root, got lambda={lam}, rho={rho}")
    r = rho / lam
    p = 1.0
    for _ in range(max_iter):
        nxt = -math.expm1(-p * r)
        if abs(nxt - p) <= tol:
            return nxt
        p = nxt
    raise ValueError(f"fixed-point iteration for p+ did not converge in {max_iter} steps (rho/lambda={r})")


def prob_s_plus_ge(k: int, lam: float, rho: float) -> float:
    """P(S⁺ >= k) = (1 - p₊)^k for periodic data of density lam."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    return (1.0 - solve_p_plus(lam, rho)) ** k


##
# @brief P(S⁻ <= k) for periodic data of density μ / 密度μの周期データの P(S⁻ ≤ k)
#
# @if japanese
# 交代級数 (1−ρ/μ) Σ_{i≤k} (−ρ/μ)^i (k−i)^i/i! e^{ρ(k−i)/μ} を decimal の多倍長で評価します。
# 項は e^{2ρk/μ} 程度まで大きくなるため、作業精度を k に応じて増やします。
# @endif
#
# @if english
# Evaluates the alternating sum (1−ρ/μ) Σ_{i≤k} (−ρ/μ)^i (k−i)^i/i! e^{ρ(k−i)/μ} with decimal arithmetic.
# Terms reach e^{2ρk/μ}, so the working precision grows with k.
# @endif
def prob_s_minus_le(k: int, rho: float, mu: float, precision: int = SERIES_PRECISION) -> float:
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    if not (0 < rho < mu):
        raise ValueError(f"need 0 < rho < mu, got rho={rho}, mu={mu}")
    with localcontext() as ctx:
        ctx.prec = precision + int(2.0 * rho / mu * k / math.log(10.0)) + 1
        r = Decimal(repr(rho)) / Decimal(repr(mu))
        total = Decimal(0)
        for i in range(k + 1):
            term = (-r) ** i * Decimal((k - i) ** i) / Decimal(math.factorial(i))
            total += term * (r * (k - i)).exp()
        value = (1 - r) * total
    return min(1.0, max(0.0, float(value)))


def periodic_lambda_limit(mu: float, rho: float) -> float:
    """P(S⁺ >= S⁻) when the right density grows without bound."""
    if not (0 < rho < mu):
        raise ValueError(f"need 0 < rho < mu, got rho={rho}, mu={mu}")
    return 1.0 - rho / mu


def _s_plus_ge(law: str, k: int, lam: float, rho: float) -> float:
    if law == LAW_POISSON:
        return (lam / rho) ** k
    return prob_s_plus_ge(k, lam, rho)


def _s_minus_le(law: str, k: int, rho: float, mu: float, precision: int) -> float:
    if law == LAW_POISSON:
        return 1.0 - (rho / mu) ** (k + 1)
    return prob_s_minus_le(k, rho, mu, precision)


##
# @brief P(S⁺ >= S⁻) for any pair of laws / 任意の法則の組での P(S⁺ ≥ S⁻)
#
# @if japanese
# Σ_k P(S⁺ = k) P(S⁻ ≤ k) を P(S⁺ ≥ k) が tail 未満になるまで足します。両側Poissonなら (μ−ρ)/(μ−λ) に一致します。
# @endif
#
# @if english
# Sums P(S⁺ = k) P(S⁻ <= k) until P(S⁺ >= k) drops below tail. With Poisson data on both sides this equals
# (μ−ρ)/(μ−λ).
# @endif
def suprema_order_probability(
    config: RarefactionConfig,
    rho: float,
    *,
    k_max: Optional[int] = None,
    tail: float = SERIES_TAIL,
    precision: int = SERIES_PRECISION,
) -> float:
    if not (config.lam < rho < config.mu):
        raise ValueError(f"need lambda < rho < mu, got {config.lam}, {rho}, {config.mu}")
    total = 0.0
    k = 0
    ge_k = 1.0
    le_k = 0.0
    while True:
        ge_next = _s_plus_ge(config.right_law, k + 1, config.lam, rho)
        # [JP] S⁻ のCDFが1に達したら以降の級数は不要 / [EN] once the S⁻ cdf reaches 1 the series is skipped
        if le_k < 1.0 - tail:
            le_k = _s_minus_le(config.left_law, k, rho, config.mu, precision)
        total += (ge_k - ge_next) * le_k
        k += 1
        ge_k = ge_next
        if (k_max is not None and k > k_max) or (k_max is None and ge_k < tail):
            break
    return min(1.0, max(0.0, total))


##
# @brief P(S⁺ >= S⁻) for periodic data on both sides / 両側周期データの P(S⁺ ≥ S⁻)
#
# @param lam [in]  右側の密度 / Right density
# @param mu [in]  左側の密度 / Left density
# @param rho [in]  比較するPoisson過程の強度 / Comparison intensity
# @param k_max [in]  打ち切り(Noneなら (1−p₊)^k < tail で自動) / Truncation, adaptive when None
# @return float  確率 / Probability
# @throws ValueError λ < ρ < μ でない場合 / Unless lambda < rho < mu
def rarefaction_cdf_periodic(
    lam: float,
    mu: float,
    rho: float,
    k_max: Optional[int] = None,
    *,
    tail: float = SERIES_TAIL,
    precision: int = SERIES_PRECISION,
) -> float:
    if not (0 < lam < rho < mu):
        raise ValueError(f"need 0 < lambda < rho < mu, got {lam}, {rho}, {mu}")
    conf = RarefactionConfig(LAW_PERIODIC, lam, LAW_PERIODIC, mu)
    return suprema_order_probability(conf, rho, k_max=k_max, tail=tail, precision=precision)


##
# @brief Closed-form speed CDF on a grid / 格子上の閉形式の速度CDF
#
# @param config [in]  両側の法則 / Laws on both sides
# @param v_grid [in]  昇順の速度格子 / Increasing speeds
# @return SpeedCdf  閉形式CDF / Closed-form CDF
def speed_cdf(
    config: RarefactionConfig,
    v_grid: Sequence[float],
    *,
    tail: float = SERIES_TAIL,
    precision: int = SERIES_PRECISION,
) -> SpeedCdf:
    v = np.asarray(v_grid, dtype=np.float64)
    lo, hi = config.support
    out = np.empty(len(v))
    for i, vi in enumerate(v):
        if not vi > 0:
            raise ValueError(f"speeds must be positive, got {vi}")
        if vi <= lo:
            out[i] = 0.0
        elif vi >= hi:
            out[i] = 1.0
        elif config.right_law == config.left_law == LAW_POISSON:
            out[i] = rarefaction_cdf_poisson(config.lam, config.mu, float(vi))
        else:
            out[i] = suprema_order_probability(config, 1.0 / math.sqrt(vi), tail=tail, precision=precision)
    return SpeedCdf(v, np.maximum.accumulate(out), KIND_CLOSED)


# ------------------------------------------------------------
# モンテカルロ / Monte Carlo
# ------------------------------------------------------------


def _horizon(config: RarefactionConfig, rho: float) -> float:
    gap = min(rho - config.lam, config.mu - rho)
    return 100.0 / gap + 20.0


def _sup_plus(law: str, lam: float, rho: float, z_end: float, rng: np.random.Generator) -> int:
    # [JP] sup_{z≥0} ν(z) − ν_ρ(z)、ν は右側の測度 / [EN] sup over z >= 0 of ν(z) − ν_ρ(z), ν the right-hand data
    arr_rho = np.sort(rng.uniform(0.0, z_end, size=rng.poisson(rho * z_end)))
    if law == LAW_PERIODIC:
        jumps = np.arange(1, int(lam * z_end) + 1) / lam
    else:
        jumps = np.sort(rng.uniform(0.0, z_end, size=rng.poisson(lam * z_end)))
    # [JP] 上限は ν の跳びの直後に達成される / [EN] the sup is attained right after a jump of ν
    vals = np.arange(1, len(jumps) + 1) - np.searchsorted(arr_rho, jumps, side="right")
    return int(max(0, vals.max(initial=0)))


def _sup_minus(law: str, mu: float, rho: float, z_end: float, rng: np.random.Generator) -> int:
    # [JP] y=−z>0 として sup_{y>0} N_ρ([−y,0)) − ν((−y,0]) / [EN] with y = −z: sup over y > 0 of N_ρ − ν on the left
    arr_rho = np.sort(rng.uniform(0.0, z_end, size=rng.poisson(rho * z_end)))
    if law == LAW_PERIODIC:
        jumps = np.arange(1, int(mu * z_end) + 1) / mu
    else:
        jumps = np.sort(rng.uniform(0.0, z_end, size=rng.poisson(mu * z_end)))
    # [JP] 上限は ν の次の跳びの直前に達成される / [EN] the sup is attained just before the next jump of ν
    ends = np.concatenate((jumps, [z_end]))
    vals = np.searchsorted(arr_rho, ends, side="left") - np.arange(len(ends))
    return int(max(0, vals.max(initial=0)))


def _suprema_replica(
    index: int, seed: int, *, right: str, left: str, lam: float, mu: float, rho: float, z_end: float
) -> Tuple[int, int]:
    rng_p = np.random.default_rng(derive_seed(seed, 0))
    rng_m = np.random.default_rng(derive_seed(seed, 1))
    return _sup_plus(right, lam, rho, z_end, rng_p), _sup_minus(left, mu, rho, z_end, rng_m)


##
# @brief Monte Carlo of the suprema S⁺ and S⁻ / 上限 S⁺, S⁻ のモンテカルロ
#
# @param config [in]  両側の法則 / Laws on both sides
# @param rho [in]  比較するPoisson過程の強度 / Comparison intensity
# @param replicas [in]  標本数 / Sample count
# @return (np.ndarray, np.ndarray)  S⁺ と S⁻ の標本 / Samples of S⁺ and S⁻
def sample_suprema(
    config: RarefactionConfig, rho: float, replicas: int, *, seed: int = 0, threads: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    if not (config.lam < rho < config.mu):
        raise ValueError(f"need lambda < rho < mu, got {config.lam}, {rho}, {config.mu}")
    rows = run_replicas(
        _suprema_replica,
        replicas,
        seed,
        threads,
        right=config.right_law,
        left=config.left_law,
        lam=config.lam,
        mu=config.mu,
        rho=rho,
        z_end=_horizon(config, rho),
    )
    arr = np.asarray(rows, dtype=np.int64).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]


# ------------------------------------------------------------
# 速度分布と大数の法則 / Speed distribution and strong law
# ------------------------------------------------------------

##
# @brief Window that keeps the particle and its exits inside / 粒子と出口点が収まる窓
#
# @param lam [in]  右側の密度 / Right density
# @param mu [in]  左側の密度 / Left density
# @param T [in]  時刻 / Time
# @return (float, float)  (z_min, x_max)
def speed_window(lam: float, mu: float, T: float) -> Tuple[float, float]:
    margin = 3.0 * T ** (2.0 / 3.0) + 10.0
    return -(2.0 * T / (mu * mu) + margin), 1.1 * T / (lam * lam) + margin


def _initial_measure(law: str, density: float, interval: Tuple[float, float], side: str, seed: int) -> AtomicMeasure:
    if law == LAW_PERIODIC:
        return periodic_measure(interval, density, side)
    return sample_atomic_poisson(interval, density, WeightDistribution.dirac(), seed)


def _speed_replica(
    index: int, seed: int, *, right: str, left: str, lam: float, mu: float, T: float
) -> Tuple[float, bool]:
    z_min, x_max = speed_window(lam, mu, T)
    nu = _initial_measure(right, lam, (0.0, x_max), "right", derive_seed(seed, 1))
    nu = nu.plus(_initial_measure(left, mu, (z_min, 0.0), "left", derive_seed(seed, 2)))
    points = sample_point_set(Rect(z_min, x_max, 0.0, T), 1.0, WeightDistribution.dirac(), derive_seed(seed, 0))
    res = locate_second_class(nu, points, T)
    return res.position / T, res.saturated


##
# @brief Empirical law of X(T)/T / X(T)/T の経験分布
#
# @param config [in]  両側の法則 / Laws on both sides
# @param T [in]  時刻 / Time
# @param replicas [in]  レプリカ数 / Replica count
# @param v_grid [in]  昇順の速度格子 / Increasing speeds
# @return SpeedCdf  経験CDF / Empirical CDF
def empirical_speed_distribution(
    config: RarefactionConfig,
    T: float,
    replicas: int,
    v_grid: Sequence[float],
    *,
    seed: int = 0,
    threads: int = 1,
) -> SpeedCdf:
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    rows = run_replicas(
        _speed_replica,
        replicas,
        seed,
        threads,
        right=config.right_law,
        left=config.left_law,
        lam=config.lam,
        mu=config.mu,
        T=float(T),
    )
    speeds = np.asarray([r[0] for r in rows])
    sat = int(sum(1 for r in rows if r[1]))
    if sat:
        logger.warning("%d of %d replicas saturated the window", sat, len(rows))
    v = np.asarray(v_grid, dtype=np.float64)
    cdf = np.searchsorted(np.sort(speeds), v, side="right") / len(speeds)
    return SpeedCdf(v, cdf, KIND_EMPIRICAL, speeds, sat)


def _strong_law_replica(
    index: int, seed: int, *, lam: float, T: float, times: Tuple[float, ...]
) -> Tuple[float, bool, bool]:
    z_min, x_max = speed_window(lam, lam, T)
    nu = sample_atomic_poisson((z_min, x_max), lam, WeightDistribution.dirac(), derive_seed(seed, 1))
    points = sample_point_set(Rect(z_min, x_max, 0.0, T), 1.0, WeightDistribution.dirac(), derive_seed(seed, 0))
    path = [locate_second_class(nu, points, s) for s in times]
    xs = [p.position for p in path]
    monotone = all(b >= a for a, b in zip(xs, xs[1:]))
    return xs[-1] / T, monotone, any(p.saturated for p in path)


##
# @brief Strong law X(T)/T → 1/λ² in equilibrium / 平衡での大数の法則 X(T)/T → 1/λ²
#
# @return dict  平均・信頼区間・単調性の違反数 / Mean, CI and monotonicity failures
def strong_law_report(
    lam: float, T: float, replicas: int, *, seed: int = 0, threads: int = 1, steps: int = 8
) -> Dict[str, Any]:
    if not (lam > 0 and T > 0):
        raise ValueError(f"lambda and T must be positive, got {lam}, {T}")
    times = tuple(float(T) * (k + 1) / steps for k in range(steps))
    rows = run_replicas(_strong_law_replica, replicas, seed, threads, lam=lam, T=float(T), times=times)
    ratio = np.asarray([r[0] for r in rows])
    mean, half = mean_ci(ratio) if len(ratio) > 1 else (float(ratio[0]), float("inf"))
    target = 1.0 / (lam * lam)
    non_monotone = int(sum(1 for r in rows if not r[1]))
    saturated = int(sum(1 for r in rows if r[2]))
    return {
        "target": target,
        "mean": mean,
        "ci": half,
        "non_monotone": non_monotone,
        "saturated": saturated,
        "samples": ratio,
        "passed": abs(mean - target) <= 0.10 * target and non_monotone == 0,
    }


def _translation_replica(index: int, seed: int, *, lam: float, t: float) -> Tuple[float, float]:
    z_min, x_max = speed_window(lam, lam, t)
    nu = sample_atomic_poisson((z_min, x_max), lam, WeightDistribution.dirac(), derive_seed(seed, 1))
    pts = sample_point_set(Rect(z_min, x_max, 0.0, t), 1.0, WeightDistribution.dirac(), derive_seed(seed, 0))
    # [JP] X と Z は別の実現から取る / [EN] X and Z come from independent realizations
    nu2 = sample_atomic_poisson((z_min, x_max), lam, WeightDistribution.dirac(), derive_seed(seed, 3))
    pts2 = sample_point_set(Rect(z_min, x_max, 0.0, t), 1.0, WeightDistribution.dirac(), derive_seed(seed, 2))
    x = second_class_position(nu, pts, t)
    z = boundary_last_passage(nu2, pts2, 0.0, t).exit_sup
    return x, -float(z)


##
# @brief Samples of X_ν(t) and −Z_ν(0,t) under a translation-invariant ν / 平行移動不変な ν での X_ν(t) と −Z_ν(0,t) の標本
#
# @return (np.ndarray, np.ndarray)  同じ分布に従うはずの2つの標本 / Two samples expected to share a law
def translation_identity_samples(
    lam: float, t: float, replicas: int, *, seed: int = 0, threads: int = 1
) -> Tuple[np.ndarray, np.ndarray]:
    rows = run_replicas(_translation_replica, replicas, seed, threads, lam=lam, t=float(t))
    arr = np.asarray(rows, dtype=np.float64).reshape(-1, 2)
    return arr[:, 0], arr[:, 1]
