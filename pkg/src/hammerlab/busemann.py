# -*- coding: utf-8 -*-
##
# @file src/hammerlab/busemann.py
# @brief Busemann functions by geodesic coalescence and the equilibrium measures ν_α, ν*_α.
#
# @if japanese
# 方向 α ∈ (π, 3π/2) の遠方の基準点 z = r(cos α, sin α) から2点への通過時間の差 L(z,y) − L(z,x) を、
# 半径 r を等比的に大きくしながら評価し、連続する2つの半径で同じ値になったところで確定させます。
# 基準点から終点への増加パスは基準点と終点が張る矩形の中にしか存在しないため、その矩形を含む領域を1回だけ生成して
# すべての半径で共有します。x軸上の目標点を交点の格子に取ると ν_α の原子がそのまま得られます。
# @endif
#
# @if english
# Evaluates L(z,y) − L(z,x) from far anchors z = r(cos α, sin α), α in (π, 3π/2), along a geometric radius schedule
# and accepts the value once two consecutive radii agree. Increasing paths from an anchor to a target live in the
# rectangle they span, so one region covering that rectangle is sampled and shared by all radii. Targets on the
# x-axis placed at the crossing lattice give the atoms of ν_α directly.
# @endif
#

from __future__ import annotations

import logging  # [JP] 標準: 警告出力 / [EN] Standard: warnings
import math  # [JP] 標準: 三角関数 / [EN] Standard: trigonometry
from dataclasses import dataclass, field  # [JP] 標準: 結果レコード / [EN] Standard: result records
from typing import Any, Dict, List, Optional, Sequence, Tuple  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: 配列 / [EN] External: arrays

from .lpp import Point, last_passage, lowest_geodesic, passage_from
from .points import AtomicMeasure, Rect, WeightDistribution, WeightedPointSet, derive_seed, sample_point_set
from .replicas import run_replicas
from .stats import MomentSummary, mean_ci, summarize

logger = logging.getLogger(__name__)

STAB_TOL = 1e-9
# [JP] 領域の余白 / [EN] Margin around the sampled region
MARGIN = 1.0


@dataclass(frozen=True)
class DirectionAngle:
    """
    α ∈ (π, 3π/2)。ρ = √tanα、φ = 1/tanα。
    """

    alpha: float

    def __post_init__(self) -> None:
        if not math.pi < self.alpha < 1.5 * math.pi:
            raise ValueError(f"alpha must lie in (pi, 3pi/2), got {self.alpha}")

    @classmethod
    def from_tan(cls, tan_alpha: float) -> "DirectionAngle":
        if not tan_alpha > 0:
            raise ValueError(f"tan(alpha) must be positive, got {tan_alpha}")
        return cls(math.pi + math.atan(tan_alpha))

    @property
    def tan(self) -> float:
        return math.tan(self.alpha)

    @property
    def rho(self) -> float:
        return math.sqrt(self.tan)

    @property
    def phi(self) -> float:
        return 1.0 / self.tan

    def lam(self, gamma: float = 2.0) -> float:
        return 0.5 * gamma * self.rho

    def psi(self, gamma: float = 2.0) -> float:
        return gamma * gamma / (2.0 * self.lam(gamma))

    def anchor(self, r: float) -> Point:
        return (r * math.cos(self.alpha), r * math.sin(self.alpha))


@dataclass(frozen=True)
class BusemannEstimate:
    value: float
    stabilized_at: Optional[float]
    converged: bool
    trace: Tuple[float, ...] = ()

    def as_record(self, alpha: DirectionAngle, x: Point, y: Point) -> Dict[str, Any]:
        return {
            "alpha": alpha.alpha,
            "x": list(x),
            "y": list(y),
            "value": self.value,
            "stabilized_at": self.stabilized_at,
            "converged": self.converged,
        }


@dataclass(frozen=True, eq=False)
class BusemannMeasure:
    """
    標本化した ν_α(または ν*_α)と、収束判定の結果。
    """

    measure: AtomicMeasure
    converged: bool
    stabilized_at: Optional[float]
    mesh: np.ndarray = field(default_factory=lambda: np.empty(0))
    cumulative: np.ndarray = field(default_factory=lambda: np.empty(0))


# ------------------------------------------------------------
# 領域と安定化 / Regions and stabilization
# ------------------------------------------------------------

##
# @brief Rectangle holding every anchor and target / 全ての基準点と目標点を含む矩形
#
# @param angles [in]  方向 / Directions
# @param radii [in]  半径列 / Radius schedule
# @param hi [in]  目標点の右上 / Upper-right corner of the targets
# @return Rect  領域 / Region
def busemann_region(angles: Sequence[DirectionAngle], radii: Sequence[float], hi: Point = (1.0, 1.0)) -> Rect:
    r = max(radii)
    anchors = [a.anchor(r) for a in angles]
    x0 = min(p[0] for p in anchors) - MARGIN
    t0 = min(p[1] for p in anchors) - MARGIN
    return Rect(x0, max(hi[0], 0.0) + MARGIN, t0, max(hi[1], 0.0) + MARGIN)


def _check_radii(radii: Sequence[float]) -> List[float]:
    rs = [float(r) for r in radii]
    if len(rs) < 2 or any(b <= a for a, b in zip(rs, rs[1:])) or rs[0] <= 0:
        raise ValueError(f"radii must be positive, strictly increasing and at least two: {radii}")
    return rs


def _check_region(points: WeightedPointSet, alpha: DirectionAngle, rs: List[float], targets: np.ndarray) -> None:
    ax, at = alpha.anchor(rs[-1])
    rect = points.rect
    if ax < rect.x0 or at < rect.t0 or targets[:, 0].max() > rect.x1 or targets[:, 1].max() > rect.t1:
        raise ValueError(f"region {rect} does not contain the anchors and targets")
    if np.any(targets[:, 0] < alpha.anchor(rs[0])[0]) or np.any(targets[:, 1] < alpha.anchor(rs[0])[1]):
        raise ValueError("the first radius is too small: targets must lie above every anchor")


##
# @brief Differences along the radius schedule and their stabilization / 半径列に沿った差と安定化
#
# @if japanese
# 目標点ごとの L(z_r, target) − L(z_r, base) を各半径で求め、ベクトル全体が連続する2半径で一致する最初の半径を探します。
# @endif
#
# @if english
# Computes L(z_r, target) − L(z_r, base) for every target at each radius and finds the first radius at which the
# whole vector agrees with the next one.
# @endif
def _stabilize(
    points: WeightedPointSet, alpha: DirectionAngle, rs: List[float], base: Point, targets: np.ndarray
) -> Tuple[np.ndarray, Optional[float], bool, List[np.ndarray]]:
    allpts = np.vstack(([base], targets))
    _check_region(points, alpha, rs, allpts)
    diffs: List[np.ndarray] = []
    for r in rs:
        vals = passage_from(points, alpha.anchor(r), allpts)
        diffs.append(vals[1:] - vals[0])
    for k in range(len(diffs) - 1):
        scale = max(1.0, float(np.abs(diffs[k]).max(initial=0.0)))
        if np.all(np.abs(diffs[k + 1] - diffs[k]) <= STAB_TOL * scale):
            return diffs[k], rs[k], True, diffs
    return diffs[-1], None, False, diffs


# ------------------------------------------------------------
# 推定 / Estimation
# ------------------------------------------------------------

##
# @brief Busemann function B_α(x,y) by coalescence / 合流によるBusemann関数 B_α(x,y)
#
# @param points_region [in]  点集合(領域) / Sampled region
# @param alpha [in]  方向 / Direction
# @param x [in]  点x / Point x
# @param y [in]  点y / Point y
# @param radii [in]  半径列 / Increasing radii
# @return BusemannEstimate  推定値 / Estimate
# @throws ValueError 領域が小さすぎる場合 / When the region is too small
def estimate_busemann(
    points_region: WeightedPointSet, alpha: DirectionAngle, x: Point, y: Point, radii: Sequence[float]
) -> BusemannEstimate:
    rs = _check_radii(radii)
    value, at, ok, trace = _stabilize(points_region, alpha, rs, x, np.asarray([y], dtype=np.float64))
    if not ok:
        logger.debug("Busemann difference did not stabilize for alpha=%.6f x=%s y=%s", alpha.alpha, x, y)
    return BusemannEstimate(float(value[0]), at, ok, tuple(float(d[0]) for d in trace))


##
# @brief Sample ν_α on [lo, h] / ν_α を [lo, h] 上で標本化する
#
# @if japanese
# 目標点は x軸上の (m, 0) で、m は t ≤ 0 にある点のx座標(交点の候補)です。B_α((0,0),(m,0)) の跳びが ν_α の原子です。
# lo < 0 の場合は負側も含め、累積値 ν(m) = B_α((0,0),(m,0)) は m < 0 で負になります。
# @endif
#
# @if english
# Targets are (m, 0) with m running over x-coordinates of points with t <= 0 (the crossing candidates). Jumps of
# B_α((0,0),(m,0)) are the atoms of ν_α. With lo < 0 the negative side is included and ν(m) is negative there.
# @endif
#
# @param alpha [in]  方向 / Direction
# @param h [in]  右端 / Right end of the mesh
# @param region [in]  点集合 / Sampled region
# @param radii [in]  半径列 / Radius schedule
# @param lo [in]  左端 / Left end of the mesh
# @return BusemannMeasure  標本 / Sample with convergence flag
def sample_nu_alpha(
    alpha: DirectionAngle, h: float, region: WeightedPointSet, radii: Sequence[float], lo: float = 0.0
) -> BusemannMeasure:
    if not h > 0 or lo > 0:
        raise ValueError(f"need lo <= 0 < h, got lo={lo}, h={h}")
    rs = _check_radii(radii)
    sel = (region.ts <= 0) & (region.xs > lo) & (region.xs <= h)
    mesh = np.unique(np.concatenate(([lo, 0.0], region.xs[sel])))
    targets = np.column_stack((mesh, np.zeros_like(mesh)))
    cum, at, ok, _ = _stabilize(region, alpha, rs, (0.0, 0.0), targets)
    jumps = np.diff(cum)
    keep = jumps > STAB_TOL
    measure = AtomicMeasure(mesh[1:][keep], jumps[keep])
    return BusemannMeasure(measure, ok, at, mesh, cum)


##
# @brief Sample ν*_α on [0, h] / ν*_α を [0, h] 上で標本化する
#
# @if japanese
# ν*_α(s) = B_α(0,(0,s)) を、x ≤ 0 にある点のt座標を格子として求めます。
# @endif
#
# @if english
# ν*_α(s) = B_α(0,(0,s)) on the lattice of t-coordinates of points with x <= 0.
# @endif
def sample_nu_star_alpha(
    alpha: DirectionAngle, h: float, region: WeightedPointSet, radii: Sequence[float]
) -> BusemannMeasure:
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    rs = _check_radii(radii)
    sel = (region.xs <= 0) & (region.ts > 0) & (region.ts <= h)
    mesh = np.unique(np.concatenate(([0.0], region.ts[sel])))
    targets = np.column_stack((np.zeros_like(mesh), mesh))
    cum, at, ok, _ = _stabilize(region, alpha, rs, (0.0, 0.0), targets)
    jumps = np.diff(cum)
    keep = jumps > STAB_TOL
    return BusemannMeasure(AtomicMeasure(mesh[1:][keep], jumps[keep]), ok, at, mesh, cum)


##
# @brief Ordered multi-class sample on shared randomness / 共通乱数での多クラス標本
#
# @param angles [in]  昇順の方向列 / Strictly increasing directions
# @param region [in]  共有する点集合 / Shared region
# @param radii [in]  半径列 / Radius schedule
# @param h [in]  右端 / Right end of the mesh
# @return list[BusemannMeasure]  方向ごとの標本 / One sample per direction
def multi_class_sample(
    angles: Sequence[DirectionAngle], region: WeightedPointSet, radii: Sequence[float], h: float
) -> List[BusemannMeasure]:
    if len(angles) == 0:
        raise ValueError("need at least one direction")
    if any(b.alpha <= a.alpha for a, b in zip(angles, angles[1:])):
        raise ValueError("directions must be strictly increasing")
    return [sample_nu_alpha(a, h, region, radii) for a in angles]


##
# @brief Count domination violations between consecutive classes / 隣接クラス間の支配関係の違反数
#
# @if japanese
# 高い方向の ν と低い方向の ν の累積差が共通の格子上で非減少か(すべての区間 (a,b] で ν_ᾱ ≥ ν_α か)を数えます。
# @endif
#
# @if english
# Counts mesh steps where the cumulative difference between the higher and lower class decreases, i.e. where some
# interval (a,b] has ν_ᾱ((a,b]) < ν_α((a,b]).
# @endif
def domination_violations(samples: Sequence[BusemannMeasure], tol: float = 1e-9) -> int:
    bad = 0
    for low, high in zip(samples, samples[1:]):
        grid = np.unique(np.concatenate(([0.0], low.measure.positions, high.measure.positions)))
        diff = np.asarray(high.measure.cumulative(grid)) - np.asarray(low.measure.cumulative(grid))
        bad += int(np.sum(np.diff(diff) < -tol))
    return bad


##
# @brief Gap of the maximization property for Busemann values / Busemann値の最大化性の差
#
# @if japanese
# B_α((0,s),(x,t)) − sup_z { B_α((0,s),(z,s)) + L((z,s),(x,t)) } を返します。左辺の B_α と切断上の B_α は
# 別々に安定化させた推定値で、切断上の値は全ての z をまとめて1つのベクトルとして安定化させます。
# z は最小半径の基準点のx座標、x 自身、t ≤ s にある点のx座標(z ≤ x)を走ります。差は0になるはずです。
# @endif
#
# @if english
# Returns B_α((0,s),(x,t)) − sup over z of B_α((0,s),(z,s)) + L((z,s),(x,t)). The left-hand B_α and the values on
# the cut are separate estimates, each stabilized on its own radius; the cut values are stabilized together as
# one vector. z runs over the x of the anchor at the smallest radius, x itself and the x-coordinates of points
# with t <= s and z <= x. The gap should vanish.
# @endif
#
# @throws ValueError s > t の場合、または切断が最小半径の基準点より下の場合 / When s > t or the cut lies below the nearest anchor
def busemann_maximization_gap(
    points: WeightedPointSet, alpha: DirectionAngle, s: float, x: float, t: float, radii: Sequence[float]
) -> float:
    rs = _check_radii(radii)
    lo, floor = alpha.anchor(rs[0])
    if not (s <= t and floor <= s and lo <= x):
        raise ValueError(f"need s <= t and the cut above the nearest anchor, got s={s}, t={t}")
    origin = (0.0, float(s))
    whole = estimate_busemann(points, alpha, origin, (x, t), rs)
    sel = (points.ts <= s) & (points.xs <= x) & (points.xs >= lo)
    zs = np.unique(np.concatenate(([lo, x], points.xs[sel])))
    cut, _, cut_ok, _ = _stabilize(points, alpha, rs, origin, np.column_stack((zs, np.full_like(zs, s))))
    if not (whole.converged and cut_ok):
        logger.debug("maximization gap: unstable estimates (target=%s, cut=%s)", whole.converged, cut_ok)
    best = -math.inf
    for z, b in zip(zs, cut):
        rest = 0.0 if (z == x and s == t) else last_passage(points, (float(z), s), (x, t))
        best = max(best, float(b) + rest)
    return whole.value - best


##
# @brief Where the geodesic from a far anchor crosses the x-axis / 遠方の基準点からの測地線がx軸を横切る区間
#
# @if japanese
# 最大半径の基準点から target への最も低い測地線について、t ≤ 0 にある最後の点のx座標と t > 0 にある最初の点のx座標を返します。
# ν_α を初期測度とした出口点はこの区間に入ります。
# @endif
#
# @if english
# For the lowest geodesic from the anchor at the largest radius to target, returns the x of its last point with
# t <= 0 and the x of its first point with t > 0. The exit point of L_ν with ν = ν_α falls in this interval.
# @endif
def ray_crossing(
    points: WeightedPointSet, alpha: DirectionAngle, target: Point, radii: Sequence[float]
) -> Tuple[float, float]:
    rs = _check_radii(radii)
    c = alpha.anchor(rs[-1])
    geo = lowest_geodesic(points, c, target)
    below = [p[0] for p in geo.points if p[1] <= 0]
    above = [p[0] for p in geo.points if p[1] > 0]
    return (below[-1] if below else c[0], above[0] if above else target[0])


def crossing_spacings(sample: BusemannMeasure) -> np.ndarray:
    """Spacings of the sampled crossing points (exploratory)."""
    return sample.measure.spacings()


# ------------------------------------------------------------
# 強度の検証 / Intensity checks
# ------------------------------------------------------------


def _intensity_replica(
    index: int, seed: int, *, alpha: float, dist: WeightDistribution, radii: Tuple[float, ...], h: float
) -> Tuple[float, float, bool, bool]:
    ang = DirectionAngle(alpha)
    rect = busemann_region([ang], radii, (h, h))
    region = sample_point_set(rect, 1.0, dist, derive_seed(seed, 0))
    nu = sample_nu_alpha(ang, h, region, radii)
    nus = sample_nu_star_alpha(ang, h, region, radii)
    return nu.measure.mass_in(0.0, h), nus.measure.mass_in(0.0, h), nu.converged, nus.converged


@dataclass(frozen=True)
class IntensityReport:
    alpha: float
    target: float
    target_star: float
    nu: MomentSummary
    nu_star: MomentSummary
    product: float
    product_ci: float
    product_target: float
    converged_rate: float
    excluded: int

    @property
    def passed(self) -> bool:
        return (
            abs(self.nu.mean - self.target) <= max(self.nu.mean_ci, 0.05 * self.target)
            and abs(self.product - self.product_target) <= max(self.product_ci, 0.10 * self.product_target)
            and self.converged_rate >= 0.99
        )

    def as_record(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "target": self.target,
            "target_star": self.target_star,
            "nu": self.nu.as_record(),
            "nu_star": self.nu_star.as_record(),
            "product": self.product,
            "product_ci": self.product_ci,
            "product_target": self.product_target,
            "converged_rate": self.converged_rate,
            "excluded": self.excluded,
            "passed": self.passed,
        }


##
# @brief Check E ν_α(1) = (γ/2)√tanα and the product relation / 強度公式と積の関係を検証
#
# @param alpha [in]  方向 / Direction
# @param dist [in]  重み分布 / Weight law
# @param replicas [in]  レプリカ数 / Replica count
# @param seed [in]  シード / Seed
# @param threads [in]  ワーカ数 / Worker processes
# @param radii [in]  半径列 / Radius schedule
# @param gamma [in]  形状定数(古典モデルは2) / Shape constant, 2 for the classical model
# @param h [in]  区間の長さ / Interval length
# @return IntensityReport  結果 / Report
def check_intensity(
    alpha: DirectionAngle,
    dist: WeightDistribution,
    replicas: int,
    *,
    seed: int = 0,
    threads: int = 1,
    radii: Sequence[float] = (8, 16, 32, 64, 128, 256),
    gamma: Optional[float] = None,
    h: float = 1.0,
) -> IntensityReport:
    if gamma is None:
        if not dist.is_classical:
            raise ValueError("gamma must be supplied for non-classical weights")
        gamma = 2.0
    rs = tuple(_check_radii(radii))
    rows = run_replicas(
        _intensity_replica, replicas, seed, threads, alpha=alpha.alpha, dist=dist, radii=rs, h=h
    )
    good = [r for r in rows if r[2] and r[3]]
    excluded = len(rows) - len(good)
    if excluded:
        logger.warning("%d of %d replicas did not stabilize and were excluded", excluded, len(rows))
    if len(good) < 2:
        raise ValueError("fewer than two converged replicas; enlarge the radius schedule")
    a = np.asarray([g[0] for g in good])
    b = np.asarray([g[1] for g in good])
    sa, sb = summarize(a), summarize(b)
    # [JP] 積の区間は対になった影響値から / [EN] product interval from paired influence values
    infl = sb.mean * a + sa.mean * b
    _, pci = mean_ci(infl)
    return IntensityReport(
        alpha=alpha.alpha,
        target=alpha.lam(gamma) * h,
        target_star=0.5 * gamma / alpha.rho * h,
        nu=sa,
        nu_star=sb,
        product=sa.mean * sb.mean,
        product_ci=pci,
        product_target=gamma * gamma / 4.0 * h * h,
        converged_rate=len(good) / len(rows),
        excluded=excluded,
    )


def _multiclass_replica(
    index: int, seed: int, *, alphas: Tuple[float, ...], radii: Tuple[float, ...], h: float
) -> Tuple[bool, int, List[float]]:
    angs = [DirectionAngle(a) for a in alphas]
    rect = busemann_region(angs, radii, (h, h))
    region = sample_point_set(rect, 1.0, WeightDistribution.dirac(), derive_seed(seed, 0))
    samples = multi_class_sample(angs, region, radii, h)
    ok = all(s.converged for s in samples)
    return ok, domination_violations(samples) if ok else 0, [s.measure.mass_in(0.0, h) for s in samples]


##
# @brief Multi-class ordering experiment / 多クラスの順序の実験
#
# @return dict  収束数・違反数・各クラスの平均 / Converged count, violations and class means
def multi_class_report(
    angles: Sequence[DirectionAngle],
    replicas: int,
    *,
    seed: int = 0,
    threads: int = 1,
    radii: Sequence[float] = (8, 16, 32, 64, 128, 256),
    h: float = 1.0,
) -> Dict[str, Any]:
    rs = tuple(_check_radii(radii))
    alphas = tuple(a.alpha for a in angles)
    rows = run_replicas(_multiclass_replica, replicas, seed, threads, alphas=alphas, radii=rs, h=h)
    conv = [r for r in rows if r[0]]
    violations = int(sum(r[1] for r in conv))
    means = [float(np.mean([r[2][k] for r in conv])) if conv else float("nan") for k in range(len(alphas))]
    return {
        "alphas": list(alphas),
        "targets": [a.lam() * h for a in angles],
        "converged": len(conv),
        "replicas": replicas,
        "violations": violations,
        "means": means,
        "passed": violations == 0 and len(conv) > 0,
    }
