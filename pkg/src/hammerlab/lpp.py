# -*- coding: utf-8 -*-
##
# @file src/hammerlab/lpp.py
# @brief Last passage values, lowest geodesics, boundary variants and exit points.
#
# @if japanese
# 重み付きPoisson点集合上の最終通過時間 L(p,q) を O(n log n) の掃引で計算します。
# 境界版(x軸上の測度 ν から入る L_ν、ソースとシンクをもつ箱の L)では、終点から逆向きの動的計画法で
# 各点から終点までの最重鎖を求め、入口の候補(区間の左端・原子の位置・点のx座標)ごとの値を一括評価します。
# 値は階段関数なので、最大値を与える区間の右端が出口点(最右の最大化点)になります。
# 領域の規約: (p,q] の南側と西側の辺は除き、北側と東側の辺は含めます。
# @endif
#
# @if english
# Last passage times L(p,q) over weighted Poisson points via an O(n log n) sweep.
# Boundary variants (entry through a measure ν on the x-axis, or through sources and sinks of a box) run one
# backward dynamic program from the end point, then evaluate every entry candidate (window edge, atom positions,
# point x-coordinates) at once. The objective is a step function, so the right end of the rightmost maximizing
# piece is the exit point. Domain convention: the south and west sides of (p,q] are left out, north and east kept.
# @endif
#

from __future__ import annotations

import math  # [JP] 標準: 平方根 / [EN] Standard: square roots
from dataclasses import dataclass  # [JP] 標準: 結果レコード / [EN] Standard: result records
from pathlib import Path  # [JP] 標準: パス操作 / [EN] Standard: path utilities
from typing import List, Optional, Sequence, Tuple, Union  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: 配列演算 / [EN] External: array math
import pandas as pd  # [JP] 外部: CSV出力 / [EN] External: CSV export

from ._kernels import chain_sweep, dominance_max
from .points import AtomicMeasure, WeightedPointSet

Point = Tuple[float, float]

# [JP] 階段関数の最大値判定に使う相対許容誤差 / [EN] Relative tolerance when comparing step-function maxima
VALUE_TOL = 1e-9


# ------------------------------------------------------------
# 型 / Types
# ------------------------------------------------------------


@dataclass(frozen=True)
class PassagePath:
    """
    x, t ともに狭義単調増加な点列と、その重みの合計。
    """

    points: Tuple[Tuple[float, float, float], ...]
    value: float

    def __post_init__(self) -> None:
        for a, b in zip(self.points, self.points[1:]):
            if not (a[0] < b[0] and a[1] < b[1]):
                raise ValueError(f"path is not strictly increasing at {a} -> {b}")
        total = math.fsum(w for _, _, w in self.points)
        if not math.isclose(total, self.value, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError(f"path value {self.value} differs from weight sum {total}")

    def __len__(self) -> int:
        return len(self.points)

    ##
    # @brief Height of the path as a step curve / 階段曲線としての経路の高さ
    #
    # @if japanese
    # x より左にある最後の点のt座標を返します。まだ点が無ければ start_t を返します。
    # 最も低い測地線の比較に使います。
    # @endif
    #
    # @if english
    # Returns the t-coordinate of the last path point strictly left of x, or start_t before the first one.
    # Used to compare maximizers when checking the lowest geodesic.
    # @endif
    def height(self, x: float, start_t: float) -> float:
        h = start_t
        for px, pt, _ in self.points:
            if px < x:
                h = pt
            else:
                break
        return h

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(list(self.points), columns=["x", "t", "w"])

    def to_csv(self, path: Path | str) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(p, index=False, float_format="%.17g")
        return p


EMPTY_PATH = PassagePath((), 0.0)


@dataclass(frozen=True)
class PassageResult:
    value: float
    geodesic: PassagePath
    exit: Optional[float] = None
    exit_sup: Optional[float] = None
    exit_inf: Optional[float] = None
    boundary: float = 0.0
    saturated: bool = False

    def __post_init__(self) -> None:
        if self.exit_inf is not None and self.exit_sup is not None and self.exit_inf > self.exit_sup:
            raise ValueError(f"exit_inf {self.exit_inf} exceeds exit_sup {self.exit_sup}")

    @property
    def exit_plus(self) -> float:
        z = self.exit_sup if self.exit_sup is not None else self.exit
        return max(z, 0.0) if z is not None else 0.0


@dataclass(frozen=True)
class SourcesSinks:
    """
    箱 [0,x]×[0,t] の境界データ。ソースはx軸上、シンクはt軸上(位置は時刻)。
    """

    sources: AtomicMeasure
    sinks: AtomicMeasure

    def __post_init__(self) -> None:
        if len(self.sources) and self.sources.positions[0] < 0:
            raise ValueError("sources must lie on [0, x_max]")
        if len(self.sinks) and self.sinks.positions[0] <= 0:
            raise ValueError("sinks must lie on (0, t_max]")

    def reflect(self) -> "SourcesSinks":
        """Diagonal reflection: sources and sinks swap roles."""
        return SourcesSinks(self.sinks, self.sources)


# ------------------------------------------------------------
# 内部ユーティリティ / Internal helpers
# ------------------------------------------------------------


def _ranks(ts: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    uniq = np.unique(ts)
    return (np.searchsorted(uniq, ts) + 1).astype(np.int64), uniq


def _forward(xs: np.ndarray, ts: np.ndarray, ws: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    tr, uniq = _ranks(ts)
    n = len(xs)
    F, pred = chain_sweep(xs, tr, ws, np.zeros(n), np.zeros(n, dtype=np.bool_), len(uniq), True)
    return F, pred, tr


##
# @brief Heaviest chain from each point to the end / 各点から終点までの最重鎖
#
# @if japanese
# 座標を反転 (x,t) ↦ (−x,−t) して前向き掃引を再利用します。戻り値は入力と同じ並び順です。
# @endif
#
# @if english
# Reuses the forward sweep on the reflected points (x,t) -> (-x,-t). Output follows the input order.
# @endif
def _backward(xs: np.ndarray, ts: np.ndarray, ws: np.ndarray) -> np.ndarray:
    if len(xs) == 0:
        return np.empty(0)
    order = np.lexsort((-ts, -xs))
    F, _, _ = _forward(-xs[order], -ts[order], ws[order])
    G = np.empty_like(F)
    G[order] = F
    return G


def _suffix_max(vals: np.ndarray) -> np.ndarray:
    # [JP] out[k] = max(vals[k:]), out[n] = 0 / [EN] out[k] = max(vals[k:]) with out[n] = 0
    out = np.zeros(len(vals) + 1)
    if len(vals):
        out[:-1] = np.maximum.accumulate(vals[::-1])[::-1]
        np.maximum(out, 0.0, out=out)
    return out


def _check_order(p: Point, q: Point) -> None:
    if not (p[0] <= q[0] and p[1] <= q[1]) or (p[0] == q[0] and p[1] == q[1]):
        raise ValueError(f"need p < q coordinatewise, got p={p}, q={q}")


def _maximizers(f: np.ndarray) -> Tuple[float, np.ndarray]:
    best = float(f.max())
    return best, f >= best - VALUE_TOL * max(1.0, abs(best))


# ------------------------------------------------------------
# 最終通過時間と測地線 / Passage times and geodesics
# ------------------------------------------------------------

##
# @brief Last passage time L(p,q) / 最終通過時間 L(p,q)
#
# @param points [in]  点集合 / Point set
# @param p [in]  始点 / Start point
# @param q [in]  終点 / End point
# @return float  最大重み(使える点が無ければ0) / Heaviest chain weight, 0 without usable points
# @throws ValueError p < q でない場合 / When p is not below q
def last_passage(points: WeightedPointSet, p: Point, q: Point) -> float:
    _check_order(p, q)
    sub = points.window(p[0], q[0], p[1], q[1])
    if len(sub) == 0:
        return 0.0
    F, _, _ = _forward(sub.xs, sub.ts, sub.ws)
    return float(F.max())


##
# @brief Lowest maximizing chain between p and q / p,q間の最も低い最大化鎖
#
# @if japanese
# 同値の前任者のうちt座標が最小のもの(同じtならx座標が大きいもの)を選びます。同じ値の前任者は必ず反鎖をなすので、
# tが小さい前任者ほどx座標は大きく、各帯で経路が最も低くなります。終点側も同じ規則で選びます。
# @endif
#
# @if english
# Among predecessors with equal value the one with the smallest t (then the largest x) is taken. Equal-value
# predecessors always form an antichain, so the smallest t is also the rightmost, which keeps the path lowest in
# every strip. The chain's last point is chosen by the same rule.
# @endif
#
# @param points [in]  点集合 / Point set
# @param p [in]  始点 / Start point
# @param q [in]  終点 / End point
# @return PassagePath  測地線 / Lowest geodesic
def lowest_geodesic(points: WeightedPointSet, p: Point, q: Point) -> PassagePath:
    _check_order(p, q)
    sub = points.window(p[0], q[0], p[1], q[1])
    if len(sub) == 0:
        return EMPTY_PATH
    F, pred, tr = _forward(sub.xs, sub.ts, sub.ws)
    best = float(F.max())
    cand = np.flatnonzero(F == best)
    # [JP] t順位最小、次にインデックス最大 / [EN] smallest t-rank, then largest index
    k = int(cand[np.lexsort((-cand, tr[cand]))[0]])
    chain: List[Tuple[float, float, float]] = []
    while k >= 0:
        chain.append((float(sub.xs[k]), float(sub.ts[k]), float(sub.ws[k])))
        k = int(pred[k])
    chain.reverse()
    return PassagePath(tuple(chain), best)


##
# @brief Passage values from one start to many targets / 1つの始点から複数終点への通過時間
#
# @param points [in]  点集合 / Point set
# @param p [in]  始点 / Start point
# @param targets [in]  終点列 / Target points, each at or above p
# @return np.ndarray  L(p, target) の配列 / Passage values
def passage_from(points: WeightedPointSet, p: Point, targets: Sequence[Point]) -> np.ndarray:
    tg = np.asarray(targets, dtype=np.float64).reshape(-1, 2)
    if len(tg) == 0:
        return np.empty(0)
    if np.any(tg[:, 0] < p[0]) or np.any(tg[:, 1] < p[1]):
        raise ValueError(f"every target must lie at or above {p}")
    sub = points.window(p[0], float(tg[:, 0].max()), p[1], float(tg[:, 1].max()))
    if len(sub) == 0:
        return np.zeros(len(tg))
    F, _, tr = _forward(sub.xs, sub.ts, sub.ws)
    uniq = np.unique(sub.ts)
    order = np.argsort(tg[:, 0], kind="stable")
    qr = np.searchsorted(uniq, tg[order, 1], side="right").astype(np.int64)
    raw = dominance_max(sub.xs, tr, F, len(uniq), tg[order, 0].copy(), qr)
    out = np.empty(len(tg))
    out[order] = np.maximum(raw, 0.0)
    return out


# ------------------------------------------------------------
# 境界つき通過時間 / Boundary passage times
# ------------------------------------------------------------

##
# @brief Entry profile along one boundary axis / 境界軸に沿った入口プロファイル
#
# @if japanese
# 入口座標 z を breakpoints 上で評価した値 f(z) = 境界の累積値 + (zより先の点から終点までの最重鎖) を返します。
# coords はその軸方向の点座標(昇順)、G は対応する逆向きDPの値です。
# @endif
#
# @if english
# Returns f(z) = boundary cumulative + heaviest chain from points beyond z, evaluated at the breakpoints.
# coords are the point coordinates along that axis (ascending) and G their backward values.
# @endif
def _profile(
    measure: AtomicMeasure, breaks: np.ndarray, coords: np.ndarray, G: np.ndarray
) -> np.ndarray:
    after = _suffix_max(G)[np.searchsorted(coords, breaks, side="right")]
    return np.asarray(measure.cumulative(breaks), dtype=np.float64) + after


##
# @brief Passage time with entry through a measure on the x-axis / x軸上の測度から入る通過時間 L_ν(x,t)
#
# @if japanese
# L_ν(x,t) = sup_{z_min ≤ z ≤ x} ν(z) + L((z,0),(x,t)) を計算し、出口点 Z_ν(x,t) (最右の最大化点) も返します。
# window を省略すると点集合の矩形の左端を z_min とします。ν が窓より左に原子を持ち、
# 最も左の最大化区間が窓内の最初の原子以前から始まる場合は saturated を立てます(窓が小さすぎる兆候)。
# @endif
#
# @if english
# Computes L_ν(x,t) = sup over z_min <= z <= x of ν(z) + L((z,0),(x,t)) together with the exit Z_ν(x,t), the
# rightmost maximizer. Without window the point set's left edge is z_min. saturated is raised when ν has atoms
# left of the window and the leftmost maximizing piece starts at or before the first atom inside it.
# @endif
#
# @param nu [in]  初期測度 / Initial measure
# @param points [in]  点集合 / Point set
# @param x [in]  終点のx / End x
# @param t [in]  終点のt / End t
# @param window [in]  (z_min, x) または None / Window or None
# @return PassageResult  値と出口点 / Value and exit data
# @throws ValueError 窓が空、またはt<0の場合 / When the window is empty or t < 0
def boundary_last_passage(
    nu: AtomicMeasure,
    points: WeightedPointSet,
    x: float,
    t: float,
    window: Optional[Tuple[float, float]] = None,
) -> PassageResult:
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    z_min = float(window[0]) if window is not None else float(points.rect.x0)
    if z_min > x:
        raise ValueError(f"empty window [{z_min}, {x}]")

    sub = points.window(z_min, x, 0.0, t)
    G = _backward(sub.xs, sub.ts, sub.ws)
    atoms = nu.positions[(nu.positions >= z_min) & (nu.positions <= x)]
    breaks = np.unique(np.concatenate(([z_min], atoms, sub.xs)))
    f = _profile(nu, breaks, sub.xs, G)

    best, mask = _maximizers(f)
    hits = np.flatnonzero(mask)
    i_lo, i_hi = int(hits[0]), int(hits[-1])
    exit_sup = float(breaks[i_hi + 1]) if i_hi + 1 < len(breaks) else float(x)
    exit_inf = float(breaks[i_lo])

    first_atom = float(atoms[0]) if len(atoms) else float(x)
    saturated = bool(len(nu) and nu.positions[0] < z_min and breaks[i_lo] <= first_atom)

    start = float(breaks[i_hi])
    geo = EMPTY_PATH if (start == x and t == 0) else lowest_geodesic(sub, (start, 0.0), (x, t))
    bval = float(nu.cumulative(start))
    return PassageResult(
        value=bval + geo.value,
        geodesic=geo,
        exit=exit_sup,
        exit_sup=exit_sup,
        exit_inf=exit_inf,
        boundary=bval,
        saturated=saturated,
    )


##
# @brief Passage time in a box with sources and sinks / ソースとシンクをもつ箱の通過時間
#
# @if japanese
# ソース側 sup_{0≤z≤x} ν(z)+L((z,0),(x,t)) とシンク側 sup_{0≤s≤t} ν*(s)+L((0,s),(x,t)) の大きい方を返します。
# シンク側の入口 s は z=−s として負の軸に写し、z∈[−t,x] 上の最右の最大化点を exit_sup (Z̄)、
# 最左を exit_inf (Z̄′) とします。箱を対角線で反転すると Z̄ は −Z̄′ にちょうど移ります。
# @endif
#
# @if english
# Returns the larger of the source branch sup over 0<=z<=x of ν(z)+L((z,0),(x,t)) and the sink branch sup over
# 0<=s<=t of ν*(s)+L((0,s),(x,t)). A sink entry s is mapped to z = -s, and over z in [-t, x] the rightmost
# maximizer is exit_sup (Z̄) and the leftmost exit_inf (Z̄'). Reflecting the box in the diagonal maps Z̄ to -Z̄'.
# @endif
#
# @param ss [in]  ソースとシンク / Sources and sinks
# @param points [in]  点集合 / Point set
# @param x [in]  箱の幅 / Box width
# @param t [in]  箱の高さ / Box height
# @return PassageResult  値と出口点 / Value and exit data
# @throws ValueError x<0 または t<0 の場合 / When x or t is negative
def sources_sinks_passage(ss: SourcesSinks, points: WeightedPointSet, x: float, t: float) -> PassageResult:
    if x < 0 or t < 0:
        raise ValueError(f"x and t must be nonnegative, got x={x}, t={t}")

    sub = points.window(0.0, x, 0.0, t)
    G = _backward(sub.xs, sub.ts, sub.ws)
    src = ss.sources.restrict(0.0, x)
    snk = ss.sinks.restrict(0.0, t, include_lo=False)

    b_src = np.unique(np.concatenate(([0.0], src.positions, sub.xs)))
    f_src = _profile(src, b_src, sub.xs, G)

    t_order = np.argsort(sub.ts, kind="stable")
    ts_sorted = sub.ts[t_order]
    b_snk = np.unique(np.concatenate(([0.0], snk.positions, ts_sorted)))
    f_snk = _profile(snk, b_snk, ts_sorted, G[t_order])

    best, _ = _maximizers(np.concatenate((f_src, f_snk)))
    tol = VALUE_TOL * max(1.0, abs(best))
    src_hits = np.flatnonzero(f_src >= best - tol)
    snk_hits = np.flatnonzero(f_snk >= best - tol)

    if len(src_hits):
        i = int(src_hits[-1])
        exit_sup = float(b_src[i + 1]) if i + 1 < len(b_src) else float(x)
    else:
        exit_sup = -float(b_snk[int(snk_hits[0])])
    if len(snk_hits):
        j = int(snk_hits[-1])
        exit_inf = -float(b_snk[j + 1]) if j + 1 < len(b_snk) else -float(t)
    else:
        exit_inf = float(b_src[int(src_hits[0])])

    if len(src_hits):
        start = float(b_src[int(src_hits[-1])])
        bval = float(src.cumulative(start))
        geo = EMPTY_PATH if (start == x and t == 0) else lowest_geodesic(sub, (start, 0.0), (x, t))
    else:
        s = float(b_snk[int(snk_hits[0])])
        bval = float(snk.cumulative(s))
        geo = EMPTY_PATH if (s == t and x == 0) else lowest_geodesic(sub, (0.0, s), (x, t))

    return PassageResult(
        value=bval + geo.value,
        geodesic=geo,
        exit=exit_sup,
        exit_sup=exit_sup,
        exit_inf=exit_inf,
        boundary=bval,
    )


##
# @brief Flux measure ν* from the passage representation / 通過時間表現から流束測度 ν* を求める
#
# @if japanese
# ν*((s,t]) = L_ν(0,t) − L_ν(0,s) を time_grid 上で評価し、各格子点に増分を載せた原子測度を返します。
# @endif
#
# @if english
# Evaluates ν*((s,t]) = L_ν(0,t) − L_ν(0,s) on the grid and returns the increments as atoms at the grid times.
# @endif
#
# @param ss_or_nu [in]  ソース/シンク、または初期測度 / Sources and sinks, or an initial measure
# @param points [in]  点集合 / Point set
# @param time_grid [in]  昇順の時刻列 / Increasing times
# @return AtomicMeasure  流束 / Flux measure
# @throws ValueError 格子が昇順でない、または負の場合 / When the grid is unsorted or negative
def flux_measure(
    ss_or_nu: Union[SourcesSinks, AtomicMeasure], points: WeightedPointSet, time_grid: Sequence[float]
) -> AtomicMeasure:
    grid = np.asarray(time_grid, dtype=np.float64)
    if len(grid) and (np.any(np.diff(grid) <= 0) or grid[0] < 0):
        raise ValueError(f"time grid must be nonnegative and strictly increasing: {list(time_grid)}")
    values = []
    for s in grid:
        if isinstance(ss_or_nu, SourcesSinks):
            values.append(sources_sinks_passage(ss_or_nu, points, 0.0, float(s)).value)
        else:
            values.append(boundary_last_passage(ss_or_nu, points, 0.0, float(s)).value)
    inc = np.diff(np.concatenate(([0.0], values)))
    keep = inc > VALUE_TOL
    return AtomicMeasure(grid[keep], inc[keep])


# ------------------------------------------------------------
# 形状関数 / Shape function
# ------------------------------------------------------------

##
# @brief Shape function γ√(xt) / 形状関数 γ√(xt)
#
# @throws ValueError 正でない入力 / On nonpositive input
def shape_function(x: float, t: float, gamma: float = 2.0) -> float:
    if not (x > 0 and t > 0 and gamma > 0):
        raise ValueError(f"x, t and gamma must be positive, got {x}, {t}, {gamma}")
    return gamma * math.sqrt(x * t)


##
# @brief Curvature bound of the shape function / 形状関数の曲率評価
#
# @if japanese
# f(t+s,t) − f(t,t) が s ≤ 8t では γs/2 − γs²/(32t) 以下、s ≥ 8t では γs/√8 以下であることを判定します。
# @endif
#
# @if english
# Checks f(t+s,t) − f(t,t) <= γs/2 − γs²/(32t) for s <= 8t and <= γs/√8 for s >= 8t.
# @endif
def curvature_bound_holds(s: float, t: float, gamma: float = 2.0) -> bool:
    if s < 0 or not t > 0:
        raise ValueError(f"need s >= 0 and t > 0, got s={s}, t={t}")
    lhs = shape_function(t + s, t, gamma) - shape_function(t, t, gamma)
    if s <= 8 * t:
        rhs = gamma * s / 2 - gamma * s * s / (32 * t)
    else:
        rhs = gamma * s / math.sqrt(8)
    return lhs <= rhs + 1e-12 * max(1.0, abs(rhs))


##
# @brief Local comparison between boundary and point-to-point passage / 境界つきと点対点の局所比較
#
# @if japanese
# 0 ≤ x < y で、Z_ν(y,t) ≤ 0 なら L_ν(y,t)−L_ν(x,t) ≤ L(0,(y,t))−L(0,(x,t))、
# Z_ν(x,t) ≥ 0 なら逆向きの不等式が成り立つかを調べます。どちらの前提も満たさなければTrueです。
# @endif
#
# @if english
# For 0 <= x < y: if Z_ν(y,t) <= 0 then L_ν(y,t)−L_ν(x,t) <= L(0,(y,t))−L(0,(x,t)); if Z_ν(x,t) >= 0 the
# reverse inequality holds. True when neither hypothesis applies.
# @endif
def local_comparison_holds(
    nu: AtomicMeasure, points: WeightedPointSet, x: float, y: float, t: float, window: Optional[Tuple[float, float]] = None
) -> bool:
    if not 0 <= x < y or not t > 0:
        raise ValueError(f"need 0 <= x < y and t > 0, got x={x}, y={y}, t={t}")
    rx = boundary_last_passage(nu, points, x, t, window)
    ry = boundary_last_passage(nu, points, y, t, window)
    d_nu = ry.value - rx.value
    d_pp = last_passage(points, (0.0, 0.0), (y, t)) - last_passage(points, (0.0, 0.0), (x, t))
    tol = VALUE_TOL * max(1.0, abs(d_nu), abs(d_pp))
    ok = True
    if ry.exit is not None and ry.exit <= 0:
        ok = ok and d_nu <= d_pp + tol
    if rx.exit is not None and rx.exit >= 0:
        ok = ok and d_nu >= d_pp - tol
    return ok
