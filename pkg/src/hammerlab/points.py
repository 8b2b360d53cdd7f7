# -*- coding: utf-8 -*-
##
# @file src/hammerlab/points.py
# @brief Seeded compound Poisson point clouds, atomic measures and weight laws.
#
# @if japanese
# 平面上の重み付きPoisson点集合と、一次元のPoisson/周期的な原子測度を、シードから再現可能に生成します。
# 点集合はx座標(同値ならt座標)でソートした状態で保持し、パス計算や流体の掃引がそのまま使えるようにします。
# 生成物はすべて読み取り専用のnumpy配列で保持し、スレッド間で安全に共有できます。
# @endif
#
# @if english
# Reproducible generation of weighted planar Poisson point sets and one-dimensional Poisson or periodic atomic
# measures. Point sets are kept sorted by x (then t) so passage sweeps and the fluid consume them directly.
# Everything is stored in read-only numpy arrays and can be shared freely.
# @endif
#

from __future__ import annotations

import math  # [JP] 標準: 切り上げ/切り捨て / [EN] Standard: floor and ceil
from dataclasses import dataclass, field  # [JP] 標準: 値オブジェクト / [EN] Standard: value objects
from pathlib import Path  # [JP] 標準: パス操作 / [EN] Standard: path utilities
from typing import Iterable, List, Optional, Sequence, Tuple  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: 乱数と配列 / [EN] External: random streams and arrays
import pandas as pd  # [JP] 外部: CSV入出力 / [EN] External: CSV I/O

KIND_DIRAC = "dirac"
KIND_EXPONENTIAL = "exponential"
KIND_DISCRETE = "discrete"

SIDE_RIGHT = "right"
SIDE_LEFT = "left"


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


# ------------------------------------------------------------
# 重み分布 / Weight distributions
# ------------------------------------------------------------


@dataclass(frozen=True)
class WeightDistribution:
    """
    点の重みωの分布F。Dirac(1) が古典的Hammersleyモデル。
    """

    kind: str
    value: float = 1.0
    rate: float = 1.0
    values: Tuple[float, ...] = ()
    probs: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind == KIND_DIRAC:
            if not self.value > 0:
                raise ValueError(f"Dirac weight must be positive, got {self.value}")
        elif self.kind == KIND_EXPONENTIAL:
            if not self.rate > 0:
                raise ValueError(f"exponential rate must be positive, got {self.rate}")
        elif self.kind == KIND_DISCRETE:
            if len(self.values) == 0 or len(self.values) != len(self.probs):
                raise ValueError("discrete law needs matching non-empty values and probabilities")
            if any(v <= 0 for v in self.values):
                raise ValueError(f"discrete weights must be positive, got {self.values}")
            if any(p < 0 for p in self.probs) or not math.isclose(sum(self.probs), 1.0, abs_tol=1e-9):
                raise ValueError(f"probabilities must be nonnegative and sum to 1, got {self.probs}")
            if list(self.values) != sorted(set(self.values)):
                raise ValueError(f"discrete values must be strictly increasing, got {self.values}")
        else:
            raise ValueError(f"unknown weight law: {self.kind}")

    @classmethod
    def dirac(cls, value: float = 1.0) -> "WeightDistribution":
        return cls(KIND_DIRAC, value=float(value))

    @classmethod
    def exponential(cls, rate: float = 1.0) -> "WeightDistribution":
        return cls(KIND_EXPONENTIAL, rate=float(rate))

    @classmethod
    def discrete(cls, values: Sequence[float], probs: Sequence[float]) -> "WeightDistribution":
        return cls(KIND_DISCRETE, values=tuple(float(v) for v in values), probs=tuple(float(p) for p in probs))

    ##
    # @brief Parse a command-line weight law / CLI表記の重み分布を解釈する
    #
    # @if japanese
    # 受け付ける表記: `dirac1` / `dirac:2.5` / `exp1` / `exp:0.5` / `discrete:1:0.5,2:0.5` (値:確率の組)。
    # @endif
    #
    # @if english
    # Accepted forms: `dirac1`, `dirac:2.5`, `exp1`, `exp:0.5`, `discrete:1:0.5,2:0.5` (value:probability pairs).
    # @endif
    #
    # @param text [in]  表記 / Text form
    # @return WeightDistribution  分布 / Parsed law
    # @throws ValueError 解釈できない場合 / When the text is not understood
    @classmethod
    def parse(cls, text: str) -> "WeightDistribution":
        s = text.strip().lower()
        try:
            if s.startswith("discrete:"):
                pairs = [p.split(":") for p in s[len("discrete:"):].split(",") if p]
                return cls.discrete([float(v) for v, _ in pairs], [float(p) for _, p in pairs])
            if s.startswith("dirac"):
                rest = s[len("dirac"):].lstrip(":")
                return cls.dirac(float(rest) if rest else 1.0)
            if s.startswith("exp"):
                rest = s[len("exp"):].lstrip(":")
                return cls.exponential(float(rest) if rest else 1.0)
        except (TypeError, ValueError) as e:
            raise ValueError(f"cannot parse weight law '{text}': {e}") from e
        raise ValueError(f"cannot parse weight law '{text}'")

    @property
    def is_classical(self) -> bool:
        return self.kind == KIND_DIRAC and self.value == 1.0

    @property
    def label(self) -> str:
        if self.kind == KIND_DIRAC:
            return f"dirac:{self.value:g}"
        if self.kind == KIND_EXPONENTIAL:
            return f"exp:{self.rate:g}"
        return "discrete:" + ",".join(f"{v:g}:{p:g}" for v, p in zip(self.values, self.probs))

    @property
    def mean(self) -> float:
        if self.kind == KIND_DIRAC:
            return self.value
        if self.kind == KIND_EXPONENTIAL:
            return 1.0 / self.rate
        return float(np.dot(self.values, self.probs))

    ##
    # @brief Draw n weights / 重みをn個生成する
    #
    # @param rng [in]  乱数生成器 / Random generator
    # @param n [in]  個数 / Count
    # @return np.ndarray  重み / Weights
    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == KIND_DIRAC:
            return np.full(n, self.value, dtype=np.float64)
        if self.kind == KIND_EXPONENTIAL:
            return rng.exponential(1.0 / self.rate, size=n)
        return rng.choice(np.asarray(self.values), size=n, p=np.asarray(self.probs))


##
# @brief ∫₀^∞ √(1−F(x)) dx in closed form / 重み分布の平方根裾積分
#
# @if japanese
# 形状定数の上界 γ(F) ≤ 2·∫√(1−F) に使います。3種類の分布はいずれも有限値です。
# Dirac(c) は c、指数分布(rate) は 2/rate、離散分布は階段関数の区間和です。
# @endif
#
# @if english
# Used by the shape-constant bound γ(F) ≤ 2·∫√(1−F). Finite for all three kinds:
# Dirac(c) gives c, Exponential(rate) gives 2/rate, a discrete law gives a sum over its steps.
# @endif
#
# @param dist [in]  重み分布 / Weight law
# @return float  積分値 / Integral value
def sqrt_tail_integral(dist: WeightDistribution) -> float:
    if dist.kind == KIND_DIRAC:
        return dist.value
    if dist.kind == KIND_EXPONENTIAL:
        return 2.0 / dist.rate
    total = 0.0
    prev = 0.0
    tail = 1.0
    for v, p in zip(dist.values, dist.probs):
        # [JP] [prev, v) 上で 1−F = P(W ≥ v) / [EN] on [prev, v) the tail equals P(W >= v)
        total += (v - prev) * math.sqrt(max(tail, 0.0))
        tail -= p
        prev = v
    return total


# ------------------------------------------------------------
# 矩形と点集合 / Rectangles and point sets
# ------------------------------------------------------------


@dataclass(frozen=True)
class Rect:
    x0: float
    x1: float
    t0: float
    t1: float

    def __post_init__(self) -> None:
        if not (self.x0 < self.x1 and self.t0 < self.t1):
            raise ValueError(f"degenerate or inverted rectangle: {self}")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.t1 - self.t0)

    def contains(self, xs: np.ndarray, ts: np.ndarray) -> np.ndarray:
        return (xs >= self.x0) & (xs <= self.x1) & (ts >= self.t0) & (ts <= self.t1)

    def union(self, other: "Rect") -> "Rect":
        return Rect(min(self.x0, other.x0), max(self.x1, other.x1), min(self.t0, other.t0), max(self.t1, other.t1))


@dataclass(frozen=True, eq=False)
class WeightedPointSet:
    """
    矩形内の重み付き点集合 {(x, t, w)}。x昇順(同値はt昇順)で保持する。
    """

    rect: Rect
    xs: np.ndarray
    ts: np.ndarray
    ws: np.ndarray
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        xs = np.asarray(self.xs, dtype=np.float64).ravel()
        ts = np.asarray(self.ts, dtype=np.float64).ravel()
        ws = np.asarray(self.ws, dtype=np.float64).ravel()
        if not (len(xs) == len(ts) == len(ws)):
            raise ValueError("x, t and w arrays must have equal length")
        if len(ws) and not np.all(ws > 0):
            raise ValueError("point weights must be positive")
        if len(xs) and not np.all(self.rect.contains(xs, ts)):
            raise ValueError(f"points outside {self.rect}")
        order = np.lexsort((ts, xs))
        object.__setattr__(self, "xs", _frozen(xs[order]))
        object.__setattr__(self, "ts", _frozen(ts[order]))
        object.__setattr__(self, "ws", _frozen(ws[order]))

    def __len__(self) -> int:
        return int(self.xs.shape[0])

    ##
    # @brief Build from explicit (x, t, w) triples / (x,t,w)の組から構築
    #
    # @param points [in]  点のリスト / Point triples
    # @param rect [in]  矩形(省略時は外接矩形を少し広げる) / Rectangle, bounding box plus margin when omitted
    # @return WeightedPointSet  点集合 / Point set
    @classmethod
    def from_points(
        cls, points: Iterable[Tuple[float, float, float]], rect: Optional[Rect] = None, seed: Optional[int] = None
    ) -> "WeightedPointSet":
        arr = np.asarray(list(points), dtype=np.float64).reshape(-1, 3)
        if rect is None:
            if len(arr) == 0:
                rect = Rect(0.0, 1.0, 0.0, 1.0)
            else:
                rect = Rect(
                    min(0.0, float(arr[:, 0].min())),
                    float(arr[:, 0].max()) + 1.0,
                    min(0.0, float(arr[:, 1].min())),
                    float(arr[:, 1].max()) + 1.0,
                )
        return cls(rect, arr[:, 0], arr[:, 1], arr[:, 2], seed)

    @classmethod
    def empty(cls, rect: Rect) -> "WeightedPointSet":
        return cls(rect, np.empty(0), np.empty(0), np.empty(0))

    @property
    def points(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.xs.tolist(), self.ts.tolist(), self.ws.tolist()))

    @property
    def is_classical(self) -> bool:
        return bool(np.all(self.ws == 1.0))

    ##
    # @brief Keep points in a half-open box (x0,x1]×(t0,t1] / 半開区間の箱に含まれる点だけ残す
    #
    # @if japanese
    # 南側と西側の辺を除き、北側と東側の辺を含めます(パス計算の領域規約)。
    # @endif
    #
    # @if english
    # Excludes the south and west sides and includes the north and east sides (the passage domain convention).
    # @endif
    def window(self, x0: float, x1: float, t0: float, t1: float) -> "WeightedPointSet":
        m = (self.xs > x0) & (self.xs <= x1) & (self.ts > t0) & (self.ts <= t1)
        return WeightedPointSet(self.rect, self.xs[m], self.ts[m], self.ws[m], self.seed)

    def with_rect(self, rect: Rect) -> "WeightedPointSet":
        return WeightedPointSet(rect, self.xs, self.ts, self.ws, self.seed)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"x": self.xs, "t": self.ts, "w": self.ws})

    def to_csv(self, path: Path | str) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(p, index=False, float_format="%.17g")
        return p

    @classmethod
    def from_csv(cls, path: Path | str, rect: Optional[Rect] = None) -> "WeightedPointSet":
        p = Path(path)
        if not p.exists():
            raise FileNotFoundError(f"point-set CSV not found: {p}")
        df = pd.read_csv(p)
        missing = {"x", "t", "w"} - set(df.columns)
        if missing:
            raise ValueError(f"point-set CSV {p} lacks columns {sorted(missing)}")
        return cls.from_points(df[["x", "t", "w"]].to_numpy(), rect)


# ------------------------------------------------------------
# 原子測度 / Atomic measures
# ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AtomicMeasure:
    """
    直線上の原子測度。累積過程は ν(x)=ν((0,x]) (x≥0), ν(x)=−ν((x,0]) (x<0)。
    同じ位置の原子は構築時に合算する。
    """

    positions: np.ndarray = field(default_factory=lambda: np.empty(0))
    masses: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self) -> None:
        pos = np.asarray(self.positions, dtype=np.float64).ravel()
        mas = np.asarray(self.masses, dtype=np.float64).ravel()
        if pos.shape != mas.shape:
            raise ValueError("positions and masses must have equal length")
        if len(mas) and not np.all(mas > 0):
            raise ValueError("atom masses must be positive")
        order = np.argsort(pos, kind="stable")
        pos, mas = pos[order], mas[order]
        if len(pos) > 1 and np.any(np.diff(pos) == 0):
            uniq, inv = np.unique(pos, return_inverse=True)
            pos, mas = uniq, np.bincount(inv, weights=mas)
        object.__setattr__(self, "positions", _frozen(pos))
        object.__setattr__(self, "masses", _frozen(mas))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[float, float]]) -> "AtomicMeasure":
        arr = np.asarray(list(pairs), dtype=np.float64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    def __len__(self) -> int:
        return int(self.positions.shape[0])

    @property
    def pairs(self) -> List[Tuple[float, float]]:
        return list(zip(self.positions.tolist(), self.masses.tolist()))

    @property
    def total(self) -> float:
        return float(self.masses.sum())

    def _running(self, z: np.ndarray) -> np.ndarray:
        # [JP] C(z) = Σ_{p ≤ z} m_p / [EN] C(z) = sum of masses at positions <= z
        csum = np.concatenate(([0.0], np.cumsum(self.masses)))
        return csum[np.searchsorted(self.positions, z, side="right")]

    ##
    # @brief Signed cumulative process ν(z) / 符号付き累積過程 ν(z)
    #
    # @if japanese
    # ν(z) = C(z) − C(0) で、z≥0 なら ν((0,z])、z<0 なら −ν((z,0]) に一致します。右連続。
    # @endif
    #
    # @if english
    # ν(z) = C(z) − C(0), which equals ν((0,z]) for z ≥ 0 and −ν((z,0]) for z < 0. Right-continuous.
    # @endif
    #
    # @param z [in]  評価点(スカラーまたは配列) / Evaluation point(s)
    # @return float | np.ndarray  累積値 / Cumulative value(s)
    def cumulative(self, z: float | np.ndarray) -> float | np.ndarray:
        arr = np.asarray(z, dtype=np.float64)
        out = self._running(arr) - self._running(np.asarray(0.0))
        return float(out) if out.ndim == 0 else out

    def mass_in(self, a: float, b: float) -> float:
        """Mass of the half-open interval (a, b]."""
        if b <= a:
            return 0.0
        return float(self._running(np.asarray(b)) - self._running(np.asarray(a)))

    def restrict(self, lo: float, hi: float, *, include_lo: bool = True) -> "AtomicMeasure":
        m = (self.positions >= lo) if include_lo else (self.positions > lo)
        m &= self.positions <= hi
        return AtomicMeasure(self.positions[m], self.masses[m])

    def shift(self, dx: float) -> "AtomicMeasure":
        return AtomicMeasure(self.positions + dx, self.masses)

    def reflect(self) -> "AtomicMeasure":
        """Mirror image under z -> -z."""
        return AtomicMeasure(-self.positions[::-1], self.masses[::-1])

    def plus(self, other: "AtomicMeasure") -> "AtomicMeasure":
        return AtomicMeasure(
            np.concatenate((self.positions, other.positions)), np.concatenate((self.masses, other.masses))
        )

    def spacings(self) -> np.ndarray:
        return np.diff(self.positions)

    ##
    # @brief Whether self ≥ other as measures / 測度として self ≥ other か
    #
    # @param other [in]  比較対象 / Measure to compare
    # @param tol [in]  質量の許容誤差 / Mass tolerance
    # @return bool  支配していればTrue / True when self dominates other
    def dominates(self, other: "AtomicMeasure", tol: float = 1e-9) -> bool:
        if len(other) == 0:
            return True
        idx = np.searchsorted(self.positions, other.positions)
        idx_c = np.minimum(idx, max(len(self) - 1, 0))
        if len(self) == 0:
            return bool(np.all(other.masses <= tol))
        same = (idx < len(self)) & (self.positions[idx_c] == other.positions)
        mine = np.where(same, self.masses[idx_c], 0.0)
        return bool(np.all(mine >= other.masses - tol))

    def allclose(self, other: "AtomicMeasure", tol: float = 1e-9) -> bool:
        return (
            len(self) == len(other)
            and bool(np.allclose(self.positions, other.positions, rtol=0.0, atol=tol))
            and bool(np.allclose(self.masses, other.masses, rtol=0.0, atol=tol))
        )

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"pos": self.positions, "mass": self.masses})

    def to_csv(self, path: Path | str) -> Path:
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(p, index=False, float_format="%.17g")
        return p

    @classmethod
    def from_csv(cls, path: Path | str) -> "AtomicMeasure":
        p = Path(path)
        if not p.exists():
            raise FileNotFoundError(f"measure CSV not found: {p}")
        df = pd.read_csv(p)
        if not {"pos", "mass"} <= set(df.columns):
            raise ValueError(f"measure CSV {p} needs columns pos,mass")
        return cls(df["pos"].to_numpy(), df["mass"].to_numpy())


# ------------------------------------------------------------
# サンプリング / Sampling
# ------------------------------------------------------------

##
# @brief Derive a child seed for a named sub-stream / 名前付きサブストリーム用の子シードを導出
#
# @if japanese
# SeedSequenceのspawn_keyでレプリカ番号や用途(点・ソース・シンク)ごとに独立な系列を作ります。
# @endif
#
# @if english
# Uses the SeedSequence spawn key so each replica index and role (points, sources, sinks) gets its own stream.
# @endif
#
# @param seed [in]  親シード / Parent seed
# @param keys [in]  サブストリームの識別子 / Sub-stream identifiers
# @return int  子シード / Child seed
def derive_seed(seed: int, *keys: int) -> int:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


##
# @brief Sample a compound Poisson point set / 複合Poisson点集合を生成する
#
# @param rect [in]  矩形 / Rectangle
# @param intensity [in]  強度 / Intensity
# @param dist [in]  重み分布 / Weight law
# @param seed [in]  シード / Seed
# @return WeightedPointSet  点集合 / Point set
# @throws ValueError 強度が正でない場合 / When intensity is not positive
def sample_point_set(rect: Rect, intensity: float, dist: WeightDistribution, seed: int) -> WeightedPointSet:
    if not intensity > 0:
        raise ValueError(f"intensity must be positive, got {intensity}")
    rng = np.random.default_rng(seed)
    n = int(rng.poisson(rect.area * intensity))
    xs = rng.uniform(rect.x0, rect.x1, size=n)
    ts = rng.uniform(rect.t0, rect.t1, size=n)
    ws = dist.sample(rng, n)
    return WeightedPointSet(rect, xs, ts, ws, seed)


##
# @brief Sample a one-dimensional Poisson atomic measure / 一次元Poisson原子測度を生成する
#
# @param interval [in]  区間 (a,b) / Interval
# @param intensity [in]  強度 / Intensity
# @param mass_dist [in]  原子質量の分布 / Atom mass law
# @param seed [in]  シード / Seed
# @return AtomicMeasure  原子測度 / Atomic measure
# @throws ValueError a ≥ b または強度が正でない場合 / When a >= b or intensity is not positive
def sample_atomic_poisson(
    interval: Tuple[float, float], intensity: float, mass_dist: WeightDistribution, seed: int
) -> AtomicMeasure:
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"interval must satisfy a < b, got [{a}, {b}]")
    if not intensity > 0:
        raise ValueError(f"intensity must be positive, got {intensity}")
    rng = np.random.default_rng(seed)
    n = int(rng.poisson((b - a) * intensity))
    pos = rng.uniform(a, b, size=n)
    return AtomicMeasure(pos, mass_dist.sample(rng, n))


##
# @brief Unit atoms on the lattice k/density / 格子 k/density 上の単位原子
#
# @param interval [in]  閉区間 [a,b] / Closed interval
# @param density [in]  密度 / Density
# @param side [in]  right は k≥1、left は k≤−1 / right uses k>=1, left uses k<=-1
# @return AtomicMeasure  周期的測度 / Periodic measure
def periodic_measure(interval: Tuple[float, float], density: float, side: str = SIDE_RIGHT) -> AtomicMeasure:
    a, b = float(interval[0]), float(interval[1])
    if not a < b:
        raise ValueError(f"interval must satisfy a < b, got [{a}, {b}]")
    if not density > 0:
        raise ValueError(f"density must be positive, got {density}")
    k_lo = math.ceil(a * density - 1e-12)
    k_hi = math.floor(b * density + 1e-12)
    if side == SIDE_RIGHT:
        k_lo = max(k_lo, 1)
    elif side == SIDE_LEFT:
        k_hi = min(k_hi, -1)
    else:
        raise ValueError(f"side must be '{SIDE_RIGHT}' or '{SIDE_LEFT}', got {side}")
    if k_hi < k_lo:
        return AtomicMeasure()
    ks = np.arange(k_lo, k_hi + 1, dtype=np.float64)
    return AtomicMeasure(ks / density, np.ones_like(ks))


##
# @brief Bernoulli thinning of a point set / 点集合のBernoulli間引き
#
# @param points [in]  点集合 / Point set
# @param p [in]  残す確率 / Retention probability
# @param seed [in]  シード / Seed
# @return WeightedPointSet  間引き後の点集合 / Thinned point set
def thin(points: WeightedPointSet, p: float, seed: int) -> WeightedPointSet:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"retention probability must lie in [0,1], got {p}")
    rng = np.random.default_rng(seed)
    keep = rng.random(len(points)) < p
    return WeightedPointSet(points.rect, points.xs[keep], points.ts[keep], points.ws[keep], seed)


def pushforward(points: WeightedPointSet, lam: float) -> WeightedPointSet:
    """Image under the area-preserving map (x, t) -> (lam*x, t/lam)."""
    if not lam > 0:
        raise ValueError(f"scale must be positive, got {lam}")
    r = points.rect
    rect = Rect(r.x0 * lam, r.x1 * lam, r.t0 / lam, r.t1 / lam)
    return WeightedPointSet(rect, points.xs * lam, points.ts / lam, points.ws, points.seed)
