# -*- coding: utf-8 -*-
##
# @file src/hammerlab/fluid.py
# @brief Event-driven Hammersley interacting fluid system with box ledgers.
#
# @if japanese
# 流体測度 M^t を原子のリストとして保持し、Poisson点とシンクのイベントを時刻順に適用します。
# 点 (x0, ω) は x0 の右にある最初の質量 ω を x0 へ引き寄せ、右側に足りなければ不足分を東側境界から流入させます。
# シンクは左境界での点として働き、引き寄せた質量を左から流出させます。流入・流出・右上角の記録を台帳に残します。
# @endif
#
# @if english
# Keeps the fluid measure M^t as a list of atoms and applies Poisson point and sink events in time order.
# A point (x0, ω) pulls the first ω of mass to the right of x0 onto x0; any deficit enters through the east edge.
# A sink acts as a point on the left edge whose pulled mass leaves the box. Entries, exits and upper-right corners
# are kept in ledgers.
# @endif
#

from __future__ import annotations

import logging  # [JP] 標準: 警告出力 / [EN] Standard: warnings
from bisect import bisect_left, bisect_right  # [JP] 標準: 二分探索 / [EN] Standard: binary search
from dataclasses import dataclass, field  # [JP] 標準: 状態レコード / [EN] Standard: state records
from typing import List, Optional, Tuple  # [JP] 標準: 型ヒント / [EN] Standard: type hints

import numpy as np  # [JP] 外部: 配列 / [EN] External: arrays
import pandas as pd  # [JP] 外部: イベントログ / [EN] External: event log frames

from . import setting_key as sk
from .points import AtomicMeasure, WeightedPointSet
from .settings import fallback

logger = logging.getLogger(__name__)

# [JP] setting.csv の MASS_TOL を渡さない場合の既定値 / [EN] used when no MASS_TOL from setting.csv is passed
MASS_TOL = float(fallback(sk.KEY_MASS_TOL))

EV_POINT = "point"
EV_SINK = "sink"
EV_EAST = "east"
EV_EXIT = "exit"


@dataclass
class FluidState:
    """
    実行中は単一所有者が書き換える。完了後は読み取り専用として扱う。
    """

    window: Tuple[float, float]
    pos: List[float] = field(default_factory=list)
    mass: List[float] = field(default_factory=list)
    time: float = 0.0
    left_ledger: List[Tuple[float, float]] = field(default_factory=list)
    east_ledger: List[Tuple[float, float]] = field(default_factory=list)
    corner_log: List[Tuple[float, float, float]] = field(default_factory=list)
    events: List[Tuple[float, str, float, float]] = field(default_factory=list)
    history: Optional[List[Tuple[float, AtomicMeasure]]] = None
    initial_mass: float = 0.0
    tol: float = MASS_TOL
    whole_line: bool = False

    ##
    # @brief Start a run from an initial measure / 初期測度から状態を作る
    #
    # @param nu [in]  初期測度(窓の外の原子は捨てる) / Initial measure, atoms outside the window dropped
    # @param window [in]  空間窓 (a,b) / Spatial window
    # @param record [in]  各イベント後の測度を保存するか / Whether to snapshot after every event
    # @return FluidState  状態 / New state
    @classmethod
    def start(
        cls, nu: AtomicMeasure, window: Tuple[float, float], *, record: bool = False, tol: float = MASS_TOL
    ) -> "FluidState":
        a, b = float(window[0]), float(window[1])
        if not a < b:
            raise ValueError(f"window must satisfy a < b, got {window}")
        inside = nu.restrict(a, b)
        st = cls(
            window=(a, b),
            pos=inside.positions.tolist(),
            mass=inside.masses.tolist(),
            initial_mass=inside.total,
            tol=tol,
        )
        if record:
            st.history = [(0.0, st.measure)]
        return st

    @property
    def measure(self) -> AtomicMeasure:
        return AtomicMeasure(np.asarray(self.pos), np.asarray(self.mass))

    @property
    def entered(self) -> float:
        return float(sum(m for _, m in self.east_ledger))

    @property
    def exited(self) -> float:
        return float(sum(m for _, m in self.left_ledger))

    @property
    def balance_gap(self) -> float:
        """initial + entered - final - exited; zero up to rounding."""
        return self.initial_mass + self.entered - float(sum(self.mass)) - self.exited

    @property
    def saturated(self) -> bool:
        return self.whole_line and bool(self.east_ledger)

    def _snapshot(self) -> None:
        if self.history is not None:
            self.history.append((self.time, self.measure))

    def event_log(self) -> pd.DataFrame:
        return pd.DataFrame(self.events, columns=["time", "kind", "x", "mass"])

    def corners(self) -> pd.DataFrame:
        return pd.DataFrame(self.corner_log, columns=["x", "t", "mass"])


##
# @brief Remove mass strictly right of x0 / x0より右の質量を取り除く
#
# @if japanese
# 左から順に原子を削り、取り除いた位置ごとに右上角を記録します。残り質量が許容誤差以下の原子は消します。
# 戻り値は右側に足りなかった質量です。
# @endif
#
# @if english
# Depletes atoms from the left, logging an upper-right corner at every atom touched. Atoms left with no more than the
# tolerance are deleted. Returns the mass that was missing to the right.
# @endif
def _pull_from_right(state: FluidState, x0: float, omega: float) -> float:
    need = omega
    k = bisect_right(state.pos, x0)
    while need > state.tol and k < len(state.pos):
        avail = state.mass[k]
        take = avail if avail <= need + state.tol else need
        state.corner_log.append((state.pos[k], state.time, take))
        need -= take
        rest = avail - take
        if rest <= state.tol:
            del state.pos[k]
            del state.mass[k]
        else:
            state.mass[k] = rest
            k += 1
    if need <= state.tol:
        return 0.0
    state.east_ledger.append((state.time, need))
    state.events.append((state.time, EV_EAST, state.window[1], need))
    return need


##
# @brief Apply a Poisson point event / Poisson点のイベントを適用する
#
# @param state [in,out]  流体状態 / Fluid state, updated in place
# @param x0 [in]  点のx座標 / Point position
# @param omega [in]  重み / Weight
# @param time [in]  イベント時刻(省略時は現在時刻) / Event time, current time when omitted
# @return FluidState  更新後の状態 / The same state
def apply_point(state: FluidState, x0: float, omega: float, time: Optional[float] = None) -> FluidState:
    if not omega > 0:
        raise ValueError(f"point weight must be positive, got {omega}")
    if time is not None:
        state.time = float(time)
    _pull_from_right(state, x0, omega)
    idx = bisect_left(state.pos, x0)
    if idx < len(state.pos) and state.pos[idx] == x0:
        state.mass[idx] += omega
    else:
        state.pos.insert(idx, float(x0))
        state.mass.insert(idx, float(omega))
    state.events.append((state.time, EV_POINT, float(x0), float(omega)))
    state._snapshot()
    return state


##
# @brief Apply a sink event on the left edge / 左端のシンクのイベントを適用する
#
# @param state [in,out]  流体状態 / Fluid state, updated in place
# @param omega [in]  シンクの質量 / Sink mass
# @param time [in]  イベント時刻 / Event time
# @return FluidState  更新後の状態 / The same state
def apply_sink(state: FluidState, omega: float, time: Optional[float] = None) -> FluidState:
    if not omega > 0:
        raise ValueError(f"sink mass must be positive, got {omega}")
    if time is not None:
        state.time = float(time)
    state.events.append((state.time, EV_SINK, state.window[0], float(omega)))
    _pull_from_right(state, state.window[0], omega)
    state.left_ledger.append((state.time, float(omega)))
    state.events.append((state.time, EV_EXIT, state.window[0], float(omega)))
    state._snapshot()
    return state


##
# @brief One generator move on a bare measure / 測度に対する生成作用素の1ステップ
#
# @if japanese
# 質量 ω を右側から z へ移した測度を返します(右側の供給は無限とみなし、不足分は記録しません)。
# @endif
#
# @if english
# Returns the measure with mass ω moved left onto z from its right; the supply on the right is treated as unlimited.
# @endif
def generator_step(measure: AtomicMeasure, z: float, omega: float) -> AtomicMeasure:
    hi = max(float(measure.positions[-1]) if len(measure) else z, z) + 1.0
    lo = min(float(measure.positions[0]) if len(measure) else z, z) - 1.0
    st = FluidState.start(measure, (lo, hi))
    return apply_point(st, z, omega).measure


def _time_order(points: WeightedPointSet, T: float) -> np.ndarray:
    order = np.lexsort((points.xs, points.ts))
    return order[points.ts[order] <= T]


##
# @brief Evolve a whole-line measure inside the point window / 点集合の窓内で全直線の流体を発展させる
#
# @if japanese
# 窓 [a,b] は点集合の矩形のx範囲です。窓の右に質量が無いため東端からの流入が起きた場合は saturated を立てて警告します。
# @endif
#
# @if english
# The window [a,b] is the x-range of the point set's rectangle. With nothing stored right of the window, east entries
# may occur; they raise saturated and a warning.
# @endif
#
# @param nu [in]  初期測度 / Initial measure
# @param points [in]  点集合 / Point set
# @param T [in]  終了時刻 / Final time
# @param record [in]  履歴を残すか / Whether to keep snapshots
# @param tol [in]  質量の許容誤差 / Mass tolerance
# @return FluidState  最終状態 / Final state
def evolve(
    nu: AtomicMeasure, points: WeightedPointSet, T: float, *, record: bool = False, tol: float = MASS_TOL
) -> FluidState:
    if T < 0:
        raise ValueError(f"T must be nonnegative, got {T}")
    st = FluidState.start(nu, (points.rect.x0, points.rect.x1), record=record, tol=tol)
    st.whole_line = True
    for k in _time_order(points, T):
        apply_point(st, float(points.xs[k]), float(points.ws[k]), float(points.ts[k]))
    st.time = float(T)
    if st.saturated:
        logger.warning("east entries in a whole-line run: %d events, mass %.6g", len(st.east_ledger), st.entered)
    return st


##
# @brief Evolve the box process with sources and sinks / ソースとシンクをもつ箱の過程を発展させる
#
# @if japanese
# 同時刻のイベントはシンク → 点の順に処理します。台帳(流入・流出)と右上角の記録がすべて埋まります。
# @endif
#
# @if english
# Events at equal times are processed sinks first, then points. Entry, exit and corner ledgers are all filled.
# @endif
#
# @param sources [in]  ソース(初期測度) / Sources on the bottom edge
# @param sinks [in]  シンク(位置=時刻) / Sinks, position is the time
# @param points [in]  点集合 / Point set
# @param R [in]  箱の幅 / Box width
# @param T [in]  箱の高さ / Box height
# @param record [in]  履歴を残すか / Whether to keep snapshots
# @param tol [in]  質量の許容誤差 / Mass tolerance
# @return FluidState  最終状態 / Final state
def evolve_box(
    sources: AtomicMeasure,
    sinks: AtomicMeasure,
    points: WeightedPointSet,
    R: float,
    T: float,
    *,
    record: bool = False,
    tol: float = MASS_TOL,
) -> FluidState:
    if not (R > 0 and T > 0):
        raise ValueError(f"box sides must be positive, got R={R}, T={T}")
    if len(sources) and (sources.positions[0] < 0 or sources.positions[-1] > R):
        raise ValueError(f"sources outside [0, {R}]")
    inside = (points.xs > 0) & (points.xs <= R) & (points.ts > 0)
    if len(points) and not np.all(inside | (points.ts > T)):
        raise ValueError(f"points outside the box (0,{R}]x(0,{T}]")
    st = FluidState.start(sources, (0.0, float(R)), record=record, tol=tol)

    snk = sinks.restrict(0.0, T, include_lo=False)
    # [JP] (時刻, 種別 0=シンク 1=点, 位置, 質量) / [EN] (time, kind 0=sink 1=point, position, mass)
    queue: List[Tuple[float, int, float, float]] = [(float(s), 0, 0.0, float(m)) for s, m in snk.pairs]
    for k in _time_order(points, T):
        queue.append((float(points.ts[k]), 1, float(points.xs[k]), float(points.ws[k])))
    queue.sort()
    for time, kind, x0, w in queue:
        if kind == 0:
            apply_sink(st, w, time)
        else:
            apply_point(st, x0, w, time)
    st.time = float(T)
    return st


##
# @brief Basic coupling of two ordered initial measures / 順序づいた2つの初期測度の基本結合
#
# @param nu_low [in]  小さい方 / Lower measure
# @param nu_high [in]  大きい方 / Upper measure
# @param points [in]  共有する点集合 / Shared point set
# @param T [in]  終了時刻 / Final time
# @return (FluidState, FluidState)  両方の軌道(履歴つき) / Both runs with snapshots
# @throws ValueError nu_high が nu_low を支配しない場合 / When nu_high does not dominate nu_low
def couple_evolve(
    nu_low: AtomicMeasure, nu_high: AtomicMeasure, points: WeightedPointSet, T: float, *, tol: float = MASS_TOL
) -> Tuple[FluidState, FluidState]:
    if not nu_high.dominates(nu_low):
        raise ValueError("nu_high must dominate nu_low as measures")
    low = evolve(nu_low, points, T, record=True, tol=tol)
    high = evolve(nu_high, points, T, record=True, tol=tol)
    return low, high
