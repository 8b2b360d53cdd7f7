# -*- coding: utf-8 -*-
##
# @file src/hammerlab/_kernels.py
# @brief Compiled sweeps for chain dynamic programming over planar points.
#
# @if japanese
# x昇順に並べた点列に対し、t座標の順位をキーとするFenwick木(前置最大値)で最長重み鎖を求めるnumbaカーネルです。
# 同じx座標の点は一つのグループとして、全員が問い合わせた後にまとめて挿入します(x, tともに狭義単調な鎖のみ許す)。
# 同値の候補は「tの順位が小さいもの、次にインデックスが大きいもの」を優先し、最も低い測地線を復元できるようにします。
# @endif
#
# @if english
# numba kernels computing heaviest increasing chains over x-sorted points with a Fenwick tree of prefix maxima
# keyed by t-rank. Points sharing an x-coordinate form a group that queries before any of them is inserted, so
# only chains strictly increasing in both coordinates are formed. Ties prefer the smaller t-rank, then the larger
# index, which is what lets the caller rebuild the lowest geodesic.
# @endif
#

from __future__ import annotations

import numba as nb  # [JP] 外部: JITコンパイル / [EN] External: JIT compilation
import numpy as np  # [JP] 外部: 配列 / [EN] External: arrays


@nb.njit(cache=True)
def _better(v1, r1, i1, v2, r2, i2):
    if v1 > v2:
        return True
    if v1 < v2:
        return False
    if r1 < r2:
        return True
    if r1 > r2:
        return False
    return i1 > i2


##
# @brief Heaviest chain ending at each point / 各点で終わる最重鎖の値
#
# @if japanese
# fixed[k] が真の点は仮想的な境界点で、値は base[k] に固定され前任者を持ちません。
# free_start が真なら鎖はどの点からでも始められ(F = w + max(0, 前任者))、偽なら固定点から始まる鎖だけを数えます。
# 到達できない点の値は -inf です。
# @endif
#
# @if english
# Points with fixed[k] set are virtual boundary points whose value is pinned to base[k] with no predecessor.
# With free_start a chain may begin at any point (F = w + max(0, best predecessor)); otherwise only chains that start
# at a fixed point count, and unreachable points get -inf.
# @endif
#
# @param xs [in]  x座標(昇順) / x-coordinates, ascending
# @param tr [in]  t座標の順位(1始まり) / 1-based t-ranks
# @param ws [in]  重み / Weights
# @param base [in]  固定点の値 / Values of fixed points
# @param fixed [in]  固定点フラグ / Fixed-point flags
# @param m [in]  順位の最大値 / Largest rank
# @param free_start [in]  任意の点から開始できるか / Whether chains may start anywhere
# @return (F, pred)  値と前任者インデックス / Values and predecessor indices
@nb.njit(cache=True)
def chain_sweep(xs, tr, ws, base, fixed, m, free_start):
    n = xs.shape[0]
    F = np.empty(n, dtype=np.float64)
    pred = np.full(n, -1, dtype=np.int64)
    tv = np.full(m + 1, -np.inf, dtype=np.float64)
    tk = np.full(m + 1, m + 1, dtype=np.int64)
    ti = np.full(m + 1, -1, dtype=np.int64)

    i = 0
    while i < n:
        j = i
        while j < n and xs[j] == xs[i]:
            j += 1

        for k in range(i, j):
            if fixed[k]:
                F[k] = base[k]
                continue
            bv = -np.inf
            br = m + 1
            bi = -1
            r = tr[k] - 1
            while r > 0:
                if _better(tv[r], tk[r], ti[r], bv, br, bi):
                    bv = tv[r]
                    br = tk[r]
                    bi = ti[r]
                r -= r & (-r)
            if free_start:
                if bi >= 0 and bv > 0.0:
                    F[k] = ws[k] + bv
                    pred[k] = bi
                else:
                    F[k] = ws[k]
            else:
                if bi >= 0:
                    F[k] = ws[k] + bv
                    pred[k] = bi
                else:
                    F[k] = -np.inf

        for k in range(i, j):
            if F[k] == -np.inf:
                continue
            r = tr[k]
            while r <= m:
                if _better(F[k], tr[k], k, tv[r], tk[r], ti[r]):
                    tv[r] = F[k]
                    tk[r] = tr[k]
                    ti[r] = k
                r += r & (-r)
        i = j
    return F, pred


##
# @brief Offline dominance maxima / 支配領域での最大値(オフライン)
#
# @if japanese
# 各問い合わせ(qx, qr)について、x ≤ qx かつ t順位 ≤ qr の点の値の最大値を返します。点はx昇順、問い合わせもqx昇順で渡します。
# @endif
#
# @if english
# For every query (qx, qr) returns the largest value among points with x <= qx and t-rank <= qr.
# Points and queries must both be sorted by x.
# @endif
@nb.njit(cache=True)
def dominance_max(xs, tr, vals, m, qx, qr):
    n = xs.shape[0]
    q = qx.shape[0]
    tree = np.full(m + 1, -np.inf, dtype=np.float64)
    out = np.full(q, -np.inf, dtype=np.float64)
    p = 0
    for a in range(q):
        while p < n and xs[p] <= qx[a]:
            if vals[p] > -np.inf:
                r = tr[p]
                while r <= m:
                    if vals[p] > tree[r]:
                        tree[r] = vals[p]
                    r += r & (-r)
            p += 1
        best = -np.inf
        r = qr[a]
        if r > m:
            r = m
        while r > 0:
            if tree[r] > best:
                best = tree[r]
            r -= r & (-r)
        out[a] = best
    return out
