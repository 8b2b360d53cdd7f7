# -*- coding: utf-8 -*-
##
# @file tests/oracles.py
# @brief Exhaustive reference implementations for small instances.
#
# @if japanese
# 小さな点集合(12点以下)に対し、全ての部分集合を列挙して最重鎖・境界つき通過時間・出口点を求めます。
# 実装側の掃引とは独立した計算です。
# @endif
#
# @if english
# Enumerates every subset of a small point set (at most 12 points) to get heaviest chains, boundary passage values
# and exit points, independently of the sweep implementation.
# @endif
#

from __future__ import annotations

from itertools import combinations  # [JP] 標準: 部分集合の列挙 / [EN] Standard: subset enumeration
from typing import List, Sequence, Tuple

import numpy as np

from hammerlab.points import AtomicMeasure

Triple = Tuple[float, float, float]


def is_chain(pts: Sequence[Triple]) -> bool:
    s = sorted(pts)
    return all(a[0] < b[0] and a[1] < b[1] for a, b in zip(s, s[1:]))


def in_domain(pt: Triple, p: Tuple[float, float], q: Tuple[float, float]) -> bool:
    return p[0] < pt[0] <= q[0] and p[1] < pt[1] <= q[1]


def all_chains(pts: Sequence[Triple], p: Tuple[float, float], q: Tuple[float, float]) -> List[Tuple[Triple, ...]]:
    usable = [pt for pt in pts if in_domain(pt, p, q)]
    out: List[Tuple[Triple, ...]] = [()]
    for k in range(1, len(usable) + 1):
        for c in combinations(usable, k):
            if is_chain(c):
                out.append(tuple(sorted(c)))
    return out


def brute_passage(pts: Sequence[Triple], p: Tuple[float, float], q: Tuple[float, float]) -> float:
    return max(sum(w for _, _, w in c) for c in all_chains(pts, p, q))


def step_height(chain: Sequence[Triple], x: float, start_t: float) -> float:
    h = start_t
    for px, pt, _ in chain:
        if px < x:
            h = pt
    return h


def _exit_from_profile(cands: np.ndarray, vals: np.ndarray, end: float) -> Tuple[float, float, int]:
    best = float(vals.max())
    k = int(np.flatnonzero(vals >= best - 1e-9)[-1])
    exit_sup = float(cands[k + 1]) if k + 1 < len(cands) else float(end)
    return best, exit_sup, k


##
# @brief sup over z of ν(z) + L((z,0),(x,t)) by enumeration / 列挙による境界つき通過時間
#
# @return (value, exit_sup)  値と最右の最大化点 / Value and rightmost maximizer
def brute_boundary(
    nu: AtomicMeasure, pts: Sequence[Triple], x: float, t: float, z_min: float
) -> Tuple[float, float]:
    atoms = [a for a in nu.positions if z_min <= a <= x]
    xs = [px for px, _, _ in pts if z_min < px <= x]
    cands = np.unique(np.asarray([z_min, x, *atoms, *xs], dtype=np.float64))
    vals = np.asarray([nu.cumulative(z) + brute_passage(pts, (z, 0.0), (x, t)) for z in cands])
    best, exit_sup, _ = _exit_from_profile(cands, vals, x)
    return best, exit_sup


def _l_from_sink(pts: Sequence[Triple], s: float, x: float, t: float) -> float:
    if s >= t or x <= 0:
        return 0.0
    return brute_passage(pts, (0.0, s), (x, t))


def _l_from_source(pts: Sequence[Triple], z: float, x: float, t: float) -> float:
    if z >= x or t <= 0:
        return 0.0
    return brute_passage(pts, (z, 0.0), (x, t))


##
# @brief Box passage with sources and sinks by enumeration / 列挙によるソース・シンクつき通過時間
#
# @return (value, exit_sup, exit_inf)  値と Z̄, Z̄′ / Value with both exits
def brute_sources_sinks(
    sources: AtomicMeasure, sinks: AtomicMeasure, pts: Sequence[Triple], x: float, t: float
) -> Tuple[float, float, float]:
    zs = np.unique(np.asarray([0.0, x, *[a for a in sources.positions if 0 <= a <= x],
                               *[px for px, pt, _ in pts if 0 < px <= x and 0 < pt <= t]], dtype=np.float64))
    ss = np.unique(np.asarray([0.0, t, *[a for a in sinks.positions if 0 < a <= t],
                               *[pt for px, pt, _ in pts if 0 < px <= x and 0 < pt <= t]], dtype=np.float64))
    f_src = np.asarray([sources.cumulative(z) + _l_from_source(pts, z, x, t) for z in zs])
    f_snk = np.asarray([sinks.cumulative(s) + _l_from_sink(pts, s, x, t) for s in ss])
    best = float(max(f_src.max(), f_snk.max()))
    tol = 1e-9 * max(1.0, abs(best))
    src_hits = np.flatnonzero(f_src >= best - tol)
    snk_hits = np.flatnonzero(f_snk >= best - tol)
    if len(src_hits):
        i = int(src_hits[-1])
        exit_sup = float(zs[i + 1]) if i + 1 < len(zs) else float(x)
    else:
        exit_sup = -float(ss[int(snk_hits[0])])
    if len(snk_hits):
        j = int(snk_hits[-1])
        exit_inf = -float(ss[j + 1]) if j + 1 < len(ss) else -float(t)
    else:
        exit_inf = float(zs[int(src_hits[0])])
    return best, exit_sup, exit_inf


def grid_points(cells: Sequence[Tuple[int, int, int]]) -> List[Triple]:
    """Drop repeated (x, t) cells, keeping the first weight."""
    seen = set()
    out: List[Triple] = []
    for x, t, w in cells:
        if (x, t) in seen:
            continue
        seen.add((x, t))
        out.append((float(x), float(t), float(w)))
    return out
