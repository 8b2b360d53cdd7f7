# -*- coding: utf-8 -*-
##
# @file tests/test_lpp.py
# @brief Passage times, geodesics, boundary passage and exit points.
#
# @if english
# Small integer-grid instances are checked against exhaustive enumeration; larger Poisson instances check shape
# and symmetry properties.
# @endif
#

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hammerlab.lpp import (
    SourcesSinks,
    boundary_last_passage,
    curvature_bound_holds,
    flux_measure,
    last_passage,
    local_comparison_holds,
    lowest_geodesic,
    passage_from,
    shape_function,
    sources_sinks_passage,
)
from hammerlab.points import (
    AtomicMeasure,
    Rect,
    WeightDistribution,
    WeightedPointSet,
    pushforward,
    sample_atomic_poisson,
    sample_point_set,
)
from oracles import (
    all_chains,
    brute_boundary,
    brute_passage,
    brute_sources_sinks,
    grid_points,
    is_chain,
    step_height,
)

GRID = Rect(-4.0, 9.0, 0.0, 9.0)

cells = st.lists(
    st.tuples(st.integers(1, 6), st.integers(1, 6), st.integers(1, 3)), max_size=8
).map(grid_points)

measures = st.lists(st.tuples(st.integers(-3, 8), st.integers(1, 3)), max_size=5).map(
    lambda pairs: AtomicMeasure.from_pairs([(k + 0.5, float(m)) for k, m in pairs])
)


@st.composite
def distinct_cells(draw, size: int = 8):
    n = draw(st.integers(0, size))
    xs = draw(st.permutations(range(1, size + 1)))[:n]
    ts = draw(st.permutations(range(1, size + 1)))[:n]
    ws = draw(st.lists(st.integers(1, 3), min_size=n, max_size=n))
    return [(float(x), float(t), float(w)) for x, t, w in zip(xs, ts, ws)]


def _reflect_points(points: WeightedPointSet) -> WeightedPointSet:
    r = points.rect
    return WeightedPointSet(Rect(r.t0, r.t1, r.x0, r.x1), points.ts, points.xs, points.ws)


# ------------------------------------------------------------
# 点対点 / Point to point
# ------------------------------------------------------------


@given(cells, st.integers(0, 3), st.integers(0, 3), st.integers(4, 7), st.integers(4, 7))
def test_last_passage_matches_enumeration(pts, px, pt, qx, qt):
    points = WeightedPointSet.from_points(pts, GRID)
    p, q = (float(px), float(pt)), (float(qx), float(qt))
    assert last_passage(points, p, q) == brute_passage(pts, p, q)


def _assert_lowest_maximizer(pts):
    points = WeightedPointSet.from_points(pts, GRID)
    p, q = (0.0, 0.0), (9.0, 9.0)
    geo = lowest_geodesic(points, p, q)
    best = brute_passage(pts, p, q)
    assert geo.value == best
    assert is_chain(geo.points)
    assert set(geo.points) <= set(pts)
    for chain in all_chains(pts, p, q):
        if sum(w for _, _, w in chain) != best:
            continue
        for x in np.arange(0.5, 9.0, 0.5):
            assert geo.height(float(x), 0.0) <= step_height(chain, float(x), 0.0)


@given(distinct_cells())
def test_lowest_geodesic_is_lowest_maximizer(pts):
    _assert_lowest_maximizer(pts)


@given(distinct_cells())
def test_lowest_geodesic_with_unit_weights(pts):
    # [JP] 重み1では最大鎖が多数並ぶ / [EN] unit weights give many tied maximal chains
    _assert_lowest_maximizer([(x, t, 1.0) for x, t, _ in pts])


def test_lowest_geodesic_takes_the_lower_of_two_tied_paths():
    pts = [(1.0, 3.0, 1.0), (3.0, 1.0, 1.0), (4.0, 4.0, 1.0)]
    geo = lowest_geodesic(WeightedPointSet.from_points(pts, GRID), (0.0, 0.0), (9.0, 9.0))
    assert geo.value == 2.0
    assert list(geo.points) == [(3.0, 1.0, 1.0), (4.0, 4.0, 1.0)]


def test_last_passage_rejects_unordered_endpoints():
    points = WeightedPointSet.from_points([(1.0, 1.0, 1.0)], GRID)
    with pytest.raises(ValueError):
        last_passage(points, (2.0, 0.0), (1.0, 5.0))
    with pytest.raises(ValueError):
        last_passage(points, (1.0, 1.0), (1.0, 1.0))


def test_empty_region_has_zero_passage():
    points = WeightedPointSet.from_points([(5.0, 5.0, 2.0)], GRID)
    assert last_passage(points, (0.0, 0.0), (4.0, 4.0)) == 0.0
    assert len(lowest_geodesic(points, (0.0, 0.0), (4.0, 4.0))) == 0


@given(cells)
def test_passage_from_agrees_with_single_queries(pts):
    points = WeightedPointSet.from_points(pts, GRID)
    targets = [(float(x), float(t)) for x in range(0, 8) for t in (0, 3, 7)]
    got = passage_from(points, (0.0, 0.0), targets)
    want = [last_passage(points, (0.0, 0.0), q) if q != (0.0, 0.0) else 0.0 for q in targets]
    assert np.allclose(got, want)


def test_pushforward_keeps_passage_values():
    points = sample_point_set(Rect(0.0, 40.0, 0.0, 40.0), 1.0, WeightDistribution.exponential(), 11)
    for lam in (0.5, 2.0):
        moved = pushforward(points, lam)
        assert math.isclose(
            last_passage(moved, (0.0, 0.0), (40.0 * lam, 40.0 / lam)),
            last_passage(points, (0.0, 0.0), (40.0, 40.0)),
        )


def test_classical_shape_at_moderate_size():
    """L((0,0),(t,t)) is close to 2t on a unit-rate field."""
    t = 200.0
    points = sample_point_set(Rect(0.0, t, 0.0, t), 1.0, WeightDistribution.dirac(), 2024)
    ratio = last_passage(points, (0.0, 0.0), (t, t)) / shape_function(t, t)
    assert 0.9 < ratio < 1.01


def test_shape_function_and_curvature():
    assert shape_function(4.0, 9.0) == 12.0
    assert shape_function(1.0, 1.0, gamma=3.0) == 3.0
    with pytest.raises(ValueError):
        shape_function(0.0, 1.0)
    for s in (0.0, 0.5, 3.0, 8.0, 20.0, 300.0):
        assert curvature_bound_holds(s, 10.0)
    with pytest.raises(ValueError):
        curvature_bound_holds(-1.0, 1.0)


# ------------------------------------------------------------
# 境界つき / With a boundary measure
# ------------------------------------------------------------


@given(measures, cells, st.integers(1, 7), st.integers(1, 7))
def test_boundary_passage_matches_enumeration(nu, pts, x, t):
    points = WeightedPointSet.from_points(pts, GRID)
    res = boundary_last_passage(nu, points, float(x), float(t), window=(-3.0, float(x)))
    value, exit_sup = brute_boundary(nu, pts, float(x), float(t), -3.0)
    assert res.value == pytest.approx(value)
    assert res.exit == pytest.approx(exit_sup)
    assert res.exit_inf <= res.exit_sup
    assert res.geodesic.value + res.boundary == pytest.approx(res.value)


def test_boundary_passage_flags_saturation():
    nu = AtomicMeasure.from_pairs([(-10.0, 50.0), (1.0, 1.0)])
    points = WeightedPointSet.from_points([(2.0, 2.0, 1.0)], GRID)
    res = boundary_last_passage(nu, points, 3.0, 3.0, window=(-3.0, 3.0))
    assert res.saturated
    calm = boundary_last_passage(AtomicMeasure.from_pairs([(1.0, 1.0)]), points, 3.0, 3.0, window=(-3.0, 3.0))
    assert not calm.saturated


def test_boundary_passage_rejects_bad_window():
    points = WeightedPointSet.empty(GRID)
    with pytest.raises(ValueError):
        boundary_last_passage(AtomicMeasure(), points, 1.0, 1.0, window=(2.0, 1.0))
    with pytest.raises(ValueError):
        boundary_last_passage(AtomicMeasure(), points, 1.0, -1.0)


def test_local_comparison_on_poisson_field():
    rect = Rect(-30.0, 30.0, 0.0, 30.0)
    points = sample_point_set(rect, 1.0, WeightDistribution.dirac(), 8)
    nu = sample_atomic_poisson((-30.0, 30.0), 1.0, WeightDistribution.dirac(), 9)
    for x, y in ((1.0, 4.0), (5.0, 12.0), (10.0, 25.0)):
        assert local_comparison_holds(nu, points, x, y, 20.0)


# ------------------------------------------------------------
# ソースとシンク / Sources and sinks
# ------------------------------------------------------------


def test_worked_box_passage_values(worked_box):
    ss, points = worked_box
    assert sources_sinks_passage(ss, points, 6.0, 10.0).value == 17.0
    assert sources_sinks_passage(ss, points, 0.0, 10.0).value == 10.0
    flux = flux_measure(ss, points, [5.0, 10.0])
    assert flux.mass_in(0.0, 5.0) == 4.0
    assert flux.mass_in(0.0, 10.0) == 10.0


@given(
    st.lists(st.tuples(st.integers(0, 6), st.integers(1, 3)), max_size=4),
    st.lists(st.tuples(st.integers(0, 6), st.integers(1, 3)), max_size=4),
    cells,
    st.integers(1, 7),
    st.integers(1, 7),
)
def test_sources_sinks_match_enumeration(src, snk, pts, x, t):
    sources = AtomicMeasure.from_pairs([(k + 0.5, float(m)) for k, m in src if k + 0.5 <= x])
    sinks = AtomicMeasure.from_pairs([(k + 0.5, float(m)) for k, m in snk])
    points = WeightedPointSet.from_points(pts, Rect(0.0, 9.0, 0.0, 9.0))
    res = sources_sinks_passage(SourcesSinks(sources, sinks), points, float(x), float(t))
    value, exit_sup, exit_inf = brute_sources_sinks(sources, sinks, pts, float(x), float(t))
    assert res.value == pytest.approx(value)
    assert res.exit_sup == pytest.approx(exit_sup)
    assert res.exit_inf == pytest.approx(exit_inf)


@given(
    st.lists(st.tuples(st.integers(0, 6), st.integers(1, 3)), max_size=4),
    st.lists(st.tuples(st.integers(0, 6), st.integers(1, 3)), max_size=4),
    cells,
)
def test_diagonal_reflection_swaps_exits(src, snk, pts):
    sources = AtomicMeasure.from_pairs([(k + 0.5, float(m)) for k, m in src])
    sinks = AtomicMeasure.from_pairs([(k + 0.5, float(m)) for k, m in snk])
    ss = SourcesSinks(sources, sinks)
    points = WeightedPointSet.from_points(pts, Rect(0.0, 9.0, 0.0, 9.0))
    res = sources_sinks_passage(ss, points, 7.0, 5.0)
    ref = sources_sinks_passage(ss.reflect(), _reflect_points(points), 5.0, 7.0)
    assert ref.value == pytest.approx(res.value)
    assert ref.exit_sup == pytest.approx(-res.exit_inf)
    assert ref.exit_inf == pytest.approx(-res.exit_sup)


def test_sources_sinks_validation():
    with pytest.raises(ValueError):
        SourcesSinks(AtomicMeasure.from_pairs([(-1.0, 1.0)]), AtomicMeasure())
    with pytest.raises(ValueError):
        SourcesSinks(AtomicMeasure(), AtomicMeasure.from_pairs([(0.0, 1.0)]))
    with pytest.raises(ValueError):
        flux_measure(AtomicMeasure(), WeightedPointSet.empty(GRID), [2.0, 1.0])


@given(st.lists(st.tuples(st.integers(0, 6), st.integers(1, 3)), max_size=4), cells, st.integers(1, 7), st.integers(1, 7))
def test_without_sinks_the_box_is_a_boundary_passage(src, pts, x, t):
    sources = AtomicMeasure.from_pairs([(k + 0.5, float(m)) for k, m in src if k + 0.5 <= x])
    points = WeightedPointSet.from_points(pts, Rect(0.0, 9.0, 0.0, 9.0))
    res = sources_sinks_passage(SourcesSinks(sources, AtomicMeasure()), points, float(x), float(t))
    assert res.value == pytest.approx(brute_boundary(sources, pts, float(x), float(t), 0.0)[0])
    assert res.value == pytest.approx(boundary_last_passage(sources, points, float(x), float(t), (0.0, float(x))).value)


def test_flux_vanishes_without_sinks_or_mass_at_the_origin():
    sources = AtomicMeasure.from_pairs([(1.5, 2.0), (4.5, 1.0)])
    points = WeightedPointSet.from_points([(1.0, 2.0, 1.0), (3.0, 4.0, 2.0)], Rect(0.0, 9.0, 0.0, 9.0))
    flux = flux_measure(SourcesSinks(sources, AtomicMeasure()), points, [2.0, 5.0, 9.0])
    assert len(flux) == 0
