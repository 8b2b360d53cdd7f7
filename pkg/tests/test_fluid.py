# -*- coding: utf-8 -*-
##
# @file tests/test_fluid.py
# @brief Event-driven fluid: the worked box, single moves, ledgers and the passage representation.
#

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hammerlab.experiments import _snapshot_at
from hammerlab.fluid import (
    EV_EAST,
    EV_EXIT,
    EV_POINT,
    EV_SINK,
    FluidState,
    apply_point,
    apply_sink,
    couple_evolve,
    evolve,
    evolve_box,
    generator_step,
)
from hammerlab.lpp import SourcesSinks, boundary_last_passage, sources_sinks_passage
from hammerlab.points import (
    AtomicMeasure,
    Rect,
    WeightDistribution,
    WeightedPointSet,
    derive_seed,
    sample_atomic_poisson,
    sample_point_set,
)

seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ------------------------------------------------------------
# 箱の例 / Worked box
# ------------------------------------------------------------


def test_worked_box_states(worked_box):
    ss, points = worked_box
    run = evolve_box(ss.sources, ss.sinks, points, 10.0, 10.0, record=True)
    assert _snapshot_at(run, 1.0).pairs == [(2.0, 5.0), (5.0, 3.0), (8.0, 7.0)]
    assert _snapshot_at(run, 2.0).pairs == [(2.0, 1.0), (5.0, 3.0), (8.0, 7.0)]
    assert _snapshot_at(run, 5.0).pairs == [(2.0, 1.0), (4.0, 4.0), (8.0, 6.0)]
    assert _snapshot_at(run, 7.0).pairs == [(8.0, 5.0)]
    assert run.measure.pairs == [(6.0, 7.0)]


def test_worked_box_ledgers(worked_box):
    ss, points = worked_box
    run = evolve_box(ss.sources, ss.sinks, points, 10.0, 10.0)
    assert run.exited == 10.0
    assert run.entered == 2.0
    assert run.balance_gap == 0.0
    assert run.left_ledger == [(1.5, 4.0), (6.0, 6.0)]
    assert run.east_ledger == [(8.0, 2.0)]
    assert run.corner_log == [
        (2.0, 1.5, 4.0),
        (5.0, 3.0, 3.0),
        (8.0, 3.0, 1.0),
        (2.0, 6.0, 1.0),
        (4.0, 6.0, 4.0),
        (8.0, 6.0, 1.0),
        (8.0, 8.0, 5.0),
    ]
    kinds = run.event_log()["kind"].tolist()
    assert kinds == [EV_SINK, EV_EXIT, EV_POINT, EV_SINK, EV_EXIT, EV_EAST, EV_POINT]
    assert list(run.corners().columns) == ["x", "t", "mass"]


def test_worked_box_halfway(worked_box):
    ss, points = worked_box
    half = evolve_box(ss.sources, ss.sinks, points, 10.0, 5.0)
    assert half.measure.pairs == [(2.0, 1.0), (4.0, 4.0), (8.0, 6.0)]
    assert half.exited == 4.0
    assert half.entered == 0.0


def test_worked_box_matches_passage_differences(worked_box):
    ss, points = worked_box
    run = evolve_box(ss.sources, ss.sinks, points, 10.0, 10.0)
    base = sources_sinks_passage(ss, points, 0.0, 10.0).value
    for x in (1.0, 4.0, 6.0, 9.0, 10.0):
        assert run.measure.mass_in(0.0, x) == sources_sinks_passage(ss, points, x, 10.0).value - base


def test_sinks_before_points_at_equal_times():
    sources = AtomicMeasure.from_pairs([(2.0, 1.0)])
    sinks = AtomicMeasure.from_pairs([(3.0, 1.0)])
    points = WeightedPointSet.from_points([(1.0, 3.0, 1.0)], Rect(0.0, 5.0, 0.0, 5.0))
    run = evolve_box(sources, sinks, points, 5.0, 5.0)
    # [JP] シンクが先に (2,1) を流出させ、点は東から補う / [EN] the sink drains (2,1) first; the point draws from the east
    assert run.exited == 1.0
    assert run.entered == 1.0
    assert run.measure.pairs == [(1.0, 1.0)]


def test_mass_tolerance_is_passed_to_the_state():
    sources = AtomicMeasure.from_pairs([(2.0, 1.0000005)])
    points = WeightedPointSet.from_points([(1.0, 1.0, 1.0)], Rect(0.0, 5.0, 0.0, 5.0))
    loose = evolve_box(sources, AtomicMeasure(), points, 5.0, 5.0, tol=1e-6)
    assert loose.tol == 1e-6
    assert loose.measure.positions.tolist() == [1.0]
    strict = evolve_box(sources, AtomicMeasure(), points, 5.0, 5.0)
    assert strict.measure.positions.tolist() == [1.0, 2.0]


# ------------------------------------------------------------
# 単一イベント / Single events
# ------------------------------------------------------------


def test_apply_point_pulls_from_the_right():
    st_ = FluidState.start(AtomicMeasure.from_pairs([(2.0, 1.0), (5.0, 3.0)]), (0.0, 10.0))
    apply_point(st_, 1.0, 2.0, time=1.0)
    assert st_.measure.pairs == [(1.0, 2.0), (5.0, 2.0)]
    assert st_.corner_log == [(2.0, 1.0, 1.0), (5.0, 1.0, 1.0)]
    assert st_.entered == 0.0


def test_apply_point_deficit_enters_from_the_east():
    st_ = FluidState.start(AtomicMeasure.from_pairs([(2.0, 1.0)]), (0.0, 10.0))
    apply_point(st_, 1.0, 3.0, time=0.5)
    assert st_.measure.pairs == [(1.0, 3.0)]
    assert st_.east_ledger == [(0.5, 2.0)]
    assert st_.balance_gap == 0.0


def test_apply_point_on_an_existing_atom():
    st_ = FluidState.start(AtomicMeasure.from_pairs([(1.0, 2.0), (3.0, 1.0)]), (0.0, 10.0))
    apply_point(st_, 1.0, 1.0)
    assert st_.measure.pairs == [(1.0, 3.0)]


def test_apply_sink_drains_left_edge():
    st_ = FluidState.start(AtomicMeasure.from_pairs([(1.0, 1.0), (3.0, 2.0)]), (0.0, 10.0))
    apply_sink(st_, 2.0, time=1.0)
    assert st_.measure.pairs == [(3.0, 1.0)]
    assert st_.exited == 2.0
    assert st_.balance_gap == 0.0


def test_event_validation():
    st_ = FluidState.start(AtomicMeasure(), (0.0, 1.0))
    with pytest.raises(ValueError):
        apply_point(st_, 0.5, 0.0)
    with pytest.raises(ValueError):
        apply_sink(st_, -1.0)
    with pytest.raises(ValueError):
        FluidState.start(AtomicMeasure(), (1.0, 1.0))


def test_generator_step():
    moved = generator_step(AtomicMeasure.from_pairs([(2.0, 1.0)]), 0.0, 0.5)
    assert moved.pairs == [(0.0, 0.5), (2.0, 0.5)]


# ------------------------------------------------------------
# 乱数データ / Random data
# ------------------------------------------------------------


def _random_box(seed: int, size: float = 15.0):
    sources = sample_atomic_poisson((0.0, size), 1.0, WeightDistribution.exponential(), derive_seed(seed, 0))
    sinks = sample_atomic_poisson((0.0, size), 1.0, WeightDistribution.exponential(), derive_seed(seed, 1))
    points = sample_point_set(Rect(0.0, size, 0.0, size), 1.0, WeightDistribution.exponential(), derive_seed(seed, 2))
    return SourcesSinks(sources, sinks), points


@given(seeds)
def test_box_mass_balance(seed):
    ss, points = _random_box(seed)
    run = evolve_box(ss.sources, ss.sinks, points, 15.0, 15.0)
    assert abs(run.balance_gap) <= 1e-9 * max(1.0, ss.sources.total + run.entered)
    assert all(m > 0 for m in run.mass)


@given(seeds)
def test_box_state_is_a_passage_difference(seed):
    ss, points = _random_box(seed)
    run = evolve_box(ss.sources, ss.sinks, points, 15.0, 15.0)
    base = sources_sinks_passage(ss, points, 0.0, 15.0).value
    assert run.exited == pytest.approx(base)
    for x in (2.5, 7.0, 11.0, 15.0):
        got = run.measure.mass_in(0.0, x)
        want = sources_sinks_passage(ss, points, x, 15.0).value - base
        assert got == pytest.approx(want, abs=1e-8)


@given(seeds)
def test_whole_line_state_is_a_passage_difference(seed):
    nu = sample_atomic_poisson((-20.0, 20.0), 1.0, WeightDistribution.exponential(), derive_seed(seed, 0))
    points = sample_point_set(Rect(-20.0, 20.0, 0.0, 10.0), 1.0, WeightDistribution.exponential(), derive_seed(seed, 1))
    run = evolve(nu, points, 10.0)
    base = boundary_last_passage(nu, points, 0.0, 10.0).value
    for x in (-12.0, -3.0, 4.0, 15.0):
        lx = boundary_last_passage(nu, points, x, 10.0).value
        got = run.measure.mass_in(0.0, x) if x > 0 else -run.measure.mass_in(x, 0.0)
        assert got == pytest.approx(lx - base, abs=1e-8)


def test_evolve_at_time_zero_keeps_the_window_part():
    nu = AtomicMeasure.from_pairs([(-5.0, 1.0), (1.0, 2.0), (30.0, 1.0)])
    points = sample_point_set(Rect(-10.0, 10.0, 0.0, 5.0), 1.0, WeightDistribution.dirac(), 4)
    run = evolve(nu, points, 0.0)
    assert run.measure.pairs == [(-5.0, 1.0), (1.0, 2.0)]
    with pytest.raises(ValueError):
        evolve(nu, points, -1.0)


@given(seeds)
def test_coupling_preserves_order(seed):
    nu = sample_atomic_poisson((-15.0, 15.0), 1.0, WeightDistribution.dirac(), derive_seed(seed, 0))
    points = sample_point_set(Rect(-15.0, 15.0, 0.0, 8.0), 1.0, WeightDistribution.dirac(), derive_seed(seed, 1))
    extra = nu.plus(AtomicMeasure(np.asarray([0.0]), np.asarray([1.0])))
    low, high = couple_evolve(nu, extra, points, 8.0)
    assert len(low.history) == len(high.history)
    for (s_low, m_low), (s_high, m_high) in zip(low.history, high.history):
        assert s_low == s_high
        assert m_high.dominates(m_low)
    assert math.isclose(high.measure.total - low.measure.total, 1.0 + high.entered - low.entered)


def test_coupling_requires_domination():
    points = sample_point_set(Rect(0.0, 5.0, 0.0, 5.0), 1.0, WeightDistribution.dirac(), 1)
    with pytest.raises(ValueError):
        couple_evolve(AtomicMeasure.from_pairs([(1.0, 2.0)]), AtomicMeasure.from_pairs([(1.0, 1.0)]), points, 1.0)
